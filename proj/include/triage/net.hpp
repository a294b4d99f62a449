/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>

namespace triage {

struct HttpResponse {
    int status = 0;
    std::string body;
};

using HttpHeaders = std::map<std::string, std::string>;

/// Blocking HTTP client seam. Implementations throw Error(Timeout) when the
/// request times out and Error(Http, detail = 0) when no response arrives.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse get(const std::string& url, const HttpHeaders& headers) = 0;
    virtual HttpResponse post(const std::string& url, const HttpHeaders& headers,
                              const std::string& body, const std::string& content_type) = 0;
};

/// cpp-httplib backed transport (http and https).
std::unique_ptr<HttpTransport> make_http_transport(std::chrono::milliseconds timeout);

struct ParsedUrl {
    std::string scheme_host_port;  // "https://api.example.com:8443"
    std::string path_and_query;    // "/api?x=1", "/" when empty
};

/// Throws Error(InvalidArgument) for anything other than http(s)://host[...].
ParsedUrl split_url(const std::string& url);

/// Percent-encodes everything outside the RFC 3986 unreserved set.
std::string url_encode(const std::string& text);

/// Time source for rate limiting; the fake in tests advances instantly.
class Clock {
public:
    using Duration = std::chrono::milliseconds;
    virtual ~Clock() = default;
    virtual Duration now() = 0;
    virtual void sleep_for(Duration d) = 0;
};

class SteadyClock final : public Clock {
public:
    Duration now() override;
    void sleep_for(Duration d) override;
};

/// Reads an environment variable; empty string when unset.
std::string env_or_empty(const char* name);

} // namespace triage
