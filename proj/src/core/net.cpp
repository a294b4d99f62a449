/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "triage/net.hpp"

#include <cstdlib>
#include <thread>

#include "triage/error.hpp"

namespace triage {

ParsedUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorCode::InvalidArgument, "URL lacks a scheme: " + url);
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw Error(ErrorCode::InvalidArgument, "unsupported URL scheme: " + scheme);
    }
    const auto host_start = scheme_end + 3;
    const auto path_start = url.find_first_of("/?", host_start);
    ParsedUrl parsed;
    parsed.scheme_host_port = url.substr(0, path_start);
    if (parsed.scheme_host_port.size() <= host_start) throw Error(ErrorCode::InvalidArgument, "URL lacks a host: " + url);
    parsed.path_and_query = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (parsed.path_and_query.front() == '?') parsed.path_and_query.insert(0, "/");
    return parsed;
}

std::string url_encode(const std::string& text) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += kHex[c >> 4];
            out += kHex[c & 0xF];
        }
    }
    return out;
}

namespace {

class HttplibTransport final : public HttpTransport {
public:
    explicit HttplibTransport(std::chrono::milliseconds timeout) : timeout_(timeout) {}

    HttpResponse get(const std::string& url, const HttpHeaders& headers) override {
        auto parsed = split_url(url);
        auto client = make_client(parsed);
        return convert(client.Get(parsed.path_and_query, to_headers(headers)), url);
    }

    HttpResponse post(const std::string& url, const HttpHeaders& headers, const std::string& body,
                      const std::string& content_type) override {
        auto parsed = split_url(url);
        auto client = make_client(parsed);
        return convert(client.Post(parsed.path_and_query, to_headers(headers), body, content_type), url);
    }

private:
    httplib::Client make_client(const ParsedUrl& parsed) const {
        httplib::Client client(parsed.scheme_host_port);
        const auto secs = static_cast<time_t>(timeout_.count() / 1000);
        const auto usecs = static_cast<time_t>((timeout_.count() % 1000) * 1000);
        client.set_connection_timeout(secs, usecs);
        client.set_read_timeout(secs, usecs);
        client.set_write_timeout(secs, usecs);
        client.set_follow_location(true);
        return client;
    }

    static httplib::Headers to_headers(const HttpHeaders& headers) {
        return httplib::Headers(headers.begin(), headers.end());
    }

    static HttpResponse convert(const httplib::Result& result, const std::string& url) {
        if (!result) {
            const auto err = result.error();
            if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
                throw Error(ErrorCode::Timeout, "TimeoutError: " + url + " (" + httplib::to_string(err) + ")");
            }
            throw Error(ErrorCode::Http, "request to " + url + " failed: " + httplib::to_string(err), 0);
        }
        return {result->status, result->body};
    }

    std::chrono::milliseconds timeout_;
};

} // namespace

std::unique_ptr<HttpTransport> make_http_transport(std::chrono::milliseconds timeout) {
    return std::make_unique<HttplibTransport>(timeout);
}

Clock::Duration SteadyClock::now() {
    return std::chrono::duration_cast<Duration>(std::chrono::steady_clock::now().time_since_epoch());
}

void SteadyClock::sleep_for(Duration d) {
    if (d.count() > 0) std::this_thread::sleep_for(d);
}

std::string env_or_empty(const char* name) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::string();
}

} // namespace triage
