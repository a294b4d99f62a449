/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "triage/error.hpp"
#include "triage/net.hpp"

namespace triage {

struct FetchConfig {
    std::string endpoint = "https://api.etherscan.io/api";
    std::string api_key;
    std::chrono::milliseconds min_interval{2000};
    std::filesystem::path cache_dir = "cache";
    std::uint32_t max_retries = 3;

    /// ETHERSCAN_API_KEY wins over `api_key` when set.
    std::string effective_api_key() const;
};

struct FetchFailure {
    ErrorCode code;
    std::string message;
    long detail = 0;
};

struct FetchOutcome {
    std::string address;
    std::variant<std::string, FetchFailure> result;

    bool ok() const noexcept { return result.index() == 0; }
    const std::string& source() const { return std::get<std::string>(result); }
    const FetchFailure& failure() const { return std::get<FetchFailure>(result); }
};

/// Turns a getsourcecode JSON body into source text. Multi-file payloads
/// (standard-JSON input, with or without the doubled outer braces) are
/// flattened by concatenating file contents in manifest order.
/// Throws Error(NotVerified) for an empty SourceCode, Error(RateLimited) for
/// an API-level throttle message, Error(Parse) for anything unexpected.
std::string parse_source_response(std::string_view body);

/// Lower bound on batch wall time: one min_interval per network request.
std::chrono::milliseconds projected_batch_duration(std::size_t uncached_requests,
                                                   std::chrono::milliseconds min_interval);

/// Block-explorer client with a client-side fixed-interval rate limit and an
/// on-disk cache keyed by lowercase address.
class SourceFetcher {
public:
    SourceFetcher(FetchConfig config, HttpTransport& transport, Clock& clock);

    /// Cache hit bypasses the network and the rate limit. Throws
    /// Error(InvalidArgument | NotVerified | Http | RateLimited | Parse).
    std::string fetch_source(std::string_view address);

    /// Sequential; per-address failures are reported, never thrown.
    std::vector<FetchOutcome> fetch_batch(const std::vector<std::string>& addresses);

    std::string request_url(std::string_view address) const;
    std::filesystem::path cache_path(std::string_view address) const;
    std::optional<std::string> cached(std::string_view address) const;

    std::size_t network_requests() const noexcept { return network_requests_; }
    std::size_t cache_hits() const noexcept { return cache_hits_; }

private:
    void wait_for_slot();
    void store(std::string_view address, const std::string& source) const;

    FetchConfig config_;
    HttpTransport& transport_;
    Clock& clock_;
    std::optional<Clock::Duration> last_request_;
    std::size_t network_requests_ = 0;
    std::size_t cache_hits_ = 0;
};

} // namespace triage
