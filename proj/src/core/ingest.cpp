/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include "triage/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "text.hpp"
#include "triage/corpus.hpp"

namespace triage {

using ordered_json = nlohmann::ordered_json;

std::string FetchConfig::effective_api_key() const {
    auto env = env_or_empty("ETHERSCAN_API_KEY");
    return env.empty() ? api_key : env;
}

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_throttle_message(std::string_view text) {
    const auto lowered = lowercase(text);
    return lowered.find("rate limit") != std::string::npos;
}

/// Standard-JSON payloads arrive as "{{...}}" or as a bare file map.
std::optional<std::string> flatten_multi_file(const std::string& source) {
    const auto trimmed = text::trim(source);
    if (trimmed.empty() || trimmed.front() != '{') return std::nullopt;
    std::string_view payload = trimmed;
    if (payload.starts_with("{{") && payload.ends_with("}}")) payload = payload.substr(1, payload.size() - 2);
    ordered_json j;
    try {
        j = ordered_json::parse(payload);
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
    if (!j.is_object()) return std::nullopt;
    const ordered_json* files = &j;
    if (auto it = j.find("sources"); it != j.end() && it->is_object()) files = &*it;
    std::string flattened;
    bool any = false;
    for (const auto& [path, entry] : files->items()) {
        if (!entry.is_object() || !entry.contains("content") || !entry["content"].is_string()) continue;
        if (any) flattened += '\n';
        flattened += entry["content"].get<std::string>();
        any = true;
    }
    if (!any) return std::nullopt;
    return flattened;
}

} // namespace

std::string parse_source_response(std::string_view body) {
    ordered_json j;
    try {
        j = ordered_json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("explorer response is not JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::Parse, "explorer response is not an object");
    const auto result = j.find("result");
    if (result == j.end()) throw Error(ErrorCode::Parse, "explorer response has no 'result'");
    if (result->is_string()) {
        const auto message = result->get<std::string>();
        if (is_throttle_message(message)) throw Error(ErrorCode::RateLimited, "RateLimited: " + message);
        throw Error(ErrorCode::Parse, "explorer error: " + message);
    }
    if (!result->is_array() || result->empty() || !(*result)[0].is_object()) {
        throw Error(ErrorCode::Parse, "explorer response 'result' is not a non-empty array");
    }
    const auto& entry = (*result)[0];
    const auto source = entry.find("SourceCode");
    if (source == entry.end() || !source->is_string()) {
        throw Error(ErrorCode::Parse, "explorer response lacks result[0].SourceCode");
    }
    const auto text_value = source->get<std::string>();
    if (text::trim(text_value).empty()) {
        std::string contract;
        if (auto name = entry.find("ContractName"); name != entry.end() && name->is_string()) {
            contract = name->get<std::string>();
        }
        throw Error(ErrorCode::NotVerified,
                    "NotVerified: no verified source" + (contract.empty() ? std::string() : " for " + contract));
    }
    if (auto flat = flatten_multi_file(text_value)) return *flat;
    return text_value;
}

std::chrono::milliseconds projected_batch_duration(std::size_t uncached_requests,
                                                   std::chrono::milliseconds min_interval) {
    return min_interval * static_cast<long long>(uncached_requests);
}

SourceFetcher::SourceFetcher(FetchConfig config, HttpTransport& transport, Clock& clock)
    : config_(std::move(config)), transport_(transport), clock_(clock) {
    if (config_.min_interval.count() < 0) throw Error(ErrorCode::InvalidArgument, "min_interval must be >= 0");
}

std::string SourceFetcher::request_url(std::string_view address) const {
    return config_.endpoint + "?module=contract&action=getsourcecode&address=" + std::string(address) +
           "&apikey=" + url_encode(config_.effective_api_key());
}

std::filesystem::path SourceFetcher::cache_path(std::string_view address) const {
    return config_.cache_dir / (lowercase(address) + ".sol");
}

std::optional<std::string> SourceFetcher::cached(std::string_view address) const {
    std::ifstream in(cache_path(address), std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void SourceFetcher::store(std::string_view address, const std::string& source) const {
    std::error_code ec;
    std::filesystem::create_directories(config_.cache_dir, ec);
    const auto final_path = cache_path(address);
    auto tmp = final_path;
    tmp += ".part";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write cache file " + tmp.string());
        out << source;
        if (!out.flush()) throw Error(ErrorCode::Io, "cannot write cache file " + tmp.string());
    }
    std::filesystem::rename(tmp, final_path, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot move cache file into place: " + ec.message());
}

void SourceFetcher::wait_for_slot() {
    if (last_request_) {
        const auto ready = *last_request_ + config_.min_interval;
        const auto now = clock_.now();
        if (now < ready) clock_.sleep_for(ready - now);
    }
    last_request_ = clock_.now();
}

std::string SourceFetcher::fetch_source(std::string_view address) {
    if (!is_valid_address(address)) {
        throw Error(ErrorCode::InvalidArgument, "malformed address '" + std::string(address) + "'");
    }
    if (auto hit = cached(address)) {
        ++cache_hits_;
        return *hit;
    }
    const auto url = request_url(address);
    for (std::uint32_t attempt = 0;; ++attempt) {
        wait_for_slot();
        ++network_requests_;
        const auto response = transport_.get(url, {});
        const bool retryable_status = response.status == 429 || response.status >= 500;
        if (response.status != 200) {
            if (retryable_status && attempt < config_.max_retries) {
                clock_.sleep_for(config_.min_interval * (1LL << std::min<std::uint32_t>(attempt, 10)));
                continue;
            }
            throw Error(ErrorCode::Http, "HttpError(" + std::to_string(response.status) + ")", response.status);
        }
        try {
            auto source = parse_source_response(response.body);
            store(address, source);
            return source;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::RateLimited && attempt < config_.max_retries) {
                clock_.sleep_for(config_.min_interval * (1LL << std::min<std::uint32_t>(attempt, 10)));
                continue;
            }
            throw;
        }
    }
}

std::vector<FetchOutcome> SourceFetcher::fetch_batch(const std::vector<std::string>& addresses) {
    std::vector<FetchOutcome> outcomes;
    outcomes.reserve(addresses.size());
    for (const auto& address : addresses) {
        try {
            outcomes.push_back({address, fetch_source(address)});
        } catch (const Error& e) {
            outcomes.push_back({address, FetchFailure{e.code(), e.what(), e.detail()}});
        }
    }
    return outcomes;
}

} // namespace triage
