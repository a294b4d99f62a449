/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "triage/net.hpp"

namespace fakes {

inline std::string fixture(const std::string& name) {
    std::ifstream in(std::string(TRIAGE_FIXTURES_DIR) + "/" + name, std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + name);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct Request {
    std::string method;
    std::string url;
    triage::HttpHeaders headers;
    std::string body;
};

// Replays queued responses; the last one repeats once the queue drains.
class Transport final : public triage::HttpTransport {
public:
    void push(int status, std::string body) { queue_.push_back({status, std::move(body)}); }

    triage::HttpResponse get(const std::string& url, const triage::HttpHeaders& headers) override {
        return next({"GET", url, headers, {}});
    }
    triage::HttpResponse post(const std::string& url, const triage::HttpHeaders& headers, const std::string& body,
                              const std::string&) override {
        return next({"POST", url, headers, body});
    }

    std::vector<Request> requests;

private:
    triage::HttpResponse next(Request r) {
        requests.push_back(std::move(r));
        if (queue_.empty()) throw std::runtime_error("fake transport has no response queued");
        auto response = queue_.front();
        if (queue_.size() > 1) queue_.pop_front();
        return response;
    }
    std::deque<triage::HttpResponse> queue_;
};

// Virtual time: sleeping advances the clock instantly.
class Clock final : public triage::Clock {
public:
    Duration now() override { return now_; }
    void sleep_for(Duration d) override {
        sleeps.push_back(d);
        if (d.count() > 0) now_ += d;
    }
    void advance(Duration d) { now_ += d; }

    std::vector<Duration> sleeps;

private:
    Duration now_{1000000};
};

} // namespace fakes
