/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "triage/severity.hpp"

namespace triage {

/// One contract with its label and (optional) analyzer output.
///
/// `vulnerabilities == nullopt` means analysis failed or has not run yet; an
/// empty list means the contract was analyzed and nothing was found. When the
/// names are present, `confidences` and `impacts` are present and aligned.
struct ContractRecord {
    std::optional<std::string> address;
    std::string source;
    bool malicious = false;
    std::optional<std::vector<std::string>> vulnerabilities;
    std::optional<std::vector<Severity>> confidences;
    std::optional<std::vector<Severity>> impacts;

    bool analyzed() const noexcept { return vulnerabilities.has_value(); }

    friend bool operator==(const ContractRecord&, const ContractRecord&) = default;
};

using Corpus = std::vector<ContractRecord>;

/// "0x" followed by exactly 40 hex digits (either case).
bool is_valid_address(std::string_view address) noexcept;

/// Throws Error(InvalidArgument) naming the violated record invariant.
void validate_record(const ContractRecord& record);

// JSON Lines persistence. Field names: contract_address, contract_source,
// malicious, vulnerability, confidence, impact.
std::string record_to_json_line(const ContractRecord& record);
ContractRecord record_from_json_line(std::string_view line);

/// Throws Error(Io) if unreadable, Error(Parse, detail = 1-based line) on a bad line.
Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const Corpus& records, const std::filesystem::path& path);

/// CSV with the same column names; list cells hold JSON arrays. Missing
/// confidence/impact columns are filled from the built-in detector registry.
Corpus import_csv(const std::filesystem::path& path);

/// Dispatches on extension: ".csv" goes through import_csv, anything else is
/// read as JSON Lines.
Corpus load_any(const std::filesystem::path& path);

/// Keeps the records whose analysis succeeded, in order.
Corpus filter_analyzed(const Corpus& records);

/// Number of malicious records for a target size: round-half-up of size*ratio.
std::size_t malicious_quota(std::size_t target_size, double malicious_ratio);

/// Seeded sampling without replacement that yields exactly
/// malicious_quota(target_size, ratio) malicious records and fills the rest
/// with benign ones. Output preserves the input's relative order.
Corpus stratified_reduce(const Corpus& records, std::size_t target_size, double malicious_ratio,
                         std::uint64_t seed);

/// Largest size <= records.size() that stratified_reduce can satisfy at `ratio`.
std::size_t max_feasible_target(const Corpus& records, double malicious_ratio);

std::size_t count_malicious(const Corpus& records) noexcept;

} // namespace triage
