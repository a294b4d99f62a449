/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "triage/corpus.hpp"

namespace triage {

/// A vulnerable code block and its fixed counterpart, keyed by the detector
/// that flags the vulnerable one.
struct SnippetPair {
    std::string detector;
    std::string vulnerable;
    std::string repaired;
    friend bool operator==(const SnippetPair&, const SnippetPair&) = default;
};

/// Benign contract skeleton (or benign helper block). `{{NAME}}` and
/// `{{NUMBER}}` are filled per record; helpers and snippets replace the
/// injection marker line.
struct BaseTemplate {
    std::string name;
    std::string text;
    friend bool operator==(const BaseTemplate&, const BaseTemplate&) = default;
};

inline constexpr std::string_view kInjectionMarker = "    /*@INJECT@*/\n";

class SnippetBank {
public:
    SnippetBank() = default;
    SnippetBank(std::vector<SnippetPair> pairs, std::vector<BaseTemplate> bases,
                std::vector<BaseTemplate> extras = {});

    /// The bank compiled into the library from data/snippets.
    static const SnippetBank& builtin();

    /// Reads every file in `dir`. Front matter names the kind: `detector:`
    /// (a pair split by `@@ vulnerable` / `@@ repaired` lines), `base:` (a
    /// contract skeleton), or `extra:` (a benign helper block).
    static SnippetBank load_directory(const std::filesystem::path& dir);
    /// Parses one file's text; `file_name` is only used in error messages.
    void add_file(std::string_view file_name, std::string_view text);

    const std::vector<SnippetPair>& pairs() const noexcept { return pairs_; }
    const std::vector<BaseTemplate>& bases() const noexcept { return bases_; }
    const std::vector<BaseTemplate>& extras() const noexcept { return extras_; }
    const SnippetPair* find(std::string_view detector) const;
    std::vector<std::string> detectors() const;

    /// Swaps every vulnerable block found in `source` for its repaired pair.
    std::string repair(std::string_view source) const;

    friend bool operator==(const SnippetBank&, const SnippetBank&) = default;

private:
    void sort();

    std::vector<SnippetPair> pairs_;
    std::vector<BaseTemplate> bases_;
    std::vector<BaseTemplate> extras_;
};

/// Deterministic per seed. Malicious records get `n_vulns` distinct snippets
/// chosen by the seed; vulnerabilities stay null until analysis.
/// Throws Error(TooManyVulns) / Error(InvalidArgument).
ContractRecord generate_contract(std::uint64_t seed, bool malicious, std::size_t n_vulns,
                                 const SnippetBank& bank = SnippetBank::builtin());

/// Same, with an explicit snippet selection (empty list = benign).
ContractRecord generate_contract_with(std::uint64_t seed, const std::vector<std::string>& detectors,
                                      const SnippetBank& bank = SnippetBank::builtin());

/// round(n * ratio) malicious records (1..3 snippets each), the rest benign;
/// record i uses seed derived from (seed, i).
Corpus generate_corpus(std::size_t n, double malicious_ratio, std::uint64_t seed,
                       const SnippetBank& bank = SnippetBank::builtin());

} // namespace triage
