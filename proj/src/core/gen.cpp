/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include "triage/gen.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "embedded_snippets.hpp"
#include "text.hpp"
#include "triage/error.hpp"
#include "triage/random.hpp"

namespace triage {

namespace {

constexpr std::string_view kVulnerableHeader = "@@ vulnerable";
constexpr std::string_view kRepairedHeader = "@@ repaired";

constexpr std::string_view kNames[] = {"Vault",  "Treasury", "Ledger", "Escrow", "Registry",
                                       "Bank",   "Pool",     "Market", "Keeper", "Reserve"};

std::vector<std::string_view> split_lines_keep(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        end = end == std::string_view::npos ? text.size() : end + 1;
        lines.push_back(text.substr(start, end - start));
        start = end;
    }
    return lines;
}

std::string_view strip_eol(std::string_view line) {
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
    return line;
}

std::string replace_all(std::string text, std::string_view key, std::string_view value) {
    for (std::size_t p = text.find(key); p != std::string::npos; p = text.find(key, p + value.size())) {
        text.replace(p, key.size(), value);
    }
    return text;
}

} // namespace

SnippetBank::SnippetBank(std::vector<SnippetPair> pairs, std::vector<BaseTemplate> bases,
                         std::vector<BaseTemplate> extras)
    : pairs_(std::move(pairs)), bases_(std::move(bases)), extras_(std::move(extras)) {
    sort();
}

void SnippetBank::sort() {
    auto by_detector = [](const SnippetPair& a, const SnippetPair& b) { return a.detector < b.detector; };
    auto by_name = [](const BaseTemplate& a, const BaseTemplate& b) { return a.name < b.name; };
    std::sort(pairs_.begin(), pairs_.end(), by_detector);
    std::sort(bases_.begin(), bases_.end(), by_name);
    std::sort(extras_.begin(), extras_.end(), by_name);
}

void SnippetBank::add_file(std::string_view file_name, std::string_view text) {
    const std::string where(file_name);
    const auto lines = split_lines_keep(text);
    if (lines.empty() || strip_eol(lines[0]) != "---") {
        throw Error(ErrorCode::Parse, where + ": missing front matter", 1);
    }
    std::map<std::string, std::string> meta;
    std::size_t i = 1;
    for (; i < lines.size(); ++i) {
        const auto line = strip_eol(lines[i]);
        if (line == "---") break;
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) {
            throw Error(ErrorCode::Parse, where + ": bad front matter line", static_cast<long>(i + 1));
        }
        meta[std::string(text::trim(line.substr(0, colon)))] = std::string(text::trim(line.substr(colon + 1)));
    }
    if (i >= lines.size()) throw Error(ErrorCode::Parse, where + ": unterminated front matter");
    ++i;

    std::string body;
    for (std::size_t k = i; k < lines.size(); ++k) body += lines[k];

    if (auto it = meta.find("detector"); it != meta.end()) {
        SnippetPair pair;
        pair.detector = it->second;
        std::string* section = nullptr;
        for (std::size_t k = i; k < lines.size(); ++k) {
            const auto line = strip_eol(lines[k]);
            if (line == kVulnerableHeader) section = &pair.vulnerable;
            else if (line == kRepairedHeader) section = &pair.repaired;
            else if (section) section->append(lines[k]);
            else if (!text::trim(line).empty()) {
                throw Error(ErrorCode::Parse, where + ": text before the first section", static_cast<long>(k + 1));
            }
        }
        if (pair.detector.empty() || pair.vulnerable.empty() || pair.repaired.empty()) {
            throw Error(ErrorCode::Parse, where + ": snippet needs a detector and both sections");
        }
        if (find(pair.detector)) throw Error(ErrorCode::Parse, where + ": duplicate detector " + pair.detector);
        pairs_.push_back(std::move(pair));
    } else if (auto base = meta.find("base"); base != meta.end()) {
        if (body.find(kInjectionMarker) == std::string::npos) {
            throw Error(ErrorCode::Parse, where + ": base template lacks the injection marker line");
        }
        bases_.push_back({base->second, std::move(body)});
    } else if (auto extra = meta.find("extra"); extra != meta.end()) {
        extras_.push_back({extra->second, std::move(body)});
    } else {
        throw Error(ErrorCode::Parse, where + ": front matter needs detector, base, or extra");
    }
    sort();
}

const SnippetBank& SnippetBank::builtin() {
    static const SnippetBank bank = [] {
        SnippetBank b;
        for (const auto& f : embedded::snippet_files()) b.add_file(f.name, f.text);
        return b;
    }();
    return bank;
}

SnippetBank SnippetBank::load_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) throw Error(ErrorCode::Io, "not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    SnippetBank bank;
    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
        std::stringstream buffer;
        buffer << in.rdbuf();
        bank.add_file(path.filename().string(), buffer.str());
    }
    return bank;
}

const SnippetPair* SnippetBank::find(std::string_view detector) const {
    for (const auto& p : pairs_) {
        if (p.detector == detector) return &p;
    }
    return nullptr;
}

std::vector<std::string> SnippetBank::detectors() const {
    std::vector<std::string> out;
    for (const auto& p : pairs_) out.push_back(p.detector);
    return out;
}

std::string SnippetBank::repair(std::string_view source) const {
    std::string out(source);
    for (const auto& p : pairs_) out = replace_all(std::move(out), p.vulnerable, p.repaired);
    return out;
}

namespace {

std::string make_address(Rng& rng) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string address = "0x";
    for (int i = 0; i < 40; ++i) address += kHex[uniform_below(rng, 16)];
    return address;
}

ContractRecord assemble(std::uint64_t seed, const std::vector<const SnippetPair*>& chosen, const SnippetBank& bank) {
    if (bank.bases().empty()) throw Error(ErrorCode::InvalidArgument, "snippet bank has no base templates");
    auto rng = make_rng(seed, 0);
    const auto& base = bank.bases()[uniform_below(rng, bank.bases().size())];
    const std::string name =
        std::string(kNames[uniform_below(rng, std::size(kNames))]) + std::to_string(1 + uniform_below(rng, 999));
    const std::string number = std::to_string(10 + uniform_below(rng, 990));

    std::vector<std::size_t> extra_order(bank.extras().size());
    for (std::size_t i = 0; i < extra_order.size(); ++i) extra_order[i] = i;
    shuffle(extra_order.begin(), extra_order.end(), rng);
    const std::size_t n_extras = std::min<std::size_t>(extra_order.size(), uniform_below(rng, 3));
    std::sort(extra_order.begin(), extra_order.begin() + static_cast<std::ptrdiff_t>(n_extras));

    std::string injected;
    for (std::size_t k = 0; k < n_extras; ++k) {
        injected += '\n';
        injected += bank.extras()[extra_order[k]].text;
    }
    for (const auto* pair : chosen) {
        injected += '\n';
        injected += pair->vulnerable;
    }

    std::string text = base.text;
    const auto marker = text.find(kInjectionMarker);
    text.replace(marker, kInjectionMarker.size(), injected);
    text = replace_all(std::move(text), "{{NAME}}", name);
    text = replace_all(std::move(text), "{{NUMBER}}", number);

    ContractRecord record;
    record.address = make_address(rng);
    record.source = std::move(text);
    record.malicious = !chosen.empty();
    return record;
}

} // namespace

ContractRecord generate_contract_with(std::uint64_t seed, const std::vector<std::string>& detectors,
                                      const SnippetBank& bank) {
    std::vector<const SnippetPair*> chosen;
    std::set<std::string> seen;
    for (const auto& d : detectors) {
        const auto* pair = bank.find(d);
        if (!pair) throw Error(ErrorCode::UnknownDetector, "UnknownDetector(" + d + ") in snippet bank");
        if (!seen.insert(d).second) throw Error(ErrorCode::InvalidArgument, "detector listed twice: " + d);
        chosen.push_back(pair);
    }
    std::sort(chosen.begin(), chosen.end(),
              [](const SnippetPair* a, const SnippetPair* b) { return a->detector < b->detector; });
    return assemble(seed, chosen, bank);
}

ContractRecord generate_contract(std::uint64_t seed, bool malicious, std::size_t n_vulns, const SnippetBank& bank) {
    if (!malicious) {
        if (n_vulns != 0) throw Error(ErrorCode::InvalidArgument, "benign contracts take n_vulns = 0");
        return assemble(seed, {}, bank);
    }
    const auto& pairs = bank.pairs();
    if (n_vulns > pairs.size()) {
        throw Error(ErrorCode::TooManyVulns, "TooManyVulns: asked for " + std::to_string(n_vulns) + ", bank has " +
                                                 std::to_string(pairs.size()));
    }
    if (n_vulns == 0) throw Error(ErrorCode::InvalidArgument, "malicious contracts need at least one snippet");
    auto rng = make_rng(seed, 1);
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle(order.begin(), order.end(), rng);
    std::vector<std::string> names;
    for (std::size_t k = 0; k < n_vulns; ++k) names.push_back(pairs[order[k]].detector);
    return generate_contract_with(seed, names, bank);
}

Corpus generate_corpus(std::size_t n, double malicious_ratio, std::uint64_t seed, const SnippetBank& bank) {
    const std::size_t n_malicious = malicious_quota(n, malicious_ratio);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    auto rng = make_rng(seed, 0x6e6e);
    shuffle(order.begin(), order.end(), rng);
    std::vector<bool> is_malicious(n, false);
    for (std::size_t k = 0; k < n_malicious; ++k) is_malicious[order[k]] = true;

    const std::size_t max_vulns = std::min<std::size_t>(3, bank.pairs().size());
    Corpus corpus;
    corpus.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto record_seed = derive_seed(seed, i);
        if (is_malicious[i]) {
            auto pick = make_rng(record_seed, 2);
            corpus.push_back(generate_contract(record_seed, true, 1 + uniform_below(pick, max_vulns), bank));
        } else {
            corpus.push_back(generate_contract(record_seed, false, 0, bank));
        }
    }
    return corpus;
}

} // namespace triage
