/*
 * Copyright 2026 The contract-triage Authors.
 * SPDX-License-Identifier: Apache-2.0
 */
#include "triage/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csv.hpp"
#include "triage/analyzer.hpp"
#include "triage/error.hpp"
#include "triage/random.hpp"

namespace triage {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kAddress = "contract_address";
constexpr const char* kSource = "contract_source";
constexpr const char* kMalicious = "malicious";
constexpr const char* kVulnerability = "vulnerability";
constexpr const char* kConfidence = "confidence";
constexpr const char* kImpact = "impact";

std::optional<std::vector<std::string>> string_list(const json& value, const char* field) {
    if (value.is_null()) return std::nullopt;
    if (!value.is_array()) {
        throw Error(ErrorCode::Parse, std::string(field) + " must be an array or null");
    }
    std::vector<std::string> out;
    out.reserve(value.size());
    for (const auto& item : value) {
        if (!item.is_string()) {
            throw Error(ErrorCode::Parse, std::string(field) + " entries must be strings");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

std::optional<std::vector<Severity>> severity_list(const json& value, const char* field) {
    auto names = string_list(value, field);
    if (!names) return std::nullopt;
    std::vector<Severity> out;
    out.reserve(names->size());
    for (const auto& n : *names) {
        auto s = parse_severity(n);
        if (!s) throw Error(ErrorCode::Parse, std::string(field) + ": unknown level '" + n + "'");
        out.push_back(*s);
    }
    return out;
}

ordered_json severity_json(const std::optional<std::vector<Severity>>& levels) {
    if (!levels) return nullptr;
    ordered_json arr = ordered_json::array();
    for (Severity s : *levels) arr.push_back(std::string(name(s)));
    return arr;
}

const json& field_or_null(const json& object, const char* key) {
    static const json null_value;
    auto it = object.find(key);
    return it == object.end() ? null_value : *it;
}

bool parse_bool_cell(std::string_view cell) {
    std::string lowered(cell);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lowered == "true" || lowered == "1") return true;
    if (lowered == "false" || lowered == "0") return false;
    throw Error(ErrorCode::Parse, "malicious cell must be true/false, got '" + std::string(cell) + "'");
}

std::string rethrow_context(const std::filesystem::path& path, std::size_t line, const std::string& what) {
    return path.string() + ":" + std::to_string(line) + ": " + what;
}

} // namespace

bool is_valid_address(std::string_view address) noexcept {
    if (address.size() != 42 || address[0] != '0' || address[1] != 'x') return false;
    return std::all_of(address.begin() + 2, address.end(),
                       [](unsigned char c) { return std::isxdigit(c) != 0; });
}

void validate_record(const ContractRecord& record) {
    if (record.address && !is_valid_address(*record.address)) {
        throw Error(ErrorCode::InvalidArgument, "malformed contract_address '" + *record.address + "'");
    }
    if (record.vulnerabilities) {
        if (!record.confidences || !record.impacts) {
            throw Error(ErrorCode::InvalidArgument,
                        "vulnerability present but confidence/impact missing");
        }
        const auto n = record.vulnerabilities->size();
        if (record.confidences->size() != n || record.impacts->size() != n) {
            throw Error(ErrorCode::InvalidArgument,
                        "vulnerability/confidence/impact lengths differ (" + std::to_string(n) + "/" +
                            std::to_string(record.confidences->size()) + "/" +
                            std::to_string(record.impacts->size()) + ")");
        }
    } else if (record.confidences || record.impacts) {
        throw Error(ErrorCode::InvalidArgument, "confidence/impact present without vulnerability");
    }
}

std::string record_to_json_line(const ContractRecord& record) {
    validate_record(record);
    ordered_json j;
    j[kAddress] = record.address ? ordered_json(*record.address) : ordered_json(nullptr);
    j[kSource] = record.source;
    j[kMalicious] = record.malicious;
    j[kVulnerability] = record.vulnerabilities ? ordered_json(*record.vulnerabilities) : ordered_json(nullptr);
    j[kConfidence] = severity_json(record.confidences);
    j[kImpact] = severity_json(record.impacts);
    try {
        return j.dump();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("record is not valid UTF-8: ") + e.what());
    }
}

ContractRecord record_from_json_line(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::Parse, "record must be a JSON object");

    ContractRecord r;
    const auto& address = field_or_null(j, kAddress);
    if (!address.is_null()) {
        if (!address.is_string()) throw Error(ErrorCode::Parse, "contract_address must be a string");
        r.address = address.get<std::string>();
    }
    const auto& source = field_or_null(j, kSource);
    if (!source.is_null()) {
        if (!source.is_string()) throw Error(ErrorCode::Parse, "contract_source must be a string");
        r.source = source.get<std::string>();
    }
    const auto& malicious = field_or_null(j, kMalicious);
    if (!malicious.is_boolean()) throw Error(ErrorCode::Parse, "malicious must be a boolean");
    r.malicious = malicious.get<bool>();
    r.vulnerabilities = string_list(field_or_null(j, kVulnerability), kVulnerability);
    r.confidences = severity_list(field_or_null(j, kConfidence), kConfidence);
    r.impacts = severity_list(field_or_null(j, kImpact), kImpact);
    try {
        validate_record(r);
    } catch (const Error& e) {
        throw Error(ErrorCode::Parse, e.what());
    }
    return r;
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    Corpus records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            records.push_back(record_from_json_line(line));
        } catch (const Error& e) {
            throw Error(ErrorCode::Parse, rethrow_context(path, line_no, e.what()),
                        static_cast<long>(line_no));
        }
    }
    if (in.bad()) throw Error(ErrorCode::Io, "read failed: " + path.string());
    return records;
}

void save_corpus(const Corpus& records, const std::filesystem::path& path) {
    std::string payload;
    for (const auto& r : records) {
        payload += record_to_json_line(r);
        payload += '\n';
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << payload;
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

Corpus import_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    const auto rows = csv::parse(text);
    if (rows.empty()) return {};
    const auto& header = rows.front().fields;
    auto column = [&](std::string_view name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        return std::nullopt;
    };
    const auto c_address = column(kAddress);
    const auto c_source = column(kSource);
    const auto c_malicious = column(kMalicious);
    const auto c_vuln = column(kVulnerability);
    const auto c_conf = column(kConfidence);
    const auto c_impact = column(kImpact);
    if (!c_malicious) throw Error(ErrorCode::Parse, path.string() + ": missing 'malicious' column", 1);

    Corpus records;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const auto line_no = static_cast<long>(row.line);
        try {
            auto cell = [&](std::optional<std::size_t> col) -> std::string_view {
                if (!col || *col >= row.fields.size()) return {};
                return row.fields[*col];
            };
            auto list_cell = [&](std::optional<std::size_t> col) -> json {
                const auto text_cell = cell(col);
                if (text_cell.empty()) return nullptr;
                try {
                    return json::parse(text_cell);
                } catch (const json::exception& e) {
                    throw Error(ErrorCode::Parse, std::string("list cell is not JSON: ") + e.what());
                }
            };
            ContractRecord rec;
            if (auto a = cell(c_address); !a.empty()) rec.address = std::string(a);
            rec.source = std::string(cell(c_source));
            rec.malicious = parse_bool_cell(cell(c_malicious));
            rec.vulnerabilities = string_list(list_cell(c_vuln), kVulnerability);
            rec.confidences = severity_list(list_cell(c_conf), kConfidence);
            rec.impacts = severity_list(list_cell(c_impact), kImpact);
            if (rec.vulnerabilities && !rec.confidences && !rec.impacts) {
                auto enriched = enrich_findings(*rec.vulnerabilities, DetectorRegistry::builtin());
                rec.impacts = std::move(enriched.impacts);
                rec.confidences = std::move(enriched.confidences);
            }
            validate_record(rec);
            records.push_back(std::move(rec));
        } catch (const Error& e) {
            throw Error(ErrorCode::Parse, rethrow_context(path, row.line, e.what()), line_no);
        }
    }
    return records;
}

Corpus load_any(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".csv" ? import_csv(path) : load_corpus(path);
}

Corpus filter_analyzed(const Corpus& records) {
    Corpus out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [](const ContractRecord& r) { return r.analyzed(); });
    return out;
}

std::size_t malicious_quota(std::size_t target_size, double malicious_ratio) {
    if (!(malicious_ratio >= 0.0 && malicious_ratio <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "malicious ratio must lie in [0, 1]");
    }
    const double exact = static_cast<double>(target_size) * malicious_ratio;
    return std::min(target_size, static_cast<std::size_t>(std::floor(exact + 0.5)));
}

std::size_t count_malicious(const Corpus& records) noexcept {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const ContractRecord& r) { return r.malicious; }));
}

std::size_t max_feasible_target(const Corpus& records, double malicious_ratio) {
    const std::size_t malicious = count_malicious(records);
    const std::size_t benign = records.size() - malicious;
    for (std::size_t t = records.size(); t > 0; --t) {
        const auto quota = malicious_quota(t, malicious_ratio);
        if (quota <= malicious && t - quota <= benign) return t;
    }
    return 0;
}

Corpus stratified_reduce(const Corpus& records, std::size_t target_size, double malicious_ratio,
                         std::uint64_t seed) {
    const std::size_t need_malicious = malicious_quota(target_size, malicious_ratio);
    const std::size_t need_benign = target_size - need_malicious;

    std::vector<std::size_t> malicious, benign;
    for (std::size_t i = 0; i < records.size(); ++i) {
        (records[i].malicious ? malicious : benign).push_back(i);
    }
    if (malicious.size() < need_malicious) {
        throw Error(ErrorCode::InsufficientLabel,
                    "InsufficientLabel(malicious, need " + std::to_string(need_malicious) + ", have " +
                        std::to_string(malicious.size()) + ")");
    }
    if (benign.size() < need_benign) {
        throw Error(ErrorCode::InsufficientLabel,
                    "InsufficientLabel(benign, need " + std::to_string(need_benign) + ", have " +
                        std::to_string(benign.size()) + ")");
    }

    auto mal_rng = make_rng(seed, 0);
    auto ben_rng = make_rng(seed, 1);
    shuffle(malicious.begin(), malicious.end(), mal_rng);
    shuffle(benign.begin(), benign.end(), ben_rng);

    std::vector<std::size_t> chosen(malicious.begin(), malicious.begin() + static_cast<std::ptrdiff_t>(need_malicious));
    chosen.insert(chosen.end(), benign.begin(), benign.begin() + static_cast<std::ptrdiff_t>(need_benign));
    std::sort(chosen.begin(), chosen.end());

    Corpus out;
    out.reserve(chosen.size());
    for (auto i : chosen) out.push_back(records[i]);
    return out;
}

} // namespace triage
