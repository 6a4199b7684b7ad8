#include "teval/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "teval/error.hpp"
#include "teval/text.hpp"

namespace teval {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void fail_at(const std::filesystem::path& path, std::size_t line_no,
                          const std::string& what) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

OracleKind parse_oracle_kind(const std::string& s, const std::filesystem::path& path,
                             std::size_t line_no) {
    if (s == "expect_no_exception") return OracleKind::ExpectNoException;
    if (s == "expect_exception") return OracleKind::ExpectException;
    if (s == "assertion") return OracleKind::Assertion;
    fail_at(path, line_no, "unknown oracle_kind \"" + s + "\"");
}

Provenance parse_provenance(const std::string& s, const std::filesystem::path& path,
                            std::size_t line_no) {
    if (s == "buggy") return Provenance::BuggyVersion;
    if (s == "fixed") return Provenance::FixedVersion;
    fail_at(path, line_no, "unknown prefix_provenance \"" + s + "\"");
}

RunResult parse_run_result(const std::string& s, const std::filesystem::path& path,
                           std::size_t line_no) {
    if (s == "pass") return RunResult::Pass;
    if (s == "fail") return RunResult::Fail;
    fail_at(path, line_no, "unknown run result \"" + s + "\" (expected \"pass\" or \"fail\")");
}

FailureKind parse_failure_kind(const std::string& s, const std::filesystem::path& path,
                               std::size_t line_no) {
    if (s == "exception") return FailureKind::Exception;
    if (s == "assertion") return FailureKind::Assertion;
    if (s == "none") return FailureKind::None;
    fail_at(path, line_no, "unknown failure kind \"" + s + "\"");
}

const ordered_json& require_field(const ordered_json& obj, const char* key,
                                  const std::filesystem::path& path, std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end()) fail_at(path, line_no, std::string("missing field \"") + key + "\"");
    return *it;
}

std::string require_string(const ordered_json& obj, const char* key,
                           const std::filesystem::path& path, std::size_t line_no) {
    const auto& value = require_field(obj, key, path, line_no);
    if (!value.is_string()) fail_at(path, line_no, std::string("field \"") + key + "\" must be a string");
    return value.get<std::string>();
}

std::optional<std::string> optional_string(const ordered_json& obj, const char* key,
                                           const std::filesystem::path& path,
                                           std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) fail_at(path, line_no, std::string("field \"") + key + "\" must be a string");
    return it->get<std::string>();
}

TestRecord parse_record_line(const std::string& line, const std::filesystem::path& path,
                             std::size_t line_no) {
    ordered_json obj;
    try {
        obj = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        fail_at(path, line_no, std::string("malformed record line: ") + e.what());
    }
    if (!obj.is_object()) fail_at(path, line_no, "record line is not an object");

    TestRecord record;
    record.record_id = require_string(obj, "record_id", path, line_no);
    record.bug_id = require_string(obj, "bug_id", path, line_no);
    const auto& run = require_field(obj, "run_id", path, line_no);
    if (!run.is_number_integer() || run.get<long long>() < 0) {
        fail_at(path, line_no, "run_id must be a non-negative integer");
    }
    record.run_id = run.get<int>();
    record.prefix_source = require_string(obj, "prefix_source", path, line_no);
    record.oracle_kind = parse_oracle_kind(require_string(obj, "oracle_kind", path, line_no), path, line_no);
    record.oracle_text = optional_string(obj, "oracle_text", path, line_no);
    record.focal_method_name = require_string(obj, "focal_method_name", path, line_no);
    record.focal_method_source = require_string(obj, "focal_method_source", path, line_no);
    record.focal_docstring = require_string(obj, "focal_docstring", path, line_no);
    record.prefix_provenance =
        parse_provenance(require_string(obj, "prefix_provenance", path, line_no), path, line_no);

    if (record.oracle_kind == OracleKind::Assertion &&
        (!record.oracle_text.has_value() || record.oracle_text->empty())) {
        fail_at(path, line_no,
                "record \"" + record.record_id + "\" has an assertion oracle but no oracle_text");
    }
    return record;
}

ExecutionOutcome parse_outcome_line(const std::string& line, const std::filesystem::path& path,
                                    std::size_t line_no) {
    ordered_json obj;
    try {
        obj = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        fail_at(path, line_no, std::string("malformed outcome line: ") + e.what());
    }
    if (!obj.is_object()) fail_at(path, line_no, "outcome line is not an object");

    ExecutionOutcome outcome;
    outcome.record_id = require_string(obj, "record_id", path, line_no);
    outcome.buggy_result = parse_run_result(require_string(obj, "buggy_result", path, line_no), path, line_no);
    outcome.fixed_result = parse_run_result(require_string(obj, "fixed_result", path, line_no), path, line_no);
    outcome.raw_trace = optional_string(obj, "raw_trace", path, line_no);
    const auto& compile_error = require_field(obj, "compile_error", path, line_no);
    if (!compile_error.is_boolean()) fail_at(path, line_no, "compile_error must be a boolean");
    outcome.compile_error = compile_error.get<bool>();
    if (auto kind = optional_string(obj, "buggy_failure_kind", path, line_no)) {
        outcome.buggy_failure_kind = parse_failure_kind(*kind, path, line_no);
    }
    if (auto kind = optional_string(obj, "fixed_failure_kind", path, line_no)) {
        outcome.fixed_failure_kind = parse_failure_kind(*kind, path, line_no);
    }

    // Compile-error entries were never executed, so no trace is demanded.
    if (outcome.buggy_result == RunResult::Fail && !outcome.compile_error &&
        !outcome.raw_trace.has_value()) {
        fail_at(path, line_no,
                "outcome \"" + outcome.record_id + "\" failed on the buggy version without a raw_trace");
    }
    return outcome;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::string join_ids(const std::vector<std::string>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i > 0) out += ", ";
        out += "\"" + ids[i] + "\"";
    }
    return out;
}

ordered_json record_to_json(const TestRecord& r) {
    ordered_json obj;
    obj["record_id"] = r.record_id;
    obj["bug_id"] = r.bug_id;
    obj["run_id"] = r.run_id;
    obj["prefix_source"] = r.prefix_source;
    obj["oracle_kind"] = std::string(to_string(r.oracle_kind));
    if (r.oracle_text.has_value()) obj["oracle_text"] = *r.oracle_text;
    obj["focal_method_name"] = r.focal_method_name;
    obj["focal_method_source"] = r.focal_method_source;
    obj["focal_docstring"] = r.focal_docstring;
    obj["prefix_provenance"] = std::string(to_string(r.prefix_provenance));
    return obj;
}

ordered_json outcome_to_json(const ExecutionOutcome& o) {
    ordered_json obj;
    obj["record_id"] = o.record_id;
    obj["buggy_result"] = std::string(to_string(o.buggy_result));
    obj["fixed_result"] = std::string(to_string(o.fixed_result));
    if (o.raw_trace.has_value()) obj["raw_trace"] = *o.raw_trace;
    obj["compile_error"] = o.compile_error;
    if (o.buggy_failure_kind.has_value()) {
        obj["buggy_failure_kind"] = std::string(to_string(*o.buggy_failure_kind));
    }
    if (o.fixed_failure_kind.has_value()) {
        obj["fixed_failure_kind"] = std::string(to_string(*o.fixed_failure_kind));
    }
    return obj;
}

}  // namespace

std::string full_test_source(const TestRecord& record) {
    if (!record.oracle_text.has_value() || record.oracle_text->empty()) {
        return record.prefix_source;
    }
    return record.prefix_source + "\n" + *record.oracle_text;
}

Corpus ingest_corpus(const std::filesystem::path& records_path,
                     const std::filesystem::path& outcomes_path) {
    std::vector<TestRecord> records;
    std::unordered_set<std::string> record_ids;
    {
        const auto lines = read_lines(records_path);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (text::trim(lines[i]).empty()) continue;
            TestRecord record = parse_record_line(lines[i], records_path, i + 1);
            if (!record_ids.insert(record.record_id).second) {
                fail_at(records_path, i + 1, "duplicate record_id \"" + record.record_id + "\"");
            }
            records.push_back(std::move(record));
        }
    }

    std::unordered_map<std::string, ExecutionOutcome> outcomes;
    {
        const auto lines = read_lines(outcomes_path);
        std::vector<std::string> unknown;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (text::trim(lines[i]).empty()) continue;
            ExecutionOutcome outcome = parse_outcome_line(lines[i], outcomes_path, i + 1);
            if (!record_ids.contains(outcome.record_id)) {
                unknown.push_back(outcome.record_id);
                continue;
            }
            if (!outcomes.emplace(outcome.record_id, std::move(outcome)).second) {
                fail_at(outcomes_path, i + 1, "duplicate outcome for record_id \"" + lines[i] + "\"");
            }
        }
        if (!unknown.empty()) {
            throw DataError(outcomes_path.string() + ": outcomes reference unknown record ids: " +
                            join_ids(unknown));
        }
    }

    Corpus corpus;
    corpus.reserve(records.size());
    std::vector<std::string> missing;
    for (auto& record : records) {
        auto it = outcomes.find(record.record_id);
        if (it == outcomes.end()) {
            missing.push_back(record.record_id);
            continue;
        }
        corpus.push_back(CorpusEntry{std::move(record), std::move(it->second)});
    }
    if (!missing.empty()) {
        throw DataError(records_path.string() + ": records without outcomes: " + join_ids(missing));
    }
    return corpus;
}

Corpus deduplicate(const Corpus& corpus) {
    Corpus out;
    out.reserve(corpus.size());
    std::unordered_set<std::string> seen;
    for (const auto& entry : corpus) {
        std::string key = entry.record.bug_id + "\x1f" + std::to_string(entry.record.run_id) +
                          "\x1f" + text::normalize_whitespace(full_test_source(entry.record));
        if (seen.insert(std::move(key)).second) out.push_back(entry);
    }
    return out;
}

Corpus filter_records(const Corpus& corpus) {
    Corpus out;
    out.reserve(corpus.size());
    for (const auto& entry : corpus) {
        if (!entry.outcome.compile_error) out.push_back(entry);
    }
    return out;
}

void write_records_file(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    for (const auto& entry : corpus) out << record_to_json(entry.record).dump() << "\n";
}

void write_outcomes_file(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    for (const auto& entry : corpus) out << outcome_to_json(entry.outcome).dump() << "\n";
}

std::string_view to_string(OracleKind kind) {
    switch (kind) {
        case OracleKind::ExpectNoException: return "expect_no_exception";
        case OracleKind::ExpectException: return "expect_exception";
        case OracleKind::Assertion: return "assertion";
    }
    return "?";
}

std::string_view to_string(Provenance provenance) {
    return provenance == Provenance::BuggyVersion ? "buggy" : "fixed";
}

std::string_view to_string(RunResult result) {
    return result == RunResult::Pass ? "pass" : "fail";
}

std::string_view to_string(FailureKind kind) {
    switch (kind) {
        case FailureKind::Exception: return "exception";
        case FailureKind::Assertion: return "assertion";
        case FailureKind::None: return "none";
    }
    return "?";
}

}  // namespace teval
