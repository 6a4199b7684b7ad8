#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace teval {

enum class OracleKind { ExpectNoException, ExpectException, Assertion };
enum class Provenance { BuggyVersion, FixedVersion };
enum class RunResult { Pass, Fail };
enum class FailureKind { Exception, Assertion, None };

/// One generated test case: prefix plus generated oracle, with the focal
/// context the generator saw and the provenance of the prefix.
struct TestRecord {
    std::string record_id;
    std::string bug_id;
    int run_id = 0;  // repeated prefix-generation run index, >= 0
    std::string prefix_source;
    OracleKind oracle_kind = OracleKind::ExpectNoException;
    std::optional<std::string> oracle_text;  // present iff oracle_kind == Assertion
    std::string focal_method_name;
    std::string focal_method_source;
    std::string focal_docstring;
    Provenance prefix_provenance = Provenance::BuggyVersion;

    bool operator==(const TestRecord&) const = default;
};

/// Execution result of one test case on the buggy and fixed program
/// versions. The failure kinds are optional; when absent they are inferred
/// from the stack trace where one exists.
struct ExecutionOutcome {
    std::string record_id;
    RunResult buggy_result = RunResult::Pass;
    RunResult fixed_result = RunResult::Pass;
    std::optional<std::string> raw_trace;  // required when the buggy run failed (and compiled)
    bool compile_error = false;
    std::optional<FailureKind> buggy_failure_kind;
    std::optional<FailureKind> fixed_failure_kind;

    bool operator==(const ExecutionOutcome&) const = default;
};

struct CorpusEntry {
    TestRecord record;
    ExecutionOutcome outcome;

    bool operator==(const CorpusEntry&) const = default;
};

using Corpus = std::vector<CorpusEntry>;

/// Full test source = prefix followed by the oracle statement (when any).
std::string full_test_source(const TestRecord& record);

/// Reads line-delimited record and outcome files and joins them by
/// record_id, preserving records-file order. Throws DataError on malformed
/// lines (with the line number), duplicate ids, or ids present on only one
/// side of the join.
Corpus ingest_corpus(const std::filesystem::path& records_path,
                     const std::filesystem::path& outcomes_path);

/// Removes exact duplicates, keeping the first occurrence. Two entries are
/// duplicates iff they share bug_id, run_id, and the whitespace-normalized
/// full test source.
Corpus deduplicate(const Corpus& corpus);

/// Drops entries with compile errors. Other entries of the same bug are
/// never affected.
Corpus filter_records(const Corpus& corpus);

void write_records_file(const Corpus& corpus, const std::filesystem::path& path);
void write_outcomes_file(const Corpus& corpus, const std::filesystem::path& path);

std::string_view to_string(OracleKind kind);
std::string_view to_string(Provenance provenance);
std::string_view to_string(RunResult result);
std::string_view to_string(FailureKind kind);

}  // namespace teval
