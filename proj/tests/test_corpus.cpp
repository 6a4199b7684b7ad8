#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "teval/corpus.hpp"
#include "teval/error.hpp"

using namespace teval;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("teval_corpus_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

const char* kRecordsTwo =
    R"({"record_id":"r1","bug_id":"B1","run_id":0,"prefix_source":"int x = 1;","oracle_kind":"assertion","oracle_text":"assertEquals(1, x);","focal_method_name":"getX","focal_method_source":"int getX() { return x; }","focal_docstring":"Returns x.","prefix_provenance":"buggy"})"
    "\n"
    R"({"record_id":"r2","bug_id":"B1","run_id":0,"prefix_source":"foo();","oracle_kind":"expect_no_exception","focal_method_name":"foo","focal_method_source":"void foo() {}","focal_docstring":"Does nothing.","prefix_provenance":"fixed"})"
    "\n";

const char* kOutcomesTwo =
    R"x({"record_id":"r1","buggy_result":"fail","fixed_result":"pass","raw_trace":"T.t\norg.opentest4j.AssertionFailedError: expected 1\n\tat T.t(T.java:3)","compile_error":false})x"
    "\n"
    R"({"record_id":"r2","buggy_result":"pass","fixed_result":"pass","compile_error":false,"buggy_failure_kind":"none"})"
    "\n";

}  // namespace

TEST_CASE("ingest joins records and outcomes in records order") {
    TempDir dir;
    write_file(dir.path / "records.jsonl", kRecordsTwo);
    write_file(dir.path / "outcomes.jsonl", kOutcomesTwo);

    Corpus corpus = ingest_corpus(dir.path / "records.jsonl", dir.path / "outcomes.jsonl");
    REQUIRE(corpus.size() == 2);
    CHECK(corpus[0].record.record_id == "r1");
    CHECK(corpus[0].record.oracle_kind == OracleKind::Assertion);
    CHECK(corpus[0].record.oracle_text == "assertEquals(1, x);");
    CHECK(corpus[0].record.prefix_provenance == Provenance::BuggyVersion);
    CHECK(corpus[0].outcome.buggy_result == RunResult::Fail);
    CHECK(corpus[0].outcome.raw_trace.has_value());
    CHECK(corpus[1].record.record_id == "r2");
    CHECK(corpus[1].record.oracle_kind == OracleKind::ExpectNoException);
    CHECK_FALSE(corpus[1].record.oracle_text.has_value());
    CHECK(corpus[1].outcome.buggy_failure_kind == FailureKind::None);
    CHECK_FALSE(corpus[1].outcome.fixed_failure_kind.has_value());
}

TEST_CASE("ingest tolerates blank lines and outcome order") {
    TempDir dir;
    std::string outcomes(kOutcomesTwo);
    // swap the two outcome lines and sprinkle blanks
    std::size_t nl = outcomes.find('\n');
    std::string swapped = outcomes.substr(nl + 1) + "\n" + outcomes.substr(0, nl + 1);
    write_file(dir.path / "records.jsonl", std::string("\n") + kRecordsTwo + "\n");
    write_file(dir.path / "outcomes.jsonl", swapped);
    Corpus corpus = ingest_corpus(dir.path / "records.jsonl", dir.path / "outcomes.jsonl");
    REQUIRE(corpus.size() == 2);
    CHECK(corpus[0].record.record_id == "r1");  // records-file order wins
}

TEST_CASE("ingest rejects malformed and inconsistent inputs") {
    TempDir dir;
    const fs::path records = dir.path / "records.jsonl";
    const fs::path outcomes = dir.path / "outcomes.jsonl";

    SUBCASE("malformed json reports the line number") {
        write_file(records, std::string(kRecordsTwo) + "{not json\n");
        write_file(outcomes, kOutcomesTwo);
        try {
            ingest_corpus(records, outcomes);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find(":3:") != std::string::npos);
        }
    }
    SUBCASE("duplicate record ids") {
        write_file(records, std::string(kRecordsTwo) + kRecordsTwo);
        write_file(outcomes, kOutcomesTwo);
        CHECK_THROWS_AS(ingest_corpus(records, outcomes), DataError);
    }
    SUBCASE("outcome for unknown record") {
        write_file(records, kRecordsTwo);
        write_file(outcomes,
                   std::string(kOutcomesTwo) +
                       R"({"record_id":"ghost","buggy_result":"pass","fixed_result":"pass","compile_error":false})"
                       "\n");
        CHECK_THROWS_AS(ingest_corpus(records, outcomes), DataError);
    }
    SUBCASE("record without outcome") {
        write_file(records, kRecordsTwo);
        std::string one(kOutcomesTwo);
        write_file(outcomes, one.substr(0, one.find('\n') + 1));
        CHECK_THROWS_AS(ingest_corpus(records, outcomes), DataError);
    }
    SUBCASE("assertion oracle requires oracle_text") {
        std::string bad(kRecordsTwo);
        std::size_t pos = bad.find(",\"oracle_text\":\"assertEquals(1, x);\"");
        bad.erase(pos, std::string(",\"oracle_text\":\"assertEquals(1, x);\"").size());
        write_file(records, bad);
        write_file(outcomes, kOutcomesTwo);
        CHECK_THROWS_AS(ingest_corpus(records, outcomes), DataError);
    }
    SUBCASE("failed buggy run requires a trace") {
        write_file(records, kRecordsTwo);
        std::string bad(kOutcomesTwo);
        std::size_t pos = bad.find("\"raw_trace\"");
        std::size_t end = bad.find(",\"compile_error\"", pos);
        bad.erase(pos, end - pos + 1);
        write_file(outcomes, bad);
        CHECK_THROWS_AS(ingest_corpus(records, outcomes), DataError);
    }
    SUBCASE("negative run_id") {
        std::string bad(kRecordsTwo);
        std::size_t pos = bad.find("\"run_id\":0");
        bad.replace(pos, 10, "\"run_id\":-1");
        write_file(records, bad);
        write_file(outcomes, kOutcomesTwo);
        CHECK_THROWS_AS(ingest_corpus(records, outcomes), DataError);
    }
}

TEST_CASE("round trip through write_records_file and write_outcomes_file") {
    TempDir dir;
    write_file(dir.path / "records.jsonl", kRecordsTwo);
    write_file(dir.path / "outcomes.jsonl", kOutcomesTwo);
    Corpus corpus = ingest_corpus(dir.path / "records.jsonl", dir.path / "outcomes.jsonl");

    write_records_file(corpus, dir.path / "records2.jsonl");
    write_outcomes_file(corpus, dir.path / "outcomes2.jsonl");
    Corpus again = ingest_corpus(dir.path / "records2.jsonl", dir.path / "outcomes2.jsonl");
    CHECK(corpus == again);
}

TEST_CASE("full_test_source appends the oracle when present") {
    TestRecord r;
    r.prefix_source = "int x = f();";
    CHECK(full_test_source(r) == "int x = f();");
    r.oracle_text = "assertEquals(1, x);";
    CHECK(full_test_source(r) == "int x = f();\nassertEquals(1, x);");
}

TEST_CASE("deduplicate keys on bug, run, and normalized source") {
    CorpusEntry a;
    a.record.record_id = "a";
    a.record.bug_id = "B1";
    a.record.run_id = 0;
    a.record.prefix_source = "int  x = 1;\nfoo( x );";

    CorpusEntry b = a;  // same code modulo whitespace
    b.record.record_id = "b";
    b.record.prefix_source = "int x = 1;\n  foo( x );";

    CorpusEntry c = a;  // same code, different run
    c.record.record_id = "c";
    c.record.run_id = 1;

    CorpusEntry d = a;  // same code, different bug
    d.record.record_id = "d";
    d.record.bug_id = "B2";

    CorpusEntry e = a;  // different oracle text -> different full source
    e.record.record_id = "e";
    e.record.oracle_text = "assertTrue(true);";

    Corpus out = deduplicate({a, b, c, d, e});
    REQUIRE(out.size() == 4);
    CHECK(out[0].record.record_id == "a");
    CHECK(out[1].record.record_id == "c");
    CHECK(out[2].record.record_id == "d");
    CHECK(out[3].record.record_id == "e");
}

TEST_CASE("filter_records drops only compile errors") {
    CorpusEntry ok;
    ok.record.record_id = "ok";
    CorpusEntry broken;
    broken.record.record_id = "broken";
    broken.outcome.compile_error = true;

    Corpus out = filter_records({ok, broken, ok});
    REQUIRE(out.size() == 2);
    CHECK(out[0].record.record_id == "ok");
    CHECK(out[1].record.record_id == "ok");
}

TEST_CASE("enum names round-trip to the wire format") {
    CHECK(to_string(OracleKind::ExpectNoException) == "expect_no_exception");
    CHECK(to_string(OracleKind::ExpectException) == "expect_exception");
    CHECK(to_string(OracleKind::Assertion) == "assertion");
    CHECK(to_string(Provenance::BuggyVersion) == "buggy");
    CHECK(to_string(Provenance::FixedVersion) == "fixed");
    CHECK(to_string(RunResult::Pass) == "pass");
    CHECK(to_string(RunResult::Fail) == "fail");
    CHECK(to_string(FailureKind::Exception) == "exception");
    CHECK(to_string(FailureKind::Assertion) == "assertion");
    CHECK(to_string(FailureKind::None) == "none");
}
