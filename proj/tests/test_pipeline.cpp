#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "teval/error.hpp"
#include "teval/pipeline.hpp"
#include "teval/synthetic.hpp"

using namespace teval;

namespace {

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("teval_pipe_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

CorpusEntry make_entry(const std::string& id, const std::string& bug, RunResult buggy,
                       RunResult fixed, int run = 0,
                       Provenance provenance = Provenance::BuggyVersion) {
    CorpusEntry e;
    e.record.record_id = id;
    e.record.bug_id = bug;
    e.record.run_id = run;
    e.record.prefix_source = "int v = target.compute(\"" + id + "\");";
    e.record.oracle_kind = OracleKind::Assertion;
    e.record.oracle_text = "assertEquals(1, v);";
    e.record.focal_method_name = "compute";
    e.record.focal_method_source = "int compute(String s) { return s.length(); }";
    e.record.focal_docstring = "Computes the checksum of the input.";
    e.record.prefix_provenance = provenance;
    e.outcome.record_id = id;
    e.outcome.buggy_result = buggy;
    e.outcome.fixed_result = fixed;
    if (buggy == RunResult::Fail) {
        e.outcome.raw_trace = "test_" + id + "(ComputeTest)\n" +
                              "java.lang.NullPointerException: boom " + id + "\n" +
                              "\tat Compute.compute(Compute.java:3)";
    }
    return e;
}

struct Fixture {
    TempDir dir;
    std::filesystem::path records_path;
    std::filesystem::path outcomes_path;

    explicit Fixture(const Corpus& corpus) {
        records_path = dir.path / "records.jsonl";
        outcomes_path = dir.path / "outcomes.jsonl";
        write_records_file(corpus, records_path);
        write_outcomes_file(corpus, outcomes_path);
    }

    PipelineConfig config() const {
        PipelineConfig c;
        c.records_path = records_path;
        c.outcomes_path = outcomes_path;
        c.ks = {1, 2};
        c.ranking = RankingMethod::Random;
        c.seeds = {1};
        return c;
    }
};

Corpus tiny_corpus() {
    Corpus corpus;
    corpus.push_back(make_entry("a1", "A", RunResult::Fail, RunResult::Pass));
    corpus.push_back(make_entry("a2", "A", RunResult::Fail, RunResult::Fail));
    corpus.push_back(make_entry("b1", "B", RunResult::Pass, RunResult::Pass));
    corpus.push_back(make_entry("b2", "B", RunResult::Pass, RunResult::Fail));
    return corpus;
}

}  // namespace

TEST_CASE("tiny run matches hand-computed metrics") {
    Fixture fx(tiny_corpus());
    const EvaluationResult result = run_evaluation(fx.config());

    CHECK(result.bug_universe == std::vector<std::string>{"A", "B"});
    CHECK(result.run_universe == std::vector<int>{0});
    CHECK(result.warnings.empty());

    REQUIRE(result.main.per_run.size() == 1);
    const RunMetrics& run = result.main.per_run[0];
    CHECK(run.confusion == ConfusionCounts{1, 1, 1, 1});
    CHECK(run.bug_found == 1);
    CHECK(run.precision == doctest::Approx(0.5));
    CHECK(run.fpr == doctest::Approx(0.5));

    // which of a1/a2 comes first under seed 1 is fixed; recompute it directly
    const RankedList expected = random_ranking("A", 0, {"a1", "a2"}, 1);
    const double found1 = expected.entries[0].record_id == "a1" ? 1.0 : 0.0;
    REQUIRE(run.found.size() == 2);
    CHECK(run.found[0].k == 1);
    CHECK(run.found[0].count == doctest::Approx(found1));
    CHECK(run.found[0].fraction == doctest::Approx(found1 / 2.0));
    CHECK(run.found[1].k == 2);
    CHECK(run.found[1].count == doctest::Approx(1.0));
    CHECK(run.found[1].fraction == doctest::Approx(0.5));

    CHECK(result.main.aggregate.tp == doctest::Approx(1.0));
    CHECK(result.main.aggregate.bug_found == doctest::Approx(1.0));
    REQUIRE(result.main.by_kind.size() == 1);
    CHECK(result.main.by_kind[0].kind == OracleKind::Assertion);
    CHECK(result.main.by_kind[0].confusion.total() == 4);

    REQUIRE(result.main.per_run_seed.size() == 1);
    CHECK(result.main.per_run_seed[0].seed == 1);
    CHECK(result.main.per_run_seed[0].found.size() == 2);

    CHECK(!result.baseline.has_value());
    CHECK(result.comparison.empty());
}

TEST_CASE("report files are written and reruns are byte-identical") {
    Fixture fx(tiny_corpus());
    PipelineConfig config = fx.config();
    config.dump_features = true;

    TempDir out_a, out_b;
    write_reports(run_evaluation(config), out_a.path);
    write_reports(run_evaluation(config), out_b.path);

    for (const char* name : {"report.json", "report.txt", "ranked.tsv", "features.tsv"}) {
        CAPTURE(name);
        REQUIRE(std::filesystem::exists(out_a.path / name));
        const std::string a = slurp(out_a.path / name);
        CHECK(!a.empty());
        CHECK(a == slurp(out_b.path / name));
    }
}

TEST_CASE("ranking none skips ranked output and found metrics") {
    Fixture fx(tiny_corpus());
    PipelineConfig config = fx.config();
    config.ranking = RankingMethod::None;
    config.seeds.clear();

    const EvaluationResult result = run_evaluation(config);
    CHECK(result.main.per_run[0].found.empty());
    CHECK(result.main.per_run_seed.empty());
    CHECK(result.main.consensus.empty());
    CHECK(result.main.features.empty());

    TempDir out;
    write_reports(result, out.path);
    CHECK(std::filesystem::exists(out.path / "report.json"));
    CHECK(!std::filesystem::exists(out.path / "ranked.tsv"));
}

TEST_CASE("provenance filter excludes or admits fixed-version prefixes") {
    Corpus corpus = tiny_corpus();
    corpus.push_back(
        make_entry("f1", "A", RunResult::Fail, RunResult::Fail, 0, Provenance::FixedVersion));
    Fixture fx(corpus);

    PipelineConfig config = fx.config();
    const EvaluationResult buggy_only = run_evaluation(config);
    CHECK(buggy_only.main.per_run[0].confusion == ConfusionCounts{1, 1, 1, 1});
    CHECK(buggy_only.warnings.empty());

    config.provenance = ProvenanceFilter::All;
    const EvaluationResult all = run_evaluation(config);
    CHECK(all.main.per_run[0].confusion == ConfusionCounts{1, 2, 1, 1});
    REQUIRE(all.warnings.size() == 1);
    CHECK(all.warnings[0].find("1 record(s)") != std::string::npos);
    CHECK(all.warnings[0].find("fixed-version") != std::string::npos);

    config.provenance = ProvenanceFilter::FixedOnly;
    const EvaluationResult fixed_only = run_evaluation(config);
    CHECK(fixed_only.main.per_run[0].confusion == ConfusionCounts{0, 1, 0, 0});
    CHECK(fixed_only.warnings.size() == 1);
    // the universes are captured before the provenance filter
    CHECK(fixed_only.bug_universe == std::vector<std::string>{"A", "B"});
}

TEST_CASE("duplicates collapse before counting") {
    Corpus corpus = tiny_corpus();
    CorpusEntry dup = corpus[1];  // same bug, run, and normalized source as a2
    dup.record.record_id = "a2_dup";
    dup.record.prefix_source = "  " + dup.record.prefix_source + "  ";
    dup.outcome.record_id = "a2_dup";
    corpus.push_back(dup);
    Fixture fx(corpus);

    const EvaluationResult result = run_evaluation(fx.config());
    CHECK(result.main.per_run[0].confusion == ConfusionCounts{1, 1, 1, 1});
}

TEST_CASE("compile errors leave metrics but stay in the bug universe") {
    Corpus corpus = tiny_corpus();
    CorpusEntry broken = make_entry("c1", "C", RunResult::Fail, RunResult::Fail);
    broken.outcome.compile_error = true;
    broken.outcome.raw_trace.reset();
    corpus.push_back(broken);
    Fixture fx(corpus);

    const EvaluationResult result = run_evaluation(fx.config());
    CHECK(result.bug_universe == std::vector<std::string>{"A", "B", "C"});
    CHECK(result.main.per_run[0].confusion.total() == 4);
    // found fractions divide by all three bugs
    CHECK(result.main.per_run[0].found[1].fraction == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("noexception baseline and comparison are attached on request") {
    Fixture fx(tiny_corpus());
    PipelineConfig config = fx.config();
    config.baseline_noexception = true;
    config.seeds = {1, 2};

    const EvaluationResult result = run_evaluation(config);
    REQUIRE(result.baseline.has_value());
    // a1 keeps failing buggy (exception), a2 keeps failing both: same confusion here
    CHECK(result.baseline->per_run[0].confusion.total() == 4);

    REQUIRE(result.comparison.size() == 5);  // bug_found, precision, fpr, found@1, found@2
    CHECK(result.comparison[0].metric == "bug_found");
    CHECK(result.comparison[1].metric == "precision");
    CHECK(result.comparison[2].metric == "fpr");
    CHECK(result.comparison[3].metric == "found@1_count");
    CHECK(result.comparison[4].metric == "found@2_count");
    for (const auto& row : result.comparison) {
        CHECK(row.wilcoxon.p_two_sided >= 0.0);
        CHECK(row.wilcoxon.p_two_sided <= 1.0);
        CHECK(row.effect.delta >= -1.0);
        CHECK(row.effect.delta <= 1.0);
        CHECK(row.significant == (row.wilcoxon.p_two_sided < 0.05));
    }
}

TEST_CASE("rank-only run equals the consensus of a full evaluation") {
    Fixture fx(tiny_corpus());
    PipelineConfig config = fx.config();
    config.ranking = RankingMethod::IForest;
    config.seeds = {1, 2, 3};

    const std::vector<RankedList> lists = run_ranking_only(config);
    const EvaluationResult result = run_evaluation(config);
    REQUIRE(lists.size() == result.main.consensus.size());
    for (std::size_t i = 0; i < lists.size(); ++i) {
        CHECK(lists[i].bug_id == result.main.consensus[i].bug_id);
        REQUIRE(lists[i].entries.size() == result.main.consensus[i].entries.size());
        for (std::size_t j = 0; j < lists[i].entries.size(); ++j) {
            CHECK(lists[i].entries[j].record_id == result.main.consensus[i].entries[j].record_id);
            CHECK(lists[i].entries[j].score ==
                  doctest::Approx(result.main.consensus[i].entries[j].score));
        }
    }

    config.ranking = RankingMethod::None;
    config.seeds.clear();
    CHECK_THROWS_AS(run_ranking_only(config), UsageError);
}

TEST_CASE("bad configurations are usage errors") {
    Fixture fx(tiny_corpus());

    PipelineConfig config = fx.config();
    config.ks.clear();
    CHECK_THROWS_AS(run_evaluation(config), UsageError);

    config = fx.config();
    config.ks = {3, 1};
    CHECK_THROWS_AS(run_evaluation(config), UsageError);

    config = fx.config();
    config.ks = {0, 1};
    CHECK_THROWS_AS(run_evaluation(config), UsageError);

    config = fx.config();
    config.seeds.clear();
    CHECK_THROWS_AS(run_evaluation(config), UsageError);

    config = fx.config();
    config.records_path.clear();
    CHECK_THROWS_AS(run_evaluation(config), UsageError);
}

TEST_CASE("missing input files name the ingest stage") {
    PipelineConfig config;
    config.records_path = "/nonexistent/records.jsonl";
    config.outcomes_path = "/nonexistent/outcomes.jsonl";
    try {
        run_evaluation(config);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).rfind("ingest:", 0) == 0);
    }
}

TEST_CASE("thread cap env var is validated and respected") {
    Fixture fx(tiny_corpus());
    PipelineConfig config = fx.config();
    config.ranking = RankingMethod::IForest;

    ::setenv("ORACLE_RANK_THREADS", "definitely-not-a-number", 1);
    CHECK_THROWS_AS(run_evaluation(config), UsageError);
    ::setenv("ORACLE_RANK_THREADS", "0", 1);
    CHECK_THROWS_AS(run_evaluation(config), UsageError);

    ::setenv("ORACLE_RANK_THREADS", "1", 1);
    const EvaluationResult capped = run_evaluation(config);
    ::unsetenv("ORACLE_RANK_THREADS");
    const EvaluationResult free_run = run_evaluation(config);
    REQUIRE(capped.main.consensus.size() == free_run.main.consensus.size());
    for (std::size_t i = 0; i < capped.main.consensus.size(); ++i) {
        for (std::size_t j = 0; j < capped.main.consensus[i].entries.size(); ++j) {
            CHECK(capped.main.consensus[i].entries[j].record_id ==
                  free_run.main.consensus[i].entries[j].record_id);
        }
    }
}

TEST_CASE("multi-run synthetic corpus aggregates across runs") {
    SyntheticSpec spec;
    spec.bugs = 3;
    spec.failed_per_bug = 4;
    spec.runs = 2;
    const Corpus corpus = generate_synthetic_corpus(spec, 21);
    Fixture fx(corpus);

    PipelineConfig config = fx.config();
    config.ranking = RankingMethod::IForest;
    config.seeds = {1, 2};
    const EvaluationResult result = run_evaluation(config);

    CHECK(result.run_universe == std::vector<int>{0, 1});
    REQUIRE(result.main.per_run.size() == 2);
    CHECK(result.main.per_run_seed.size() == 4);  // 2 runs x 2 seeds
    CHECK(result.main.aggregate.tp ==
          doctest::Approx((static_cast<double>(result.main.per_run[0].confusion.tp) +
                           static_cast<double>(result.main.per_run[1].confusion.tp)) /
                          2.0));
    // every bug has exactly one group per run, sorted by bug then run
    REQUIRE(result.main.consensus.size() == 6);
    CHECK(result.main.consensus[0].bug_id == "Bug-1");
    CHECK(result.main.consensus[0].run_id == 0);
    CHECK(result.main.consensus[1].bug_id == "Bug-1");
    CHECK(result.main.consensus[1].run_id == 1);
}
