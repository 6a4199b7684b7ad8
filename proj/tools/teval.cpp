#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "teval/corpus.hpp"
#include "teval/error.hpp"
#include "teval/pipeline.hpp"
#include "teval/stats.hpp"
#include "teval/synthetic.hpp"
#include "teval/text.hpp"

namespace {

std::vector<double> read_numbers(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw teval::DataError("cannot open " + path.string());
    std::vector<double> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = teval::text::trim(line);
        if (t.empty()) continue;
        char* end = nullptr;
        const double value = std::strtod(t.c_str(), &end);
        if (end == t.c_str() || *end != '\0') {
            throw teval::DataError(path.string() + ":" + std::to_string(line_no) +
                                   ": not a number: \"" + t + "\"");
        }
        out.push_back(value);
    }
    return out;
}

struct EvaluateArgs {
    std::string records;
    std::string outcomes;
    std::string out_dir;
    std::vector<int> ks = {1, 3, 5, 10};
    std::string ranking = "iforest";
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    bool baseline_noexception = false;
    std::string provenance = "buggy";
    bool dump_features = false;
};

teval::PipelineConfig to_config(const EvaluateArgs& args) {
    teval::PipelineConfig config;
    config.records_path = args.records;
    config.outcomes_path = args.outcomes;
    config.out_dir = args.out_dir;
    config.ks = args.ks;
    config.ranking = teval::parse_ranking_method(args.ranking);
    config.seeds = args.seeds;
    config.baseline_noexception = args.baseline_noexception;
    config.provenance = teval::parse_provenance_filter(args.provenance);
    config.dump_features = args.dump_features;
    return config;
}

void add_common_options(CLI::App* cmd, EvaluateArgs& args) {
    cmd->add_option("--records", args.records, "records file (JSON lines)")->required();
    cmd->add_option("--outcomes", args.outcomes, "outcomes file (JSON lines)")->required();
    cmd->add_option("--ranking", args.ranking, "ranking method: iforest, random, or none");
    cmd->add_option("--seeds", args.seeds, "ranking seeds")->delimiter(',');
    cmd->add_option("--provenance", args.provenance,
                    "prefix provenance filter: buggy, fixed, or all");
}

int run_evaluate(const EvaluateArgs& args) {
    const teval::PipelineConfig config = to_config(args);
    const teval::EvaluationResult result = teval::run_evaluation(config);
    teval::write_reports(result, config.out_dir);
    for (const auto& warning : result.warnings) {
        std::cerr << "warning: " << warning << "\n";
    }
    std::cout << "evaluated " << result.bug_universe.size() << " bug(s) across "
              << result.run_universe.size() << " run(s); reports in " << config.out_dir.string()
              << "\n";
    return 0;
}

int run_rank(const EvaluateArgs& args) {
    const teval::PipelineConfig config = to_config(args);
    const std::vector<teval::RankedList> lists = teval::run_ranking_only(config);
    const std::filesystem::path path = config.out_dir / "ranked.tsv";
    std::filesystem::create_directories(config.out_dir);
    teval::write_ranked_tsv(lists, path);
    std::cout << "wrote " << lists.size() << " ranked list(s) to " << path.string() << "\n";
    return 0;
}

int run_gen(const teval::SyntheticSpec& spec, std::uint64_t seed,
            const std::filesystem::path& out_dir) {
    const teval::Corpus corpus = teval::generate_synthetic_corpus(spec, seed);
    std::filesystem::create_directories(out_dir);
    teval::write_records_file(corpus, out_dir / "records.jsonl");
    teval::write_outcomes_file(corpus, out_dir / "outcomes.jsonl");
    teval::write_truth_file(corpus, out_dir / "truth.tsv");
    std::cout << "generated " << corpus.size() << " record(s) for " << spec.bugs << " bug(s) in "
              << out_dir.string() << "\n";
    return 0;
}

int run_stats_compare(const std::filesystem::path& a_path, const std::filesystem::path& b_path) {
    const std::vector<double> a = read_numbers(a_path);
    const std::vector<double> b = read_numbers(b_path);
    if (a.size() != b.size()) {
        throw teval::DataError("paired samples differ in length (" + std::to_string(a.size()) +
                               " vs " + std::to_string(b.size()) + ")");
    }
    if (a.empty()) throw teval::DataError("paired samples are empty");

    const teval::WilcoxonResult w = teval::wilcoxon_signed_rank(teval::PairedSample{a, b});
    const teval::EffectSize effect = teval::cliffs_delta(a, b);
    char buf[128];
    std::cout << "pairs:        " << a.size() << " (nonzero differences: " << w.effective_n
              << ")\n";
    std::snprintf(buf, sizeof buf, "%.6g", w.statistic);
    std::cout << "wilcoxon W:   " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.6g", w.p_two_sided);
    std::cout << "p two-sided:  " << buf << (w.exact ? " (exact)" : " (normal approximation)")
              << "\n";
    std::snprintf(buf, sizeof buf, "%.6f", effect.delta);
    std::cout << "cliffs delta: " << buf << " (" << teval::to_string(effect.magnitude) << ")\n";
    std::cout << "verdict:      " << (w.p_two_sided < 0.05 ? "significant" : "not significant")
              << " at the 0.05 level\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"evaluation toolchain for generated test oracles"};
    app.require_subcommand(1);

    EvaluateArgs eval_args;
    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "classify outcomes, rank failed tests, and write metric reports");
    add_common_options(evaluate, eval_args);
    evaluate->add_option("--out-dir", eval_args.out_dir, "directory for report files")
        ->required();
    evaluate->add_option("--k", eval_args.ks, "cutoffs for found@K")->delimiter(',');
    evaluate->add_flag("--baseline-noexception", eval_args.baseline_noexception,
                       "also evaluate the NoException baseline and compare");
    evaluate->add_flag("--dump-features", eval_args.dump_features,
                       "write per-record feature vectors to features.tsv");

    EvaluateArgs rank_args;
    CLI::App* rank =
        app.add_subcommand("rank", "write the per-bug ranked lists without computing metrics");
    add_common_options(rank, rank_args);
    rank->add_option("--out-dir", rank_args.out_dir, "directory for ranked.tsv")->required();

    teval::SyntheticSpec gen_spec;
    std::uint64_t gen_seed = 1;
    std::string gen_out_dir;
    CLI::App* gen = app.add_subcommand("gen", "generate a synthetic labeled corpus");
    gen->add_option("--bugs", gen_spec.bugs, "number of bugs");
    gen->add_option("--failed", gen_spec.failed_per_bug, "failed tests per bug and run");
    gen->add_option("--tp-min", gen_spec.tp_min, "minimum planted bug-finding tests per bug");
    gen->add_option("--tp-max", gen_spec.tp_max, "maximum planted bug-finding tests per bug");
    gen->add_option("--runs", gen_spec.runs, "generation runs per bug");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out-dir", gen_out_dir, "directory for the corpus files")->required();

    std::string stats_a, stats_b;
    CLI::App* stats = app.add_subcommand(
        "stats-compare", "compare two paired samples (one number per line per file)");
    stats->add_option("--a", stats_a, "first sample file")->required();
    stats->add_option("--b", stats_b, "second sample file")->required();

    try {
        app.parse(argc, argv);
        if (evaluate->parsed()) return run_evaluate(eval_args);
        if (rank->parsed()) return run_rank(rank_args);
        if (gen->parsed()) return run_gen(gen_spec, gen_seed, gen_out_dir);
        if (stats->parsed()) return run_stats_compare(stats_a, stats_b);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const teval::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const teval::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
