#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "teval/corpus.hpp"
#include "teval/features.hpp"
#include "teval/iforest.hpp"
#include "teval/metrics.hpp"
#include "teval/stats.hpp"

namespace teval {

enum class RankingMethod { IForest, Random, None };
enum class ProvenanceFilter { BuggyOnly, FixedOnly, All };

RankingMethod parse_ranking_method(const std::string& s);        // UsageError on junk
ProvenanceFilter parse_provenance_filter(const std::string& s);  // UsageError on junk
std::string_view to_string(RankingMethod m);
std::string_view to_string(ProvenanceFilter f);

struct PipelineConfig {
    std::filesystem::path records_path;
    std::filesystem::path outcomes_path;
    std::filesystem::path out_dir;
    std::vector<int> ks = {1, 3, 5, 10};
    RankingMethod ranking = RankingMethod::IForest;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    bool baseline_noexception = false;
    ProvenanceFilter provenance = ProvenanceFilter::BuggyOnly;
    bool dump_features = false;
    int threads = 0;  // 0 = hardware concurrency; ORACLE_RANK_THREADS caps either way
};

/// Found@K of one run under one ranking seed; the raw vectors handed to the
/// statistics module.
struct RunSeedFound {
    int run_id = 0;
    std::uint64_t seed = 0;
    std::vector<FoundCount> found;  // aligned with config.ks
};

/// Metrics of one corpus view (the main pipeline or the NoException
/// baseline).
struct VariantResult {
    std::vector<RunMetrics> per_run;
    AggregateMetrics aggregate;
    std::vector<KindMetrics> by_kind;
    std::vector<RunSeedFound> per_run_seed;
    std::vector<RankedList> consensus;  // sorted by bug_id, then run_id
    std::vector<std::pair<std::string, FeatureVector>> features;  // per failed record
};

struct ComparisonRow {
    std::string metric;
    double mean_main = 0.0;
    double mean_baseline = 0.0;
    WilcoxonResult wilcoxon;
    EffectSize effect;
    bool significant = false;
};

struct EvaluationResult {
    PipelineConfig config;
    std::vector<std::string> bug_universe;  // sorted; fixed before any filtering
    std::vector<int> run_universe;          // sorted
    std::vector<std::string> warnings;
    VariantResult main;
    std::optional<VariantResult> baseline;
    std::vector<ComparisonRow> comparison;  // main vs baseline, when baseline is on
};

/// Runs the whole evaluation in memory: ingest, dedup, compile-error
/// filter, provenance filter, classification, per-bug ranking, metrics,
/// and (optionally) the NoException baseline with a statistical
/// comparison. Throws UsageError for bad configuration and DataError (with
/// the failing stage named) for bad inputs. Writes nothing.
EvaluationResult run_evaluation(const PipelineConfig& config);

/// Writes report.json, report.txt, and (when ranking is enabled)
/// ranked.tsv, plus features.tsv when requested, into out_dir. Creates the
/// directory; removes the files it started writing if any write fails.
void write_reports(const EvaluationResult& result, const std::filesystem::path& out_dir);

void write_ranked_tsv(const std::vector<RankedList>& lists, const std::filesystem::path& path);
void write_features_tsv(const std::vector<std::pair<std::string, FeatureVector>>& features,
                        const std::filesystem::path& path);

/// The `rank` subcommand's core: the pipeline up to the consensus ranked
/// lists, without metrics. Requires an actual ranking method.
std::vector<RankedList> run_ranking_only(const PipelineConfig& config);

}  // namespace teval
