#include "teval/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

#include "teval/error.hpp"
#include "teval/trace.hpp"

namespace teval {

RankingMethod parse_ranking_method(const std::string& s) {
    if (s == "iforest") return RankingMethod::IForest;
    if (s == "random") return RankingMethod::Random;
    if (s == "none") return RankingMethod::None;
    throw UsageError("unknown ranking method \"" + s + "\" (expected iforest, random, or none)");
}

ProvenanceFilter parse_provenance_filter(const std::string& s) {
    if (s == "buggy") return ProvenanceFilter::BuggyOnly;
    if (s == "fixed") return ProvenanceFilter::FixedOnly;
    if (s == "all") return ProvenanceFilter::All;
    throw UsageError("unknown provenance filter \"" + s + "\" (expected buggy, fixed, or all)");
}

std::string_view to_string(RankingMethod m) {
    switch (m) {
        case RankingMethod::IForest: return "iforest";
        case RankingMethod::Random: return "random";
        case RankingMethod::None: return "none";
    }
    return "?";
}

std::string_view to_string(ProvenanceFilter f) {
    switch (f) {
        case ProvenanceFilter::BuggyOnly: return "buggy";
        case ProvenanceFilter::FixedOnly: return "fixed";
        case ProvenanceFilter::All: return "all";
    }
    return "?";
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const DataError& e) {
        throw DataError(std::string(name) + ": " + e.what());
    }
}

void validate(const PipelineConfig& config) {
    if (config.records_path.empty()) throw UsageError("a records file is required");
    if (config.outcomes_path.empty()) throw UsageError("an outcomes file is required");
    if (config.ks.empty()) throw UsageError("at least one K value is required");
    for (std::size_t i = 0; i < config.ks.size(); ++i) {
        if (config.ks[i] < 1) throw UsageError("K values must be positive");
        if (i > 0 && config.ks[i] <= config.ks[i - 1]) {
            throw UsageError("K values must be strictly increasing");
        }
    }
    if (config.ranking != RankingMethod::None && config.seeds.empty()) {
        throw UsageError("at least one seed is required when ranking is enabled");
    }
    if (config.threads < 0) throw UsageError("thread count cannot be negative");
}

int resolve_threads(int configured, std::size_t tasks) {
    int n = configured > 0 ? configured : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("ORACLE_RANK_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || cap < 1) {
            throw UsageError("ORACLE_RANK_THREADS must be a positive integer");
        }
        n = std::min(n, static_cast<int>(cap));
    }
    if (tasks < static_cast<std::size_t>(n)) n = static_cast<int>(tasks);
    return n < 1 ? 1 : n;
}

struct BugRunGroup {
    std::string bug_id;
    int run_id = 0;
    std::vector<const CorpusEntry*> failed;  // corpus order
};

/// Failed-on-buggy records grouped by (bug_id, run_id), groups in order of
/// first appearance.
std::vector<BugRunGroup> collect_groups(const Corpus& corpus) {
    std::vector<BugRunGroup> groups;
    std::map<std::pair<std::string, int>, std::size_t> index;
    for (const auto& entry : corpus) {
        if (entry.outcome.buggy_result != RunResult::Fail) continue;
        const auto key = std::make_pair(entry.record.bug_id, entry.record.run_id);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, groups.size()).first;
            groups.push_back(BugRunGroup{entry.record.bug_id, entry.record.run_id, {}});
        }
        groups[it->second].failed.push_back(&entry);
    }
    return groups;
}

struct GroupResult {
    RankingOutcome ranking;
    std::vector<FeatureVector> features;
};

GroupResult process_group(const BugRunGroup& group, const PipelineConfig& config) {
    GroupResult result;

    std::vector<ParsedTrace> traces;
    traces.reserve(group.failed.size());
    for (const CorpusEntry* entry : group.failed) {
        if (!entry->outcome.raw_trace.has_value()) {
            throw DataError("record \"" + entry->record.record_id +
                            "\" failed on the buggy version without a raw_trace");
        }
        traces.push_back(parse_trace(*entry->outcome.raw_trace));
    }
    std::vector<FailedCase> cases;
    cases.reserve(group.failed.size());
    for (std::size_t i = 0; i < group.failed.size(); ++i) {
        cases.push_back(FailedCase{&group.failed[i]->record, &traces[i]});
    }
    result.features = extract_features(cases);

    std::vector<std::string> ids;
    ids.reserve(group.failed.size());
    for (const CorpusEntry* entry : group.failed) ids.push_back(entry->record.record_id);

    if (config.ranking == RankingMethod::IForest) {
        FeatureMatrix points;
        points.reserve(result.features.size());
        for (const auto& f : result.features) points.push_back(f.as_array());
        result.ranking = rank_with_repeats(group.bug_id, group.run_id, ids, points, config.seeds);
    } else if (config.ranking == RankingMethod::Random) {
        for (std::uint64_t seed : config.seeds) {
            result.ranking.per_seed.push_back(
                random_ranking(group.bug_id, group.run_id, ids, seed));
        }
        // the first seed's permutation stands in as the consensus list
        result.ranking.consensus = result.ranking.per_seed.front();
    }
    return result;
}

std::vector<GroupResult> process_groups(const std::vector<BugRunGroup>& groups,
                                        const PipelineConfig& config) {
    std::vector<GroupResult> results(groups.size());
    if (groups.empty()) return results;

    const int threads = resolve_threads(config.threads, groups.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < groups.size(); ++i) {
            results[i] = process_group(groups[i], config);
        }
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= groups.size()) return;
            try {
                results[i] = process_group(groups[i], config);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

/// Rank of the first TP entry of a ranked list, if any.
std::optional<int> first_tp_rank(const RankedList& list,
                                 const std::unordered_map<std::string, OutcomeClass>& classes) {
    for (const auto& entry : list.entries) {
        auto it = classes.find(entry.record_id);
        if (it != classes.end() && it->second == OutcomeClass::TP) return entry.rank;
    }
    return std::nullopt;
}

VariantResult evaluate_variant(const Corpus& corpus, const PipelineConfig& config,
                               const std::vector<std::string>& bug_universe,
                               const std::vector<int>& run_universe) {
    VariantResult variant;

    std::unordered_map<std::string, OutcomeClass> classes;
    classes.reserve(corpus.size());
    for (const auto& entry : corpus) {
        classes.emplace(entry.record.record_id, classify(entry.outcome));
    }

    const bool ranked = config.ranking != RankingMethod::None;
    std::vector<BugRunGroup> groups;
    std::vector<GroupResult> group_results;
    std::map<std::pair<std::string, int>, std::size_t> group_index;
    if (ranked) {
        groups = stage("rank", [&] { return collect_groups(corpus); });
        group_results = stage("rank", [&] { return process_groups(groups, config); });
        for (std::size_t i = 0; i < groups.size(); ++i) {
            group_index.emplace(std::make_pair(groups[i].bug_id, groups[i].run_id), i);
            for (std::size_t r = 0; r < groups[i].failed.size(); ++r) {
                variant.features.emplace_back(groups[i].failed[r]->record.record_id,
                                              group_results[i].features[r]);
            }
        }
    }

    for (int run : run_universe) {
        Corpus slice;
        for (const auto& entry : corpus) {
            if (entry.record.run_id == run) slice.push_back(entry);
        }
        RunMetrics metrics;
        metrics.run_id = run;
        metrics.confusion = count_outcomes(slice);
        metrics.bug_found = bug_found(slice);
        metrics.fpr = fpr(metrics.confusion);
        metrics.precision = precision(metrics.confusion);

        if (ranked && !bug_universe.empty()) {
            std::vector<double> count_sum(config.ks.size(), 0.0);
            std::vector<double> fraction_sum(config.ks.size(), 0.0);
            for (std::size_t s = 0; s < config.seeds.size(); ++s) {
                std::vector<BugRankOutcome> outcomes;
                outcomes.reserve(bug_universe.size());
                for (const auto& bug : bug_universe) {
                    BugRankOutcome outcome{bug, std::nullopt};
                    auto it = group_index.find(std::make_pair(bug, run));
                    if (it != group_index.end()) {
                        outcome.first_tp_rank =
                            first_tp_rank(group_results[it->second].ranking.per_seed[s], classes);
                    }
                    outcomes.push_back(std::move(outcome));
                }
                RunSeedFound rsf{run, config.seeds[s], {}};
                for (std::size_t ki = 0; ki < config.ks.size(); ++ki) {
                    const FoundCount fc = found_at_k(outcomes, config.ks[ki]);
                    rsf.found.push_back(fc);
                    count_sum[ki] += static_cast<double>(fc.count);
                    fraction_sum[ki] += fc.fraction;
                }
                variant.per_run_seed.push_back(std::move(rsf));
            }
            const double n_seeds = static_cast<double>(config.seeds.size());
            for (std::size_t ki = 0; ki < config.ks.size(); ++ki) {
                metrics.found.push_back(
                    KMetric{config.ks[ki], count_sum[ki] / n_seeds, fraction_sum[ki] / n_seeds});
            }
        }
        variant.per_run.push_back(std::move(metrics));
    }

    if (!variant.per_run.empty()) {
        variant.aggregate = aggregate_runs(variant.per_run);
    } else {
        for (int k : config.ks) {
            if (ranked) variant.aggregate.found.push_back(KMetric{k, 0.0, 0.0});
        }
    }
    variant.by_kind = metrics_by_kind(corpus);

    if (ranked) {
        variant.consensus.reserve(groups.size());
        std::vector<std::size_t> order(groups.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (groups[a].bug_id != groups[b].bug_id) return groups[a].bug_id < groups[b].bug_id;
            return groups[a].run_id < groups[b].run_id;
        });
        for (std::size_t i : order) {
            variant.consensus.push_back(group_results[i].ranking.consensus);
        }
    }
    return variant;
}

std::vector<double> per_run_values(const VariantResult& v, double RunMetrics::* field) {
    std::vector<double> out;
    for (const auto& run : v.per_run) out.push_back(run.*field);
    return out;
}

ComparisonRow make_row(const std::string& metric, const std::vector<double>& main_values,
                       const std::vector<double>& baseline_values) {
    ComparisonRow row;
    row.metric = metric;
    double sum_main = 0.0, sum_baseline = 0.0;
    for (double x : main_values) sum_main += x;
    for (double x : baseline_values) sum_baseline += x;
    row.mean_main = sum_main / static_cast<double>(main_values.size());
    row.mean_baseline = sum_baseline / static_cast<double>(baseline_values.size());
    row.wilcoxon = wilcoxon_signed_rank(PairedSample{main_values, baseline_values});
    row.effect = cliffs_delta(main_values, baseline_values);
    row.significant = row.wilcoxon.p_two_sided < 0.05;
    return row;
}

std::vector<ComparisonRow> compare_variants(const VariantResult& main,
                                            const VariantResult& baseline,
                                            const PipelineConfig& config) {
    std::vector<ComparisonRow> rows;
    if (main.per_run.empty()) return rows;

    std::vector<double> main_bugs, base_bugs;
    for (const auto& r : main.per_run) main_bugs.push_back(static_cast<double>(r.bug_found));
    for (const auto& r : baseline.per_run) base_bugs.push_back(static_cast<double>(r.bug_found));
    rows.push_back(make_row("bug_found", main_bugs, base_bugs));
    rows.push_back(make_row("precision", per_run_values(main, &RunMetrics::precision),
                            per_run_values(baseline, &RunMetrics::precision)));
    rows.push_back(make_row("fpr", per_run_values(main, &RunMetrics::fpr),
                            per_run_values(baseline, &RunMetrics::fpr)));

    if (config.ranking != RankingMethod::None &&
        main.per_run_seed.size() == baseline.per_run_seed.size() && !main.per_run_seed.empty()) {
        for (std::size_t ki = 0; ki < config.ks.size(); ++ki) {
            std::vector<double> a, b;
            for (const auto& rsf : main.per_run_seed) {
                a.push_back(static_cast<double>(rsf.found[ki].count));
            }
            for (const auto& rsf : baseline.per_run_seed) {
                b.push_back(static_cast<double>(rsf.found[ki].count));
            }
            rows.push_back(
                make_row("found@" + std::to_string(config.ks[ki]) + "_count", a, b));
        }
    }
    return rows;
}

struct PreparedCorpus {
    Corpus corpus;
    std::vector<std::string> bug_universe;
    std::vector<int> run_universe;
    std::vector<std::string> warnings;
};

PreparedCorpus prepare_corpus(const PipelineConfig& config) {
    PreparedCorpus prepared;
    prepared.corpus = stage("ingest", [&] {
        return ingest_corpus(config.records_path, config.outcomes_path);
    });
    prepared.corpus = deduplicate(prepared.corpus);

    std::set<std::string> bugs;
    std::set<int> runs;
    for (const auto& entry : prepared.corpus) {
        bugs.insert(entry.record.bug_id);
        runs.insert(entry.record.run_id);
    }
    prepared.bug_universe.assign(bugs.begin(), bugs.end());
    prepared.run_universe.assign(runs.begin(), runs.end());

    prepared.corpus = filter_records(prepared.corpus);

    std::size_t fixed_count = 0;
    Corpus kept;
    kept.reserve(prepared.corpus.size());
    for (auto& entry : prepared.corpus) {
        const bool fixed = entry.record.prefix_provenance == Provenance::FixedVersion;
        if (fixed) ++fixed_count;
        const bool keep = config.provenance == ProvenanceFilter::All ||
                          (config.provenance == ProvenanceFilter::BuggyOnly && !fixed) ||
                          (config.provenance == ProvenanceFilter::FixedOnly && fixed);
        if (keep) kept.push_back(std::move(entry));
    }
    prepared.corpus = std::move(kept);
    if (config.provenance != ProvenanceFilter::BuggyOnly && fixed_count > 0) {
        prepared.warnings.push_back(
            "admitted " + std::to_string(fixed_count) +
            " record(s) with fixed-version prefixes; such prefixes tend to overstate "
            "bug-finding performance");
    }
    return prepared;
}

}  // namespace

EvaluationResult run_evaluation(const PipelineConfig& config) {
    validate(config);

    EvaluationResult result;
    result.config = config;

    PreparedCorpus prepared = prepare_corpus(config);
    result.bug_universe = std::move(prepared.bug_universe);
    result.run_universe = std::move(prepared.run_universe);
    result.warnings = std::move(prepared.warnings);

    result.main = stage("metrics", [&] {
        return evaluate_variant(prepared.corpus, config, result.bug_universe,
                                result.run_universe);
    });

    if (config.baseline_noexception) {
        const Corpus base = stage("baseline", [&] {
            return no_exception_baseline(prepared.corpus);
        });
        result.baseline = stage("baseline", [&] {
            return evaluate_variant(base, config, result.bug_universe, result.run_universe);
        });
        result.comparison = compare_variants(result.main, *result.baseline, config);
    }
    return result;
}

std::vector<RankedList> run_ranking_only(const PipelineConfig& config) {
    validate(config);
    if (config.ranking == RankingMethod::None) {
        throw UsageError("ranking method required (iforest or random)");
    }
    PreparedCorpus prepared = prepare_corpus(config);
    std::vector<BugRunGroup> groups = stage("rank", [&] { return collect_groups(prepared.corpus); });
    std::vector<GroupResult> results = stage("rank", [&] { return process_groups(groups, config); });

    std::vector<std::size_t> order(groups.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (groups[a].bug_id != groups[b].bug_id) return groups[a].bug_id < groups[b].bug_id;
        return groups[a].run_id < groups[b].run_id;
    });
    std::vector<RankedList> lists;
    lists.reserve(groups.size());
    for (std::size_t i : order) lists.push_back(std::move(results[i].ranking.consensus));
    return lists;
}

}  // namespace teval
