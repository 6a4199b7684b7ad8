#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "teval/corpus.hpp"

namespace teval {

/// Positive/Negative is the buggy-version verdict (fail/pass), True/False
/// is the fixed-version verdict (pass/fail).
enum class OutcomeClass { TP, FP, TN, FN };

/// Classifies one executed record. Throws DataError on compile errors,
/// which must be filtered out beforehand.
OutcomeClass classify(const ExecutionOutcome& outcome);

std::string_view to_string(OutcomeClass c);

struct ConfusionCounts {
    long long tp = 0;
    long long fp = 0;
    long long tn = 0;
    long long fn = 0;

    long long total() const { return tp + fp + tn + fn; }
    bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts count_outcomes(const Corpus& corpus);

/// Number of distinct bug ids with at least one TP.
long long bug_found(const Corpus& corpus);

/// fp / (fp + tn); 0 when the denominator is 0.
double fpr(const ConfusionCounts& c);

/// tp / (tp + fp); 0 when the denominator is 0.
double precision(const ConfusionCounts& c);

struct BugRankOutcome {
    std::string bug_id;
    std::optional<int> first_tp_rank;  // absent when the bug has no TP (infinite rank)

    bool operator==(const BugRankOutcome&) const = default;
};

struct FoundCount {
    long long count = 0;
    double fraction = 0.0;
};

/// Number (and fraction) of bugs whose first TP ranks at or above k.
/// Throws DataError when the list is empty or k < 1.
FoundCount found_at_k(const std::vector<BugRankOutcome>& bug_outcomes, int k);

/// Rewrites the corpus under the NoException view: oracles are ignored, a
/// version's run counts as failed iff it raised a (non-assertion)
/// exception, and records are collapsed to unique prefixes within each
/// (bug_id, run_id). Failure kinds absent from the outcome are inferred
/// from the parsed trace on the buggy side and assumed to be exceptions on
/// the fixed side.
Corpus no_exception_baseline(const Corpus& corpus);

struct KMetric {
    int k = 0;
    double count = 0.0;
    double fraction = 0.0;
};

struct RunMetrics {
    int run_id = 0;
    ConfusionCounts confusion;
    long long bug_found = 0;
    double fpr = 0.0;
    double precision = 0.0;
    std::vector<KMetric> found;  // per K; averaged across ranking seeds
};

struct AggregateMetrics {
    double tp = 0.0, fp = 0.0, tn = 0.0, fn = 0.0;
    double bug_found = 0.0;
    double fpr = 0.0;
    double precision = 0.0;
    std::vector<KMetric> found;
};

/// Arithmetic mean of every metric across runs. Throws DataError on empty
/// input; all runs must carry the same K list.
AggregateMetrics aggregate_runs(const std::vector<RunMetrics>& runs);

struct KindMetrics {
    OracleKind kind = OracleKind::ExpectNoException;
    ConfusionCounts confusion;
    long long bug_found = 0;
    double fpr = 0.0;
    double precision = 0.0;
};

/// Per-oracle-kind breakdown of the classification metrics, in enum order,
/// kinds absent from the corpus omitted.
std::vector<KindMetrics> metrics_by_kind(const Corpus& corpus);

}  // namespace teval
