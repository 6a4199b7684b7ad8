#include "teval/metrics.hpp"

#include <unordered_set>

#include "teval/error.hpp"
#include "teval/text.hpp"
#include "teval/trace.hpp"

namespace teval {

OutcomeClass classify(const ExecutionOutcome& outcome) {
    if (outcome.compile_error) {
        throw DataError("cannot classify record \"" + outcome.record_id +
                        "\": compile errors must be filtered out first");
    }
    const bool positive = outcome.buggy_result == RunResult::Fail;
    const bool fixed_passes = outcome.fixed_result == RunResult::Pass;
    if (positive) return fixed_passes ? OutcomeClass::TP : OutcomeClass::FP;
    return fixed_passes ? OutcomeClass::TN : OutcomeClass::FN;
}

std::string_view to_string(OutcomeClass c) {
    switch (c) {
        case OutcomeClass::TP: return "TP";
        case OutcomeClass::FP: return "FP";
        case OutcomeClass::TN: return "TN";
        case OutcomeClass::FN: return "FN";
    }
    return "?";
}

ConfusionCounts count_outcomes(const Corpus& corpus) {
    ConfusionCounts c;
    for (const auto& entry : corpus) {
        switch (classify(entry.outcome)) {
            case OutcomeClass::TP: ++c.tp; break;
            case OutcomeClass::FP: ++c.fp; break;
            case OutcomeClass::TN: ++c.tn; break;
            case OutcomeClass::FN: ++c.fn; break;
        }
    }
    return c;
}

long long bug_found(const Corpus& corpus) {
    std::unordered_set<std::string> bugs;
    for (const auto& entry : corpus) {
        if (classify(entry.outcome) == OutcomeClass::TP) bugs.insert(entry.record.bug_id);
    }
    return static_cast<long long>(bugs.size());
}

double fpr(const ConfusionCounts& c) {
    const long long denom = c.fp + c.tn;
    return denom == 0 ? 0.0 : static_cast<double>(c.fp) / static_cast<double>(denom);
}

double precision(const ConfusionCounts& c) {
    const long long denom = c.tp + c.fp;
    return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

FoundCount found_at_k(const std::vector<BugRankOutcome>& bug_outcomes, int k) {
    if (bug_outcomes.empty()) throw DataError("found_at_k: no bugs to evaluate");
    if (k < 1) throw DataError("found_at_k: k must be at least 1");
    FoundCount result;
    for (const auto& outcome : bug_outcomes) {
        if (outcome.first_tp_rank.has_value() && *outcome.first_tp_rank <= k) ++result.count;
    }
    result.fraction = static_cast<double>(result.count) / static_cast<double>(bug_outcomes.size());
    return result;
}

namespace {

FailureKind buggy_kind(const CorpusEntry& entry) {
    if (entry.outcome.buggy_result == RunResult::Pass) return FailureKind::None;
    if (entry.outcome.buggy_failure_kind.has_value()) return *entry.outcome.buggy_failure_kind;
    const ParsedTrace trace = parse_trace(*entry.outcome.raw_trace);
    return is_assertion_exception_name(trace.exception_simple_name) ? FailureKind::Assertion
                                                                    : FailureKind::Exception;
}

FailureKind fixed_kind(const CorpusEntry& entry) {
    if (entry.outcome.fixed_result == RunResult::Pass) return FailureKind::None;
    if (entry.outcome.fixed_failure_kind.has_value()) return *entry.outcome.fixed_failure_kind;
    // No fixed-side trace is recorded; an unannotated failure is taken as
    // exception-driven.
    return FailureKind::Exception;
}

}  // namespace

Corpus no_exception_baseline(const Corpus& corpus) {
    Corpus out;
    out.reserve(corpus.size());
    std::unordered_set<std::string> seen;
    for (const auto& entry : corpus) {
        std::string key = entry.record.bug_id + "\x1f" + std::to_string(entry.record.run_id) +
                          "\x1f" + text::normalize_whitespace(entry.record.prefix_source);
        if (!seen.insert(std::move(key)).second) continue;

        CorpusEntry rewritten = entry;
        const FailureKind on_buggy = buggy_kind(entry);
        const FailureKind on_fixed = fixed_kind(entry);
        rewritten.outcome.buggy_result =
            on_buggy == FailureKind::Exception ? RunResult::Fail : RunResult::Pass;
        rewritten.outcome.fixed_result =
            on_fixed == FailureKind::Exception ? RunResult::Fail : RunResult::Pass;
        rewritten.outcome.buggy_failure_kind =
            rewritten.outcome.buggy_result == RunResult::Fail ? on_buggy : FailureKind::None;
        rewritten.outcome.fixed_failure_kind =
            rewritten.outcome.fixed_result == RunResult::Fail ? on_fixed : FailureKind::None;
        out.push_back(std::move(rewritten));
    }
    return out;
}

AggregateMetrics aggregate_runs(const std::vector<RunMetrics>& runs) {
    if (runs.empty()) throw DataError("aggregate_runs: no runs");
    AggregateMetrics agg;
    agg.found.resize(runs.front().found.size());
    for (std::size_t i = 0; i < agg.found.size(); ++i) agg.found[i].k = runs.front().found[i].k;

    for (const auto& run : runs) {
        if (run.found.size() != agg.found.size()) {
            throw DataError("aggregate_runs: runs disagree on the K list");
        }
        agg.tp += static_cast<double>(run.confusion.tp);
        agg.fp += static_cast<double>(run.confusion.fp);
        agg.tn += static_cast<double>(run.confusion.tn);
        agg.fn += static_cast<double>(run.confusion.fn);
        agg.bug_found += static_cast<double>(run.bug_found);
        agg.fpr += run.fpr;
        agg.precision += run.precision;
        for (std::size_t i = 0; i < agg.found.size(); ++i) {
            if (run.found[i].k != agg.found[i].k) {
                throw DataError("aggregate_runs: runs disagree on the K list");
            }
            agg.found[i].count += run.found[i].count;
            agg.found[i].fraction += run.found[i].fraction;
        }
    }
    const double n = static_cast<double>(runs.size());
    agg.tp /= n;
    agg.fp /= n;
    agg.tn /= n;
    agg.fn /= n;
    agg.bug_found /= n;
    agg.fpr /= n;
    agg.precision /= n;
    for (auto& km : agg.found) {
        km.count /= n;
        km.fraction /= n;
    }
    return agg;
}

std::vector<KindMetrics> metrics_by_kind(const Corpus& corpus) {
    std::vector<KindMetrics> out;
    for (OracleKind kind :
         {OracleKind::ExpectNoException, OracleKind::ExpectException, OracleKind::Assertion}) {
        Corpus slice;
        for (const auto& entry : corpus) {
            if (entry.record.oracle_kind == kind) slice.push_back(entry);
        }
        if (slice.empty()) continue;
        KindMetrics m;
        m.kind = kind;
        m.confusion = count_outcomes(slice);
        m.bug_found = bug_found(slice);
        m.fpr = fpr(m.confusion);
        m.precision = precision(m.confusion);
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace teval
