#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "teval/corpus.hpp"
#include "teval/trace.hpp"

namespace teval {

/// Per-record ranking features, computed over the set of failed test cases
/// of one bug and run. Counts include the record itself, so a value unique
/// within the set yields 1.
struct FeatureVector {
    int focal_method_name_count = 0;
    int test_distinct_code_line = 0;
    int is_exception = 0;
    int is_no_exception = 0;
    int test_prefix_exception = 0;
    int trace_exception_count = 0;
    int trace_exception_msg_count = 0;
    int is_exp_trace_exception = 0;
    int unexp_trace_e_count = 0;
    int focal_unexp_trace_e_count = 0;
    double test_doc_sim = 0.0;

    bool operator==(const FeatureVector&) const = default;

    std::array<double, 11> as_array() const {
        return {static_cast<double>(focal_method_name_count),
                static_cast<double>(test_distinct_code_line),
                static_cast<double>(is_exception),
                static_cast<double>(is_no_exception),
                static_cast<double>(test_prefix_exception),
                static_cast<double>(trace_exception_count),
                static_cast<double>(trace_exception_msg_count),
                static_cast<double>(is_exp_trace_exception),
                static_cast<double>(unexp_trace_e_count),
                static_cast<double>(focal_unexp_trace_e_count),
                test_doc_sim};
    }
};

inline constexpr std::size_t kFeatureCount = 11;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "focal_method_name_count", "test_distinct_code_line",  "is_exception",
    "is_no_exception",         "test_prefix_exception",    "trace_exception_count",
    "trace_exception_msg_count", "is_exp_trace_exception", "unexp_trace_e_count",
    "focal_unexp_trace_e_count", "test_doc_sim"};

struct FailedCase {
    const TestRecord* record = nullptr;
    const ParsedTrace* trace = nullptr;
};

/// Computes the feature vector of every member of one bug's failed set, in
/// input order. Empty input gives an empty result; members with differing
/// bug_id raise DataError.
std::vector<FeatureVector> extract_features(const std::vector<FailedCase>& bug_failed_set);

/// TF-IDF cosine similarity of two texts treated as a two-document
/// collection: raw term counts weighted by ln((1 + N)/(1 + df)) + 1 with
/// N = 2. Returns 0 when either text has no tokens.
double tfidf_cosine(std::string_view text_a, std::string_view text_b);

}  // namespace teval
