#include "teval/features.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "teval/error.hpp"
#include "teval/text.hpp"

namespace teval {

namespace {

/// Non-empty whitespace-normalized lines of the full test source, with
/// multiplicity.
std::vector<std::string> normalized_lines(const TestRecord& record) {
    std::vector<std::string> lines;
    for (const auto& line : text::split_lines(full_test_source(record))) {
        std::string normalized = text::normalize_whitespace(line);
        if (!normalized.empty()) lines.push_back(std::move(normalized));
    }
    return lines;
}

bool is_expected_exception(const FailedCase& c) {
    const std::string& name = c.trace->exception_simple_name;
    if (is_assertion_exception_name(name)) return true;
    if (name.empty()) return false;
    return c.record->focal_method_source.find(name) != std::string::npos ||
           c.record->focal_docstring.find(name) != std::string::npos;
}

}  // namespace

std::vector<FeatureVector> extract_features(const std::vector<FailedCase>& bug_failed_set) {
    const std::size_t n = bug_failed_set.size();
    std::vector<FeatureVector> out(n);
    if (n == 0) return out;

    for (const auto& c : bug_failed_set) {
        if (c.record == nullptr || c.trace == nullptr) {
            throw DataError("feature extraction requires a record and a parsed trace per entry");
        }
        if (c.record->bug_id != bug_failed_set.front().record->bug_id) {
            throw DataError("feature extraction set mixes bug ids: \"" +
                            bug_failed_set.front().record->bug_id + "\" and \"" +
                            c.record->bug_id + "\"");
        }
    }

    std::vector<std::vector<std::string>> lines(n);
    std::vector<std::unordered_set<std::string>> line_sets(n);
    std::vector<bool> expected(n);
    for (std::size_t i = 0; i < n; ++i) {
        lines[i] = normalized_lines(*bug_failed_set[i].record);
        line_sets[i] = {lines[i].begin(), lines[i].end()};
        expected[i] = is_expected_exception(bug_failed_set[i]);
    }

    for (std::size_t i = 0; i < n; ++i) {
        const TestRecord& r = *bug_failed_set[i].record;
        const ParsedTrace& t = *bug_failed_set[i].trace;
        FeatureVector& f = out[i];

        for (std::size_t j = 0; j < n; ++j) {
            const TestRecord& s = *bug_failed_set[j].record;
            const ParsedTrace& st = *bug_failed_set[j].trace;
            if (s.focal_method_name == r.focal_method_name) ++f.focal_method_name_count;
            if (st.exception_simple_name == t.exception_simple_name) {
                ++f.trace_exception_count;
                if (!expected[i] && !expected[j]) {
                    ++f.unexp_trace_e_count;
                    if (s.focal_method_name == r.focal_method_name) ++f.focal_unexp_trace_e_count;
                }
            }
            if (t.message.has_value() && st.message.has_value() && *st.message == *t.message) {
                ++f.trace_exception_msg_count;
            }
        }
        if (!t.message.has_value()) f.trace_exception_msg_count = 1;

        for (const auto& line : lines[i]) {
            bool elsewhere = false;
            for (std::size_t j = 0; j < n && !elsewhere; ++j) {
                if (j != i && line_sets[j].contains(line)) elsewhere = true;
            }
            if (!elsewhere) ++f.test_distinct_code_line;
        }

        f.is_exception = r.oracle_kind == OracleKind::ExpectException ? 1 : 0;
        f.is_no_exception = r.oracle_kind == OracleKind::ExpectNoException ? 1 : 0;
        f.test_prefix_exception = prefix_has_catch(r.prefix_source) ? 1 : 0;
        f.is_exp_trace_exception = expected[i] ? 1 : 0;
        f.test_doc_sim = tfidf_cosine(full_test_source(r), r.focal_docstring);
    }
    return out;
}

double tfidf_cosine(std::string_view text_a, std::string_view text_b) {
    const auto tokens_a = text::tokenize_code(text_a);
    const auto tokens_b = text::tokenize_code(text_b);
    if (tokens_a.empty() || tokens_b.empty()) return 0.0;

    std::unordered_map<std::string, int> tf_a, tf_b;
    for (const auto& token : tokens_a) ++tf_a[token];
    for (const auto& token : tokens_b) ++tf_b[token];

    const auto idf = [](int df) { return std::log(3.0 / (1.0 + df)) + 1.0; };

    double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
    for (const auto& [token, count] : tf_a) {
        auto it = tf_b.find(token);
        const double w = idf(it == tf_b.end() ? 1 : 2);
        const double wa = count * w;
        norm_a += wa * wa;
        if (it != tf_b.end()) dot += wa * (it->second * w);
    }
    for (const auto& [token, count] : tf_b) {
        const double w = idf(tf_a.contains(token) ? 2 : 1);
        const double wb = count * w;
        norm_b += wb * wb;
    }
    if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

}  // namespace teval
