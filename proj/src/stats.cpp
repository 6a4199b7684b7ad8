#include "teval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "teval/error.hpp"

namespace teval {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// P(W+ <= w) of the signed-rank distribution for the given doubled integer
/// ranks, by dynamic programming over all 2^n sign assignments.
double exact_cdf(const std::vector<int>& doubled_ranks, long long w_doubled) {
    const int total = std::accumulate(doubled_ranks.begin(), doubled_ranks.end(), 0);
    std::vector<std::uint64_t> ways(static_cast<std::size_t>(total) + 1, 0);
    ways[0] = 1;
    for (int r : doubled_ranks) {
        for (int w = total; w >= r; --w) {
            ways[static_cast<std::size_t>(w)] += ways[static_cast<std::size_t>(w - r)];
        }
    }
    std::uint64_t at_most = 0;
    const long long limit = std::min<long long>(w_doubled, total);
    for (long long w = 0; w <= limit; ++w) at_most += ways[static_cast<std::size_t>(w)];
    const double denom = std::pow(2.0, static_cast<double>(doubled_ranks.size()));
    return static_cast<double>(at_most) / denom;
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(const PairedSample& s) {
    if (s.a.size() != s.b.size()) {
        throw DataError("wilcoxon: paired samples differ in length (" +
                        std::to_string(s.a.size()) + " vs " + std::to_string(s.b.size()) + ")");
    }
    if (s.a.empty()) throw DataError("wilcoxon: empty sample");

    std::vector<double> diffs;
    diffs.reserve(s.a.size());
    for (std::size_t i = 0; i < s.a.size(); ++i) {
        const double d = s.a[i] - s.b[i];
        if (d != 0.0) diffs.push_back(d);
    }

    WilcoxonResult result;
    result.effective_n = static_cast<int>(diffs.size());
    if (diffs.empty()) return result;  // no evidence either way

    const std::size_t n = diffs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return std::abs(diffs[x]) < std::abs(diffs[y]);
    });

    // Average ranks for ties, kept as doubled integers so the exact
    // distribution can be enumerated without rounding.
    std::vector<int> doubled_rank(n, 0);
    double tie_correction = 0.0;
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start + 1;
        while (end < n && std::abs(diffs[order[end]]) == std::abs(diffs[order[start]])) ++end;
        const int doubled = static_cast<int>(start + end + 1);  // 2 * average of ranks start+1..end
        for (std::size_t i = start; i < end; ++i) doubled_rank[order[i]] = doubled;
        const double t = static_cast<double>(end - start);
        tie_correction += (t * t * t - t) / 48.0;
        start = end;
    }

    long long w_plus_doubled = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (diffs[i] > 0.0) w_plus_doubled += doubled_rank[i];
    }
    const long long total_doubled = static_cast<long long>(n) * static_cast<long long>(n + 1);
    const long long w_minus_doubled = total_doubled - w_plus_doubled;
    const long long w_doubled = std::min(w_plus_doubled, w_minus_doubled);
    result.statistic = static_cast<double>(w_doubled) / 2.0;

    if (n <= 25) {
        result.exact = true;
        std::vector<int> ranks(n);
        for (std::size_t i = 0; i < n; ++i) ranks[i] = doubled_rank[i];
        result.p_two_sided = std::min(1.0, 2.0 * exact_cdf(ranks, w_doubled));
    } else {
        result.exact = false;
        const double dn = static_cast<double>(n);
        const double mean = dn * (dn + 1.0) / 4.0;
        const double variance = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - tie_correction;
        const double w = static_cast<double>(w_doubled) / 2.0;
        double z = 0.0;
        if (w != mean) {
            const double continuity = w < mean ? 0.5 : -0.5;
            z = (w - mean + continuity) / std::sqrt(variance);
        }
        result.p_two_sided = std::clamp(2.0 * normal_cdf(-std::abs(z)), 0.0, 1.0);
    }
    return result;
}

EffectSize cliffs_delta(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw DataError("cliffs_delta: empty sample");
    long long greater = 0, less = 0;
    for (double x : a) {
        for (double y : b) {
            if (x > y) ++greater;
            else if (x < y) ++less;
        }
    }
    EffectSize e;
    e.delta = static_cast<double>(greater - less) /
              (static_cast<double>(a.size()) * static_cast<double>(b.size()));
    e.magnitude = magnitude_of(e.delta);
    return e;
}

Magnitude magnitude_of(double delta) {
    const double d = std::abs(delta);
    if (d < 0.147) return Magnitude::Negligible;
    if (d < 0.33) return Magnitude::Small;
    if (d < 0.474) return Magnitude::Medium;
    return Magnitude::Large;
}

std::string_view to_string(Magnitude magnitude) {
    switch (magnitude) {
        case Magnitude::Negligible: return "negligible";
        case Magnitude::Small: return "small";
        case Magnitude::Medium: return "medium";
        case Magnitude::Large: return "large";
    }
    return "?";
}

}  // namespace teval
