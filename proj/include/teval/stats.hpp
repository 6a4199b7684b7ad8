#pragma once

#include <string_view>
#include <vector>

namespace teval {

struct PairedSample {
    std::vector<double> a;
    std::vector<double> b;
};

struct WilcoxonResult {
    double statistic = 0.0;  // W = min(W+, W-)
    double p_two_sided = 1.0;
    int effective_n = 0;  // pairs remaining after zero differences are dropped
    bool exact = true;
};

enum class Magnitude { Negligible, Small, Medium, Large };

struct EffectSize {
    double delta = 0.0;
    Magnitude magnitude = Magnitude::Negligible;
};

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped; ties among |d| take average ranks. Exact p by enumerating
/// the signed-rank distribution when the effective n is at most 25, normal
/// approximation with tie and continuity corrections above that. All-zero
/// differences give p = 1. Throws DataError on unequal or empty input.
WilcoxonResult wilcoxon_signed_rank(const PairedSample& s);

/// Cliff's delta over all cross pairs of a and b, with the conventional
/// magnitude bands on |delta|: below 0.147 Negligible, below 0.33 Small,
/// below 0.474 Medium, Large otherwise. Throws DataError on empty input.
EffectSize cliffs_delta(const std::vector<double>& a, const std::vector<double>& b);

Magnitude magnitude_of(double delta);
std::string_view to_string(Magnitude magnitude);

}  // namespace teval
