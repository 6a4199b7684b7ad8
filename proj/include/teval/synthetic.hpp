#pragma once

#include <cstdint>
#include <filesystem>

#include "teval/corpus.hpp"

namespace teval {

/// Shape of a generated desk-scale corpus: every record fails on the buggy
/// version; each bug plants between tp_min and tp_max bug-finding tests
/// (fail buggy, pass fixed) among otherwise homogeneous false positives.
struct SyntheticSpec {
    int bugs = 2;
    int failed_per_bug = 3;
    int tp_min = 1;
    int tp_max = 1;
    int runs = 1;
};

/// Builds the synthetic corpus. Planted TPs carry shifted features: a
/// unique focal method, a rare trace exception with a unique message,
/// distinct code lines, a try/catch prefix, an exception-expecting oracle,
/// and a docstring overlapping the test text. Pure function of (spec,
/// seed); throws DataError on invalid spec values.
Corpus generate_synthetic_corpus(const SyntheticSpec& spec, std::uint64_t seed);

/// Sidecar of `record_id<TAB>is_tp` lines; is_tp reflects the planted
/// outcome (fails buggy, passes fixed).
void write_truth_file(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace teval
