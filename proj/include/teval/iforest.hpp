#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "teval/features.hpp"

namespace teval {

using FeaturePoint = std::array<double, kFeatureCount>;
using FeatureMatrix = std::vector<FeaturePoint>;

/// One node of an isolation tree. Internal nodes carry a split; leaves
/// carry the size of the training sample that reached them.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int size = 0;
};

struct IsolationTree {
    std::vector<TreeNode> nodes;  // node 0 is the root
};

struct IsolationForestModel {
    std::vector<IsolationTree> trees;
    int num_trees = 0;
    int subsample_size = 0;
    std::uint64_t seed = 0;
};

/// Average unsuccessful-search path length of a binary search tree over m
/// points: c(1) = 0, c(m) = 2 H(m-1) - 2 (m-1)/m with H(i) = ln(i) + Euler's
/// constant. Used both to stop path measurement at leaves and to normalize
/// scores.
double average_path_length(int m);

/// Fits an isolation forest on the given points. Each tree grows on a
/// without-replacement subsample, splitting on a uniformly random
/// non-constant feature at a uniformly random threshold strictly between
/// the sample's min and max, down to height ceil(log2(subsample_size)).
/// subsample_size = 0 means min(256, n). Deterministic given the seed.
/// Throws DataError when points is empty.
IsolationForestModel fit_matrix(const FeatureMatrix& points, int num_trees = 100,
                                int subsample_size = 0, std::uint64_t seed = 0);

IsolationForestModel fit(const std::vector<FeatureVector>& vectors, int num_trees = 100,
                         int subsample_size = 0, std::uint64_t seed = 0);

/// Anomaly score 2^(-E[h]/c(subsample_size)) where E[h] averages the path
/// length of the point over all trees. Defined as 0.5 when the normalizer
/// is zero (single-point subsamples).
double anomaly_score(const IsolationForestModel& model, const FeaturePoint& point);

struct RankedEntry {
    std::string record_id;
    double score = 0.0;
    int rank = 0;  // 1-based, entries stored in rank order
};

struct RankedList {
    std::string bug_id;
    int run_id = 0;
    std::vector<RankedEntry> entries;
};

struct RankingOutcome {
    std::vector<RankedList> per_seed;  // aligned with the seeds argument
    RankedList consensus;
};

/// Ranks one bug's failed test cases: fits one forest per seed, scores all
/// points, and ranks by score descending, ties broken by input order. The
/// consensus list ranks by mean score across seeds. Empty input gives empty
/// lists; a non-empty input with no seeds is an error.
RankingOutcome rank_with_repeats(const std::string& bug_id, int run_id,
                                 const std::vector<std::string>& record_ids,
                                 const FeatureMatrix& points,
                                 const std::vector<std::uint64_t>& seeds);

/// Baseline: a seeded uniform random permutation. Scores are reported as 0.
RankedList random_ranking(const std::string& bug_id, int run_id,
                          const std::vector<std::string>& record_ids, std::uint64_t seed);

}  // namespace teval
