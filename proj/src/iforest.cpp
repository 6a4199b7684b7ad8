#include "teval/iforest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "teval/error.hpp"
#include "teval/rng.hpp"

namespace teval {

namespace {

constexpr double kEulerGamma = 0.5772156649;

struct TreeBuilder {
    const FeatureMatrix& points;
    std::mt19937_64& gen;
    int height_limit;
    IsolationTree tree;

    int build(std::vector<std::size_t>& sample, int depth) {
        const int node_index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        if (depth >= height_limit || sample.size() <= 1) {
            tree.nodes[node_index].size = static_cast<int>(sample.size());
            return node_index;
        }

        std::array<double, kFeatureCount> lo{}, hi{};
        lo.fill(std::numeric_limits<double>::infinity());
        hi.fill(-std::numeric_limits<double>::infinity());
        for (std::size_t idx : sample) {
            for (std::size_t f = 0; f < kFeatureCount; ++f) {
                lo[f] = std::min(lo[f], points[idx][f]);
                hi[f] = std::max(hi[f], points[idx][f]);
            }
        }
        std::array<std::size_t, kFeatureCount> usable{};
        std::size_t usable_count = 0;
        for (std::size_t f = 0; f < kFeatureCount; ++f) {
            if (lo[f] < hi[f]) usable[usable_count++] = f;
        }
        if (usable_count == 0) {
            tree.nodes[node_index].size = static_cast<int>(sample.size());
            return node_index;
        }

        const std::size_t feature = usable[rng::index(gen, usable_count)];
        const double threshold =
            lo[feature] + rng::unit_open(gen) * (hi[feature] - lo[feature]);

        std::vector<std::size_t> left_sample, right_sample;
        left_sample.reserve(sample.size());
        right_sample.reserve(sample.size());
        for (std::size_t idx : sample) {
            (points[idx][feature] < threshold ? left_sample : right_sample).push_back(idx);
        }
        if (left_sample.empty() || right_sample.empty()) {
            // Rounding pushed the threshold onto an endpoint; no progress is
            // possible on this feature at this sample.
            tree.nodes[node_index].size = static_cast<int>(sample.size());
            return node_index;
        }
        sample.clear();
        sample.shrink_to_fit();

        const int left = build(left_sample, depth + 1);
        const int right = build(right_sample, depth + 1);
        TreeNode& node = tree.nodes[node_index];
        node.feature = static_cast<int>(feature);
        node.threshold = threshold;
        node.left = left;
        node.right = right;
        return node_index;
    }
};

double path_length(const IsolationTree& tree, const FeaturePoint& point) {
    int depth = 0;
    int index = 0;
    while (tree.nodes[index].feature >= 0) {
        const TreeNode& node = tree.nodes[index];
        index = point[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left
                                                                               : node.right;
        ++depth;
    }
    return depth + average_path_length(tree.nodes[index].size);
}

}  // namespace

double average_path_length(int m) {
    if (m <= 1) return 0.0;
    const double dm = static_cast<double>(m);
    return 2.0 * (std::log(dm - 1.0) + kEulerGamma) - 2.0 * (dm - 1.0) / dm;
}

IsolationForestModel fit_matrix(const FeatureMatrix& points, int num_trees, int subsample_size,
                                std::uint64_t seed) {
    if (points.empty()) throw DataError("isolation forest: no points to fit");
    if (num_trees < 1) throw DataError("isolation forest: num_trees must be positive");
    const std::size_t n = points.size();
    if (subsample_size <= 0) subsample_size = static_cast<int>(std::min<std::size_t>(256, n));
    if (static_cast<std::size_t>(subsample_size) > n) subsample_size = static_cast<int>(n);

    IsolationForestModel model;
    model.num_trees = num_trees;
    model.subsample_size = subsample_size;
    model.seed = seed;
    model.trees.reserve(static_cast<std::size_t>(num_trees));

    const int height_limit =
        static_cast<int>(std::bit_width(static_cast<unsigned>(subsample_size) - 1u));
    std::mt19937_64 gen(seed);
    for (int t = 0; t < num_trees; ++t) {
        auto sample = rng::sample_indices(gen, n, static_cast<std::size_t>(subsample_size));
        TreeBuilder builder{points, gen, height_limit, {}};
        builder.build(sample, 0);
        model.trees.push_back(std::move(builder.tree));
    }
    return model;
}

IsolationForestModel fit(const std::vector<FeatureVector>& vectors, int num_trees,
                         int subsample_size, std::uint64_t seed) {
    FeatureMatrix points;
    points.reserve(vectors.size());
    for (const auto& v : vectors) points.push_back(v.as_array());
    return fit_matrix(points, num_trees, subsample_size, seed);
}

double anomaly_score(const IsolationForestModel& model, const FeaturePoint& point) {
    double total = 0.0;
    for (const auto& tree : model.trees) total += path_length(tree, point);
    const double expected = total / static_cast<double>(model.trees.size());
    const double normalizer = average_path_length(model.subsample_size);
    if (normalizer == 0.0) return 0.5;
    return std::exp2(-expected / normalizer);
}

namespace {

RankedList ranked_from_scores(const std::string& bug_id, int run_id,
                              const std::vector<std::string>& record_ids,
                              const std::vector<double>& scores) {
    std::vector<std::size_t> order(record_ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });
    RankedList list{bug_id, run_id, {}};
    list.entries.reserve(record_ids.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        list.entries.push_back(
            RankedEntry{record_ids[order[r]], scores[order[r]], static_cast<int>(r) + 1});
    }
    return list;
}

}  // namespace

RankingOutcome rank_with_repeats(const std::string& bug_id, int run_id,
                                 const std::vector<std::string>& record_ids,
                                 const FeatureMatrix& points,
                                 const std::vector<std::uint64_t>& seeds) {
    if (record_ids.size() != points.size()) {
        throw DataError("ranking: record ids and feature points are misaligned");
    }
    RankingOutcome outcome;
    outcome.consensus.bug_id = bug_id;
    outcome.consensus.run_id = run_id;
    if (record_ids.empty()) {
        outcome.per_seed.assign(seeds.size(), RankedList{bug_id, run_id, {}});
        return outcome;
    }
    if (seeds.empty()) throw DataError("ranking: at least one seed is required");

    const std::size_t n = record_ids.size();
    std::vector<double> mean_scores(n, 0.0);
    outcome.per_seed.reserve(seeds.size());
    for (std::uint64_t seed : seeds) {
        IsolationForestModel model = fit_matrix(points, 100, 0, seed);
        std::vector<double> scores(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = anomaly_score(model, points[i]);
            mean_scores[i] += scores[i];
        }
        outcome.per_seed.push_back(ranked_from_scores(bug_id, run_id, record_ids, scores));
    }
    for (double& s : mean_scores) s /= static_cast<double>(seeds.size());
    outcome.consensus = ranked_from_scores(bug_id, run_id, record_ids, mean_scores);
    return outcome;
}

RankedList random_ranking(const std::string& bug_id, int run_id,
                          const std::vector<std::string>& record_ids, std::uint64_t seed) {
    std::vector<std::size_t> order(record_ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 gen(seed);
    rng::shuffle(gen, order);
    RankedList list{bug_id, run_id, {}};
    list.entries.reserve(record_ids.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        list.entries.push_back(RankedEntry{record_ids[order[r]], 0.0, static_cast<int>(r) + 1});
    }
    return list;
}

}  // namespace teval
