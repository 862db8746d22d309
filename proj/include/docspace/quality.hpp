#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "docspace/models.hpp"
#include "docspace/projection.hpp"

namespace docspace {

struct MetricVector {
    double trust = 0.0;
    double cont = 0.0;
    double shepard = 0.0;
    double nh = 0.0;
    double dsc = 0.0;
    double silhouette = 0.0;
    double ch_raw = 0.0;
    /// +inf when two class centroids coincide.
    double db_raw = 0.0;
    int k_neighbors = 7;
};

struct RankMetrics {
    double trust = 0.0;
    double cont = 0.0;
};

/// Trustworthiness and continuity over k-neighborhoods; neighbor ties break by ascending index.
RankMetrics rank_based_metrics(const DistanceMatrix& high, const Positions& layout, int k = 7);

/// Mean fraction of each point's k nearest layout neighbors sharing its label.
double neighborhood_hit(const Positions& layout, std::span<const int> labels, int k = 7);

/// All pairs up to this many documents, a sampled budget above it.
std::optional<std::size_t> default_pair_budget(Eigen::Index m);

/// Spearman correlation (average ranks) between high-dimensional and layout pair distances.
/// With a budget smaller than m(m-1)/2, `budget` pairs are drawn uniformly with `seed`.
double shepard_correlation(const DistanceMatrix& high, const Positions& layout,
                           std::optional<std::size_t> pair_budget, std::uint64_t seed = 0);

struct ClusterSeparation {
    double dsc = 0.0;
    double silhouette = 0.0;
    double ch_raw = 0.0;
    double db_raw = 0.0;
    /// True when two class centroids coincide (db_raw is then +inf).
    bool db_degenerate = false;
};

ClusterSeparation cluster_separation_metrics(const Positions& layout, std::span<const int> labels);

/// Euclidean distances between layout rows.
DistanceMatrix layout_distances(const Positions& layout);

/// Pearson correlation; throws Degenerate when either vector is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Spearman helper: ranks with ties replaced by their average rank (1-based).
std::vector<double> average_ranks(std::span<const double> values);

struct EvaluationOptions {
    int k_neighbors = 7;
    /// nullopt selects default_pair_budget(m).
    std::optional<std::size_t> pair_budget;
    bool use_all_pairs = false;
    std::uint64_t seed = 0;
};

MetricVector evaluate_layout(const DistanceMatrix& high, const Positions& layout, std::span<const int> labels,
                             const EvaluationOptions& options = {});

}  // namespace docspace
