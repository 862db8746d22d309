#include "docspace/quality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "docspace/error.hpp"
#include "docspace/random.hpp"

namespace docspace {

namespace {

constexpr Eigen::Index kAllPairsLimit = 2000;
constexpr std::size_t kSampledPairs = 2'000'000;

// rank[i*m + j] = 1-based rank of j among i's neighbors (self excluded), ties by index.
std::vector<int> neighbor_ranks(const Eigen::MatrixXd& d) {
    const auto m = d.rows();
    std::vector<int> rank(static_cast<std::size_t>(m * m), 0);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            if (a == i || b == i) return a == i && b != i;
            return d(i, a) < d(i, b) || (d(i, a) == d(i, b) && a < b);
        });
        for (Eigen::Index r = 1; r < m; ++r) rank[static_cast<std::size_t>(i * m + order[static_cast<std::size_t>(r)])] = static_cast<int>(r);
    }
    return rank;
}

std::vector<Eigen::Index> nearest(const Eigen::MatrixXd& d, Eigen::Index i, int k) {
    std::vector<Eigen::Index> order;
    order.reserve(static_cast<std::size_t>(d.rows() - 1));
    for (Eigen::Index j = 0; j < d.rows(); ++j) {
        if (j != i) order.push_back(j);
    }
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return d(i, a) < d(i, b) || (d(i, a) == d(i, b) && a < b);
    });
    order.resize(static_cast<std::size_t>(k));
    return order;
}

// Compacts labels to 0..k-1 preserving their order.
std::vector<int> compact_labels(std::span<const int> labels, int& k) {
    std::map<int, int> ids;
    for (int l : labels) ids.emplace(l, 0);
    int next = 0;
    for (auto& [_, v] : ids) v = next++;
    k = next;
    std::vector<int> out;
    out.reserve(labels.size());
    for (int l : labels) out.push_back(ids[l]);
    return out;
}

void check_range(double v, double lo, double hi, const char* name) {
    if (!(v >= lo - 1e-12 && v <= hi + 1e-12)) {
        throw std::logic_error(std::string(name) + " left its range: " + std::to_string(v));
    }
}

}  // namespace

DistanceMatrix layout_distances(const Positions& layout) {
    return pairwise_distances(Eigen::MatrixXd(layout), Metric::Euclidean);
}

RankMetrics rank_based_metrics(const DistanceMatrix& high, const Positions& layout, int k) {
    const auto m = high.size();
    require(layout.rows() == m, ErrorCode::DimensionMismatch, "layout and distance matrix differ in size");
    require(k >= 1 && k < m && 2 * m - 3 * k - 1 > 0, ErrorCode::OutOfRange,
            "k=" + std::to_string(k) + " too large for " + std::to_string(m) + " points");
    require(high.values.allFinite() && layout.allFinite(), ErrorCode::InvalidArgument, "non-finite distances");

    const Eigen::MatrixXd low = layout_distances(layout).values;
    const auto high_rank = neighbor_ranks(high.values);
    const auto low_rank = neighbor_ranks(low);

    double trust_penalty = 0.0, cont_penalty = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (j == i) continue;
            const auto idx = static_cast<std::size_t>(i * m + j);
            if (low_rank[idx] <= k && high_rank[idx] > k) trust_penalty += high_rank[idx] - k;
            if (high_rank[idx] <= k && low_rank[idx] > k) cont_penalty += low_rank[idx] - k;
        }
    }
    const double md = static_cast<double>(m);
    const double norm = 2.0 / (md * k * (2.0 * md - 3.0 * k - 1.0));
    RankMetrics r{1.0 - norm * trust_penalty, 1.0 - norm * cont_penalty};
    check_range(r.trust, 0.0, 1.0, "trustworthiness");
    check_range(r.cont, 0.0, 1.0, "continuity");
    return r;
}

double neighborhood_hit(const Positions& layout, std::span<const int> labels, int k) {
    const auto m = layout.rows();
    require(static_cast<Eigen::Index>(labels.size()) == m, ErrorCode::DimensionMismatch, "label count differs");
    require(k >= 1 && m >= k + 1, ErrorCode::OutOfRange, "too few points for k");
    const Eigen::MatrixXd d = layout_distances(layout).values;
    double total = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        int same = 0;
        for (auto j : nearest(d, i, k)) same += labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(i)];
        total += static_cast<double>(same) / k;
    }
    const double nh = total / static_cast<double>(m);
    check_range(nh, 0.0, 1.0, "neighborhood hit");
    return nh;
}

std::optional<std::size_t> default_pair_budget(Eigen::Index m) {
    if (m <= kAllPairsLimit) return std::nullopt;
    return kSampledPairs;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    require(sxx > 0.0 && syy > 0.0, ErrorCode::Degenerate, "correlation undefined for a constant vector");
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

double shepard_correlation(const DistanceMatrix& high, const Positions& layout, std::optional<std::size_t> budget,
                           std::uint64_t seed) {
    const auto m = high.size();
    require(layout.rows() == m, ErrorCode::DimensionMismatch, "layout and distance matrix differ in size");
    require(m >= 3, ErrorCode::InvalidArgument, "Shepard correlation needs at least 3 points");
    const auto all_pairs = static_cast<std::size_t>(m * (m - 1) / 2);

    std::vector<double> hi, lo;
    auto add = [&](Eigen::Index i, Eigen::Index j) {
        hi.push_back(high(i, j));
        lo.push_back((layout.row(i) - layout.row(j)).norm());
    };
    if (!budget || *budget >= all_pairs) {
        hi.reserve(all_pairs);
        lo.reserve(all_pairs);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = i + 1; j < m; ++j) add(i, j);
        }
    } else {
        require(*budget >= 2, ErrorCode::InvalidArgument, "pair budget must be >= 2");
        Rng rng(seed);
        for (std::size_t s = 0; s < *budget; ++s) {
            const auto a = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m)));
            auto b = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m - 1)));
            if (b >= a) ++b;
            add(a, b);
        }
    }
    require(std::all_of(hi.begin(), hi.end(), [](double v) { return std::isfinite(v); }), ErrorCode::InvalidArgument,
            "non-finite distances");
    const auto rh = average_ranks(hi);
    const auto rl = average_ranks(lo);
    const double rho = pearson(rh, rl);
    check_range(rho, -1.0, 1.0, "Shepard correlation");
    return std::clamp(rho, -1.0, 1.0);
}

ClusterSeparation cluster_separation_metrics(const Positions& layout, std::span<const int> raw_labels) {
    const auto m = layout.rows();
    require(static_cast<Eigen::Index>(raw_labels.size()) == m, ErrorCode::DimensionMismatch, "label count differs");
    int k = 0;
    const auto labels = compact_labels(raw_labels, k);
    require(k >= 2, ErrorCode::InvalidArgument, "cluster separation needs at least two classes");
    require(m >= k + 1, ErrorCode::InvalidArgument, "cluster separation needs m >= k + 1");

    const auto ku = static_cast<std::size_t>(k);
    Eigen::MatrixX2d centroid = Eigen::MatrixX2d::Zero(k, 2);
    std::vector<int> size(ku, 0);
    for (Eigen::Index i = 0; i < m; ++i) {
        centroid.row(labels[static_cast<std::size_t>(i)]) += layout.row(i);
        ++size[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) centroid.row(c) /= size[static_cast<std::size_t>(c)];
    const Eigen::RowVector2d overall = layout.colwise().mean();

    ClusterSeparation out;

    int consistent = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            const double d = (layout.row(i) - centroid.row(c)).norm();
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        consistent += best == labels[static_cast<std::size_t>(i)];
    }
    out.dsc = static_cast<double>(consistent) / static_cast<double>(m);

    double silhouette_sum = 0.0;
    std::vector<double> class_sum(ku);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto own = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
        if (size[own] == 1) continue;
        std::fill(class_sum.begin(), class_sum.end(), 0.0);
        for (Eigen::Index j = 0; j < m; ++j) {
            if (j != i) class_sum[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])] += (layout.row(i) - layout.row(j)).norm();
        }
        const double a = class_sum[own] / (size[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < ku; ++c) {
            if (c != own) b = std::min(b, class_sum[c] / size[c]);
        }
        const double denom = std::max(a, b);
        if (denom > 0.0) silhouette_sum += (b - a) / denom;
    }
    out.silhouette = silhouette_sum / static_cast<double>(m);

    double between = 0.0, within = 0.0;
    for (int c = 0; c < k; ++c) between += size[static_cast<std::size_t>(c)] * (centroid.row(c) - overall).squaredNorm();
    for (Eigen::Index i = 0; i < m; ++i) within += (layout.row(i) - centroid.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
    out.ch_raw = within == 0.0 ? 1.0 : (between / (k - 1)) / (within / static_cast<double>(m - k));

    std::vector<double> scatter(ku, 0.0);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto c = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
        scatter[c] += (layout.row(i) - centroid.row(static_cast<Eigen::Index>(c))).norm();
    }
    for (std::size_t c = 0; c < ku; ++c) scatter[c] /= size[c];
    double db = 0.0;
    for (int c = 0; c < k && !out.db_degenerate; ++c) {
        double worst = 0.0;
        for (int o = 0; o < k; ++o) {
            if (o == c) continue;
            const double sep = (centroid.row(c) - centroid.row(o)).norm();
            if (sep == 0.0) {
                out.db_degenerate = true;
                break;
            }
            worst = std::max(worst, (scatter[static_cast<std::size_t>(c)] + scatter[static_cast<std::size_t>(o)]) / sep);
        }
        db += worst;
    }
    out.db_raw = out.db_degenerate ? std::numeric_limits<double>::infinity() : db / k;

    check_range(out.dsc, 0.0, 1.0, "distance consistency");
    check_range(out.silhouette, -1.0, 1.0, "silhouette");
    if (!(out.ch_raw >= 0.0) || !(out.db_raw >= 0.0)) throw std::logic_error("CH/DB must be non-negative");
    return out;
}

MetricVector evaluate_layout(const DistanceMatrix& high, const Positions& layout, std::span<const int> labels,
                             const EvaluationOptions& options) {
    MetricVector v;
    v.k_neighbors = options.k_neighbors;
    const auto rank = rank_based_metrics(high, layout, options.k_neighbors);
    v.trust = rank.trust;
    v.cont = rank.cont;
    const auto budget = options.use_all_pairs ? std::nullopt
                                              : (options.pair_budget ? options.pair_budget : default_pair_budget(high.size()));
    v.shepard = shepard_correlation(high, layout, budget, options.seed);
    v.nh = neighborhood_hit(layout, labels, options.k_neighbors);
    const auto sep = cluster_separation_metrics(layout, labels);
    v.dsc = sep.dsc;
    v.silhouette = sep.silhouette;
    v.ch_raw = sep.ch_raw;
    v.db_raw = sep.db_raw;
    return v;
}

}  // namespace docspace
