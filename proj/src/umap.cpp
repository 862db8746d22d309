#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "docspace/deadline.hpp"
#include "docspace/error.hpp"
#include "docspace/projection.hpp"
#include "docspace/random.hpp"

namespace docspace {

namespace {

constexpr double kBandwidthTolerance = 1e-5;
constexpr double kMinScale = 1e-3;
constexpr int kNegativeSampleRate = 5;
constexpr double kGradientClip = 4.0;

double curve_error(double a, double b, const std::vector<double>& xs, const std::vector<double>& ys) {
    double err = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = 1.0 / (1.0 + a * std::pow(xs[i], 2.0 * b)) - ys[i];
        err += r * r;
    }
    return err;
}

double clip(double v) { return std::clamp(v, -kGradientClip, kGradientClip); }

}  // namespace

UmapCurve fit_umap_curve(double min_dist, double spread) {
    require(min_dist >= 0.0 && spread > 0.0, ErrorCode::InvalidArgument, "min_dist must be >= 0, spread > 0");
    constexpr int kSamples = 300;
    std::vector<double> xs(kSamples), ys(kSamples);
    for (int i = 0; i < kSamples; ++i) {
        xs[static_cast<std::size_t>(i)] = 3.0 * spread * i / (kSamples - 1);
        const double x = xs[static_cast<std::size_t>(i)];
        ys[static_cast<std::size_t>(i)] = x < min_dist ? 1.0 : std::exp(-(x - min_dist) / spread);
    }

    // Coarse grid over (log10 a, b), then a compass search that halves its step.
    double best_la = 0.0, best_b = 1.0;
    double best = std::numeric_limits<double>::infinity();
    for (int ia = 0; ia <= 120; ++ia) {
        const double la = -3.0 + 0.05 * ia;
        for (int ib = 0; ib <= 58; ++ib) {
            const double b = 0.1 + 0.05 * ib;
            const double e = curve_error(std::pow(10.0, la), b, xs, ys);
            if (e < best) {
                best = e;
                best_la = la;
                best_b = b;
            }
        }
    }
    double step = 0.05;
    while (step > 1e-12) {
        bool improved = false;
        const double moves[4][2] = {{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}};
        for (const auto& mv : moves) {
            const double la = best_la + mv[0];
            const double b = best_b + mv[1];
            if (b <= 0.0) continue;
            const double e = curve_error(std::pow(10.0, la), b, xs, ys);
            if (e < best) {
                best = e;
                best_la = la;
                best_b = b;
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
    return {std::pow(10.0, best_la), best_b};
}

FuzzyGraph umap_fuzzy_graph(const DistanceMatrix& distances, int n_neighbors) {
    const auto m = static_cast<int>(distances.size());
    require(n_neighbors >= 2, ErrorCode::InvalidArgument, "n_neighbors must be >= 2");
    require(m >= 3, ErrorCode::InvalidArgument, "UMAP needs at least 3 points");
    // Self is the first of the k neighbors.
    const int k = std::min(n_neighbors, m - 1);

    FuzzyGraph g;
    g.rho.assign(static_cast<std::size_t>(m), 0.0);
    g.sigma.assign(static_cast<std::size_t>(m), 1.0);
    const double target = std::log2(static_cast<double>(k));
    const double global_mean = distances.values.sum() / (static_cast<double>(m) * (m - 1));

    std::map<std::pair<int, int>, std::pair<double, double>> directed;  // (i<j) -> (w_ij, w_ji)
    std::vector<int> order(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::swap(order[0], order[static_cast<std::size_t>(i)]);
        std::partial_sort(order.begin() + 1, order.begin() + k, order.end(), [&](int a, int b) {
            const double da = distances(i, a), db = distances(i, b);
            return da < db || (da == db && a < b);
        });

        double rho = 0.0, mean = 0.0;
        for (int t = 1; t < k; ++t) {
            const double d = distances(i, order[static_cast<std::size_t>(t)]);
            mean += d;
            if (rho == 0.0 && d > 0.0) rho = d;
        }
        mean /= (k - 1);

        double lo = 0.0, hi = std::numeric_limits<double>::infinity(), sigma = 1.0;
        for (int iter = 0; iter < 200; ++iter) {
            double psum = 0.0;
            for (int t = 1; t < k; ++t) {
                const double d = distances(i, order[static_cast<std::size_t>(t)]) - rho;
                psum += d > 0.0 ? std::exp(-d / sigma) : 1.0;
            }
            if (std::abs(psum - target) < kBandwidthTolerance) break;
            if (psum > target) {
                hi = sigma;
                sigma = 0.5 * (lo + hi);
            } else {
                lo = sigma;
                sigma = std::isinf(hi) ? sigma * 2.0 : 0.5 * (lo + hi);
            }
        }
        sigma = std::max(sigma, kMinScale * (rho > 0.0 ? mean : global_mean));
        if (sigma <= 0.0) sigma = std::numeric_limits<double>::min();
        g.rho[static_cast<std::size_t>(i)] = rho;
        g.sigma[static_cast<std::size_t>(i)] = sigma;

        for (int t = 1; t < k; ++t) {
            const int j = order[static_cast<std::size_t>(t)];
            const double w = std::exp(-std::max(0.0, distances(i, j) - rho) / sigma);
            auto& entry = directed[{std::min(i, j), std::max(i, j)}];
            (i < j ? entry.first : entry.second) = w;
        }
    }

    for (const auto& [key, w] : directed) {
        const double sym = w.first + w.second - w.first * w.second;
        if (sym <= 0.0) continue;
        g.head.push_back(key.first);
        g.tail.push_back(key.second);
        g.weight.push_back(sym);
        g.head.push_back(key.second);
        g.tail.push_back(key.first);
        g.weight.push_back(sym);
    }
    return g;
}

Positions run_umap(const DistanceMatrix& distances, const UmapParams& params, std::uint64_t seed) {
    require(params.n_epochs >= 1, ErrorCode::InvalidArgument, "UMAP needs n_epochs >= 1");
    const auto m = distances.size();
    FuzzyGraph graph = umap_fuzzy_graph(distances, params.n_neighbors);
    require(!graph.weight.empty(), ErrorCode::Degenerate, "k-NN graph has no edges");
    const UmapCurve curve = fit_umap_curve(params.min_dist);
    const double a = curve.a, b = curve.b;

    const double max_w = *std::max_element(graph.weight.begin(), graph.weight.end());
    std::vector<int> head, tail;
    std::vector<double> epochs_per_sample;
    for (std::size_t e = 0; e < graph.weight.size(); ++e) {
        if (graph.weight[e] < max_w / params.n_epochs) continue;
        head.push_back(graph.head[e]);
        tail.push_back(graph.tail[e]);
        epochs_per_sample.push_back(max_w / graph.weight[e]);
    }
    const std::size_t edges = head.size();
    std::vector<double> next_sample = epochs_per_sample;
    std::vector<double> per_negative(edges), next_negative(edges);
    for (std::size_t e = 0; e < edges; ++e) {
        per_negative[e] = epochs_per_sample[e] / kNegativeSampleRate;
        next_negative[e] = per_negative[e];
    }

    Rng rng(seed);
    Positions y(m, 2);
    for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = rng.uniform(-10.0, 10.0);

    for (int epoch = 0; epoch < params.n_epochs; ++epoch) {
        check_deadline();
        const double alpha = 1.0 - static_cast<double>(epoch) / params.n_epochs;
        const double n = static_cast<double>(epoch);
        for (std::size_t e = 0; e < edges; ++e) {
            if (next_sample[e] > n) continue;
            const int j = head[e];
            const int k = tail[e];
            double dx = y(j, 0) - y(k, 0), dy = y(j, 1) - y(k, 1);
            double d2 = dx * dx + dy * dy;
            double coeff = 0.0;
            if (d2 > 0.0) coeff = -2.0 * a * b * std::pow(d2, b - 1.0) / (a * std::pow(d2, b) + 1.0);
            const double gx = clip(coeff * dx), gy = clip(coeff * dy);
            y(j, 0) += gx * alpha;
            y(j, 1) += gy * alpha;
            y(k, 0) -= gx * alpha;
            y(k, 1) -= gy * alpha;
            next_sample[e] += epochs_per_sample[e];

            const int negatives = static_cast<int>((n - next_negative[e]) / per_negative[e]);
            for (int s = 0; s < negatives; ++s) {
                const auto other = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m)));
                if (other == j) continue;
                dx = y(j, 0) - y(other, 0);
                dy = y(j, 1) - y(other, 1);
                d2 = dx * dx + dy * dy;
                double rx = kGradientClip, ry = kGradientClip;
                if (d2 > 0.0) {
                    coeff = 2.0 * b / ((0.001 + d2) * (a * std::pow(d2, b) + 1.0));
                    rx = clip(coeff * dx);
                    ry = clip(coeff * dy);
                }
                y(j, 0) += rx * alpha;
                y(j, 1) += ry * alpha;
            }
            next_negative[e] += negatives * per_negative[e];
        }
    }
    return y;
}

}  // namespace docspace
