#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "docspace/deadline.hpp"
#include "docspace/error.hpp"
#include "docspace/projection.hpp"
#include "docspace/random.hpp"

namespace docspace {

namespace {

// Lowest unit index wins ties.
Eigen::Index best_matching_unit(const Eigen::MatrixXd& weights, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index u = 0; u < weights.rows(); ++u) {
        const double d = (weights.row(u) - x).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = u;
        }
    }
    return best;
}

}  // namespace

Positions run_som(const Eigen::MatrixXd& vectors, const SomParams& params, std::uint64_t seed) {
    require(params.grid_m >= 2 && params.grid_n >= 2, ErrorCode::InvalidArgument, "SOM grid must be at least 2x2");
    require(params.epochs >= 1, ErrorCode::InvalidArgument, "SOM needs epochs >= 1");
    require(vectors.rows() >= 1 && vectors.cols() >= 1 && vectors.allFinite(), ErrorCode::InvalidArgument,
            "SOM input must be a finite non-empty matrix");

    const auto m = vectors.rows();
    const int units = params.grid_m * params.grid_n;
    const Eigen::RowVectorXd lo = vectors.colwise().minCoeff();
    const Eigen::RowVectorXd hi = vectors.colwise().maxCoeff();

    Rng rng(seed);
    Eigen::MatrixXd weights(units, vectors.cols());
    for (int u = 0; u < units; ++u) {
        for (Eigen::Index c = 0; c < vectors.cols(); ++c) weights(u, c) = rng.uniform(lo[c], hi[c]);
    }

    const double radius0 = std::max(params.grid_m, params.grid_n) / 2.0;
    const double total_steps = static_cast<double>(params.epochs) * static_cast<double>(m);
    const double denom = std::max(total_steps - 1.0, 1.0);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);

    long step = 0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        check_deadline();
        rng.shuffle(order.begin(), order.end());
        for (Eigen::Index idx : order) {
            const double frac = static_cast<double>(step++) / denom;
            const double rate = 0.5 + (0.01 - 0.5) * frac;
            const double radius = radius0 + (1.0 - radius0) * frac;
            const double two_r2 = 2.0 * radius * radius;

            const auto x = vectors.row(idx);
            const Eigen::Index bmu = best_matching_unit(weights, x);
            const int br = static_cast<int>(bmu) / params.grid_n;
            const int bc = static_cast<int>(bmu) % params.grid_n;
            for (int u = 0; u < units; ++u) {
                const int dr = u / params.grid_n - br;
                const int dc = u % params.grid_n - bc;
                const double h = std::exp(-static_cast<double>(dr * dr + dc * dc) / two_r2);
                weights.row(u) += rate * h * (x - weights.row(u));
            }
        }
    }

    Positions out(m, 2);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto bmu = best_matching_unit(weights, vectors.row(i));
        out(i, 0) = static_cast<double>(bmu / params.grid_n);
        out(i, 1) = static_cast<double>(bmu % params.grid_n);
    }
    return out;
}

}  // namespace docspace
