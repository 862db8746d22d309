#include <algorithm>
#include <cmath>
#include <limits>

#include "docspace/deadline.hpp"
#include "docspace/error.hpp"
#include "docspace/projection.hpp"
#include "docspace/random.hpp"

namespace docspace {

namespace {

constexpr double kEarlyExaggeration = 12.0;
constexpr int kMomentumSwitch = 250;

double kl_divergence(const Eigen::MatrixXd& p, const Positions& y) {
    const auto m = y.rows();
    Eigen::MatrixXd num(m, m);
    double z = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        num(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double q = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
            num(i, j) = num(j, i) = q;
            z += 2.0 * q;
        }
    }
    double kl = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i == j || p(i, j) <= 0.0) continue;
            const double q = std::max(num(i, j) / z, std::numeric_limits<double>::min());
            kl += p(i, j) * std::log(p(i, j) / q);
        }
    }
    return kl;
}

}  // namespace

Eigen::MatrixXd tsne_conditional_affinities(const DistanceMatrix& distances, double perplexity,
                                            std::vector<double>* achieved) {
    const auto m = distances.size();
    require(perplexity >= 2.0 && perplexity < static_cast<double>(m - 1), ErrorCode::PerplexityInfeasible,
            "perplexity " + std::to_string(perplexity) + " infeasible for " + std::to_string(m) + " points");

    const double target = std::log(perplexity);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
    if (achieved) achieved->assign(static_cast<std::size_t>(m), 0.0);
    Eigen::VectorXd d2(m);

    for (Eigen::Index i = 0; i < m; ++i) {
        double min_d2 = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < m; ++j) {
            d2[j] = distances(i, j) * distances(i, j);
            if (j != i) min_d2 = std::min(min_d2, d2[j]);
        }

        double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
        double entropy = 0.0;
        for (int iter = 0; iter < 1000; ++iter) {
            double sum = 0.0, weighted = 0.0;
            for (Eigen::Index j = 0; j < m; ++j) {
                if (j == i) continue;
                const double shifted = d2[j] - min_d2;
                const double v = std::exp(-beta * shifted);
                p(i, j) = v;
                sum += v;
                weighted += shifted * v;
            }
            entropy = std::log(sum) + beta * weighted / sum;
            for (Eigen::Index j = 0; j < m; ++j) {
                if (j != i) p(i, j) /= sum;
            }
            const double diff = entropy - target;
            if (std::abs(diff) < 1e-12) break;
            if (diff > 0.0) {
                lo = beta;
                beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (lo + hi);
            } else {
                hi = beta;
                beta = 0.5 * (lo + hi);
            }
            if ((!std::isinf(hi) && hi - lo <= 1e-15 * hi) || beta > 1e200) break;
        }
        if (achieved) (*achieved)[static_cast<std::size_t>(i)] = std::exp(entropy);
    }
    return p;
}

Positions run_tsne(const DistanceMatrix& distances, const TsneParams& params, std::uint64_t seed,
                   TsneTrace* trace) {
    const auto m = distances.size();
    require(params.n_iter >= 1, ErrorCode::InvalidArgument, "t-SNE needs n_iter >= 1");
    const double learning_rate = params.learning_rate.value_or(std::max(static_cast<double>(m) / 48.0, 50.0));
    require(learning_rate > 0.0, ErrorCode::InvalidArgument, "learning rate must be positive");

    std::vector<double> achieved;
    Eigen::MatrixXd p = tsne_conditional_affinities(distances, params.perplexity, &achieved);
    p = ((p + p.transpose()) / (2.0 * static_cast<double>(m))).eval();
    p = p.cwiseMax(std::numeric_limits<double>::epsilon());
    p.diagonal().setZero();

    Rng rng(seed);
    Positions y(m, 2);
    for (Eigen::Index i = 0; i < m; ++i) {
        y(i, 0) = 1e-4 * rng.normal();
        y(i, 1) = 1e-4 * rng.normal();
    }
    Positions update = Positions::Zero(m, 2);
    Positions gains = Positions::Ones(m, 2);
    Positions grad(m, 2);
    Eigen::MatrixXd num(m, m);

    const int exaggeration_iters = std::min(250, params.n_iter / 4);
    double kl_post = 0.0;
    for (int it = 0; it < params.n_iter; ++it) {
        check_deadline();
        const double exaggeration = it < exaggeration_iters ? kEarlyExaggeration : 1.0;
        const double momentum = it < kMomentumSwitch ? 0.5 : 0.8;

        double z = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            num(i, i) = 0.0;
            for (Eigen::Index j = i + 1; j < m; ++j) {
                const double q = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
                num(i, j) = num(j, i) = q;
                z += 2.0 * q;
            }
        }
        for (Eigen::Index i = 0; i < m; ++i) {
            double gx = 0.0, gy = 0.0;
            for (Eigen::Index j = 0; j < m; ++j) {
                if (j == i) continue;
                const double coeff = (exaggeration * p(i, j) - num(i, j) / z) * num(i, j);
                gx += coeff * (y(i, 0) - y(j, 0));
                gy += coeff * (y(i, 1) - y(j, 1));
            }
            grad(i, 0) = 4.0 * gx;
            grad(i, 1) = 4.0 * gy;
        }

        for (Eigen::Index i = 0; i < grad.size(); ++i) {
            double& g = gains.data()[i];
            const bool same_sign = (grad.data()[i] > 0.0) == (update.data()[i] > 0.0);
            g = same_sign ? g * 0.8 : g + 0.2;
            g = std::max(g, 0.01);
            update.data()[i] = momentum * update.data()[i] - learning_rate * g * grad.data()[i];
            y.data()[i] += update.data()[i];
        }
        y.rowwise() -= y.colwise().mean();

        if (trace && it == exaggeration_iters) kl_post = kl_divergence(p, y);
    }

    if (trace) {
        trace->perplexities = std::move(achieved);
        trace->kl_first_post_exaggeration = kl_post;
        trace->kl_final = kl_divergence(p, y);
    }
    return y;
}

}  // namespace docspace
