#include <cmath>

#include "docspace/deadline.hpp"
#include "docspace/error.hpp"
#include "docspace/projection.hpp"
#include "docspace/random.hpp"

namespace docspace {

namespace {
constexpr double kRelativeImprovement = 1e-9;
}

double raw_stress(const DistanceMatrix& dissimilarities, const Positions& x) {
    const auto m = x.rows();
    double stress = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double r = (x.row(i) - x.row(j)).norm() - dissimilarities(i, j);
            stress += r * r;
        }
    }
    return stress;
}

Positions run_smacof(const DistanceMatrix& delta, int max_iter, std::uint64_t seed, std::vector<double>* trace) {
    const auto m = delta.size();
    require(max_iter >= 1, ErrorCode::InvalidArgument, "MDS needs max_iter >= 1");
    require(m >= 2 && delta.values.cols() == m, ErrorCode::InvalidArgument, "MDS needs a square matrix of >= 2 points");
    require(delta.values.allFinite() && (delta.values.array() >= 0.0).all(), ErrorCode::InvalidArgument,
            "dissimilarities must be finite and non-negative");

    Rng rng(seed);
    Positions x(m, 2);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform();

    double stress = raw_stress(delta, x);
    if (trace) trace->assign(1, stress);

    Eigen::MatrixXd bmat(m, m);
    for (int it = 0; it < max_iter; ++it) {
        check_deadline();
        // Guttman transform X <- B(X) X / m (unit weights).
        for (Eigen::Index i = 0; i < m; ++i) {
            double diag = 0.0;
            for (Eigen::Index j = 0; j < m; ++j) {
                if (j == i) continue;
                const double d = (x.row(i) - x.row(j)).norm();
                const double v = d > 0.0 ? -delta(i, j) / d : 0.0;
                bmat(i, j) = v;
                diag -= v;
            }
            bmat(i, i) = diag;
        }
        x = (bmat * x) / static_cast<double>(m);

        const double previous = stress;
        stress = raw_stress(delta, x);
        if (trace) trace->push_back(stress);
        if (previous <= 0.0 || (previous - stress) / previous < kRelativeImprovement) break;
    }
    return x;
}

}  // namespace docspace
