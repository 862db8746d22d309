#include <algorithm>
#include <cmath>

#include "docspace/error.hpp"
#include "docspace/models.hpp"

namespace docspace {

namespace {

void mirror_upper(Eigen::MatrixXd& d) {
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        d(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < d.cols(); ++j) d(j, i) = d(i, j);
    }
}

double kl_to_mixture_bits(const Eigen::Ref<const Eigen::RowVectorXd>& p, const Eigen::Ref<const Eigen::RowVectorXd>& q) {
    double jsd = 0.0;
    for (Eigen::Index t = 0; t < p.size(); ++t) {
        const double mix = 0.5 * (p[t] + q[t]);
        if (p[t] > 0.0) jsd += 0.5 * p[t] * std::log2(p[t] / mix);
        if (q[t] > 0.0) jsd += 0.5 * q[t] * std::log2(q[t] / mix);
    }
    return jsd;
}

}  // namespace

DistanceMatrix pairwise_distances(const Eigen::MatrixXd& rows, Metric metric) {
    const auto m = rows.rows();
    require(rows.allFinite(), ErrorCode::InvalidArgument, "representation has non-finite entries");
    DistanceMatrix out;
    out.metric = metric;
    out.values = Eigen::MatrixXd::Zero(m, m);

    switch (metric) {
        case Metric::Cosine: {
            Eigen::MatrixXd unit = rows;
            for (Eigen::Index i = 0; i < m; ++i) {
                const double norm = rows.row(i).norm();
                require(norm > 0.0, ErrorCode::ZeroNorm,
                        "cosine distance undefined: row " + std::to_string(i) + " has zero norm");
                unit.row(i) /= norm;
            }
            const Eigen::MatrixXd gram = unit * unit.transpose();
            for (Eigen::Index i = 0; i < m; ++i) {
                for (Eigen::Index j = i + 1; j < m; ++j) {
                    out.values(i, j) = std::clamp(1.0 - gram(i, j), 0.0, 2.0);
                }
            }
            break;
        }
        case Metric::JensenShannon: {
            for (Eigen::Index i = 0; i < m; ++i) {
                require((rows.row(i).array() >= 0.0).all() && std::abs(rows.row(i).sum() - 1.0) < 1e-6,
                        ErrorCode::InvalidArgument,
                        "Jensen-Shannon distance needs distributions; row " + std::to_string(i) + " is not");
            }
            for (Eigen::Index i = 0; i < m; ++i) {
                for (Eigen::Index j = i + 1; j < m; ++j) {
                    out.values(i, j) = std::sqrt(std::clamp(kl_to_mixture_bits(rows.row(i), rows.row(j)), 0.0, 1.0));
                }
            }
            break;
        }
        case Metric::Euclidean: {
            for (Eigen::Index i = 0; i < m; ++i) {
                for (Eigen::Index j = i + 1; j < m; ++j) out.values(i, j) = (rows.row(i) - rows.row(j)).norm();
            }
            break;
        }
    }
    mirror_upper(out.values);
    return out;
}

DistanceMatrix pairwise_distances(const DocumentRepresentation& rep) {
    return pairwise_distances(rep.matrix, rep.metric);
}

}  // namespace docspace
