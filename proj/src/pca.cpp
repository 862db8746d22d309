#include <Eigen/SVD>

#include "docspace/error.hpp"
#include "docspace/projection.hpp"

namespace docspace {

Eigen::MatrixXd pca_reduce(const Eigen::MatrixXd& matrix, double variance_fraction) {
    require(matrix.rows() >= 2, ErrorCode::InvalidArgument, "PCA needs at least two rows");
    require(matrix.allFinite(), ErrorCode::InvalidArgument, "PCA input has non-finite entries");
    require(variance_fraction > 0.0 && variance_fraction <= 1.0, ErrorCode::InvalidArgument,
            "variance fraction must lie in (0, 1]");

    const Eigen::MatrixXd centered = matrix.rowwise() - matrix.colwise().mean();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
    require(svd.info() == Eigen::Success, ErrorCode::NotConverged, "SVD did not converge");

    const Eigen::VectorXd variance = svd.singularValues().array().square();
    const double total = variance.sum();
    require(total > 0.0, ErrorCode::ZeroVariance, "input has zero total variance");

    // Relative slack absorbs rounding when the whole variance is requested.
    const double target = variance_fraction * total * (1.0 - 1e-12);
    Eigen::Index q = 0;
    double cumulative = 0.0;
    while (q < variance.size() && cumulative < target) cumulative += variance[q++];

    Eigen::MatrixXd scores = svd.matrixU().leftCols(q) * svd.singularValues().head(q).asDiagonal();
    const Eigen::MatrixXd& loadings = svd.matrixV();
    for (Eigen::Index j = 0; j < q; ++j) {
        Eigen::Index arg = 0;
        loadings.col(j).cwiseAbs().maxCoeff(&arg);
        if (loadings(arg, j) < 0.0) scores.col(j) *= -1.0;
    }
    return scores;
}

}  // namespace docspace
