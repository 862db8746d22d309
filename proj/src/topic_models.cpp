#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "docspace/deadline.hpp"
#include "docspace/error.hpp"
#include "docspace/models.hpp"
#include "docspace/random.hpp"

namespace docspace {

LsiResult fit_lsi(const Eigen::MatrixXd& a, int topics) {
    require(topics >= 1 && topics <= std::min(a.rows(), a.cols()), ErrorCode::OutOfRange,
            "LSI topic count out of range");
    require(a.allFinite(), ErrorCode::InvalidArgument, "LSI input has non-finite entries");

    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    require(svd.info() == Eigen::Success, ErrorCode::NotConverged, "SVD did not converge");

    Eigen::MatrixXd u = svd.matrixU().leftCols(topics);
    Eigen::MatrixXd v = svd.matrixV().leftCols(topics);
    // Fix each singular pair's sign so the largest-magnitude entry of v is positive.
    for (int j = 0; j < topics; ++j) {
        Eigen::Index arg = 0;
        v.col(j).cwiseAbs().maxCoeff(&arg);
        if (v(arg, j) < 0.0) {
            v.col(j) *= -1.0;
            u.col(j) *= -1.0;
        }
    }

    LsiResult out;
    out.singular_values = svd.singularValues().head(topics);
    out.documents = u * out.singular_values.asDiagonal();
    out.topics = v.transpose();
    return out;
}

NmfResult fit_nmf(const Eigen::MatrixXd& a, int topics, int max_iter, double tol, std::uint64_t seed) {
    require(topics >= 1 && topics <= std::min(a.rows(), a.cols()), ErrorCode::OutOfRange,
            "NMF topic count out of range");
    require((a.array() >= 0.0).all() && a.allFinite(), ErrorCode::InvalidArgument,
            "NMF input must be non-negative and finite");
    const double mean = a.mean();
    require(mean > 0.0, ErrorCode::Degenerate, "NMF input is all zero");

    const double scale = std::sqrt(mean / topics);
    Rng rng(seed);
    NmfResult r;
    r.w.resize(a.rows(), topics);
    r.h.resize(topics, a.cols());
    for (Eigen::Index i = 0; i < r.w.size(); ++i) r.w.data()[i] = rng.uniform_open_zero() * scale;
    for (Eigen::Index i = 0; i < r.h.size(); ++i) r.h.data()[i] = rng.uniform_open_zero() * scale;

    constexpr double eps = 1e-300;
    r.objective.push_back((a - r.w * r.h).norm());
    for (int it = 0; it < max_iter; ++it) {
        check_deadline();
        const Eigen::MatrixXd wt_a = r.w.transpose() * a;
        const Eigen::MatrixXd wt_w_h = (r.w.transpose() * r.w) * r.h;
        r.h = r.h.cwiseProduct(wt_a.cwiseQuotient((wt_w_h.array() + eps).matrix()));

        const Eigen::MatrixXd a_ht = a * r.h.transpose();
        const Eigen::MatrixXd w_h_ht = r.w * (r.h * r.h.transpose());
        r.w = r.w.cwiseProduct(a_ht.cwiseQuotient((w_h_ht.array() + eps).matrix()));

        const double previous = r.objective.back();
        const double current = (a - r.w * r.h).norm();
        r.objective.push_back(current);
        if (previous <= 0.0 || (previous - current) / previous < tol) break;
    }
    return r;
}

LdaResult fit_lda(const SparseMatrix& counts, int topics, double alpha, double beta, int iterations,
                  std::uint64_t seed) {
    require(topics >= 1, ErrorCode::OutOfRange, "LDA needs K >= 1");
    require(alpha > 0.0 && beta > 0.0, ErrorCode::InvalidArgument, "Dirichlet priors must be positive");
    require(iterations >= 1, ErrorCode::InvalidArgument, "LDA needs at least one Gibbs sweep");

    const auto m = static_cast<std::size_t>(counts.rows());
    const auto n = static_cast<std::size_t>(counts.cols());
    const auto k = static_cast<std::size_t>(topics);

    std::vector<int> token_doc, token_term;
    for (Eigen::Index r = 0; r < counts.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(counts, r); it; ++it) {
            const double c = it.value();
            require(c >= 0.0 && c == std::floor(c), ErrorCode::InvalidArgument,
                    "LDA requires integer counts (got " + std::to_string(c) + ")");
            for (long t = 0; t < static_cast<long>(c); ++t) {
                token_doc.push_back(static_cast<int>(r));
                token_term.push_back(static_cast<int>(it.col()));
            }
        }
    }

    Rng rng(seed);
    std::vector<int> doc_topic(m * k, 0), topic_term(k * n, 0), topic_total(k, 0), doc_total(m, 0);
    std::vector<int> assignment(token_doc.size());
    for (std::size_t t = 0; t < token_doc.size(); ++t) {
        const auto z = static_cast<int>(rng.below(k));
        assignment[t] = z;
        ++doc_topic[static_cast<std::size_t>(token_doc[t]) * k + static_cast<std::size_t>(z)];
        ++topic_term[static_cast<std::size_t>(z) * n + static_cast<std::size_t>(token_term[t])];
        ++topic_total[static_cast<std::size_t>(z)];
        ++doc_total[static_cast<std::size_t>(token_doc[t])];
    }

    const double v_beta = static_cast<double>(n) * beta;
    std::vector<double> weight(k);
    for (int sweep = 0; sweep < iterations; ++sweep) {
        check_deadline();
        for (std::size_t t = 0; t < token_doc.size(); ++t) {
            const auto d = static_cast<std::size_t>(token_doc[t]);
            const auto w = static_cast<std::size_t>(token_term[t]);
            auto z = static_cast<std::size_t>(assignment[t]);
            --doc_topic[d * k + z];
            --topic_term[z * n + w];
            --topic_total[z];

            double total = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                total += (doc_topic[d * k + j] + alpha) * (topic_term[j * n + w] + beta) / (topic_total[j] + v_beta);
                weight[j] = total;
            }
            const double u = rng.uniform() * total;
            z = static_cast<std::size_t>(std::upper_bound(weight.begin(), weight.end(), u) - weight.begin());
            z = std::min(z, k - 1);

            assignment[t] = static_cast<int>(z);
            ++doc_topic[d * k + z];
            ++topic_term[z * n + w];
            ++topic_total[z];
        }
    }

    LdaResult out;
    out.theta.resize(static_cast<Eigen::Index>(m), topics);
    out.phi.resize(topics, static_cast<Eigen::Index>(n));
    for (std::size_t d = 0; d < m; ++d) {
        for (std::size_t j = 0; j < k; ++j) {
            out.theta(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j)) =
                (doc_topic[d * k + j] + alpha) / (doc_total[d] + static_cast<double>(k) * alpha);
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t w = 0; w < n; ++w) {
            out.phi(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(w)) =
                (topic_term[j * n + w] + beta) / (topic_total[j] + v_beta);
        }
    }
    // Renormalize away rounding so rows are distributions to machine precision.
    for (Eigen::Index d = 0; d < out.theta.rows(); ++d) out.theta.row(d) /= out.theta.row(d).sum();
    for (Eigen::Index j = 0; j < out.phi.rows(); ++j) out.phi.row(j) /= out.phi.row(j).sum();
    return out;
}

}  // namespace docspace
