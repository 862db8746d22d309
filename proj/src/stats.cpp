#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "docspace/analysis.hpp"
#include "docspace/error.hpp"

namespace docspace {

BinomialTest binomial_sign_test(std::int64_t n, std::int64_t k, double confidence) {
    require(n >= 1 && k >= 0 && k <= n, ErrorCode::OutOfRange, "sign test needs 0 <= k <= n and n >= 1");
    require(confidence > 0.0 && confidence < 1.0, ErrorCode::OutOfRange, "confidence must lie in (0, 1)");
    const auto a = static_cast<double>(k);
    const auto b = static_cast<double>(n - k + 1);
    BinomialTest t;
    // P[X >= k] for p = 1/2 is the regularized incomplete beta I_{1/2}(k, n - k + 1).
    if (k == 0) {
        t.p_value = 1.0;
    } else if (k == n) {
        t.p_value = std::ldexp(1.0, static_cast<int>(-n));
    } else {
        t.p_value = boost::math::ibeta(a, b, 0.5);
    }
    t.conf_lower = k == 0 ? 0.0 : boost::math::ibeta_inv(a, b, 1.0 - confidence);
    return t;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, ErrorCode::DimensionMismatch, "spearman needs equal-length inputs");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

}  // namespace docspace
