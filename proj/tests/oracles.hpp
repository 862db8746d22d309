// Brute-force reference implementations used to cross-check the library.
// They follow the textbook formulas with counting instead of sorting wherever possible.
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;

inline Matrix euclidean(const Matrix& x) {
    Matrix d(x.rows(), x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.rows(); ++j) d(i, j) = (x.row(i) - x.row(j)).norm();
    return d;
}

// 1-based rank of j among i's neighbors; closer first, equal distances by index.
inline int rank_of(const Matrix& d, Eigen::Index i, Eigen::Index j) {
    int r = 1;
    for (Eigen::Index l = 0; l < d.rows(); ++l) {
        if (l == i || l == j) continue;
        if (d(i, l) < d(i, j) || (d(i, l) == d(i, j) && l < j)) ++r;
    }
    return r;
}

inline double trustworthiness(const Matrix& high, const Matrix& low, int k) {
    const auto m = high.rows();
    double sum = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            if (i == j) continue;
            const int rl = rank_of(low, i, j), rh = rank_of(high, i, j);
            if (rl <= k && rh > k) sum += rh - k;
        }
    const double md = static_cast<double>(m);
    return 1.0 - 2.0 / (md * k * (2.0 * md - 3.0 * k - 1.0)) * sum;
}

inline double continuity(const Matrix& high, const Matrix& low, int k) { return trustworthiness(low, high, k); }

inline double neighborhood_hit(const Matrix& low, const std::vector<int>& labels, int k) {
    const auto m = low.rows();
    double total = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        int same = 0;
        for (Eigen::Index j = 0; j < m; ++j)
            if (j != i && rank_of(low, i, j) <= k && labels[j] == labels[i]) ++same;
        total += static_cast<double>(same) / k;
    }
    return total / static_cast<double>(m);
}

inline std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double less = 0, equal = 0;
        for (double w : v) {
            if (w < v[i]) ++less;
            if (w == v[i]) ++equal;
        }
        r[i] = less + (equal + 1.0) / 2.0;
    }
    return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(average_ranks(x), average_ranks(y));
}

inline double shepard(const Matrix& high, const Matrix& low) {
    std::vector<double> a, b;
    for (Eigen::Index i = 0; i < high.rows(); ++i)
        for (Eigen::Index j = i + 1; j < high.rows(); ++j) {
            a.push_back(high(i, j));
            b.push_back(low(i, j));
        }
    return spearman(a, b);
}

struct Clusters {
    std::map<int, Eigen::Vector2d> centroid;
    std::map<int, int> size;
};

inline Clusters clusters(const Matrix& x, const std::vector<int>& labels) {
    Clusters c;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        c.centroid[labels[i]] = c.centroid.count(labels[i]) ? c.centroid[labels[i]] : Eigen::Vector2d::Zero();
        c.centroid[labels[i]] += x.row(i).transpose();
        c.size[labels[i]]++;
    }
    for (auto& [l, v] : c.centroid) v /= c.size[l];
    return c;
}

inline double distance_consistency(const Matrix& x, const std::vector<int>& labels) {
    const auto c = clusters(x, labels);
    int hits = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double own = (x.row(i).transpose() - c.centroid.at(labels[i])).norm();
        bool nearest = true;
        for (const auto& [l, v] : c.centroid) {
            const double d = (x.row(i).transpose() - v).norm();
            if (l != labels[i] && (d < own || (d == own && l < labels[i]))) nearest = false;
        }
        hits += nearest;
    }
    return static_cast<double>(hits) / static_cast<double>(x.rows());
}

inline double silhouette(const Matrix& x, const std::vector<int>& labels) {
    const auto c = clusters(x, labels);
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (c.size.at(labels[i]) == 1) continue;
        std::map<int, double> sum;
        for (Eigen::Index j = 0; j < x.rows(); ++j)
            if (j != i) sum[labels[j]] += (x.row(i) - x.row(j)).norm();
        const double a = sum[labels[i]] / (c.size.at(labels[i]) - 1);
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [l, s] : sum)
            if (l != labels[i]) b = std::min(b, s / c.size.at(l));
        const double mx = std::max(a, b);
        total += mx > 0 ? (b - a) / mx : 0.0;
    }
    return total / static_cast<double>(x.rows());
}

inline double calinski_harabasz(const Matrix& x, const std::vector<int>& labels) {
    const auto c = clusters(x, labels);
    const Eigen::Vector2d mean = x.colwise().mean().transpose();
    double between = 0.0, within = 0.0;
    for (const auto& [l, v] : c.centroid) between += c.size.at(l) * (v - mean).squaredNorm();
    for (Eigen::Index i = 0; i < x.rows(); ++i) within += (x.row(i).transpose() - c.centroid.at(labels[i])).squaredNorm();
    const double k = static_cast<double>(c.centroid.size()), m = static_cast<double>(x.rows());
    return (between / (k - 1)) / (within / (m - k));
}

inline double davies_bouldin(const Matrix& x, const std::vector<int>& labels) {
    const auto c = clusters(x, labels);
    std::map<int, double> s;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        s[labels[i]] += (x.row(i).transpose() - c.centroid.at(labels[i])).norm() / c.size.at(labels[i]);
    double total = 0.0;
    for (const auto& [a, ca] : c.centroid) {
        double worst = 0.0;
        for (const auto& [b, cb] : c.centroid)
            if (a != b) worst = std::max(worst, (s[a] + s[b]) / (ca - cb).norm());
        total += worst;
    }
    return total / static_cast<double>(c.centroid.size());
}

// P[X >= k] for X ~ Binomial(n, p) by log-space summation of the pmf.
inline double binomial_upper_tail(std::int64_t n, std::int64_t k, double p) {
    if (k <= 0) return 1.0;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    double max_log = -std::numeric_limits<double>::infinity();
    std::vector<double> logs;
    for (std::int64_t j = k; j <= n; ++j) {
        const double lp = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) + j * std::log(p) +
                          (n - j) * std::log1p(-p);
        logs.push_back(lp);
        max_log = std::max(max_log, lp);
    }
    double sum = 0.0;
    for (double lp : logs) sum += std::exp(lp - max_log);
    return std::exp(max_log) * sum;
}

// Smallest p with P[X >= k | p] >= 1 - confidence, found by bisection.
inline double clopper_pearson_lower(std::int64_t n, std::int64_t k, double confidence) {
    if (k == 0) return 0.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (binomial_upper_tail(n, k, mid) < 1.0 - confidence ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("docspace_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace oracle
