#ifndef SEGQC_MONITOR_STATS_HPP
#define SEGQC_MONITOR_STATS_HPP

#include <cmath>
#include <span>
#include <vector>

#include "segqc/util/errors.hpp"

namespace segqc::monitor {

// Product-moment correlation. Throws on degenerate input (length < 2 or a
// zero-variance argument), where the coefficient is undefined.
inline double pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw data_error("pearson_r: series lengths differ");
    if (x.size() < 2)
        throw data_error("pearson_r: need at least 2 observations");
    const double n = static_cast<double>(x.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= n;
    mean_y /= n;
    double cov = 0.0, var_x = 0.0, var_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if (var_x == 0.0 || var_y == 0.0)
        throw data_error("pearson_r: zero variance, correlation undefined");
    return cov / std::sqrt(var_x * var_y);
}

// Fractional ranks, ties receive the average of the ranks they occupy.
inline std::vector<double> rank_vector(std::span<const double> v) {
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::size_t below = 1, equal = 0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (v[j] < v[i]) ++below;
            if (v[j] == v[i]) ++equal;
        }
        ranks[i] = static_cast<double>(below) + static_cast<double>(equal - 1) * 0.5;
    }
    return ranks;
}

// Spearman's rank correlation: Pearson r of the rank vectors. With distinct
// values this equals 1 - 6*sum(d^2) / (n(n^2-1)).
inline double spearman_rs(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw data_error("spearman_rs: series lengths differ");
    const std::vector<double> rx = rank_vector(x);
    const std::vector<double> ry = rank_vector(y);
    return pearson_r(rx, ry);
}

inline double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson_r(std::span<const double>(x), std::span<const double>(y));
}

inline double spearman_rs(const std::vector<double>& x, const std::vector<double>& y) {
    return spearman_rs(std::span<const double>(x), std::span<const double>(y));
}

} // namespace segqc::monitor

#endif
