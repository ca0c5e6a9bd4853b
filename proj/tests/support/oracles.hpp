#pragma once

// Test-only oracles: numerical-integration and counting routes that stay
// independent of the closed forms they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "dtks/model.hpp"
#include "dtks/quadrature.hpp"

namespace oracles {

// P((X,T) in [0,p.x]x[0,p.t] ∩ D) by adaptive quadrature of the density.
inline double expect_g_quad(const dtks::ModelParams& params, const dtks::StudyWindow& w,
                            const dtks::Point& p, double tol = 1e-9) {
    return dtks::integrate2d(
        [&](double x, double t) { return dtks::density(params, w, dtks::Point{x, t}); },
        dtks::clipped_slices(w, p), tol);
}

inline double alpha_quad(const dtks::ModelParams& params, const dtks::StudyWindow& w,
                         double tol = 1e-9) {
    return dtks::integrate2d(
        [&](double x, double t) { return dtks::density(params, w, dtks::Point{x, t}); },
        dtks::support_slices(w), tol);
}

// Central finite difference in one parameter coordinate (0 = theta,
// 1 = vartheta) of a scalar function of the parameters.
inline double central_diff(const std::function<double(const dtks::ModelParams&)>& f,
                           dtks::ModelParams params, int coord, double h) {
    dtks::ModelParams hi = params, lo = params;
    if (coord == 0) {
        hi.theta += h;
        lo.theta -= h;
        return (f(hi) - f(lo)) / (hi.theta - lo.theta);
    }
    hi.vartheta += h;
    lo.vartheta -= h;
    return (f(hi) - f(lo)) / (hi.vartheta - lo.vartheta);
}

// Kendall tau by inversion counting (Knight), assuming no ties.
inline double kendall_tau_sample(std::vector<std::pair<double, double>> xy) {
    const std::size_t n = xy.size();
    std::sort(xy.begin(), xy.end());
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = xy[i].second;
    std::vector<double> buf(n);
    std::size_t discordant = 0;
    std::function<void(std::size_t, std::size_t)> merge_count = [&](std::size_t lo,
                                                                    std::size_t hi) {
        if (hi - lo < 2) return;
        const std::size_t mid = lo + (hi - lo) / 2;
        merge_count(lo, mid);
        merge_count(mid, hi);
        std::size_t i = lo, j = mid, k = lo;
        while (i < mid && j < hi) {
            if (ys[i] <= ys[j]) {
                buf[k++] = ys[i++];
            } else {
                discordant += mid - i;
                buf[k++] = ys[j++];
            }
        }
        while (i < mid) buf[k++] = ys[i++];
        while (j < hi) buf[k++] = ys[j++];
        std::copy(buf.begin() + lo, buf.begin() + hi, ys.begin() + lo);
    };
    merge_count(0, n);
    const double total = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    return 1.0 - 2.0 * static_cast<double>(discordant) / total;
}

inline double kendall_tau_se(std::size_t n) {
    const double nd = static_cast<double>(n);
    return std::sqrt(2.0 * (2.0 * nd + 5.0) / (9.0 * nd * (nd - 1.0)));
}

// One-sample two-sided KS statistic of values against a CDF.
inline double ks_statistic_1d(std::vector<double> values,
                              const std::function<double(double)>& cdf) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        d = std::max(d, std::max((static_cast<double>(i) + 1.0) / n - f,
                                 f - static_cast<double>(i) / n));
    }
    return d;
}

}  // namespace oracles
