#include "dtks/critval.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dtks/expectations.hpp"
#include "dtks/parallel.hpp"
#include "dtks/rng.hpp"

namespace dtks {

namespace {

constexpr double kJitterLadder[] = {0.0, 1e-12, 1e-10, 1e-8};

struct PointMoments {
    double e;         // E(g)
    ParamVector ed;   // gradient of E(g)
    ParamVector k;    // E(g) * grad(alpha)/alpha - gradient
    ParamVector ik;   // info_inv * k
    ParamVector ied;  // info_inv * ed
};

PointMoments point_moments(const CovarianceContext& ctx, const Point& p) {
    PointMoments m;
    m.e = expect_g(ctx.params, ctx.window, p);
    m.ed = expect_g_grad(ctx.params, ctx.window, p);
    m.k = m.e * ctx.grad_a / ctx.a - m.ed;
    m.ik = ctx.info_inv * m.k;
    m.ied = ctx.info_inv * m.ed;
    return m;
}

double covariance_from_moments(const CovarianceContext& ctx, double emin,
                               const PointMoments& m1, const PointMoments& m2,
                               CovarianceMode mode) {
    switch (mode) {
        case CovarianceMode::known_both:
            return emin - m1.e * m2.e;
        case CovarianceMode::known_theta_est_n:
            return emin - m1.e * m2.e / ctx.a;
        case CovarianceMode::est_theta_known_n:
            return emin - m1.e * m2.e + m1.k.dot(m2.ied) + m1.ed.dot(m2.ik) +
                   m1.ed.dot(m2.ied);
        case CovarianceMode::est_both:
            return emin - m1.e * m2.e / ctx.a - m1.k.dot(m2.ik);
    }
    throw std::logic_error("unknown covariance mode");
}

}  // namespace

std::vector<Point> grid_points(const StudyWindow& w, const GridSpec& grid) {
    require_valid(w);
    if (!(grid.step > 0.0)) throw std::invalid_argument("grid step must be positive");
    const std::size_t nx = static_cast<std::size_t>(std::floor((w.G + w.s) / grid.step)) + 1;
    const std::size_t nt = static_cast<std::size_t>(std::floor(w.G / grid.step)) + 1;
    if (nx * nt > grid.max_points) {
        throw std::invalid_argument("grid has " + std::to_string(nx * nt) +
                                    " points, above the cap of " +
                                    std::to_string(grid.max_points));
    }
    std::vector<Point> pts;
    pts.reserve(nx * nt);
    for (std::size_t it = 0; it < nt; ++it) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            pts.push_back({static_cast<double>(ix) * grid.step,
                           static_cast<double>(it) * grid.step});
        }
    }
    return pts;
}

CovarianceContext make_covariance_context(const ModelParams& p, const StudyWindow& w) {
    CovarianceContext ctx;
    ctx.params = p;
    ctx.window = w;
    ctx.a = alpha(p, w);
    ctx.grad_a = alpha_grad(p, w);
    ctx.info = fisher_info(p, w);
    if (p.copula == Copula::product) {
        ctx.info_inv = ParamMatrix(1, 1);
        ctx.info_inv(0, 0) = 1.0 / ctx.info(0, 0);
    } else {
        const Eigen::Matrix2d inv = Eigen::Matrix2d(ctx.info).inverse();
        if (!inv.allFinite()) throw std::runtime_error("information matrix is singular");
        ctx.info_inv = inv;
    }
    return ctx;
}

double covariance(const CovarianceContext& ctx, const Point& p1, const Point& p2,
                  CovarianceMode mode) {
    const PointMoments m1 = point_moments(ctx, p1);
    const PointMoments m2 = point_moments(ctx, p2);
    const double emin = expect_g_min(ctx.params, ctx.window, p1, p2);
    return covariance_from_moments(ctx, emin, m1, m2, mode);
}

double covariance(const ModelParams& p, const StudyWindow& w, const Point& p1, const Point& p2,
                  CovarianceMode mode) {
    return covariance(make_covariance_context(p, w), p1, p2, mode);
}

Eigen::MatrixXd covariance_matrix(const ModelParams& p, const StudyWindow& w,
                                  const GridSpec& grid, CovarianceMode mode) {
    const CovarianceContext ctx = make_covariance_context(p, w);
    const std::vector<Point> pts = grid_points(w, grid);
    const std::size_t n = pts.size();
    const std::size_t nx = static_cast<std::size_t>(std::floor((w.G + w.s) / grid.step)) + 1;

    std::vector<PointMoments> moments(n);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) moments[i] = point_moments(ctx, pts[i]);
    });
    // E at the coordinatewise minimum is a lattice lookup: min of two grid
    // points is again a grid point.
    std::vector<double> evals(n);
    for (std::size_t i = 0; i < n; ++i) evals[i] = moments[i].e;

    Eigen::MatrixXd cov(n, n);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const std::size_t ix = i % nx, it = i / nx;
            for (std::size_t j = 0; j <= i; ++j) {
                const std::size_t jx = j % nx, jt = j / nx;
                const double emin = evals[std::min(it, jt) * nx + std::min(ix, jx)];
                const double v = covariance_from_moments(ctx, emin, moments[i], moments[j], mode);
                cov(i, j) = v;
                cov(j, i) = v;
            }
        }
    });
    return cov;
}

CholeskyFactor factor_covariance(Eigen::MatrixXd cov) {
    const Eigen::Index n = cov.rows();
    const double mean_diag = cov.diagonal().mean();
    if (mean_diag <= 0.0) {
        if (cov.cwiseAbs().maxCoeff() == 0.0) return {Eigen::MatrixXd::Zero(n, n), 0.0};
        throw std::runtime_error("covariance has non-positive mean diagonal");
    }
    Eigen::MatrixXd work;
    for (double lambda : kJitterLadder) {
        work = cov;
        const double jitter = lambda * mean_diag;
        work.diagonal().array() += jitter;
        Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(work);  // in place
        if (llt.info() == Eigen::Success) {
            work.triangularView<Eigen::StrictlyUpper>().setZero();
            return {std::move(work), jitter};
        }
    }
    throw std::runtime_error("covariance factorization failed at the largest jitter, n = " +
                             std::to_string(n));
}

std::vector<double> simulate_sup(const CholeskyFactor& factor, int reps, std::uint64_t seed) {
    if (reps < 1) throw std::invalid_argument("reps must be >= 1");
    const Eigen::Index n = factor.lower.rows();
    std::vector<double> sups(reps);
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t b, std::size_t e) {
        Eigen::VectorXd eta(n), z(n);
        for (std::size_t r = b; r < e; ++r) {
            Rng rng = Rng::substream(seed, r);
            for (Eigen::Index i = 0; i < n; ++i) eta(i) = rng.normal();
            z.noalias() = factor.lower.triangularView<Eigen::Lower>() * eta;
            sups[r] = z.cwiseAbs().maxCoeff();
        }
    });
    std::sort(sups.begin(), sups.end());
    return sups;
}

std::vector<double> simulate_sup(const Eigen::MatrixXd& cov, int reps, std::uint64_t seed) {
    return simulate_sup(factor_covariance(cov), reps, seed);
}

double quantile_at(const std::vector<double>& sorted_sups, double level) {
    if (sorted_sups.empty()) throw std::invalid_argument("empty sample");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must be in (0,1)");
    const auto r = static_cast<std::size_t>(
        std::ceil(level * static_cast<double>(sorted_sups.size())));
    return sorted_sups[std::min(std::max<std::size_t>(r, 1), sorted_sups.size()) - 1];
}

CriticalValueResult critical_value(const ModelParams& p, const StudyWindow& w,
                                   const GridSpec& grid, CovarianceMode mode,
                                   const std::vector<double>& levels, int reps,
                                   std::uint64_t seed) {
    for (double l : levels) {
        if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("levels must lie in (0,1)");
    }
    CholeskyFactor factor = factor_covariance(covariance_matrix(p, w, grid, mode));
    const std::vector<double> sups = simulate_sup(factor, reps, seed);
    CriticalValueResult out;
    out.reps = reps;
    out.seed = seed;
    out.grid = grid;
    out.jitter_used = factor.jitter;
    for (double l : levels) out.quantiles[l] = quantile_at(sups, l);
    return out;
}

Decision decide(double statistic, double critical) {
    if (!(statistic >= 0.0) || !(critical >= 0.0)) {
        throw std::invalid_argument("statistic and critical value must be non-negative");
    }
    return statistic > critical ? Decision::reject : Decision::accept;
}

}  // namespace dtks
