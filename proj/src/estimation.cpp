#include "dtks/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "closed_forms.hpp"

namespace dtks {

namespace {

// Per-observation product score divided out: x_bar - 1/theta + alpha'/alpha.
// Strictly increasing in theta, so a sign change brackets the unique root.
double product_criterion(double th, const StudyWindow& w, double xbar) {
    return xbar - 1.0 / th + detail::dlog_alpha_pi(th, w);
}

double product_root(const StudyWindow& w, double xbar, const EstimateConfig& cfg,
                    int& iterations) {
    const double lo_bound = cfg.bounds.eps_theta;
    const double hi_bound = 1.0 / cfg.bounds.eps_theta;
    // geometric scan for a bracket
    constexpr int kScan = 240;
    const double ratio = std::pow(hi_bound / lo_bound, 1.0 / kScan);
    double a = lo_bound, fa = product_criterion(a, w, xbar);
    double b = 0.0, fb = 0.0;
    bool bracketed = false;
    for (int i = 1; i <= kScan; ++i) {
        b = (i == kScan) ? hi_bound : lo_bound * std::pow(ratio, i);
        fb = product_criterion(b, w, xbar);
        if (fa == 0.0) return a;
        if ((fa < 0.0) != (fb < 0.0)) {
            bracketed = true;
            break;
        }
        a = b;
        fa = fb;
    }
    if (!bracketed) {
        if (product_criterion(lo_bound, w, xbar) > 0.0 ||
            product_criterion(hi_bound, w, xbar) < 0.0) {
            throw BoundaryHitError("product score root lies at the parameter-space edge");
        }
        throw NoRootError("product score sum has no sign change");
    }
    // Brent
    double c = a, fc = fa, d = b - a, e = d;
    iterations = 0;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        ++iterations;
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                           0.5 * cfg.step_tol;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) break;
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = e = m;  // bisection
        } else {
            double p, q;
            const double sfrac = fb / fa;
            if (a == c) {
                p = 2.0 * m * sfrac;
                q = 1.0 - sfrac;
            } else {
                const double qq = fa / fc, r = fb / fc;
                p = sfrac * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (sfrac - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = e = m;
            }
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = product_criterion(b, w, xbar);
        if ((fb < 0.0) == (fc < 0.0)) {
            c = a;
            fc = fa;
            e = d = b - a;
        }
    }
    return b;
}

ParamVector score_sum(const ObservationSet& obs, const ModelParams& p) {
    const ScoreFunction psi(p, obs.window());
    ParamVector sum = ParamVector::Zero(param_dim(p.copula));
    for (const Point& pt : obs.points()) sum += psi(pt);
    return sum;
}

ModelParams clamp_to_box(ModelParams p, const ParamBounds& b) {
    const double margin = 1e-12;
    p.theta = std::clamp(p.theta, b.eps_theta * (1.0 + margin), (1.0 / b.eps_theta) * (1.0 - margin));
    if (p.copula == Copula::fgm) {
        p.vartheta = std::clamp(p.vartheta, b.eps_vartheta - 1.0 + margin, 1.0 - b.eps_vartheta - margin);
    }
    return p;
}

bool at_box_edge(const ModelParams& p, const ParamBounds& b) {
    const double rel = 1e-9;
    if (p.theta <= b.eps_theta * (1.0 + rel) || p.theta >= (1.0 / b.eps_theta) * (1.0 - rel)) {
        return true;
    }
    if (p.copula == Copula::fgm) {
        const double lo = b.eps_vartheta - 1.0, hi = 1.0 - b.eps_vartheta;
        const double pad = rel * (hi - lo);
        if (p.vartheta <= lo + pad || p.vartheta >= hi - pad) return true;
    }
    return false;
}

// Damped Newton from one start; returns true on convergence.
bool newton_fgm(const ObservationSet& obs, ModelParams start, const EstimateConfig& cfg,
                ModelParams& out, double& out_norm, int& out_iterations) {
    const double m = static_cast<double>(obs.size());
    const double target = cfg.score_tol_per_obs * m;
    ModelParams p = clamp_to_box(start, cfg.bounds);
    ParamVector f = score_sum(obs, p);
    double fnorm = f.norm();
    for (int it = 0; it < cfg.max_iterations; ++it) {
        if (fnorm <= target) {
            out = p;
            out_norm = fnorm;
            out_iterations = it;
            return true;
        }
        // central finite-difference Jacobian
        Eigen::Matrix2d jac;
        const double h_th = 1e-6 * std::max(1.0, std::abs(p.theta));
        const double h_vt = 1e-6;
        for (int j = 0; j < 2; ++j) {
            ModelParams hi = p, lo = p;
            if (j == 0) { hi.theta += h_th; lo.theta -= h_th; }
            else        { hi.vartheta += h_vt; lo.vartheta -= h_vt; }
            hi = clamp_to_box(hi, cfg.bounds);
            lo = clamp_to_box(lo, cfg.bounds);
            const double den = (j == 0) ? hi.theta - lo.theta : hi.vartheta - lo.vartheta;
            jac.col(j) = Eigen::Vector2d(score_sum(obs, hi) - score_sum(obs, lo)) / den;
        }
        Eigen::Vector2d step = jac.fullPivLu().solve(-Eigen::Vector2d(f));
        if (!step.allFinite()) return false;
        bool accepted = false;
        for (int half = 0; half < 30; ++half) {
            ModelParams trial = p;
            trial.theta += step(0);
            trial.vartheta += step(1);
            trial = clamp_to_box(trial, cfg.bounds);
            const ParamVector ftrial = score_sum(obs, trial);
            if (ftrial.norm() < fnorm) {
                const double move = std::abs(trial.theta - p.theta) +
                                    std::abs(trial.vartheta - p.vartheta);
                p = trial;
                f = ftrial;
                fnorm = ftrial.norm();
                accepted = true;
                if (move < cfg.step_tol && fnorm > target) return false;  // stalled
                break;
            }
            step *= 0.5;
        }
        if (!accepted) return false;
        out_iterations = it + 1;
    }
    if (fnorm <= target) {
        out = p;
        out_norm = fnorm;
        return true;
    }
    return false;
}

}  // namespace

EstimateResult estimate(const ObservationSet& obs, Copula copula, const EstimateConfig& cfg) {
    if (obs.size() < 2) throw std::invalid_argument("estimation needs at least two observations");
    const StudyWindow& w = obs.window();
    double xbar = 0.0;
    for (const Point& pt : obs.points()) xbar += pt.x;
    xbar /= static_cast<double>(obs.size());

    EstimateResult res;
    if (copula == Copula::product) {
        int iters = 0;
        const double th = product_root(w, xbar, cfg, iters);
        res.params = ModelParams{Copula::product, th, 0.0};
        res.iterations = iters;
    } else {
        // theta start from the product fit; fall back to the naive rate.
        double th0;
        try {
            int iters = 0;
            th0 = product_root(w, xbar, cfg, iters);
        } catch (const std::runtime_error&) {
            th0 = 1.0 / std::max(xbar, 1e-12);
        }
        const double starts[] = {0.0, -0.5, 0.5};
        bool done = false;
        for (double v0 : starts) {
            ModelParams p0{Copula::fgm, th0, v0};
            ModelParams root;
            double norm = 0.0;
            int iters = 0;
            if (newton_fgm(obs, p0, cfg, root, norm, iters)) {
                res.params = root;
                res.score_norm = norm;
                res.iterations = iters;
                done = true;
                break;
            }
        }
        if (!done) throw NoRootError("FGM score sum: Newton failed from all starts");
        if (at_box_edge(res.params, cfg.bounds)) {
            throw BoundaryHitError("FGM score root at the parameter-space edge");
        }
    }

    const ParamVector f = score_sum(obs, res.params);
    res.score_norm = f.norm();
    const double tol = cfg.score_tol_per_obs * static_cast<double>(obs.size());
    if (!(res.score_norm <= tol)) {
        throw NoRootError("score sum at the returned parameters exceeds tolerance");
    }
    res.latent_n = estimate_latent_n(obs.size(), alpha(res.params, w));
    return res;
}

double estimate_latent_n(std::size_t m, double alpha) {
    if (m < 1) throw std::invalid_argument("latent size needs m >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    return static_cast<double>(m) / alpha;
}

}  // namespace dtks
