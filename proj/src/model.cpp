#include "dtks/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "closed_forms.hpp"
#include "dtks/quadrature.hpp"

namespace dtks {

bool valid(const ModelParams& p, const ParamBounds& b) {
    if (!std::isfinite(p.theta) || !std::isfinite(p.vartheta)) return false;
    if (!(p.theta > b.eps_theta && p.theta < 1.0 / b.eps_theta)) return false;
    if (p.copula == Copula::product) return p.vartheta == 0.0;
    return p.vartheta > b.eps_vartheta - 1.0 && p.vartheta < 1.0 - b.eps_vartheta;
}

void require_valid(const ModelParams& p, const ParamBounds& b) {
    if (!valid(p, b)) throw std::invalid_argument("model parameters outside the parameter space");
}

double density(const ModelParams& p, const StudyWindow& w, const Point& pt) {
    if (pt.x < 0.0 || pt.t < 0.0 || pt.t > w.G) return 0.0;
    const double base = p.theta * std::exp(-p.theta * pt.x) / w.G;
    if (p.copula == Copula::product) return base;
    const double dep = p.vartheta * (2.0 * std::exp(-p.theta * pt.x) - 1.0) * (1.0 - 2.0 * pt.t / w.G);
    return base * (1.0 + dep);
}

double alpha(const ModelParams& p, const StudyWindow& w) {
    require_valid(p);
    require_valid(w);
    double a = detail::alpha_pi(p.theta, w);
    if (p.copula == Copula::fgm) a += p.vartheta * detail::alpha_fgm_coef(p.theta, w);
    if (!(a > 0.0 && a < 1.0)) {
        throw std::runtime_error("selection probability evaluated outside (0,1)");
    }
    return a;
}

ParamVector alpha_grad(const ModelParams& p, const StudyWindow& w) {
    require_valid(p);
    require_valid(w);
    ParamVector g(param_dim(p.copula));
    g(0) = detail::dalpha_pi(p.theta, w);
    if (p.copula == Copula::fgm) {
        g(0) += p.vartheta * detail::dalpha_fgm_coef(p.theta, w);
        g(1) = detail::alpha_fgm_coef(p.theta, w);
    }
    return g;
}

ScoreFunction::ScoreFunction(const ModelParams& p, const StudyWindow& w)
    : params_(p), window_(w) {
    const double a = alpha(p, w);
    const ParamVector da = alpha_grad(p, w);
    ratio_theta_ = da(0) / a;
    if (p.copula == Copula::fgm) ratio_vartheta_ = da(1) / a;
}

ParamVector ScoreFunction::operator()(const Point& pt) const {
    ParamVector psi = ParamVector::Zero(param_dim(params_.copula));
    if (!in_support(window_, pt)) return psi;
    if (params_.copula == Copula::product) {
        psi(0) = pt.x - 1.0 / params_.theta + ratio_theta_;
        return psi;
    }
    const double ex = std::exp(-params_.theta * pt.x);
    const double lever = 1.0 - 2.0 * pt.t / window_.G;
    const double den = 1.0 + params_.vartheta * (2.0 * ex - 1.0) * lever;
    psi(0) = 1.0 / params_.theta - pt.x -
             2.0 * params_.vartheta * pt.x * ex * lever / den - ratio_theta_;
    psi(1) = (2.0 * ex - 1.0) * lever / den - ratio_vartheta_;
    return psi;
}

ParamVector score(const ModelParams& p, const StudyWindow& w, const Point& pt) {
    return ScoreFunction(p, w)(pt);
}

ParamMatrix fisher_info(const ModelParams& p, const StudyWindow& w) {
    require_valid(p);
    require_valid(w);
    if (p.copula == Copula::product) {
        const double th = p.theta;
        const double es = std::exp(-th * w.s), eG = std::exp(-th * w.G);
        const double ds = -std::expm1(-th * w.s), dG = -std::expm1(-th * w.G);
        ParamMatrix info(1, 1);
        info(0, 0) = detail::alpha_pi(th, w) *
                     (2.0 / (th * th) - w.s * w.s * es / (ds * ds) - w.G * w.G * eG / (dG * dG));
        if (!(info(0, 0) > 0.0)) throw std::runtime_error("information not positive definite");
        return info;
    }
    const auto slices = support_slices(w);
    const ScoreFunction psi_of(p, w);
    ParamMatrix info(2, 2);
    for (int i = 0; i < 2; ++i) {
        for (int j = i; j < 2; ++j) {
            const double v = integrate2d(
                [&](double x, double t) {
                    const Point q{x, t};
                    const ParamVector psi = psi_of(q);
                    return psi(i) * psi(j) * density(p, w, q);
                },
                slices, 1e-8);
            info(i, j) = v;
            info(j, i) = v;
        }
    }
    const Eigen::Matrix2d dense(info);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(dense);
    if (!(es.eigenvalues().minCoeff() > 1e-12 * info.trace())) {
        throw std::runtime_error("information not positive definite");
    }
    return info;
}

ParamVector influence(const ModelParams& p, const StudyWindow& w, const Point& pt) {
    // The theta-coordinate of the product score is the negative conditional
    // log-density derivative; flip it so -(E d-score)^{-1} psi comes out the
    // same way for both families.
    ParamVector psi = score(p, w, pt);
    if (p.copula == Copula::product) psi = -psi;
    const ParamMatrix info = fisher_info(p, w);
    if (p.copula == Copula::product) {
        psi(0) /= info(0, 0);
        return psi;
    }
    return ParamVector(Eigen::Matrix2d(info).llt().solve(Eigen::Vector2d(psi)));
}

double kendall_tau(double vartheta) {
    if (!(std::abs(vartheta) < 1.0)) throw std::invalid_argument("|vartheta| must be < 1");
    return 2.0 * vartheta / 9.0;
}

}  // namespace dtks
