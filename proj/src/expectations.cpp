#include "dtks/expectations.hpp"

#include <algorithm>

#include "closed_forms.hpp"
#include "dtks/quadrature.hpp"

namespace dtks {

namespace {

using detail::CaseArgs;

double combine_pi(double th, const StudyWindow& w, const CaseArgs& a) {
    double v = detail::rect_pi(th, w, a.x, a.t) - detail::upper_pi(th, w, a.t);
    if (a.with_lower) v -= detail::lower_pi(th, w, a.x);
    return v;
}

double combine_fgm(double th, const StudyWindow& w, const CaseArgs& a) {
    double v = detail::rect_fgm(th, w, a.x, a.t) - detail::upper_fgm(th, w, a.t);
    if (a.with_lower) v -= detail::lower_fgm(th, w, a.x);
    return v;
}

double combine_dpi(double th, const StudyWindow& w, const CaseArgs& a) {
    double v = detail::drect_pi(th, w, a.x, a.t) - detail::dupper_pi(th, w, a.t);
    if (a.with_lower) v -= detail::dlower_pi(th, w, a.x);
    return v;
}

double combine_dfgm(double th, const StudyWindow& w, const CaseArgs& a) {
    double v = detail::drect_fgm(th, w, a.x, a.t) - detail::dupper_fgm(th, w, a.t);
    if (a.with_lower) v -= detail::dlower_fgm(th, w, a.x);
    return v;
}

}  // namespace

double expect_g(const ModelParams& p, const StudyWindow& w, const Point& pt) {
    require_valid(p);
    const CaseArgs a = detail::case_args(region_case(w, pt), w, pt);
    if (a.t <= 0.0 || a.x <= 0.0) return 0.0;
    double v = combine_pi(p.theta, w, a);
    if (p.copula == Copula::fgm) v += p.vartheta * combine_fgm(p.theta, w, a);
    return v;
}

ParamVector expect_g_grad(const ModelParams& p, const StudyWindow& w, const Point& pt) {
    require_valid(p);
    const CaseArgs a = detail::case_args(region_case(w, pt), w, pt);
    ParamVector g = ParamVector::Zero(param_dim(p.copula));
    if (a.t <= 0.0 || a.x <= 0.0) return g;
    g(0) = combine_dpi(p.theta, w, a);
    if (p.copula == Copula::fgm) {
        g(0) += p.vartheta * combine_dfgm(p.theta, w, a);
        g(1) = combine_fgm(p.theta, w, a);
    }
    return g;
}

double expect_g_min(const ModelParams& p, const StudyWindow& w, const Point& p1,
                    const Point& p2) {
    return expect_g(p, w, Point{std::min(p1.x, p2.x), std::min(p1.t, p2.t)});
}

ParamVector expect_g_score(const ModelParams& p, const StudyWindow& w, const Point& pt) {
    require_valid(p);
    if (!in_bounding_rect(w, pt)) throw std::domain_error("point outside [0,G+s] x [0,G]");
    const auto slices = clipped_slices(w, pt);
    const ScoreFunction psi(p, w);
    ParamVector out(param_dim(p.copula));
    for (int i = 0; i < out.size(); ++i) {
        out(i) = integrate2d(
            [&](double x, double t) {
                const Point q{x, t};
                return psi(q)(i) * density(p, w, q);
            },
            slices, 1e-8);
    }
    return out;
}

}  // namespace dtks
