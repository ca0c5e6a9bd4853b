#pragma once

#include "dtks/model.hpp"

namespace dtks {

// Truncated rectangle probability E(g_{p}) = P((X,T) in [0,p.x]x[0,p.t] ∩ D),
// in closed form. Defined on the bounding rectangle [0,G+s]x[0,G]; throws
// std::domain_error outside. Nondecreasing in both coordinates; ranges over
// [0, alpha].
double expect_g(const ModelParams& p, const StudyWindow& w, const Point& pt);

// Parameter gradient of expect_g. The vartheta coordinate is the exact
// affine coefficient; the theta coordinate is analytic.
ParamVector expect_g_grad(const ModelParams& p, const StudyWindow& w, const Point& pt);

// expect_g at the coordinatewise minimum, which equals E(g_{p1} g_{p2}).
double expect_g_min(const ModelParams& p, const StudyWindow& w, const Point& p1, const Point& p2);

// E(g_{p} psi) by adaptive quadrature over the clipped region, absolute
// tolerance 1e-8 per coordinate.
ParamVector expect_g_score(const ModelParams& p, const StudyWindow& w, const Point& pt);

}  // namespace dtks
