#pragma once

#include <functional>
#include <vector>

#include "dtks/geometry.hpp"

namespace dtks {

// Adaptive Gauss-Kronrod (7/15) integration to an absolute error target.
double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol);

// Vertical slice of an integration region: x in [x0,x1] with linear limits
// t in [lo_c + lo_m*x, hi_c + hi_m*x]. The support parallelogram and its
// rectangle clippings decompose exactly into such slices.
struct Slice {
    double x0, x1;
    double lo_c, lo_m;
    double hi_c, hi_m;
};

// Slices covering the support parallelogram D.
std::vector<Slice> support_slices(const StudyWindow& w);

// Slices covering [0,p.x] x [0,p.t] ∩ D. Empty when the clipped region has
// no area.
std::vector<Slice> clipped_slices(const StudyWindow& w, const Point& p);

// Nested adaptive integration of f(x,t) over the slices, absolute tolerance.
double integrate2d(const std::function<double(double, double)>& f,
                   const std::vector<Slice>& slices, double abs_tol);

}  // namespace dtks
