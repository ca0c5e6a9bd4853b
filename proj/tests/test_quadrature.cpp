#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dtks/quadrature.hpp"

using namespace dtks;

TEST_CASE("1d integration against antiderivatives") {
    CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 5.0, 1e-12) ==
          doctest::Approx(1.0 - std::exp(-5.0)).epsilon(1e-12));
    CHECK(integrate([](double x) { return x * x * x; }, -1.0, 2.0, 1e-12) ==
          doctest::Approx(15.0 / 4.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(20.0 * x); }, 0.0, 3.0, 1e-11) ==
          doctest::Approx((1.0 - std::cos(60.0)) / 20.0).epsilon(1e-8));
    CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0, 1e-12) == 0.0);
}

TEST_CASE("support slices cover the parallelogram") {
    for (const StudyWindow w : {StudyWindow{24.0, 3.0}, StudyWindow{2.0, 5.0}, StudyWindow{1.0, 1.0}}) {
        const double area =
            integrate2d([](double, double) { return 1.0; }, support_slices(w), 1e-10);
        CHECK(area == doctest::Approx(w.G * w.s).epsilon(1e-9));
    }
}

TEST_CASE("clipped slices match hand-computed areas") {
    const StudyWindow w{4.0, 1.0};
    auto area = [&](Point p) {
        return integrate2d([](double, double) { return 1.0; }, clipped_slices(w, p), 1e-10);
    };
    // full rectangle
    CHECK(area({w.G + w.s, w.G}) == doctest::Approx(w.G * w.s).epsilon(1e-9));
    // empty
    CHECK(area({0.0, 0.0}) == 0.0);
    CHECK(area({0.5, 0.0}) == 0.0);
    // rectangle [0,2]x[0,1] ∩ D: t in (0,1], x in [t, min(t+1, 2)]
    // = area of {t<=x<=t+1, t<=1, x<=2} = 1 - triangle(1/2) = 1/2 + ... compute directly:
    // for t in [0,1]: x from t to min(t+1,2) -> length 1, minus the part x>2: none (t+1<=2)
    CHECK(area({2.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-9));
    // cut by the diagonal: [0,1]x[0,1] ∩ D is the triangle below t=x, area 1/2
    CHECK(area({1.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("2d integration of a smooth integrand") {
    const StudyWindow w{2.0, 1.0};
    // integral of x*t over D: slices t in [max(0,x-1), min(x,2)], x in [0,3]
    // do it with an independent iterated reduction in closed form per slice
    auto f = [](double x, double t) { return x * t; };
    double expected = 0.0;
    for (double x = 0.0; x < 3.0; x += 1e-4) {
        const double lo = std::max(0.0, x - 1.0), hi = std::min(x, 2.0);
        if (hi > lo) expected += 1e-4 * x * 0.5 * (hi * hi - lo * lo);
    }
    const double got = integrate2d(f, support_slices(w), 1e-10);
    CHECK(got == doctest::Approx(expected).epsilon(1e-3));
}
