#include "dtks/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace dtks {

namespace {

// QUADPACK 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
constexpr double kron_nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kron_weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double gauss_weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct RuleResult {
    double value;
    double error;
};

RuleResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = kron_weights[7] * fc;
    double gauss = gauss_weights[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kron_nodes[i];
        const double fsum = f(c - dx) + f(c + dx);
        kron += kron_weights[i] * fsum;
        if (i % 2 == 1) gauss += gauss_weights[i / 2] * fsum;
    }
    kron *= h;
    gauss *= h;
    return {kron, std::abs(kron - gauss)};
}

double adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
    const RuleResult r = gk15(f, a, b);
    if (r.error <= tol || depth >= 48 || b - a < 1e-14 * (std::abs(a) + 1.0)) {
        return r.value;
    }
    const double m = 0.5 * (a + b);
    return adapt(f, a, m, 0.5 * tol, depth + 1) + adapt(f, m, b, 0.5 * tol, depth + 1);
}

void push_slice(std::vector<Slice>& out, double x0, double x1, double lo_c, double lo_m,
                double hi_c, double hi_m) {
    if (x1 - x0 <= 0.0) return;
    const double mid = 0.5 * (x0 + x1);
    if (hi_c + hi_m * mid <= lo_c + lo_m * mid) return;
    out.push_back({x0, x1, lo_c, lo_m, hi_c, hi_m});
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol) {
    if (!(b > a)) return 0.0;
    return adapt(f, a, b, abs_tol, 0);
}

std::vector<Slice> support_slices(const StudyWindow& w) {
    require_valid(w);
    // lower limit max(0, x-s) kinks at x = s, upper limit min(x, G) at x = G
    std::vector<double> cuts = {0.0, w.s, w.G, w.G + w.s};
    std::sort(cuts.begin(), cuts.end());
    std::vector<Slice> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double x0 = cuts[i], x1 = cuts[i + 1];
        if (x1 <= x0) continue;
        const double mid = 0.5 * (x0 + x1);
        const bool lo_line = mid > w.s;
        const bool hi_line = mid < w.G;
        push_slice(out, x0, x1, lo_line ? -w.s : 0.0, lo_line ? 1.0 : 0.0,
                   hi_line ? 0.0 : w.G, hi_line ? 1.0 : 0.0);
    }
    return out;
}

std::vector<Slice> clipped_slices(const StudyWindow& w, const Point& p) {
    require_valid(w);
    const double xmax = std::min(p.x, w.G + w.s);
    if (xmax <= 0.0 || p.t <= 0.0) return {};
    const double tcap = std::min(p.t, w.G);
    std::vector<double> cuts = {0.0, w.s, tcap, tcap + w.s, w.G, xmax};
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::remove_if(cuts.begin(), cuts.end(),
                              [&](double c) { return c < 0.0 || c > xmax; }),
               cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Slice> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double x0 = cuts[i], x1 = cuts[i + 1];
        const double mid = 0.5 * (x0 + x1);
        const bool lo_line = mid > w.s;
        const bool hi_line = mid < tcap;  // min(x, tcap): the diagonal is active below tcap
        push_slice(out, x0, x1, lo_line ? -w.s : 0.0, lo_line ? 1.0 : 0.0,
                   hi_line ? 0.0 : tcap, hi_line ? 1.0 : 0.0);
    }
    return out;
}

double integrate2d(const std::function<double(double, double)>& f,
                   const std::vector<Slice>& slices, double abs_tol) {
    if (slices.empty()) return 0.0;
    double total_len = 0.0;
    for (const Slice& sl : slices) total_len += sl.x1 - sl.x0;
    double sum = 0.0;
    for (const Slice& sl : slices) {
        const double len = sl.x1 - sl.x0;
        const double slice_tol = abs_tol * (len / total_len);
        const double inner_tol = 0.5 * slice_tol / len;
        auto outer = [&](double x) {
            const double lo = sl.lo_c + sl.lo_m * x;
            const double hi = sl.hi_c + sl.hi_m * x;
            if (hi <= lo) return 0.0;
            return integrate([&](double t) { return f(x, t); }, lo, hi, inner_tol);
        };
        sum += integrate(outer, sl.x0, sl.x1, 0.5 * slice_tol);
    }
    return sum;
}

}  // namespace dtks
