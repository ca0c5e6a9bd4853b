#include "dtks/ksstat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dtks/expectations.hpp"
#include "dtks/parallel.hpp"

namespace dtks {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Batched empirical CDF over many query points: one sweep in x with a
// Fenwick tree over compressed observation t-ranks.
std::vector<double> empirical_cdf_batch(const ObservationSet& obs,
                                        const std::vector<Point>& queries) {
    const auto& pts = obs.points();
    const std::size_t m = pts.size();
    std::vector<double> tvals(m);
    for (std::size_t j = 0; j < m; ++j) tvals[j] = pts[j].t;
    std::sort(tvals.begin(), tvals.end());

    std::vector<std::size_t> obs_by_x(m);
    for (std::size_t j = 0; j < m; ++j) obs_by_x[j] = j;
    std::sort(obs_by_x.begin(), obs_by_x.end(),
              [&](std::size_t a, std::size_t b) { return pts[a].x < pts[b].x; });

    std::vector<std::size_t> query_order(queries.size());
    for (std::size_t q = 0; q < queries.size(); ++q) query_order[q] = q;
    std::sort(query_order.begin(), query_order.end(), [&](std::size_t a, std::size_t b) {
        return queries[a].x < queries[b].x;
    });

    std::vector<int> fenwick(m + 1, 0);
    auto add = [&](std::size_t rank) {
        for (std::size_t i = rank + 1; i <= m; i += i & (~i + 1)) ++fenwick[i];
    };
    auto prefix = [&](std::size_t count) {
        int sum = 0;
        for (std::size_t i = count; i > 0; i -= i & (~i + 1)) sum += fenwick[i];
        return sum;
    };

    std::vector<double> out(queries.size());
    std::size_t next = 0;
    for (std::size_t qi : query_order) {
        const Point& q = queries[qi];
        while (next < m && pts[obs_by_x[next]].x <= q.x) {
            const double t = pts[obs_by_x[next]].t;
            const std::size_t rank =
                std::lower_bound(tvals.begin(), tvals.end(), t) - tvals.begin();
            add(rank);
            ++next;
        }
        const std::size_t below =
            std::upper_bound(tvals.begin(), tvals.end(), q.t) - tvals.begin();
        out[qi] = static_cast<double>(prefix(below)) / static_cast<double>(m);
    }
    return out;
}

std::vector<double> theoretical_batch(const ModelParams& params, const StudyWindow& w,
                                      const std::vector<Point>& pts, double a) {
    std::vector<double> out(pts.size());
    parallel_for(pts.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) out[i] = expect_g(params, w, pts[i]) / a;
    });
    return out;
}

// Smallest grid index k with k*step >= t (closed counting threshold).
std::size_t first_bin_geq(double t, double step) {
    auto k = static_cast<std::size_t>(std::max(0.0, std::ceil(t / step)));
    while (k > 0 && (static_cast<double>(k) - 1.0) * step >= t) --k;
    while (static_cast<double>(k) * step < t) ++k;
    return k;
}

// Smallest grid index k with k*step > t (strict counting threshold).
std::size_t first_bin_gt(double t, double step) {
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(t / step))) + 1;
    while (k > 0 && (static_cast<double>(k) - 1.0) * step > t) --k;
    while (static_cast<double>(k) * step <= t) ++k;
    return k;
}

}  // namespace

double empirical_cdf(const ObservationSet& obs, const Point& p) {
    std::size_t n = 0;
    for (const Point& q : obs.points()) n += (q.x <= p.x && q.t <= p.t);
    return static_cast<double>(n) / static_cast<double>(obs.size());
}

double empirical_cdf_left(const ObservationSet& obs, const Point& p) {
    std::size_t n = 0;
    for (const Point& q : obs.points()) n += (q.x < p.x && q.t < p.t);
    return static_cast<double>(n) / static_cast<double>(obs.size());
}

double theoretical_obs_cdf(const ModelParams& p, const StudyWindow& w, const Point& pt) {
    return expect_g(p, w, pt) / alpha(p, w);
}

StatisticBreakdown ks_statistic(const ObservationSet& obs, const ModelParams& params) {
    if (obs.size() < 1) throw std::invalid_argument("ks_statistic needs m >= 1");
    const StudyWindow& w = obs.window();
    const double a = alpha(params, w);
    const double m = static_cast<double>(obs.size());

    StatisticBreakdown out;

    const auto& pts = obs.points();
    const std::vector<double> femp_obs = empirical_cdf_batch(obs, pts);
    const std::vector<double> ftheo_obs = theoretical_batch(params, w, pts, a);
    out.delta1 = kNegInf;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        out.delta1 = std::max(out.delta1, femp_obs[j] - ftheo_obs[j]);
    }

    const std::vector<Point> crossings = intersection_points(obs);
    if (crossings.empty()) {
        out.delta2 = kNegInf;
        out.delta3 = kNegInf;
    } else {
        const std::vector<double> femp = empirical_cdf_batch(obs, crossings);
        const std::vector<double> ftheo = theoretical_batch(params, w, crossings, a);
        double dmax = kNegInf, dmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < crossings.size(); ++i) {
            const double d = femp[i] - ftheo[i];
            dmax = std::max(dmax, d);
            dmin = std::min(dmin, d);
        }
        out.delta2 = dmax;
        out.delta3 = 2.0 / m - dmin;
    }

    const std::vector<Point> proj = edge_projections(obs);
    {
        const std::vector<double> femp = empirical_cdf_batch(obs, proj);
        const std::vector<double> ftheo = theoretical_batch(params, w, proj, a);
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < proj.size(); ++i) dmin = std::min(dmin, femp[i] - ftheo[i]);
        out.delta4 = 1.0 / m - dmin;
    }

    const CornerSet cs = corner_points(w);
    auto dplus = [&](const Point& p) {
        return empirical_cdf(obs, p) - expect_g(params, w, p) / a;
    };
    out.delta5 = std::max(std::max(dplus(cs.origin), -dplus(cs.corners[0])),
                          std::max(-dplus(cs.corners[1]), -dplus(cs.corners[2])));

    const double dsup = std::max({out.delta1, out.delta2, out.delta3, out.delta4, out.delta5});
    out.statistic = std::sqrt(a) * std::sqrt(m) * dsup;
    out.evaluation_count = pts.size() + crossings.size() + proj.size() + 4;
    return out;
}

double ks_statistic_bruteforce(const ObservationSet& obs, const ModelParams& params,
                               double step) {
    if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
    const StudyWindow& w = obs.window();
    const double a = alpha(params, w);
    const double m = static_cast<double>(obs.size());
    const std::size_t nx = static_cast<std::size_t>(std::floor((w.G + w.s) / step)) + 1;
    const std::size_t nt = static_cast<std::size_t>(std::floor(w.G / step)) + 1;

    std::vector<Point> sorted = obs.points();
    std::sort(sorted.begin(), sorted.end());

    // The case structure makes the model CDF depend on t alone below the
    // support band and on x alone above it, so only the band needs fresh
    // evaluations per column.
    std::vector<double> below_band(nt);
    parallel_for(nt, [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            const double tk = static_cast<double>(k) * step;
            below_band[k] = expect_g(params, w, Point{tk + w.s, tk}) / a;
        }
    });

    std::vector<double> col_sup(nx, kNegInf);
    parallel_for(nx, [&](std::size_t begin, std::size_t end) {
        std::vector<int> closed_add(nt + 2, 0), strict_add(nt + 2, 0);
        std::size_t pc = 0, ps = 0;  // the chunk's first column absorbs everything left of it
        auto push_closed = [&](double t) {
            const std::size_t k = first_bin_geq(t, step);
            if (k < nt) ++closed_add[k];
        };
        auto push_strict = [&](double t) {
            const std::size_t k = first_bin_gt(t, step);
            if (k < nt) ++strict_add[k];
        };
        for (std::size_t i = begin; i < end; ++i) {
            const double xi = static_cast<double>(i) * step;
            while (pc < sorted.size() && sorted[pc].x <= xi) push_closed(sorted[pc++].t);
            while (ps < sorted.size() && sorted[ps].x < xi) push_strict(sorted[ps++].t);

            const double above_band =
                (xi <= w.G) ? expect_g(params, w, Point{xi, std::min(xi, w.G)}) / a : 0.0;
            int run_closed = 0, run_strict = 0;
            double sup = kNegInf;
            for (std::size_t k = 0; k < nt; ++k) {
                run_closed += closed_add[k];
                run_strict += strict_add[k];
                const double tk = static_cast<double>(k) * step;
                double ftheo;
                if (tk < xi - w.s) {
                    ftheo = below_band[k];
                } else if (tk > xi) {
                    ftheo = above_band;
                } else {
                    ftheo = expect_g(params, w, Point{xi, tk}) / a;
                }
                const double dplus = static_cast<double>(run_closed) / m - ftheo;
                const double dminus = ftheo - static_cast<double>(run_strict) / m;
                sup = std::max(sup, std::max(dplus, dminus));
            }
            col_sup[i] = sup;
        }
    });
    double sup = kNegInf;
    for (double v : col_sup) sup = std::max(sup, v);
    return std::sqrt(a) * std::sqrt(m) * sup;
}

}  // namespace dtks
