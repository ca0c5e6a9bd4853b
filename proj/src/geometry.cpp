#include "dtks/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dtks {

bool valid(const StudyWindow& w) {
    return std::isfinite(w.G) && std::isfinite(w.s) && w.G > 0.0 && w.s > 0.0;
}

void require_valid(const StudyWindow& w) {
    if (!valid(w)) throw std::invalid_argument("study window requires finite G > 0 and s > 0");
}

bool in_support(const StudyWindow& w, const Point& p) {
    return 0.0 < p.t && p.t <= p.x && p.x <= p.t + w.s && p.t <= w.G;
}

bool in_bounding_rect(const StudyWindow& w, const Point& p) {
    return 0.0 <= p.x && p.x <= w.G + w.s && 0.0 <= p.t && p.t <= w.G;
}

ObservationSet::ObservationSet(std::vector<Point> points, StudyWindow window)
    : points_(std::move(points)), window_(window) {
    require_valid(window_);
    for (std::size_t j = 0; j < points_.size(); ++j) {
        if (!in_support(window_, points_[j])) {
            throw std::invalid_argument("observation " + std::to_string(j) +
                                        " lies outside the support parallelogram");
        }
    }
}

namespace {

std::vector<Point> sorted_unique(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace

std::vector<Point> intersection_points(const ObservationSet& obs) {
    const auto& pts = obs.points();
    const std::size_t m = pts.size();
    std::vector<Point> out;
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < m; ++k) {
            if (pts[k].x < pts[j].x && pts[k].t > pts[j].t) {
                out.push_back({pts[j].x, pts[k].t});
            }
        }
    }
    return sorted_unique(std::move(out));
}

std::vector<Point> edge_projections(const ObservationSet& obs) {
    const auto& w = obs.window();
    std::vector<Point> out;
    out.reserve(2 * obs.size());
    for (const Point& p : obs.points()) {
        out.push_back({p.x, std::min(p.x, w.G)});
        out.push_back({p.t + w.s, p.t});
    }
    return sorted_unique(std::move(out));
}

CornerSet corner_points(const StudyWindow& w) {
    require_valid(w);
    return {Point{0.0, 0.0}, {Point{w.G, 0.0}, Point{w.s, w.G}, Point{w.G + w.s, w.G}}};
}

int region_case(const StudyWindow& w, const Point& p) {
    if (!in_bounding_rect(w, p)) {
        throw std::domain_error("point outside [0,G+s] x [0,G]");
    }
    if (p.t < p.x - w.s) return 3;
    if (p.x < p.t) return p.x > w.s ? 4 : 5;
    return p.x > w.s ? 1 : 2;
}

}  // namespace dtks
