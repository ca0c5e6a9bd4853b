#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace dtks {

// Sampling window of the truncation design: births happen over a period of
// length G, deaths are recorded for s further time units. Both share the
// same time unit.
struct StudyWindow {
    double G = 0.0;
    double s = 0.0;
};

bool valid(const StudyWindow& w);
void require_valid(const StudyWindow& w);

// One unit: lifetime x and age t at the start of the study.
struct Point {
    double x = 0.0;
    double t = 0.0;
};

inline bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.t == b.t; }
inline bool operator<(const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.t < b.t);
}

// Observation parallelogram D = {(x,t) : 0 < t <= x <= t+s, t <= G}.
bool in_support(const StudyWindow& w, const Point& p);

// Rectangle [0,G+s] x [0,G] on which the truncated CDF is defined.
bool in_bounding_rect(const StudyWindow& w, const Point& p);

// Truncated sample. Every point must lie in the support of `window`;
// the constructor throws std::invalid_argument naming the first offender.
// Duplicate points are retained.
class ObservationSet {
  public:
    ObservationSet(std::vector<Point> points, StudyWindow window);

    const std::vector<Point>& points() const noexcept { return points_; }
    const StudyWindow& window() const noexcept { return window_; }
    std::size_t size() const noexcept { return points_.size(); }

  private:
    std::vector<Point> points_;
    StudyWindow window_;
};

// Coordinate crossings (x_j, t_j') of discordant observation pairs, i.e.
// pairs with x_j' < x_j and t_j' > t_j (strict on both sides; ties produce
// no crossing). Sorted and deduplicated.
std::vector<Point> intersection_points(const ObservationSet& obs);

// Projections of the observations onto the upper edge, (x_j, min(x_j, G)),
// and onto the right edge, (t_j + s, t_j). Sorted and deduplicated.
std::vector<Point> edge_projections(const ObservationSet& obs);

struct CornerSet {
    Point origin;                  // (0,0)
    std::array<Point, 3> corners;  // (G,0), (s,G), (G+s,G)
};
CornerSet corner_points(const StudyWindow& w);

// Branch of the case table governing the truncated rectangle probability
// P([0,x]x[0,t] ∩ D):
//   1: p in D, x > s        2: p in D, x <= s
//   3: t < x - s            4: x > s, x < t        5: x <= s, x < t
// Membership in D resolves boundaries with t <= x and x <= t+s closed.
// Throws std::domain_error for points outside the bounding rectangle.
int region_case(const StudyWindow& w, const Point& p);

}  // namespace dtks
