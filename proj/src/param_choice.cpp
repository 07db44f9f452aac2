#include "illposed/param_choice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace illposed {

std::optional<int> discrepancy_pick(const std::vector<double>& residuals, double noise_norm,
                                    double tau) {
  if (!(tau > 1.0)) throw std::invalid_argument("discrepancy_pick: tau must exceed 1");
  if (!(noise_norm > 0.0)) throw std::invalid_argument("discrepancy_pick: noise norm must be positive");
  const double bound = tau * noise_norm;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (residuals[i] <= bound) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

namespace {

struct Pt {
  double x;
  double y;
  int k;
};

double cross(const Pt& o, const Pt& a, const Pt& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double dist(const Pt& a, const Pt& b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Menger curvature: 4 Area / (product of side lengths).
double curvature(const Pt& a, const Pt& b, const Pt& c) {
  const double d1 = dist(a, b);
  const double d2 = dist(b, c);
  const double d3 = dist(a, c);
  if (d1 == 0.0 || d2 == 0.0 || d3 == 0.0) return 0.0;
  return 2.0 * std::abs(cross(a, b, c)) / (d1 * d2 * d3);
}

}  // namespace

int lcurve_corner(const LCurvePoints& points) {
  const std::size_t n = points.ks.size();
  if (points.log_res.size() != n || points.log_semi.size() != n) {
    throw std::invalid_argument("lcurve_corner: field lengths differ");
  }
  if (n < 3) throw std::invalid_argument("lcurve_corner: need at least 3 points");

  std::vector<Pt> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = {points.log_res[i], points.log_semi[i], points.ks[i]};
  }

  // Collinearity scale: largest triangle area against the curve extent.
  double span = 0.0;
  for (const Pt& p : pts) span = std::max(span, dist(pts.front(), p));
  double max_area = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    max_area = std::max(max_area, std::abs(cross(pts.front(), pts[i], pts.back())));
  }
  if (max_area <= 1e-12 * std::max(1.0, span * span)) {
    throw std::runtime_error("lcurve_corner: points are collinear, no corner");
  }

  // Prune to the lower convex boundary. The curve runs right to left as k
  // grows (residual decreases), so scan in x-ascending order, which is
  // reverse iteration order, and keep only convex turns.
  std::vector<Pt> sorted(pts.rbegin(), pts.rend());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Pt& a, const Pt& b) { return a.x < b.x; });
  std::vector<Pt> hull;
  for (const Pt& p : sorted) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0) {
      hull.pop_back();
    }
    hull.push_back(p);
  }

  // Interior hull vertices are the corner candidates.
  int best_k = -1;
  double best_curv = -1.0;
  for (std::size_t i = 1; i + 1 < hull.size(); ++i) {
    const double curv = curvature(hull[i - 1], hull[i], hull[i + 1]);
    if (curv > best_curv || (curv == best_curv && hull[i].k < best_k)) {
      best_curv = curv;
      best_k = hull[i].k;
    }
  }
  if (best_k < 0) {
    throw std::runtime_error("lcurve_corner: no interior corner candidate");
  }
  return best_k;
}

}  // namespace illposed
