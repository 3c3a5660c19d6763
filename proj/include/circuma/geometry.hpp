#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace circuma {

using cpx = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643383279502884;

/// A point of the Riemann sphere: a finite complex number or the point at
/// infinity. Infinity compares equal only to infinity.
struct PlanePoint {
  cpx z{0.0, 0.0};
  bool at_infinity = false;

  PlanePoint() = default;
  PlanePoint(double re, double im) : z(re, im) {}
  PlanePoint(cpx v) : z(v) {}  // NOLINT: implicit by design

  static PlanePoint infinity() {
    PlanePoint p;
    p.at_infinity = true;
    return p;
  }

  bool finite() const { return !at_infinity; }

  friend bool operator==(const PlanePoint& a, const PlanePoint& b) {
    if (a.at_infinity || b.at_infinity) return a.at_infinity && b.at_infinity;
    return a.z == b.z;
  }
};

inline double sqr(double x) { return x * x; }
inline double cross(cpx a, cpx b) { return a.real() * b.imag() - a.imag() * b.real(); }
inline double dot(cpx a, cpx b) { return a.real() * b.real() + a.imag() * b.imag(); }

/// Chordal metric on the sphere of diameter 2: chi(z,w) in [0,2].
inline double chordal_distance(const PlanePoint& a, const PlanePoint& b) {
  if (a.at_infinity && b.at_infinity) return 0.0;
  if (a.at_infinity) return 2.0 / std::sqrt(1.0 + std::norm(b.z));
  if (b.at_infinity) return 2.0 / std::sqrt(1.0 + std::norm(a.z));
  return 2.0 * std::abs(a.z - b.z) /
         (std::sqrt(1.0 + std::norm(a.z)) * std::sqrt(1.0 + std::norm(b.z)));
}

/// Spherical (great-circle) metric induced by the length element
/// 2|dz|/(1+|z|^2); antipodal points are at distance pi.
inline double spherical_distance(const PlanePoint& a, const PlanePoint& b) {
  double chi = chordal_distance(a, b);
  // Chord of the unit sphere subtending angle sigma: chi = 2 sin(sigma/2).
  return 2.0 * std::asin(std::clamp(chi / 2.0, 0.0, 1.0));
}

/// Distance from p to the closed segment [a,b].
inline double dist_point_segment(cpx p, cpx a, cpx b) {
  cpx d = b - a;
  double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(p - a);
  double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

inline cpx project_point_segment(cpx p, cpx a, cpx b) {
  cpx d = b - a;
  double len2 = std::norm(d);
  if (len2 == 0.0) return a;
  double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return a + t * d;
}

inline bool segments_intersect(cpx p1, cpx p2, cpx q1, cpx q2) {
  auto orient = [](cpx a, cpx b, cpx c) {
    double v = cross(b - a, c - a);
    return (v > 0) - (v < 0);
  };
  int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
  int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  auto on = [](cpx a, cpx b, cpx c) {
    return std::abs(cross(b - a, c - a)) == 0.0 && dot(c - a, c - b) <= 0.0;
  };
  return on(p1, p2, q1) || on(p1, p2, q2) || on(q1, q2, p1) || on(q1, q2, p2);
}

/// Distance between closed segments [p1,p2] and [q1,q2].
inline double dist_segment_segment(cpx p1, cpx p2, cpx q1, cpx q2) {
  if (segments_intersect(p1, p2, q1, q2)) return 0.0;
  return std::min(std::min(dist_point_segment(q1, p1, p2), dist_point_segment(q2, p1, p2)),
                  std::min(dist_point_segment(p1, q1, q2), dist_point_segment(p2, q1, q2)));
}

/// Spherical length of the straight Euclidean segment [a,b]:
/// integral of 2|dz|/(1+|z|^2), in closed form.
inline double spherical_segment_length(cpx a, cpx b) {
  cpx d = b - a;
  double al = std::norm(d);
  if (al == 0.0) return 0.0;
  double be = 2.0 * dot(a, d);
  double ga = 1.0 + std::norm(a);
  // 1+|a+td|^2 = al t^2 + be t + ga, positive definite.
  double disc = 4.0 * al * ga - be * be;
  double s = std::sqrt(disc);
  double len = std::sqrt(al);
  return 2.0 * len * (2.0 / s) * (std::atan((2.0 * al + be) / s) - std::atan(be / s));
}

struct BBox {
  double xmin = std::numeric_limits<double>::infinity();
  double ymin = std::numeric_limits<double>::infinity();
  double xmax = -std::numeric_limits<double>::infinity();
  double ymax = -std::numeric_limits<double>::infinity();

  void expand(cpx p) {
    xmin = std::min(xmin, p.real());
    ymin = std::min(ymin, p.imag());
    xmax = std::max(xmax, p.real());
    ymax = std::max(ymax, p.imag());
  }
  void expand(const BBox& o) {
    xmin = std::min(xmin, o.xmin);
    ymin = std::min(ymin, o.ymin);
    xmax = std::max(xmax, o.xmax);
    ymax = std::max(ymax, o.ymax);
  }
  void pad(double r) {
    xmin -= r;
    ymin -= r;
    xmax += r;
    ymax += r;
  }
  bool valid() const { return xmin <= xmax && ymin <= ymax; }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double diam() const { return std::hypot(width(), height()); }
  cpx center() const { return {(xmin + xmax) / 2, (ymin + ymax) / 2}; }
  bool contains(cpx p) const {
    return p.real() >= xmin && p.real() <= xmax && p.imag() >= ymin && p.imag() <= ymax;
  }
};

/// Simple static 2-d kd-tree over points; nearest and radius queries.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<cpx> pts) : pts_(std::move(pts)) {
    idx_.resize(pts_.size());
    for (size_t i = 0; i < idx_.size(); ++i) idx_[i] = static_cast<int>(i);
    if (!idx_.empty()) build(0, static_cast<int>(idx_.size()), 0);
  }

  size_t size() const { return pts_.size(); }
  cpx point(int i) const { return pts_[i]; }

  int nearest(cpx q) const {
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    nearest_rec(0, static_cast<int>(idx_.size()), 0, q, best, best_d2);
    return best;
  }

  void within(cpx q, double r, std::vector<int>& out) const {
    within_rec(0, static_cast<int>(idx_.size()), 0, q, r * r, out);
  }

 private:
  void build(int lo, int hi, int axis) {
    if (hi - lo <= 1) return;
    int mid = (lo + hi) / 2;
    std::nth_element(idx_.begin() + lo, idx_.begin() + mid, idx_.begin() + hi,
                     [&](int a, int b) {
                       return axis == 0 ? pts_[a].real() < pts_[b].real()
                                        : pts_[a].imag() < pts_[b].imag();
                     });
    build(lo, mid, 1 - axis);
    build(mid + 1, hi, 1 - axis);
  }

  void nearest_rec(int lo, int hi, int axis, cpx q, int& best, double& best_d2) const {
    if (lo >= hi) return;
    int mid = (lo + hi) / 2;
    cpx p = pts_[idx_[mid]];
    double d2 = std::norm(p - q);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = idx_[mid];
    }
    double delta = axis == 0 ? q.real() - p.real() : q.imag() - p.imag();
    int first_lo = delta < 0 ? lo : mid + 1;
    int first_hi = delta < 0 ? mid : hi;
    int second_lo = delta < 0 ? mid + 1 : lo;
    int second_hi = delta < 0 ? hi : mid;
    nearest_rec(first_lo, first_hi, 1 - axis, q, best, best_d2);
    if (delta * delta < best_d2) nearest_rec(second_lo, second_hi, 1 - axis, q, best, best_d2);
  }

  void within_rec(int lo, int hi, int axis, cpx q, double r2, std::vector<int>& out) const {
    if (lo >= hi) return;
    int mid = (lo + hi) / 2;
    cpx p = pts_[idx_[mid]];
    if (std::norm(p - q) <= r2) out.push_back(idx_[mid]);
    double delta = axis == 0 ? q.real() - p.real() : q.imag() - p.imag();
    if (delta < 0 || delta * delta <= r2) within_rec(lo, mid, 1 - axis, q, r2, out);
    if (delta > 0 || delta * delta <= r2) within_rec(mid + 1, hi, 1 - axis, q, r2, out);
  }

  std::vector<cpx> pts_;
  std::vector<int> idx_;
};

}  // namespace circuma
