#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "circuma/curve.hpp"
#include "circuma/errors.hpp"
#include "circuma/geometry.hpp"

namespace circuma {

enum class ComponentKind { disc, segment, polyline, point };

/// One boundary component of a planar domain: a closed disc, a segment, a
/// simple closed polyline, or a single point. Immutable after construction.
class BoundaryComponent {
 public:
  static BoundaryComponent disc(cpx center, double radius) {
    if (!(radius > 0.0)) throw error(errc::invalid_domain, "disc radius must be positive");
    BoundaryComponent c;
    c.kind_ = ComponentKind::disc;
    c.center_ = center;
    c.radius_ = radius;
    c.finish();
    return c;
  }

  static BoundaryComponent segment(cpx p, cpx q) {
    if (p == q) throw error(errc::invalid_domain, "segment endpoints must be distinct");
    BoundaryComponent c;
    c.kind_ = ComponentKind::segment;
    c.p_ = p;
    c.q_ = q;
    c.finish();
    return c;
  }

  /// Closed simple polyline; the vertex list is resampled up to at least 64
  /// vertices (shape preserved, vertices added along edges).
  static BoundaryComponent polyline(std::vector<cpx> vertices) {
    if (vertices.size() < 3)
      throw error(errc::invalid_domain, "polyline needs at least 3 vertices");
    BoundaryComponent c;
    c.kind_ = ComponentKind::polyline;
    c.pts_ = vertices.size() < 64 ? resample_closed(vertices, 64) : std::move(vertices);
    c.check_simple();
    c.finish();
    return c;
  }

  static BoundaryComponent point(cpx p) {
    BoundaryComponent c;
    c.kind_ = ComponentKind::point;
    c.p_ = p;
    c.finish();
    return c;
  }

  ComponentKind kind() const { return kind_; }
  cpx disc_center() const { return center_; }
  double disc_radius() const { return radius_; }
  cpx seg_p() const { return p_; }
  cpx seg_q() const { return q_; }
  cpx point_pos() const { return p_; }
  const std::vector<cpx>& polyline_vertices() const { return pts_; }

  double diameter() const {
    switch (kind_) {
      case ComponentKind::disc: return 2.0 * radius_;
      case ComponentKind::segment: return std::abs(q_ - p_);
      case ComponentKind::point: return 0.0;
      case ComponentKind::polyline: {
        double d = 0.0;
        for (size_t i = 0; i < pts_.size(); ++i)
          for (size_t j = i + 1; j < pts_.size(); ++j)
            d = std::max(d, std::abs(pts_[i] - pts_[j]));
        return d;
      }
    }
    return 0.0;
  }

  BBox bbox() const {
    BBox b;
    switch (kind_) {
      case ComponentKind::disc:
        b.expand(center_ - cpx(radius_, radius_));
        b.expand(center_ + cpx(radius_, radius_));
        break;
      case ComponentKind::segment:
        b.expand(p_);
        b.expand(q_);
        break;
      case ComponentKind::point: b.expand(p_); break;
      case ComponentKind::polyline:
        for (cpx p : pts_) b.expand(p);
        break;
    }
    return b;
  }

  /// Euclidean distance from z to the boundary curve of the component
  /// (to the circle for a disc, not to the closed disc).
  double boundary_dist_e(cpx z) const {
    switch (kind_) {
      case ComponentKind::disc: return std::abs(std::abs(z - center_) - radius_);
      case ComponentKind::segment: return dist_point_segment(z, p_, q_);
      case ComponentKind::point: return std::abs(z - p_);
      case ComponentKind::polyline: return polyline_dist(z);
    }
    return 0.0;
  }

  /// Membership in the closed component (the closed disc, the segment, the
  /// polyline curve itself, the point). Polylines are curves, not filled
  /// regions; their sides are told apart by DomainSpec region signatures.
  bool contains(cpx z, double tol = 0.0) const {
    switch (kind_) {
      case ComponentKind::disc: return std::abs(z - center_) <= radius_ + tol;
      case ComponentKind::segment: return dist_point_segment(z, p_, q_) <= tol;
      case ComponentKind::point: return std::abs(z - p_) <= tol;
      case ComponentKind::polyline: return polyline_dist(z) <= tol;
    }
    return false;
  }

  /// True if the open chord (a,b) meets the component; both endpoints are
  /// assumed to lie off the component.
  bool chord_hits(cpx a, cpx b) const {
    switch (kind_) {
      case ComponentKind::disc:
        return dist_point_segment(center_, a, b) < radius_;
      case ComponentKind::segment: return segments_intersect(a, b, p_, q_);
      case ComponentKind::point: return dist_point_segment(p_, a, b) == 0.0;
      case ComponentKind::polyline: {
        cpx mid = 0.5 * (a + b);
        double r = 0.5 * std::abs(b - a) + max_edge_;
        scratch_.clear();
        vertex_tree_->within(mid, r, scratch_);
        size_t n = pts_.size();
        for (int i : scratch_) {
          size_t u = static_cast<size_t>(i);
          if (segments_intersect(a, b, pts_[u], pts_[(u + 1) % n])) return true;
          if (segments_intersect(a, b, pts_[(u + n - 1) % n], pts_[u])) return true;
        }
        return false;
      }
    }
    return false;
  }

  /// For polylines: winding-number parity test of z against the closed curve.
  bool polyline_encloses(cpx z) const {
    bool inside = false;
    size_t n = pts_.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
      cpx a = pts_[j], b = pts_[i];
      if ((b.imag() > z.imag()) != (a.imag() > z.imag())) {
        double x = b.real() + (z.imag() - b.imag()) * (a.real() - b.real()) /
                                  (a.imag() - b.imag());
        if (z.real() < x) inside = !inside;
      }
    }
    return inside;
  }

  /// Uniformly spaced samples of the boundary curve.
  const std::vector<cpx>& boundary_samples() const { return samples_; }

  /// Per-sample factors 1/sqrt(1+|s|^2); chordal distance to a fixed z is
  /// monotone in |z-s| * scale(s), so the nearest sample in the spherical
  /// sense can be found without per-sample trig.
  const std::vector<double>& sample_scales() const { return scales_; }

  std::vector<cpx> boundary_samples(size_t n) const {
    std::vector<cpx> out;
    out.reserve(n);
    switch (kind_) {
      case ComponentKind::disc:
        for (size_t k = 0; k < n; ++k) {
          double t = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
          out.push_back(center_ + radius_ * cpx(std::cos(t), std::sin(t)));
        }
        break;
      case ComponentKind::segment:
        for (size_t k = 0; k < n; ++k) {
          double t = static_cast<double>(k) / static_cast<double>(n - 1);
          out.push_back(p_ + t * (q_ - p_));
        }
        break;
      case ComponentKind::point: out.assign(n, p_); break;
      case ComponentKind::polyline: out = resample_closed(pts_, n); break;
    }
    return out;
  }

 private:
  void check_simple() const {
    size_t n = pts_.size();
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        if (j == i + 1 || (i == 0 && j == n - 1)) continue;
        if (segments_intersect(pts_[i], pts_[(i + 1) % n], pts_[j], pts_[(j + 1) % n]))
          throw error(errc::invalid_domain, "polyline is self-intersecting");
      }
    }
  }

  void finish() {
    samples_ = boundary_samples(512);
    scales_.resize(samples_.size());
    for (size_t i = 0; i < samples_.size(); ++i)
      scales_[i] = 1.0 / std::sqrt(1.0 + std::norm(samples_[i]));
    if (kind_ == ComponentKind::polyline) {
      vertex_tree_ = std::make_shared<KdTree>(pts_);
      max_edge_ = 0.0;
      size_t n = pts_.size();
      for (size_t i = 0; i < n; ++i)
        max_edge_ = std::max(max_edge_, std::abs(pts_[(i + 1) % n] - pts_[i]));
    }
  }

  double polyline_dist(cpx z) const {
    // Nearest vertex bounds the answer; only edges incident to vertices
    // within that bound (plus one edge length) can do better.
    int nv = vertex_tree_->nearest(z);
    double best = std::abs(pts_[nv] - z);
    scratch_.clear();
    vertex_tree_->within(z, best + max_edge_, scratch_);
    size_t n = pts_.size();
    for (int i : scratch_) {
      size_t u = static_cast<size_t>(i);
      best = std::min(best, dist_point_segment(z, pts_[u], pts_[(u + 1) % n]));
      best = std::min(best, dist_point_segment(z, pts_[(u + n - 1) % n], pts_[u]));
    }
    return best;
  }

  ComponentKind kind_ = ComponentKind::point;
  cpx center_{0, 0};
  double radius_ = 0.0;
  cpx p_{0, 0}, q_{0, 0};
  std::vector<cpx> pts_;
  std::vector<cpx> samples_;
  std::vector<double> scales_;
  std::shared_ptr<KdTree> vertex_tree_;
  double max_edge_ = 0.0;
  mutable std::vector<int> scratch_;
};

/// Euclidean distance between two components as sets (exact for
/// disc/segment/point pairs; polylines via their own edges).
inline double component_set_distance(const BoundaryComponent& a, const BoundaryComponent& b) {
  using K = ComponentKind;
  auto edges_of = [](const BoundaryComponent& c) {
    std::vector<std::pair<cpx, cpx>> e;
    if (c.kind() == K::segment) {
      e.emplace_back(c.seg_p(), c.seg_q());
    } else if (c.kind() == K::polyline) {
      const auto& v = c.polyline_vertices();
      for (size_t i = 0; i < v.size(); ++i) e.emplace_back(v[i], v[(i + 1) % v.size()]);
    }
    return e;
  };
  if (a.kind() == K::disc && b.kind() == K::disc)
    return std::max(0.0, std::abs(a.disc_center() - b.disc_center()) - a.disc_radius() -
                             b.disc_radius());
  if (a.kind() == K::disc && b.kind() == K::point)
    return std::max(0.0, std::abs(a.disc_center() - b.point_pos()) - a.disc_radius());
  if (a.kind() == K::point && b.kind() == K::disc) return component_set_distance(b, a);
  if (a.kind() == K::point && b.kind() == K::point)
    return std::abs(a.point_pos() - b.point_pos());
  if (a.kind() == K::disc) {
    double best = std::numeric_limits<double>::infinity();
    for (auto& [p, q] : edges_of(b))
      best = std::min(best, dist_point_segment(a.disc_center(), p, q));
    return std::max(0.0, best - a.disc_radius());
  }
  if (b.kind() == K::disc) return component_set_distance(b, a);
  if (a.kind() == K::point) {
    double best = std::numeric_limits<double>::infinity();
    for (auto& [p, q] : edges_of(b)) best = std::min(best, dist_point_segment(a.point_pos(), p, q));
    return best;
  }
  if (b.kind() == K::point) return component_set_distance(b, a);
  double best = std::numeric_limits<double>::infinity();
  for (auto& [p1, p2] : edges_of(a))
    for (auto& [q1, q2] : edges_of(b))
      best = std::min(best, dist_segment_segment(p1, p2, q1, q2));
  return best;
}

enum class MetricFlavor { euclidean, spherical };

struct ComponentGeometry {
  std::vector<double> diameters;
  std::vector<std::vector<double>> pairwise;  // symmetric, zero diagonal
};

/// A planar domain given as the complement of finitely many pairwise-disjoint
/// boundary components, with a flag telling whether the point at infinity
/// belongs to the domain. Immutable value type.
class DomainSpec {
 public:
  DomainSpec() = default;
  DomainSpec(std::string name, std::vector<BoundaryComponent> components, bool contains_infinity,
             std::optional<cpx> interior_point = std::nullopt)
      : name_(std::move(name)),
        components_(std::move(components)),
        contains_infinity_(contains_infinity),
        interior_point_(interior_point) {
    validate();
  }

  const std::string& name() const { return name_; }
  const std::vector<BoundaryComponent>& components() const { return components_; }
  bool contains_infinity() const { return contains_infinity_; }
  std::optional<cpx> interior_point() const { return interior_point_; }

  BBox components_bbox() const {
    BBox b;
    for (const auto& c : components_) b.expand(c.bbox());
    if (!b.valid()) {
      b.expand(cpx(-1, -1));
      b.expand(cpx(1, 1));
    }
    return b;
  }

  bool in_domain(const PlanePoint& p) const {
    if (p.at_infinity) return contains_infinity_;
    for (const auto& c : components_)
      if (c.contains(p.z, membership_tol_)) return false;
    return region_signature(p.z) == ref_signature_;
  }

  /// Distance from z (a domain point) to the boundary, Euclidean or
  /// spherical flavor. Spherical flavor includes the distance to infinity
  /// when infinity is not in the domain.
  double dist_to_boundary(const PlanePoint& p, MetricFlavor flavor) const {
    if (!in_domain(p)) throw error(errc::point_outside_domain, "query point not in domain");
    if (flavor == MetricFlavor::euclidean) {
      if (p.at_infinity)
        throw error(errc::point_outside_domain, "euclidean flavor requires a finite point");
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : components_) best = std::min(best, c.boundary_dist_e(p.z));
      return best;
    }
    if (p.at_infinity) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : components_)
        for (cpx s : c.boundary_samples())
          best = std::min(best, spherical_distance(p, PlanePoint(s)));
      return best;
    }
    return dist_sigma_raw(p.z);
  }

  /// Unchecked fast path for graph construction: Euclidean distance from a
  /// finite point to the union of components (no domain membership check).
  double boundary_dist_e_raw(cpx z) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : components_) best = std::min(best, c.boundary_dist_e(z));
    return best;
  }

  /// Spherical distance from a finite point to the boundary samples (and to
  /// infinity when infinity is outside the domain); no membership check.
  double dist_sigma_raw(cpx z) const {
    double scaled = std::numeric_limits<double>::infinity();
    for (const auto& c : components_) {
      const auto& s = c.boundary_samples();
      const auto& sc = c.sample_scales();
      for (size_t i = 0; i < s.size(); ++i) scaled = std::min(scaled, std::abs(z - s[i]) * sc[i]);
    }
    double chi = 2.0 * scaled / std::sqrt(1.0 + std::norm(z));
    double best = 2.0 * std::asin(std::clamp(chi / 2.0, 0.0, 1.0));
    if (!contains_infinity_)
      best = std::min(best, spherical_distance(PlanePoint(z), PlanePoint::infinity()));
    return best;
  }

  /// True if the segment between two domain points meets the boundary set.
  bool segment_hits_boundary(cpx a, cpx b) const {
    for (const auto& c : components_)
      if (c.chord_hits(a, b)) return true;
    return false;
  }

  ComponentGeometry component_geometry() const {
    ComponentGeometry g;
    size_t n = components_.size();
    g.diameters.resize(n);
    g.pairwise.assign(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) g.diameters[i] = components_[i].diameter();
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j)
        g.pairwise[i][j] = g.pairwise[j][i] =
            component_set_distance(components_[i], components_[j]);
    return g;
  }

  /// Bit signature telling which closed polylines enclose z; two points are
  /// in the same region of the complement iff signatures agree.
  unsigned region_signature(cpx z) const {
    unsigned sig = 0, bit = 1;
    for (const auto& c : components_) {
      if (c.kind() == ComponentKind::polyline) {
        if (c.polyline_encloses(z)) sig |= bit;
        bit <<= 1;
      }
    }
    return sig;
  }

  DomainSpec with_components(std::vector<BoundaryComponent> comps, std::string name) const {
    return DomainSpec(std::move(name), std::move(comps), contains_infinity_, interior_point_);
  }

 private:
  void validate() {
    BBox bb = components_bbox();
    double scale = std::max(bb.diam(), 1e-12);
    membership_tol_ = 1e-12 * scale;
    double min_gap = 1e-9 * scale;
    for (size_t i = 0; i < components_.size(); ++i) {
      if (contains_infinity_ && components_[i].kind() == ComponentKind::segment &&
          components_[i].diameter() > 1e12)
        throw error(errc::invalid_domain, "unbounded-scale component with infinity inside");
      for (size_t j = i + 1; j < components_.size(); ++j) {
        double d = component_set_distance(components_[i], components_[j]);
        if (d < min_gap) throw error(errc::invalid_domain, "components touch or overlap");
      }
    }
    // Reference interior point: explicit, else infinity side (a far point).
    cpx ref;
    if (interior_point_) {
      ref = *interior_point_;
    } else {
      if (!contains_infinity_)
        throw error(errc::invalid_domain,
                    "domain without infinity needs an explicit interior point");
      ref = bb.center() + cpx(bb.diam() + 1.0, bb.diam() + 1.0);
    }
    for (const auto& c : components_)
      if (c.contains(ref, membership_tol_))
        throw error(errc::invalid_domain, "reference interior point lies in a component");
    ref_signature_ = region_signature(ref);
    check_connected(bb, ref);
  }

  void check_connected(BBox bb, cpx ref) const {
    // Flood fill on a coarse probe grid over the padded bounding box; all
    // in-domain probe cells must form one connected set.
    bb.expand(ref);
    bb.pad(0.15 * std::max(bb.diam(), 1.0));
    const int N = 64;
    double hx = bb.width() / N, hy = bb.height() / N;
    std::vector<char> in(static_cast<size_t>(N) * N, 0);
    auto cell_center = [&](int i, int j) {
      return cpx(bb.xmin + (i + 0.5) * hx, bb.ymin + (j + 0.5) * hy);
    };
    int count = 0, start = -1;
    double best_ref = std::numeric_limits<double>::infinity();
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        cpx z = cell_center(i, j);
        if (in_domain(PlanePoint(z))) {
          in[j * N + i] = 1;
          ++count;
          double d = std::abs(z - ref);
          if (d < best_ref) {
            best_ref = d;
            start = j * N + i;
          }
        }
      }
    if (count == 0 || start < 0)
      throw error(errc::invalid_domain, "no probe cell lies in the domain");
    std::deque<int> todo{start};
    std::vector<char> seen(in.size(), 0);
    seen[start] = 1;
    int reached = 1;
    while (!todo.empty()) {
      int c = todo.front();
      todo.pop_front();
      int i = c % N, j = c / N;
      const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        int ii = i + di[k], jj = j + dj[k];
        if (ii < 0 || jj < 0 || ii >= N || jj >= N) continue;
        int cc = jj * N + ii;
        if (in[cc] && !seen[cc]) {
          seen[cc] = 1;
          ++reached;
          todo.push_back(cc);
        }
      }
    }
    if (reached < count)
      throw error(errc::invalid_domain, "domain is not connected at probe resolution");
  }

  std::string name_;
  std::vector<BoundaryComponent> components_;
  bool contains_infinity_ = true;
  std::optional<cpx> interior_point_;
  unsigned ref_signature_ = 0;
  double membership_tol_ = 1e-12;
};

// ---------------------------------------------------------------------------
// Domain spec files (JSON).

inline nlohmann::json component_to_json(const BoundaryComponent& c) {
  nlohmann::json j;
  switch (c.kind()) {
    case ComponentKind::disc:
      j["disc"] = {{"cx", c.disc_center().real()},
                   {"cy", c.disc_center().imag()},
                   {"r", c.disc_radius()}};
      break;
    case ComponentKind::segment:
      j["segment"] = {{"x1", c.seg_p().real()},
                      {"y1", c.seg_p().imag()},
                      {"x2", c.seg_q().real()},
                      {"y2", c.seg_q().imag()}};
      break;
    case ComponentKind::polyline: {
      nlohmann::json pts = nlohmann::json::array();
      for (cpx p : c.polyline_vertices()) pts.push_back({p.real(), p.imag()});
      j["polyline"] = {{"points", pts}};
      break;
    }
    case ComponentKind::point:
      j["point"] = {{"x", c.point_pos().real()}, {"y", c.point_pos().imag()}};
      break;
  }
  return j;
}

inline BoundaryComponent component_from_json(const nlohmann::json& j) {
  if (j.contains("disc")) {
    const auto& d = j["disc"];
    return BoundaryComponent::disc(cpx(d["cx"].get<double>(), d["cy"].get<double>()),
                                   d["r"].get<double>());
  }
  if (j.contains("segment")) {
    const auto& s = j["segment"];
    return BoundaryComponent::segment(cpx(s["x1"].get<double>(), s["y1"].get<double>()),
                                      cpx(s["x2"].get<double>(), s["y2"].get<double>()));
  }
  if (j.contains("polyline")) {
    std::vector<cpx> pts;
    for (const auto& p : j["polyline"]["points"])
      pts.emplace_back(p[0].get<double>(), p[1].get<double>());
    return BoundaryComponent::polyline(std::move(pts));
  }
  if (j.contains("point")) {
    const auto& p = j["point"];
    return BoundaryComponent::point(cpx(p["x"].get<double>(), p["y"].get<double>()));
  }
  throw error(errc::io_error, "unknown component record");
}

inline nlohmann::json domain_to_json(const DomainSpec& dom) {
  nlohmann::json j;
  j["name"] = dom.name();
  j["contains_infinity"] = dom.contains_infinity();
  j["components"] = nlohmann::json::array();
  for (const auto& c : dom.components()) j["components"].push_back(component_to_json(c));
  if (dom.interior_point())
    j["interior_point"] = {dom.interior_point()->real(), dom.interior_point()->imag()};
  return j;
}

inline DomainSpec domain_from_json(const nlohmann::json& j) {
  std::vector<BoundaryComponent> comps;
  for (const auto& c : j.at("components")) comps.push_back(component_from_json(c));
  std::optional<cpx> interior;
  if (j.contains("interior_point"))
    interior = cpx(j["interior_point"][0].get<double>(), j["interior_point"][1].get<double>());
  return DomainSpec(j.value("name", std::string("domain")), std::move(comps),
                    j.at("contains_infinity").get<bool>(), interior);
}

inline DomainSpec load_domain(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw error(errc::io_error, "cannot open domain file " + path);
  nlohmann::json j;
  f >> j;
  return domain_from_json(j);
}

inline void save_domain(const DomainSpec& dom, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw error(errc::io_error, "cannot write domain file " + path);
  f << domain_to_json(dom).dump(2) << "\n";
}

}  // namespace circuma
