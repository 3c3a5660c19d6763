#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "circuma/curve.hpp"
#include "circuma/domain.hpp"
#include "circuma/errors.hpp"
#include "circuma/geometry.hpp"

namespace circuma {

/// Refinement ratio: cell size is capped at ratio(h) * dist_to_boundary.
/// The Whitney bound 1/2 alone leaves a resolution-independent zigzag error;
/// shrinking the ratio with h makes the estimator converge as h -> 0.
inline double refinement_ratio(double h) {
  return std::clamp(2.0 * std::sqrt(h), h, 0.5);
}

/// Quadrature of the quasihyperbolic density along the straight chord [a,b].
/// Composite Simpson; the subdivision count grows as the chord approaches
/// the boundary, where the density blows up.
inline double qh_edge_weight(const DomainSpec& dom, cpx a, cpx b, MetricFlavor flavor) {
  auto density = [&](cpx z) {
    if (flavor == MetricFlavor::euclidean) return 1.0 / dom.boundary_dist_e_raw(z);
    return 2.0 / ((1.0 + std::norm(z)) * dom.dist_sigma_raw(z));
  };
  double len = std::abs(b - a);
  if (len == 0.0) return 0.0;
  double d_end = std::min(dom.boundary_dist_e_raw(a), dom.boundary_dist_e_raw(b));
  int m = 2;
  if (d_end > 0.0) {
    m = static_cast<int>(std::ceil(8.0 * len / d_end));
    m = std::clamp(m, 2, 64);
  } else {
    m = 64;
  }
  if (m % 2) ++m;
  double sum = density(a) + density(b);
  for (int i = 1; i < m; ++i) {
    cpx z = a + (b - a) * (static_cast<double>(i) / m);
    sum += density(z) * (i % 2 ? 4.0 : 2.0);
  }
  return sum * len / (3.0 * m);
}

struct MetricGraph {
  const DomainSpec* dom = nullptr;
  double h = 0.0;
  std::vector<cpx> nodes;
  std::vector<double> node_dist;  // Euclidean boundary distance at the node
  std::vector<double> node_size;  // side length of the quadtree cell
  // CSR adjacency, symmetric
  std::vector<int> offsets;
  std::vector<int> targets;
  std::vector<double> w_e;
  std::vector<double> w_s;
  bool has_spherical = false;

  size_t size() const { return nodes.size(); }
};

namespace detail {

// 8 bytes per quadtree cell; geometry is recomputed during descent.
struct QtCell {
  int child = -1;    // index of first of 4 children, -1 for leaf
  int node_id = -1;  // graph node for in-domain leaves
};

struct QtBuilder {
  const DomainSpec& dom;
  double h;
  double ratio;
  bool need_spherical;
  cpx root_center;
  double root_size = 0.0;
  std::vector<QtCell> cells;
  MetricGraph g;

  QtBuilder(const DomainSpec& d, double h_, bool sph)
      : dom(d), h(h_), ratio(refinement_ratio(h_)), need_spherical(sph) {}

  // Membership with side inheritance: if z is closer to the parent probe
  // than the parent's boundary distance, z is on the same side of every
  // component and the parent's verdict carries over.
  bool in_domain_fast(cpx z, cpx parent, double parent_dist, bool parent_in) const {
    if (std::abs(z - parent) < parent_dist) return parent_in;
    return dom.in_domain(PlanePoint(z));
  }

  void build(size_t idx, cpx c, double s, cpx parent, double parent_dist, bool parent_in) {
    double d = dom.boundary_dist_e_raw(c);
    bool in = in_domain_fast(c, parent, parent_dist, parent_in);
    double half_diag = s * 0.70710678118654752;
    if (!in && d > half_diag) return;  // cell entirely outside the domain
    bool leaf = s <= h || s <= ratio * std::max(d - half_diag, 0.0);
    if (leaf) {
      if (in && d > 0.4 * s) {
        cells[idx].node_id = static_cast<int>(g.nodes.size());
        g.nodes.push_back(c);
        g.node_dist.push_back(d);
        g.node_size.push_back(s);
      }
      return;
    }
    size_t ch = cells.size();
    cells[idx].child = static_cast<int>(ch);
    cells.resize(ch + 4);
    double q = s / 4.0;
    const cpx off[4] = {{-q, -q}, {q, -q}, {-q, q}, {q, q}};
    for (int k = 0; k < 4; ++k) build(ch + k, c + off[k], s / 2, c, d, in);
  }

  // Leaf containing z: (node_id or -1, leaf size); node_id -2 when z is
  // outside the root square.
  std::pair<int, double> locate(cpx z) const {
    cpx c = root_center;
    double s = root_size;
    if (std::abs(z.real() - c.real()) > s / 2 || std::abs(z.imag() - c.imag()) > s / 2)
      return {-2, 0.0};
    size_t idx = 0;
    while (cells[idx].child >= 0) {
      int k = (z.real() > c.real() ? 1 : 0) + (z.imag() > c.imag() ? 2 : 0);
      idx = static_cast<size_t>(cells[idx].child + k);
      s /= 2;
      c += cpx((k & 1) ? s / 2 : -s / 2, (k & 2) ? s / 2 : -s / 2);
    }
    return {cells[idx].node_id, s};
  }

  bool edge_ok(cpx a, cpx b, double da, double db) const {
    double len = std::abs(b - a);
    if (std::min(da, db) > len) return true;
    return !dom.segment_hits_boundary(a, b);
  }

  void connect() {
    std::vector<std::pair<int, int>> pairs;
    const double dx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    const double dy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    size_t n = g.nodes.size();
    for (size_t a = 0; a < n; ++a) {
      cpx c = g.nodes[a];
      double s = g.node_size[a];
      double off = s / 2 * 1.01;
      for (int k = 0; k < 8; ++k) {
        auto [b, bs] = locate(c + cpx(dx[k] * off, dy[k] * off));
        if (b < 0) continue;
        // each touching pair is claimed by its smaller cell, so every
        // neighbor at equal or larger size is probed exactly here
        if (bs < s * 0.999) continue;
        // diagonal connectivity only between same-level cells
        if (k >= 4 && bs > s * 1.001) continue;
        if (static_cast<size_t>(b) == a) continue;
        if (bs <= s * 1.001 && static_cast<size_t>(b) < a) continue;  // dedupe equal sizes
        if (!edge_ok(c, g.nodes[static_cast<size_t>(b)], g.node_dist[a],
                     g.node_dist[static_cast<size_t>(b)]))
          continue;
        pairs.emplace_back(static_cast<int>(a), b);
      }
    }
    cells.clear();
    cells.shrink_to_fit();
    // CSR, symmetric
    std::vector<int> deg(n, 0);
    for (auto& [a, b] : pairs) {
      ++deg[static_cast<size_t>(a)];
      ++deg[static_cast<size_t>(b)];
    }
    g.offsets.assign(n + 1, 0);
    for (size_t i = 0; i < n; ++i) g.offsets[i + 1] = g.offsets[i] + deg[i];
    g.targets.assign(static_cast<size_t>(g.offsets[n]), -1);
    g.w_e.assign(static_cast<size_t>(g.offsets[n]), 0.0);
    if (need_spherical) g.w_s.assign(static_cast<size_t>(g.offsets[n]), 0.0);
    std::vector<int> cursor(g.offsets.begin(), g.offsets.end() - 1);
    for (auto& [a, b] : pairs) {
      size_t ai = static_cast<size_t>(a), bi = static_cast<size_t>(b);
      double we = qh_edge_weight(dom, g.nodes[ai], g.nodes[bi], MetricFlavor::euclidean);
      double ws =
          need_spherical ? qh_edge_weight(dom, g.nodes[ai], g.nodes[bi], MetricFlavor::spherical)
                         : 0.0;
      size_t ea = static_cast<size_t>(cursor[ai]++), eb = static_cast<size_t>(cursor[bi]++);
      g.targets[ea] = b;
      g.w_e[ea] = we;
      g.targets[eb] = a;
      g.w_e[eb] = we;
      if (need_spherical) {
        g.w_s[ea] = ws;
        g.w_s[eb] = ws;
      }
    }
  }
};

}  // namespace detail

inline MetricGraph build_graph(const DomainSpec& dom, double h, BBox window,
                               bool need_spherical = true) {
  if (!(h > 0.0)) throw error(errc::precondition_failed, "h must be positive");
  if (!window.valid()) throw error(errc::empty_window, "window is empty");
  detail::QtBuilder qb(dom, h, need_spherical);
  double side = std::max(window.width(), window.height());
  qb.root_center = window.center();
  qb.root_size = side;
  qb.cells.resize(1);
  cpx far = window.center() + cpx(side * 10, side * 10);
  qb.build(0, qb.root_center, side, far, 0.0, false);
  if (qb.g.nodes.empty()) throw error(errc::empty_window, "no sample lies in the domain");
  qb.connect();
  qb.g.dom = &dom;
  qb.g.h = h;
  qb.g.has_spherical = need_spherical;
  return std::move(qb.g);
}

struct GeodesicResult {
  double value = 0.0;
  Curve path;
  MetricFlavor flavor = MetricFlavor::euclidean;
  double resolution = 0.0;
};

/// Curve relaxation: subdivide long chords, then slide interior vertices
/// along the local normal while the exact quadrature cost decreases. The
/// result is an admissible curve, so the value remains an upper bound.
inline std::pair<double, std::vector<cpx>> polish_path(const DomainSpec& dom,
                                                       std::vector<cpx> v, MetricFlavor flavor,
                                                       int rounds = 6) {
  auto bd = [&](cpx z) { return dom.boundary_dist_e_raw(z); };
  auto chord_ok = [&](cpx a, cpx b) {
    double len = std::abs(b - a);
    if (std::min(bd(a), bd(b)) > len) return true;
    return !dom.segment_hits_boundary(a, b);
  };
  // subdivision: chord length at most 0.15 * local boundary distance
  for (int pass = 0; pass < 12 && v.size() < 400; ++pass) {
    std::vector<cpx> next;
    next.reserve(2 * v.size());
    bool changed = false;
    for (size_t i = 0; i + 1 < v.size(); ++i) {
      next.push_back(v[i]);
      double len = std::abs(v[i + 1] - v[i]);
      if (len > 0.15 * std::min(bd(v[i]), bd(v[i + 1])) && next.size() < 400) {
        next.push_back(0.5 * (v[i] + v[i + 1]));
        changed = true;
      }
    }
    next.push_back(v.back());
    v = std::move(next);
    if (!changed) break;
  }
  auto w = [&](cpx a, cpx b) { return qh_edge_weight(dom, a, b, flavor); };
  const double steps[4] = {0.3, 0.1, 0.03, 0.01};
  for (int round = 0; round < rounds; ++round) {
    for (size_t i = 1; i + 1 < v.size(); ++i) {
      cpx dir = v[i + 1] - v[i - 1];
      double dn = std::abs(dir);
      if (dn == 0.0) continue;
      cpx nrm = cpx(-dir.imag(), dir.real()) / dn;
      double d_i = bd(v[i]);
      double base = w(v[i - 1], v[i]) + w(v[i], v[i + 1]);
      cpx best = v[i];
      for (double s : steps) {
        for (double sign : {1.0, -1.0}) {
          cpx cand = v[i] + sign * s * d_i * nrm;
          if (!chord_ok(v[i - 1], cand) || !chord_ok(cand, v[i + 1])) continue;
          double c = w(v[i - 1], cand) + w(cand, v[i + 1]);
          if (c < base) {
            base = c;
            best = cand;
          }
        }
      }
      v[i] = best;
    }
  }
  double total = 0.0;
  for (size_t i = 0; i + 1 < v.size(); ++i) total += w(v[i], v[i + 1]);
  return {total, v};
}

/// Shortcut smoothing of a discrete geodesic: shortest path on the DAG of
/// boundary-safe chords between polyline vertices (bounded lookahead).
/// Removes the direction bias of 8-neighbor grid paths while keeping the
/// value an exact quadrature of an admissible curve.
inline std::pair<double, std::vector<cpx>> smooth_path(const DomainSpec& dom,
                                                       const std::vector<cpx>& verts,
                                                       MetricFlavor flavor, int lookahead = 24) {
  size_t n = verts.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  std::vector<double> bd(n);
  for (size_t i = 0; i < n; ++i) bd[i] = dom.boundary_dist_e_raw(verts[i]);
  dist[0] = 0.0;
  for (size_t j = 1; j < n; ++j) {
    size_t lo = j > static_cast<size_t>(lookahead) ? j - static_cast<size_t>(lookahead) : 0;
    for (size_t i = lo; i < j; ++i) {
      if (!std::isfinite(dist[i])) continue;
      double len = std::abs(verts[j] - verts[i]);
      if (j != i + 1 && std::min(bd[i], bd[j]) <= len &&
          dom.segment_hits_boundary(verts[i], verts[j]))
        continue;
      double w = dist[i] + qh_edge_weight(dom, verts[i], verts[j], flavor);
      if (w < dist[j]) {
        dist[j] = w;
        parent[j] = static_cast<int>(i);
      }
    }
  }
  std::vector<cpx> out;
  for (int v = static_cast<int>(n) - 1; v >= 0; v = parent[static_cast<size_t>(v)]) {
    out.push_back(verts[static_cast<size_t>(v)]);
    if (v == 0) break;
  }
  std::reverse(out.begin(), out.end());
  return {dist[n - 1], out};
}

namespace detail {

struct Stub {
  int node;
  double weight;
};

}  // namespace detail

/// Reusable query context: one KdTree over the graph nodes.
class GraphQuery {
 public:
  explicit GraphQuery(const MetricGraph& g) : g_(g), tree_(g.nodes) {}

  const MetricGraph& graph() const { return g_; }

  /// Stub edges from a query endpoint: exact-quadrature chords to every node
  /// within 0.75 * boundary distance (such chords stay >= 0.25 * distance
  /// away from the boundary), and always at least 3 reachable nodes.
  std::vector<detail::Stub> stubs(cpx z, MetricFlavor flavor) const {
    const DomainSpec& dom = *g_.dom;
    double d = dom.boundary_dist_e_raw(z);
    double r = 0.75 * d;
    std::vector<int> cand;
    std::vector<detail::Stub> out;
    while (r < 1e12) {
      cand.clear();
      tree_.within(z, r, cand);
      out.clear();
      for (int i : cand) {
        cpx n = g_.nodes[static_cast<size_t>(i)];
        if (std::min(d, g_.node_dist[static_cast<size_t>(i)]) <= std::abs(n - z) &&
            dom.segment_hits_boundary(z, n))
          continue;
        out.push_back({i, qh_edge_weight(dom, z, n, flavor)});
      }
      if (out.size() >= 3) break;
      r *= 2.0;
    }
    if (out.empty()) throw error(errc::disconnected, "query point cannot reach any graph node");
    return out;
  }

  /// Dijkstra between two off-graph endpoints through stub edges.
  GeodesicResult distance(cpx x, cpx y, MetricFlavor flavor) const {
    const std::vector<double>& w = flavor == MetricFlavor::euclidean ? g_.w_e : g_.w_s;
    if (flavor == MetricFlavor::spherical && !g_.has_spherical)
      throw error(errc::precondition_failed, "graph built without spherical weights");
    auto sx = stubs(x, flavor);
    auto sy = stubs(y, flavor);
    size_t n = g_.nodes.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<int> parent(n, -1);
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
    for (auto& s : sx) {
      if (s.weight < dist[static_cast<size_t>(s.node)]) {
        dist[static_cast<size_t>(s.node)] = s.weight;
        parent[static_cast<size_t>(s.node)] = -2;  // direct from x
        pq.push({s.weight, s.node});
      }
    }
    while (!pq.empty()) {
      auto [dv, v] = pq.top();
      pq.pop();
      if (dv > dist[static_cast<size_t>(v)]) continue;
      for (int e = g_.offsets[static_cast<size_t>(v)]; e < g_.offsets[static_cast<size_t>(v) + 1];
           ++e) {
        int u = g_.targets[static_cast<size_t>(e)];
        double nd = dv + w[static_cast<size_t>(e)];
        if (nd < dist[static_cast<size_t>(u)]) {
          dist[static_cast<size_t>(u)] = nd;
          parent[static_cast<size_t>(u)] = v;
          pq.push({nd, u});
        }
      }
    }
    double best = std::numeric_limits<double>::infinity();
    int best_node = -1;
    for (auto& s : sy) {
      double total = dist[static_cast<size_t>(s.node)] + s.weight;
      if (total < best) {
        best = total;
        best_node = s.node;
      }
    }
    if (best_node < 0 || !std::isfinite(best))
      throw error(errc::disconnected, "no path between query points");
    std::vector<cpx> verts;
    verts.push_back(y);
    for (int v = best_node; v >= 0; v = parent[static_cast<size_t>(v)]) {
      verts.push_back(g_.nodes[static_cast<size_t>(v)]);
      if (parent[static_cast<size_t>(v)] == -2) break;
    }
    verts.push_back(x);
    std::reverse(verts.begin(), verts.end());
    auto [smoothed, sverts] = smooth_path(*g_.dom, verts, flavor);
    if (smoothed > best) {
      smoothed = best;
      sverts = verts;
    }
    auto [polished, pverts] = polish_path(*g_.dom, sverts, flavor);
    GeodesicResult r;
    if (polished <= smoothed) {
      r.value = polished;
      r.path = Curve(pverts);
    } else {
      r.value = smoothed;
      r.path = Curve(sverts);
    }
    r.flavor = flavor;
    r.resolution = g_.h;
    return r;
  }

  /// Multi-source graph distances (no stubs); optional parent tracking.
  std::vector<double> node_distances(const std::vector<int>& sources, MetricFlavor flavor,
                                     std::vector<int>* parents = nullptr) const {
    const std::vector<double>& w = flavor == MetricFlavor::euclidean ? g_.w_e : g_.w_s;
    size_t n = g_.nodes.size();
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    if (parents) parents->assign(n, -1);
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
    for (int s : sources) {
      dist[static_cast<size_t>(s)] = 0.0;
      pq.push({0.0, s});
    }
    while (!pq.empty()) {
      auto [dv, v] = pq.top();
      pq.pop();
      if (dv > dist[static_cast<size_t>(v)]) continue;
      for (int e = g_.offsets[static_cast<size_t>(v)]; e < g_.offsets[static_cast<size_t>(v) + 1];
           ++e) {
        int u = g_.targets[static_cast<size_t>(e)];
        double nd = dv + w[static_cast<size_t>(e)];
        if (nd < dist[static_cast<size_t>(u)]) {
          dist[static_cast<size_t>(u)] = nd;
          if (parents) (*parents)[static_cast<size_t>(u)] = v;
          pq.push({nd, u});
        }
      }
    }
    return dist;
  }

  std::vector<double> node_distances(int source, MetricFlavor flavor) const {
    return node_distances(std::vector<int>{source}, flavor);
  }

  /// Node indices of a shortest path between two graph nodes.
  std::vector<int> node_path(int a, int b, MetricFlavor flavor) const {
    std::vector<int> parents;
    auto dist = node_distances(std::vector<int>{a}, flavor, &parents);
    if (!std::isfinite(dist[static_cast<size_t>(b)]))
      throw error(errc::disconnected, "nodes are in different components");
    std::vector<int> path;
    for (int v = b; v >= 0; v = parents[static_cast<size_t>(v)]) {
      path.push_back(v);
      if (v == a) break;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  int nearest_node(cpx z) const { return tree_.nearest(z); }

 private:
  const MetricGraph& g_;
  KdTree tree_;
};

/// Window heuristic for distance queries: the endpoints' box padded by
/// 4 * |x - y|; geodesics between window-interior points do not profit from
/// far excursions at this scale.
inline BBox query_window(const DomainSpec& dom, cpx x, cpx y) {
  BBox w;
  w.expand(x);
  w.expand(y);
  double pad = 4.0 * std::abs(x - y);
  pad = std::max(pad, 0.5 * std::max(dom.boundary_dist_e_raw(x), dom.boundary_dist_e_raw(y)));
  w.pad(pad);
  return w;
}

inline GeodesicResult qh_distance(const DomainSpec& dom, PlanePoint x, PlanePoint y,
                                  MetricFlavor flavor, double h) {
  if (!x.finite() || !y.finite())
    throw error(errc::precondition_failed, "distance queries need finite endpoints");
  if (!dom.in_domain(x) || !dom.in_domain(y))
    throw error(errc::point_outside_domain, "query endpoint not in domain");
  MetricGraph g = build_graph(dom, h, query_window(dom, x.z, y.z),
                              flavor == MetricFlavor::spherical);
  GraphQuery q(g);
  return q.distance(x.z, y.z, flavor);
}

struct ComparisonPairResult {
  cpx x, y;
  double k_e = 0.0;
  double k_s = 0.0;
  double ratio = 0.0;  // k_s / k_e
  bool violation = false;
};

struct ComparisonReport {
  double D = 0.0;           // Euclidean distance from the origin to the boundary set
  double lower = 0.0;       // (pi sqrt 2)^{-1}
  double upper = 0.0;       // 3 (2 + D)
  double slack = 0.0;       // multiplicative discretization slack applied
  double worst_low = 0.0;   // min ratio observed
  double worst_high = 0.0;  // max ratio observed
  std::vector<ComparisonPairResult> pairs;
  std::vector<size_t> violations;
};

/// Checks (pi sqrt2)^{-1} k^e <= k^sigma <= 3 (2 + D) k^e on the given pairs,
/// with D = dist_e(0, complement of the domain).
inline ComparisonReport verify_comparison(const DomainSpec& dom,
                                          const std::vector<std::pair<cpx, cpx>>& pairs, double h,
                                          double slack = 0.02) {
  if (dom.contains_infinity())
    throw error(errc::infinity_in_domain, "comparison requires infinity outside the domain");
  ComparisonReport rep;
  rep.D = dom.boundary_dist_e_raw(cpx(0, 0));
  rep.lower = 1.0 / (kPi * std::sqrt(2.0));
  rep.upper = 3.0 * (2.0 + rep.D);
  rep.slack = slack;
  BBox w = dom.components_bbox();
  for (auto& [x, y] : pairs) {
    w.expand(x);
    w.expand(y);
  }
  w.pad(0.1 * w.diam());
  MetricGraph g = build_graph(dom, h, w, true);
  GraphQuery q(g);
  rep.worst_low = std::numeric_limits<double>::infinity();
  rep.worst_high = 0.0;
  for (auto& [x, y] : pairs) {
    ComparisonPairResult pr;
    pr.x = x;
    pr.y = y;
    pr.k_e = q.distance(x, y, MetricFlavor::euclidean).value;
    pr.k_s = q.distance(x, y, MetricFlavor::spherical).value;
    pr.ratio = pr.k_s / pr.k_e;
    pr.violation =
        pr.ratio < rep.lower * (1.0 - slack) || pr.ratio > rep.upper * (1.0 + slack);
    rep.worst_low = std::min(rep.worst_low, pr.ratio);
    rep.worst_high = std::max(rep.worst_high, pr.ratio);
    if (pr.violation) rep.violations.push_back(rep.pairs.size());
    rep.pairs.push_back(pr);
  }
  return rep;
}

}  // namespace circuma
