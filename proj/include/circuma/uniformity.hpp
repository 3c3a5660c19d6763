#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <vector>

#include "circuma/curve.hpp"
#include "circuma/domain.hpp"
#include "circuma/errors.hpp"
#include "circuma/metric_graph.hpp"

namespace circuma {

// ---------------------------------------------------------------------------
// Inner metrics

struct InnerDistances {
  double lambda = 0.0;  // inner length metric
  Curve lambda_path;
  double rho_lo = 0.0;  // rho_lo <= rho <= rho_hi, factor-2 bracket
  double rho_hi = 0.0;
};

namespace detail {

inline bool chord_admissible(const DomainSpec& dom, cpx a, cpx b, double da, double db) {
  if (std::min(da, db) > std::abs(b - a)) return true;
  return !dom.segment_hits_boundary(a, b);
}

/// Shortest-path smoothing under plain Euclidean length (taut string):
/// DAG shortest path over boundary-safe chords of the polyline.
inline std::pair<double, std::vector<cpx>> taut_string(const DomainSpec& dom,
                                                       const std::vector<cpx>& verts,
                                                       int lookahead = 48) {
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
      if (j != i + 1 && !chord_admissible(dom, verts[i], verts[j], bd[i], bd[j])) continue;
      double w = dist[i] + std::abs(verts[j] - verts[i]);
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

/// Dijkstra between off-graph endpoints under penalized Euclidean length:
/// weight = length * (1 + beta * min(1, cell / dist_to_boundary)).
inline std::vector<cpx> penalized_path(const MetricGraph& g, const GraphQuery& q, cpx a, cpx b,
                                       double beta) {
  const DomainSpec& dom = *g.dom;
  auto stub_nodes = [&](cpx z) {
    auto st = q.stubs(z, MetricFlavor::euclidean);  // reuse reachability filter
    std::vector<int> out;
    for (auto& s : st) out.push_back(s.node);
    return out;
  };
  auto edge_pen = [&](size_t u, size_t v) {
    double cell = std::max(g.node_size[u], g.node_size[v]);
    double d = std::min(g.node_dist[u], g.node_dist[v]);
    return std::abs(g.nodes[u] - g.nodes[v]) * (1.0 + beta * std::min(1.0, cell / d));
  };
  size_t n = g.size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  using QE = std::pair<double, int>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
  for (int s : stub_nodes(a)) {
    double w = std::abs(g.nodes[static_cast<size_t>(s)] - a);
    if (w < dist[static_cast<size_t>(s)]) {
      dist[static_cast<size_t>(s)] = w;
      parent[static_cast<size_t>(s)] = -2;
      pq.push({w, s});
    }
  }
  while (!pq.empty()) {
    auto [dv, v] = pq.top();
    pq.pop();
    if (dv > dist[static_cast<size_t>(v)]) continue;
    for (int e = g.offsets[static_cast<size_t>(v)]; e < g.offsets[static_cast<size_t>(v) + 1];
         ++e) {
      size_t u = static_cast<size_t>(g.targets[static_cast<size_t>(e)]);
      double nd = dv + edge_pen(static_cast<size_t>(v), u);
      if (nd < dist[u]) {
        dist[u] = nd;
        parent[u] = v;
        pq.push({nd, static_cast<int>(u)});
      }
    }
  }
  double best = std::numeric_limits<double>::infinity();
  int bn = -1;
  for (int s : stub_nodes(b)) {
    double tot = dist[static_cast<size_t>(s)] + std::abs(g.nodes[static_cast<size_t>(s)] - b);
    if (tot < best) {
      best = tot;
      bn = s;
    }
  }
  if (bn < 0 || !std::isfinite(best))
    throw error(errc::disconnected, "no path between query points");
  std::vector<cpx> verts{b};
  for (int v = bn; v >= 0; v = parent[static_cast<size_t>(v)]) {
    verts.push_back(g.nodes[static_cast<size_t>(v)]);
    if (parent[static_cast<size_t>(v)] == -2) break;
  }
  verts.push_back(a);
  std::reverse(verts.begin(), verts.end());
  (void)dom;
  return verts;
}

/// Connectivity of a and b inside the closed ball B(a, d) intersected with
/// the domain, on the sample graph (with small grid slack).
inline bool connected_in_ball(const MetricGraph& g, const GraphQuery& q, cpx a, cpx b, double d) {
  if (std::abs(b - a) > d) return false;
  double slack = 1e-9 * (1.0 + d);
  auto in_ball = [&](size_t i) {
    return std::abs(g.nodes[i] - a) <= d + g.node_size[i] + slack;
  };
  std::vector<int> start, goal_mark(g.size(), 0);
  for (auto& s : q.stubs(a, MetricFlavor::euclidean))
    if (in_ball(static_cast<size_t>(s.node))) start.push_back(s.node);
  bool goal_any = false;
  for (auto& s : q.stubs(b, MetricFlavor::euclidean))
    if (in_ball(static_cast<size_t>(s.node))) {
      goal_mark[static_cast<size_t>(s.node)] = 1;
      goal_any = true;
    }
  if (start.empty() || !goal_any) return false;
  std::vector<char> seen(g.size(), 0);
  std::vector<int> stack;
  for (int s : start) {
    if (!seen[static_cast<size_t>(s)]) {
      seen[static_cast<size_t>(s)] = 1;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (goal_mark[static_cast<size_t>(v)]) return true;
    for (int e = g.offsets[static_cast<size_t>(v)]; e < g.offsets[static_cast<size_t>(v) + 1];
         ++e) {
      size_t u = static_cast<size_t>(g.targets[static_cast<size_t>(e)]);
      if (!seen[u] && in_ball(u)) {
        seen[u] = 1;
        stack.push_back(static_cast<int>(u));
      }
    }
  }
  return false;
}

}  // namespace detail

/// lambda via Euclidean-length shortest path on the sample graph (taut-string
/// smoothed); rho bracketed by binary search: connectivity inside B(a,d)
/// yields a path of diameter <= 2d, failure at d yields rho >= d.
inline InnerDistances inner_distances(const DomainSpec& dom, cpx a, cpx b, double h) {
  if (!dom.in_domain(PlanePoint(a)) || !dom.in_domain(PlanePoint(b)))
    throw error(errc::point_outside_domain, "inner distance endpoints must be in the domain");
  MetricGraph g = build_graph(dom, h, query_window(dom, a, b), false);
  GraphQuery q(g);
  auto raw = detail::penalized_path(g, q, a, b, 0.0);
  auto [lam, verts] = detail::taut_string(dom, raw);
  InnerDistances r;
  r.lambda = lam;
  r.lambda_path = Curve(verts);
  double lo = std::abs(b - a), hi = lam * (1.0 + 1e-9) + 1e-12;
  if (detail::connected_in_ball(g, q, a, b, lo)) {
    hi = lo;
  } else {
    for (int it = 0; it < 45 && hi - lo > 1e-7 * (1.0 + hi); ++it) {
      double mid = 0.5 * (lo + hi);
      if (detail::connected_in_ball(g, q, a, b, mid))
        hi = mid;
      else
        lo = mid;
    }
  }
  r.rho_lo = std::max(std::abs(b - a), lo);
  r.rho_hi = std::min(2.0 * hi, r.lambda);
  r.rho_hi = std::max(r.rho_hi, r.rho_lo);
  return r;
}

// ---------------------------------------------------------------------------
// Cigar conditions

enum class CigarFlavor { length, diameter };

struct CigarReport {
  Curve curve;
  double A_length = 0.0;  // smallest A passing the length-cigar condition
  double A_diam = 0.0;    // smallest A passing the diameter-cigar condition
  cpx from{0, 0}, to{0, 0};
  bool pass_length = false;  // vs the requested A
  bool pass_diam = false;
  double requested_A = 0.0;
  double lambda = 0.0;  // filled by find_uniform_curve / estimate_uniformity
};

/// Evaluates min{side length or side diameter} <= A * dist(gamma(t), bd)
/// at every vertex and segment midpoint; returns the smallest passing A per
/// flavor. Interior boundary contact makes both constants infinite.
inline CigarReport check_cigar(const Curve& curve, const DomainSpec& dom, double A) {
  const auto& v = curve.vertices();
  if (v.size() < 2) throw error(errc::precondition_failed, "cigar check needs a real curve");
  size_t n = v.size();
  // interior points must lie in the domain (endpoints may touch the boundary)
  for (size_t i = 1; i + 1 < n; ++i)
    if (!dom.in_domain(PlanePoint(v[i])))
      throw error(errc::curve_exits_domain, "curve leaves the domain at an interior vertex");
  auto pre_d = curve.prefix_diameters();
  auto suf_d = curve.suffix_diameters();
  double A_len = 0.0, A_dia = 0.0;
  auto eval = [&](cpx z, double len_before, double len_after, double diam_before,
                  double diam_after) {
    double d = dom.boundary_dist_e_raw(z);
    double ml = std::min(len_before, len_after);
    double md = std::min(diam_before, diam_after);
    if (d <= 0.0) {
      if (ml > 0.0) A_len = std::numeric_limits<double>::infinity();
      if (md > 0.0) A_dia = std::numeric_limits<double>::infinity();
      return;
    }
    A_len = std::max(A_len, ml / d);
    A_dia = std::max(A_dia, md / d);
  };
  double total = curve.length_e();
  for (size_t i = 0; i < n; ++i)
    eval(v[i], curve.prefix_len_e(i), total - curve.prefix_len_e(i), pre_d[i], suf_d[i]);
  for (size_t i = 0; i + 1 < n; ++i) {
    cpx m = 0.5 * (v[i] + v[i + 1]);
    double lb = curve.prefix_len_e(i) + 0.5 * std::abs(v[i + 1] - v[i]);
    // diameter of the truncated piece including the midpoint
    double db = pre_d[i], da = suf_d[i + 1];
    for (size_t j = 0; j <= i; ++j) db = std::max(db, std::abs(m - v[j]));
    for (size_t j = i + 1; j < n; ++j) da = std::max(da, std::abs(m - v[j]));
    eval(m, lb, total - lb, db, da);
  }
  CigarReport r;
  r.curve = curve;
  r.A_length = A_len;
  r.A_diam = A_dia;
  r.from = v.front();
  r.to = v.back();
  r.requested_A = A;
  r.pass_length = A_len <= A;
  r.pass_diam = A_dia <= A;
  return r;
}

/// Heuristic uniform-curve search: penalized shortest paths over a beta
/// ladder, scored by A_length * (length / lambda).
inline CigarReport find_uniform_curve(const DomainSpec& dom, cpx a, cpx b, double h) {
  InnerDistances inner = inner_distances(dom, a, b, h);
  MetricGraph g = build_graph(dom, h, query_window(dom, a, b), false);
  GraphQuery q(g);
  std::optional<CigarReport> best;
  double best_score = std::numeric_limits<double>::infinity();
  for (double beta : {0.0, 1.0, 4.0, 16.0}) {
    std::vector<cpx> verts = detail::penalized_path(g, q, a, b, beta);
    CigarReport rep = check_cigar(Curve(verts), dom, 0.0);
    double score = rep.A_length * (rep.curve.length_e() / std::max(inner.lambda, 1e-300));
    if (score < best_score) {
      best_score = score;
      rep.lambda = inner.lambda;
      best = rep;
    }
  }
  return *best;
}

struct UniformityEstimate {
  double A_est = 0.0;
  struct Row {
    cpx a, b;
    double A_curve = 0.0;      // cigar constant of the found curve
    double quasiconvex = 0.0;  // length / lambda
    double A_pair = 0.0;       // max of the two
  };
  std::vector<Row> table;
};

inline UniformityEstimate estimate_uniformity(const DomainSpec& dom,
                                              const std::vector<std::pair<cpx, cpx>>& pairs,
                                              double h) {
  if (pairs.empty()) throw error(errc::precondition_failed, "need at least one pair");
  UniformityEstimate out;
  for (auto& [a, b] : pairs) {
    CigarReport rep = find_uniform_curve(dom, a, b, h);
    UniformityEstimate::Row row;
    row.a = a;
    row.b = b;
    row.A_curve = rep.A_length;
    row.quasiconvex = rep.curve.length_e() / std::max(rep.lambda, 1e-300);
    row.A_pair = std::max(row.A_curve, row.quasiconvex);
    out.A_est = std::max(out.A_est, row.A_pair);
    out.table.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Geometric verifiers

struct SeparationReport {
  bool empty = true;
  double worst_ratio = 0.0;  // max over pairs of min-diam / dist
  double implied_A = 0.0;    // sqrt(worst_ratio / 2) - 1, clamped at 0
  std::vector<std::pair<size_t, size_t>> flagged;
};

/// min{diam S1, diam S2} <= 2 (A+1)^2 dist(S1,S2) for components of an
/// inner A-uniform domain; checked with slack +1 on the estimated A.
inline SeparationReport verify_separation(const DomainSpec& dom, double A_est) {
  SeparationReport rep;
  const auto g = dom.component_geometry();
  size_t n = g.diameters.size();
  if (n < 2) return rep;
  rep.empty = false;
  double C = 2.0 * (A_est + 2.0) * (A_est + 2.0);  // slack +1 on A
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      double md = std::min(g.diameters[i], g.diameters[j]);
      double dist = g.pairwise[i][j];
      if (dist <= 0.0) continue;
      double ratio = md / dist;
      rep.worst_ratio = std::max(rep.worst_ratio, ratio);
      if (md > C * dist) rep.flagged.emplace_back(i, j);
    }
  rep.implied_A = std::max(0.0, std::sqrt(rep.worst_ratio / 2.0) - 1.0);
  return rep;
}

/// Bounded-turning estimate of a component (as a filled set): max over
/// sampled point pairs of (diameter of a connecting raster path) / distance.
inline double verify_bounded_turning(const BoundaryComponent& comp, int sample_pairs = 60) {
  if (comp.kind() == ComponentKind::point)
    throw error(errc::degenerate_component, "point components have no turning constant");
  if (comp.kind() == ComponentKind::segment) return 1.0;  // subsegments realize the distance
  BBox bb = comp.bbox();
  bb.pad(0.02 * std::max(bb.diam(), 1e-12));
  const int N = 256;
  double hx = bb.width() / N, hy = bb.height() / N;
  double cell = std::hypot(hx, hy);
  auto center = [&](int i, int j) { return cpx(bb.xmin + (i + 0.5) * hx, bb.ymin + (j + 0.5) * hy); };
  auto in_set = [&](cpx z) {
    if (comp.contains(z, 0.55 * cell)) return true;
    if (comp.kind() == ComponentKind::polyline && comp.polyline_encloses(z)) return true;
    return false;
  };
  std::vector<char> set(static_cast<size_t>(N) * N, 0);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) set[static_cast<size_t>(j) * N + i] = in_set(center(i, j));
  auto cell_of = [&](cpx z) {
    int i = std::clamp(static_cast<int>((z.real() - bb.xmin) / hx), 0, N - 1);
    int j = std::clamp(static_cast<int>((z.imag() - bb.ymin) / hy), 0, N - 1);
    return std::pair<int, int>(i, j);
  };
  // deterministic sample points on the component
  auto samples = comp.boundary_samples(64);
  double L = 0.0;
  int made = 0;
  for (size_t si = 0; si < samples.size() && made < sample_pairs; si += 5) {
    for (size_t sj = si + 13; sj < samples.size() && made < sample_pairs; sj += 19) {
      cpx p = samples[si], qq = samples[sj];
      if (std::abs(p - qq) < 0.02 * bb.diam()) continue;
      ++made;
      // BFS path within the set; track the path, measure its diameter
      auto [pi, pj] = cell_of(p);
      auto [qi, qj] = cell_of(qq);
      std::vector<int> par(static_cast<size_t>(N) * N, -1);
      std::vector<char> seen(static_cast<size_t>(N) * N, 0);
      std::deque<int> todo;
      int s0 = pj * N + pi, s1 = qj * N + qi;
      if (!set[s0] || !set[s1]) continue;
      seen[s0] = 1;
      todo.push_back(s0);
      while (!todo.empty() && !seen[s1]) {
        int c = todo.front();
        todo.pop_front();
        int ci = c % N, cj = c / N;
        const int di[8] = {1, -1, 0, 0, 1, 1, -1, -1}, dj[8] = {0, 0, 1, -1, 1, -1, 1, -1};
        for (int k = 0; k < 8; ++k) {
          int ii = ci + di[k], jj = cj + dj[k];
          if (ii < 0 || jj < 0 || ii >= N || jj >= N) continue;
          int cc = jj * N + ii;
          if (set[cc] && !seen[cc]) {
            seen[cc] = 1;
            par[cc] = c;
            todo.push_back(cc);
          }
        }
      }
      if (!seen[s1]) continue;  // disconnected at raster resolution
      std::vector<cpx> path;
      for (int c = s1; c >= 0; c = par[c]) {
        path.push_back(center(c % N, c / N));
        if (c == s0) break;
      }
      double diam = 0.0;
      for (size_t x = 0; x < path.size(); ++x)
        for (size_t y = x + 1; y < path.size(); ++y)
          diam = std::max(diam, std::abs(path[x] - path[y]));
      L = std::max(L, diam / std::abs(p - qq));
    }
  }
  return std::max(L, 1.0);
}

struct CountResult {
  int count = 0;
  double bound = 0.0;
};

/// Number of components meeting B(0,R) with diameter > r, against the
/// packing bound C(A) (1 + R^2/r^2) with C(A) = 2 (A+1)^2.
inline CountResult count_large_components(const DomainSpec& dom, double r, double R,
                                          double A_est) {
  if (!(r > 0.0) || !(R > 0.0)) throw error(errc::precondition_failed, "radii must be positive");
  CountResult out;
  BoundaryComponent origin = BoundaryComponent::point(cpx(0, 0));
  for (const auto& c : dom.components()) {
    if (c.diameter() <= r) continue;
    if (component_set_distance(c, origin) <= R) ++out.count;
  }
  double C = 2.0 * (A_est + 1.0) * (A_est + 1.0);
  out.bound = C * (1.0 + (R * R) / (r * r));
  return out;
}

/// Concatenation of diameter cigars at a joint x0 with
/// dist(x0, bd) >= min{d(g1), d(g2)} / A; the result is checked at (2A+1)A.
inline CigarReport concatenate_with_cigar(const Curve& g1, const Curve& g2, const DomainSpec& dom,
                                          double A) {
  if (std::abs(g1.vertices().back() - g2.vertices().front()) > 1e-9)
    throw error(errc::precondition_failed, "curves do not share the joint point");
  CigarReport r1 = check_cigar(g1, dom, A);
  CigarReport r2 = check_cigar(g2, dom, A);
  if (!r1.pass_diam || !r2.pass_diam)
    throw error(errc::precondition_failed, "input curves fail the diameter cigar at A");
  cpx x0 = g1.vertices().back();
  double need = std::min(g1.trace_diameter(), g2.trace_diameter()) / A;
  if (dom.boundary_dist_e_raw(x0) < need)
    throw error(errc::precondition_failed,
                "joint too close to the boundary: dist(x0) < min{d(g1), d(g2)} / A");
  Curve joined = g1.concat(g2);
  double CA = (2.0 * A + 1.0) * A;
  CigarReport rep = check_cigar(joined, dom, CA);
  return rep;
}

// ---------------------------------------------------------------------------
// Boundary avoidance

namespace detail {

struct Circle {
  cpx c;
  double r;
};

/// Minimal enclosing circle (Welzl, deterministic order).
inline Circle enclosing_circle(const std::vector<cpx>& pts) {
  auto circ2 = [](cpx a, cpx b) { return Circle{0.5 * (a + b), 0.5 * std::abs(a - b)}; };
  auto circ3 = [](cpx a, cpx b, cpx c) {
    double ax = a.real(), ay = a.imag(), bx = b.real(), by = b.imag(), cx = c.real(),
           cy = c.imag();
    double d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    if (std::abs(d) < 1e-30) return Circle{a, std::numeric_limits<double>::infinity()};
    double ux = (std::norm(a) * (by - cy) + std::norm(b) * (cy - ay) + std::norm(c) * (ay - by)) / d;
    double uy = (std::norm(a) * (cx - bx) + std::norm(b) * (ax - cx) + std::norm(c) * (bx - ax)) / d;
    cpx u(ux, uy);
    return Circle{u, std::abs(u - a)};
  };
  auto inside = [](const Circle& C, cpx p) { return std::abs(p - C.c) <= C.r * (1 + 1e-12) + 1e-30; };
  Circle C{pts[0], 0.0};
  for (size_t i = 1; i < pts.size(); ++i) {
    if (inside(C, pts[i])) continue;
    C = {pts[i], 0.0};
    for (size_t j = 0; j < i; ++j) {
      if (inside(C, pts[j])) continue;
      C = circ2(pts[i], pts[j]);
      for (size_t k = 0; k < j; ++k) {
        if (inside(C, pts[k])) continue;
        C = circ3(pts[i], pts[j], pts[k]);
      }
    }
  }
  return C;
}

inline Circle component_circle(const BoundaryComponent& c) {
  switch (c.kind()) {
    case ComponentKind::disc: return {c.disc_center(), c.disc_radius()};
    case ComponentKind::segment: return {0.5 * (c.seg_p() + c.seg_q()), 0.5 * std::abs(c.seg_q() - c.seg_p())};
    case ComponentKind::point: return {c.point_pos(), 0.0};
    case ComponentKind::polyline: return enclosing_circle(c.polyline_vertices());
  }
  return {cpx(0, 0), 0.0};
}

struct Crossing {
  size_t seg_in, seg_out;  // segment indices of first entry / last exit
  cpx entry, exit;         // points on the circle
};

inline bool seg_circle(cpx a, cpx b, const Circle& C, double& t0, double& t1) {
  cpx d = b - a, f = a - C.c;
  double A = std::norm(d), B = 2.0 * dot(f, d), G = std::norm(f) - C.r * C.r;
  double disc = B * B - 4.0 * A * G;
  if (disc < 0.0 || A == 0.0) return false;
  double s = std::sqrt(disc);
  t0 = (-B - s) / (2.0 * A);
  t1 = (-B + s) / (2.0 * A);
  return t1 > 0.0 && t0 < 1.0;
}

/// First entry / last exit of a polyline into a circle; nullopt if disjoint.
/// Requires both curve endpoints strictly outside the circle.
inline std::optional<Crossing> circle_crossings(const std::vector<cpx>& v, const Circle& C) {
  if (std::abs(v.front() - C.c) <= C.r || std::abs(v.back() - C.c) <= C.r)
    throw error(errc::large_component_hit, "curve endpoint inside a detour circle");
  std::optional<Crossing> out;
  for (size_t i = 0; i + 1 < v.size(); ++i) {
    double t0, t1;
    if (!seg_circle(v[i], v[i + 1], C, t0, t1)) continue;
    if (!out) {
      out = Crossing{};
      out->seg_in = i;
      out->entry = v[i] + std::clamp(t0, 0.0, 1.0) * (v[i + 1] - v[i]);
    }
    if (t1 < 1.0) {
      out->seg_out = i;
      out->exit = v[i] + std::clamp(t1, 0.0, 1.0) * (v[i + 1] - v[i]);
    }
  }
  return out;
}

}  // namespace detail

/// Detours the curve around every small component it meets, along concentric
/// circular arcs of the component's enclosing circle inflated by a safe
/// offset; guarantees trace in the r-neighborhood and d out < 2r + d in.
inline Curve avoid_boundary(const Curve& curve, const DomainSpec& dom, double r) {
  std::vector<cpx> v = curve.vertices();
  const auto geom = dom.component_geometry();
  for (size_t ci = 0; ci < dom.components().size(); ++ci) {
    const auto& comp = dom.components()[ci];
    // does the current polyline meet this component?
    bool hit = false;
    for (size_t i = 0; i + 1 < v.size() && !hit; ++i)
      if (comp.chord_hits(v[i], v[i + 1]) || comp.contains(v[i], 0.0)) hit = true;
    if (!hit) continue;
    if (comp.diameter() >= r)
      throw error(errc::large_component_hit, "curve meets a component of diameter >= r");
    detail::Circle base = detail::component_circle(comp);
    double gap = std::numeric_limits<double>::infinity();
    for (size_t cj = 0; cj < dom.components().size(); ++cj)
      if (cj != ci) gap = std::min(gap, geom.pairwise[ci][cj]);
    double off_max = std::min({r / 4.0, gap / 2.0, 0.499 * r - base.r});
    if (!(off_max > 0.0))
      throw error(errc::large_component_hit, "component too large to detour within r");
    for (double off = off_max; off > 1e-6 * r; off *= 0.5) {
      detail::Circle C{base.c, base.r + off};
      auto cross = detail::circle_crossings(v, C);
      if (!cross) break;  // no longer meets the inflated circle
      // replace the portion between first entry and last exit by the
      // shorter circular arc
      double a1 = std::arg(cross->entry - C.c), a2 = std::arg(cross->exit - C.c);
      double sweep = a2 - a1;
      while (sweep > kPi) sweep -= 2 * kPi;
      while (sweep < -kPi) sweep += 2 * kPi;
      int steps = std::max(8, static_cast<int>(std::ceil(std::abs(sweep) / 0.1)));
      std::vector<cpx> arc;
      for (int s = 0; s <= steps; ++s) {
        double t = a1 + sweep * s / steps;
        arc.push_back(C.c + C.r * cpx(std::cos(t), std::sin(t)));
      }
      std::vector<cpx> out(v.begin(), v.begin() + static_cast<long>(cross->seg_in) + 1);
      out.insert(out.end(), arc.begin(), arc.end());
      out.insert(out.end(), v.begin() + static_cast<long>(cross->seg_out) + 1, v.end());
      // retry with a smaller offset if the arc hit another component
      bool clean = true;
      for (size_t cj = 0; cj < dom.components().size() && clean; ++cj) {
        if (cj == ci) continue;
        for (size_t s = 0; s + 1 < arc.size() && clean; ++s)
          if (dom.components()[cj].chord_hits(arc[s], arc[s + 1])) clean = false;
      }
      if (clean) {
        v = std::move(out);
        break;
      }
    }
    // the detour must actually have removed the contact
    for (size_t i = 0; i + 1 < v.size(); ++i)
      if (comp.chord_hits(v[i], v[i + 1]))
        throw error(errc::large_component_hit, "detour construction failed for a component");
  }
  return Curve(v);
}

// ---------------------------------------------------------------------------
// Linear local connectivity

struct LlcReport {
  int tested = 0;
  int llc1_failures = 0;
  int llc2_failures = 0;
};

/// Sampled LLC check: within-ball (LLC1) and outside-ball (LLC2) connections
/// built from straight chords plus avoid_boundary detours.
inline LlcReport check_llc(const DomainSpec& dom, const std::vector<std::pair<cpx, double>>& balls,
                           double M) {
  LlcReport rep;
  auto clean = [&](const Curve& c) {
    const auto& vv = c.vertices();
    for (size_t i = 0; i + 1 < vv.size(); ++i)
      if (dom.segment_hits_boundary(vv[i], vv[i + 1])) return false;
    return true;
  };
  for (auto& [a, rr] : balls) {
    // deterministic in-ball sample points
    std::vector<cpx> in_pts, out_pts;
    for (int k = 0; k < 16; ++k) {
      double t = 2 * kPi * k / 16;
      cpx p = a + 0.8 * rr * cpx(std::cos(t), std::sin(t));
      if (dom.in_domain(PlanePoint(p))) in_pts.push_back(p);
      cpx q = a + 1.6 * rr * cpx(std::cos(t), std::sin(t));
      if (dom.in_domain(PlanePoint(q))) out_pts.push_back(q);
    }
    auto try_connect = [&](cpx x, cpx y, double r_avoid, auto&& contained) {
      Curve seg({x, y});
      bool direct = clean(seg) && contained(seg);
      if (direct) return true;
      try {
        Curve det = avoid_boundary(seg, dom, r_avoid);
        return clean(det) && contained(det);
      } catch (const error&) {
        return false;
      }
    };
    // LLC1: connect inside B(a, M r)
    for (size_t i = 0; i + 1 < in_pts.size(); i += 2) {
      ++rep.tested;
      cpx x = in_pts[i], y = in_pts[i + 1];
      double slack = std::max((M - 1.0) * rr, 1e-6 * rr);
      auto contained = [&](const Curve& c) {
        for (cpx p : c.vertices())
          if (std::abs(p - a) > M * rr * (1 + 1e-9)) return false;
        return true;
      };
      if (!try_connect(x, y, slack, contained)) ++rep.llc1_failures;
    }
    // LLC2: connect outside B(a, r/M)
    for (size_t i = 0; i + 1 < out_pts.size(); i += 2) {
      ++rep.tested;
      cpx x = out_pts[i], y = out_pts[i + 1];
      double slack = std::max((1.0 - 1.0 / M) * rr, 1e-6 * rr);
      auto contained = [&](const Curve& c) {
        for (cpx p : c.vertices())
          if (std::abs(p - a) < rr / M * (1 - 1e-9)) return false;
        return true;
      };
      // direct chord may dip inside the forbidden ball: route along the arc
      bool ok = try_connect(x, y, slack, contained);
      if (!ok) {
        // circular route at the sample radius
        double t0 = std::arg(x - a), t1 = std::arg(y - a);
        double sweep = t1 - t0;
        while (sweep > kPi) sweep -= 2 * kPi;
        while (sweep < -kPi) sweep += 2 * kPi;
        int steps = 32;
        std::vector<cpx> arc;
        double rad = std::abs(x - a);
        for (int s = 0; s <= steps; ++s) {
          double t = t0 + sweep * s / steps;
          arc.push_back(a + rad * cpx(std::cos(t), std::sin(t)));
        }
        arc.back() = y;
        try {
          Curve det = avoid_boundary(Curve(arc), dom, slack);
          ok = clean(det) && [&] {
            for (cpx p : det.vertices())
              if (std::abs(p - a) < rr / M * (1 - 1e-9)) return false;
            return true;
          }();
        } catch (const error&) {
          ok = false;
        }
      }
      if (!ok) ++rep.llc2_failures;
    }
  }
  return rep;
}

}  // namespace circuma
