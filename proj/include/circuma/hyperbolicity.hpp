#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "circuma/metric_graph.hpp"

namespace circuma {

/// (x|y)_w = (d(x,w) + d(y,w) - d(x,y)) / 2.
template <typename Point, typename Dist>
double gromov_product(Dist&& d, const Point& x, const Point& y, const Point& w) {
  return 0.5 * (d(x, w) + d(y, w) - d(x, y));
}

/// Four-point defect of one labeled 4-tuple: (L - M) / 2 where L >= M >= S
/// are the three pairing sums; equals the worst Gromov-product defect over
/// relabelings, clamped at 0.
inline double four_point_defect(double dxy, double dzw, double dxz, double dyw, double dxw,
                                double dyz) {
  double s1 = dxy + dzw, s2 = dxz + dyw, s3 = dxw + dyz;
  double L = std::max({s1, s2, s3});
  double S = std::min({s1, s2, s3});
  double M = s1 + s2 + s3 - L - S;
  return std::max(0.0, (L - M) / 2.0);
}

/// Max four-point defect over 4-tuples of a distance matrix: exhaustive for
/// small m, fixed-seed random tuples above (O(m^4) explodes).
inline double four_point_delta(const std::vector<std::vector<double>>& D, uint64_t seed = 1,
                               size_t exhaustive_limit = 40, size_t random_tuples = 1000000) {
  size_t m = D.size();
  double delta = 0.0;
  auto defect = [&](size_t a, size_t b, size_t c, size_t d) {
    return four_point_defect(D[a][b], D[c][d], D[a][c], D[b][d], D[a][d], D[b][c]);
  };
  if (m <= exhaustive_limit) {
    for (size_t a = 0; a < m; ++a)
      for (size_t b = a + 1; b < m; ++b)
        for (size_t c = b + 1; c < m; ++c)
          for (size_t d = c + 1; d < m; ++d) delta = std::max(delta, defect(a, b, c, d));
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, m - 1);
    for (size_t t = 0; t < random_tuples; ++t) {
      size_t a = pick(rng), b = pick(rng), c = pick(rng), d = pick(rng);
      if (a == b || a == c || a == d || b == c || b == d || c == d) continue;
      delta = std::max(delta, defect(a, b, c, d));
    }
  }
  return delta;
}

struct DeltaEstimate {
  double delta_four_point = 0.0;
  double delta_thin = -1.0;  // negative when not computed
  int sample_size = 0;
  MetricFlavor flavor = MetricFlavor::euclidean;
  double resolution = 0.0;
};

/// Farthest-point sampling (Euclidean) over graph nodes, deterministic:
/// starts at the most interior node.
inline std::vector<int> farthest_point_sample(const MetricGraph& g, int m) {
  int n = static_cast<int>(g.size());
  m = std::min(m, n);
  std::vector<int> chosen;
  int start = 0;
  for (int i = 1; i < n; ++i)
    if (g.node_dist[static_cast<size_t>(i)] > g.node_dist[static_cast<size_t>(start)]) start = i;
  chosen.push_back(start);
  std::vector<double> mind(static_cast<size_t>(n), std::numeric_limits<double>::infinity());
  for (int step = 1; step < m; ++step) {
    int last = chosen.back();
    int best = -1;
    for (int i = 0; i < n; ++i) {
      double d = std::abs(g.nodes[static_cast<size_t>(i)] - g.nodes[static_cast<size_t>(last)]);
      mind[static_cast<size_t>(i)] = std::min(mind[static_cast<size_t>(i)], d);
      if (best < 0 || mind[static_cast<size_t>(i)] > mind[static_cast<size_t>(best)]) best = i;
    }
    chosen.push_back(best);
  }
  return chosen;
}

/// Window for whole-domain sampling: the components' box with padding (the
/// interesting geometry is near the boundary set).
inline BBox domain_window(const DomainSpec& dom) {
  BBox w = dom.components_bbox();
  w.pad(0.5 * w.diam());
  return w;
}

/// Estimate the Gromov hyperbolicity constant via the four-point condition
/// on well-spread sample nodes, all-pairs distances from the metric graph.
inline DeltaEstimate delta_four_point(const DomainSpec& dom, int m, MetricFlavor flavor, double h,
                                      uint64_t seed = 1) {
  if (m < 4) throw error(errc::precondition_failed, "need at least 4 sample points");
  MetricGraph g = build_graph(dom, h, domain_window(dom), flavor == MetricFlavor::spherical);
  GraphQuery q(g);
  std::vector<int> pts = farthest_point_sample(g, m);
  size_t n = pts.size();
  std::vector<std::vector<double>> D(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    auto di = q.node_distances(pts[i], flavor);
    for (size_t j = 0; j < n; ++j) {
      double v = di[static_cast<size_t>(pts[j])];
      if (!std::isfinite(v))
        throw error(errc::disconnected, "sample nodes span multiple components");
      D[i][j] = v;
    }
  }
  DeltaEstimate est;
  est.delta_four_point = four_point_delta(D, seed);
  est.sample_size = static_cast<int>(n);
  est.flavor = flavor;
  est.resolution = h;
  return est;
}

/// Thin-triangle constant over explicit triangles: for each triangle of
/// discrete geodesics, the max graph distance from a side point to the union
/// of the other two sides.
inline double delta_thin_triangles(const DomainSpec& dom,
                                   const std::vector<std::array<cpx, 3>>& triangles,
                                   MetricFlavor flavor, double h) {
  BBox w = domain_window(dom);
  for (const auto& t : triangles)
    for (const cpx& v : t) w.expand(v);
  MetricGraph g = build_graph(dom, h, w, flavor == MetricFlavor::spherical);
  GraphQuery q(g);
  double delta = 0.0;
  for (const auto& t : triangles) {
    int a = q.nearest_node(t[0]), b = q.nearest_node(t[1]), c = q.nearest_node(t[2]);
    std::vector<int> sides[3] = {q.node_path(a, b, flavor), q.node_path(b, c, flavor),
                                 q.node_path(c, a, flavor)};
    for (int s = 0; s < 3; ++s) {
      std::vector<int> other;
      other.insert(other.end(), sides[(s + 1) % 3].begin(), sides[(s + 1) % 3].end());
      other.insert(other.end(), sides[(s + 2) % 3].begin(), sides[(s + 2) % 3].end());
      auto dist = q.node_distances(other, flavor);
      for (int v : sides[s]) delta = std::max(delta, dist[static_cast<size_t>(v)]);
    }
  }
  return delta;
}

}  // namespace circuma
