#include <random>

#include "doctest.h"

#include "circuma/metric_graph.hpp"

using namespace circuma;

namespace {
DomainSpec half_plane() {
  // upper half-plane at desk scale: complement of a long horizontal segment
  return DomainSpec("half-plane", {BoundaryComponent::segment(cpx(-100, 0), cpx(100, 0))}, true);
}

DomainSpec unit_disc_interior() {
  std::vector<cpx> gon;
  for (int k = 0; k < 512; ++k) {
    double t = 2 * kPi * k / 512;
    gon.emplace_back(std::cos(t), std::sin(t));
  }
  return DomainSpec("unit-disc", {BoundaryComponent::polyline(gon)}, false, cpx(0, 0));
}

bool connected(const MetricGraph& g) {
  if (g.nodes.empty()) return false;
  std::vector<char> seen(g.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  size_t cnt = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e = g.offsets[v]; e < g.offsets[v + 1]; ++e)
      if (!seen[g.targets[e]]) {
        seen[g.targets[e]] = 1;
        ++cnt;
        stack.push_back(g.targets[e]);
      }
  }
  return cnt == g.size();
}
}  // namespace

TEST_CASE("build_graph: cell sizing and node validity") {
  DomainSpec dom = unit_disc_interior();
  BBox w;
  w.expand(cpx(-1, -1));
  w.expand(cpx(1, 1));
  double h = 0.05;
  MetricGraph g = build_graph(dom, h, w, false);
  CHECK(g.size() > 0);
  for (size_t i = 0; i < g.size(); ++i) {
    CHECK(dom.in_domain(PlanePoint(g.nodes[i])));
    CHECK(g.node_dist[i] > 0.0);
    CHECK(g.node_size[i] <= std::max(h, 0.5 * g.node_dist[i]) * (1 + 1e-12));
  }
}

TEST_CASE("build_graph: half-plane window is connected") {
  DomainSpec dom = half_plane();
  BBox w;
  w.expand(cpx(-1, 0.1));
  w.expand(cpx(1, 2));
  MetricGraph g = build_graph(dom, 0.05, w, false);
  CHECK(g.size() > 0);
  CHECK(connected(g));
  for (int e : g.targets) CHECK(e >= 0);
  for (double we : g.w_e) CHECK(we > 0.0);
}

TEST_CASE("build_graph: two-sided refinement near two circles") {
  DomainSpec dom("two-discs",
                 {BoundaryComponent::disc(cpx(-2, 0), 1.0), BoundaryComponent::disc(cpx(2, 0), 1.0)},
                 true);
  BBox w;
  w.expand(cpx(-5, -3));
  w.expand(cpx(5, 3));
  double h = 0.02;
  MetricGraph g = build_graph(dom, h, w, false);
  // near both circles the local cell size must fall to <= half the local
  // boundary distance (or the h floor)
  int near_left = 0, near_right = 0;
  for (size_t i = 0; i < g.size(); ++i) {
    double d = g.node_dist[i];
    if (d < 0.2) {
      CHECK(g.node_size[i] <= std::max(h, 0.5 * d) * (1 + 1e-12));
      if (g.nodes[i].real() < 0) ++near_left;
      if (g.nodes[i].real() > 0) ++near_right;
    }
  }
  CHECK(near_left > 100);
  CHECK(near_right > 100);
}

TEST_CASE("build_graph: empty window throws") {
  DomainSpec dom = unit_disc_interior();
  BBox w;
  w.expand(cpx(5, 5));
  w.expand(cpx(6, 6));
  CHECK_THROWS_AS(build_graph(dom, 0.1, w, false), error);
}

TEST_CASE("qh_distance: half-plane vertical pair") {
  auto r = qh_distance(half_plane(), PlanePoint(cpx(0, 1)), PlanePoint(cpx(0, 2)),
                       MetricFlavor::euclidean, 5e-3);
  CHECK(r.value == doctest::Approx(std::log(2.0)).epsilon(0.015));
  CHECK(std::abs(r.path.vertices().front() - cpx(0, 1)) < 1e-12);
  CHECK(std::abs(r.path.vertices().back() - cpx(0, 2)) < 1e-12);
}

TEST_CASE("qh_distance: unit disc radial pair") {
  auto r = qh_distance(unit_disc_interior(), PlanePoint(cpx(0, 0)), PlanePoint(cpx(0.5, 0)),
                       MetricFlavor::euclidean, 5e-3);
  CHECK(r.value == doctest::Approx(std::log(2.0)).epsilon(0.016));
}

TEST_CASE("qh_distance: twice-punctured sphere, spherical flavor") {
  DomainSpec dom("twice-punctured", {BoundaryComponent::point(cpx(0, 0))}, false, cpx(1, 0));
  auto r = qh_distance(dom, PlanePoint(cpx(1, 0)), PlanePoint(cpx(0, 1)),
                       MetricFlavor::spherical, 5e-3);
  // the equatorial arc realizes density * length = (2/(2*pi/2)) * (pi/2) = 1
  CHECK(r.value <= 1.02);
  CHECK(r.value >= 0.90);
}

TEST_CASE("qh_distance: errors") {
  DomainSpec dom = unit_disc_interior();
  CHECK_THROWS_AS(qh_distance(dom, PlanePoint(cpx(3, 0)), PlanePoint(cpx(0, 0)),
                              MetricFlavor::euclidean, 0.05),
                  error);
}

TEST_CASE("graph distance: triangle inequality on node triples (exact)") {
  DomainSpec dom = unit_disc_interior();
  BBox w;
  w.expand(cpx(-1, -1));
  w.expand(cpx(1, 1));
  MetricGraph g = build_graph(dom, 0.02, w, false);
  GraphQuery q(g);
  std::mt19937_64 rng(99u);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(g.size()) - 1);
  for (int k = 0; k < 6; ++k) {
    int a = pick(rng), b = pick(rng), c = pick(rng);
    auto da = q.node_distances(a, MetricFlavor::euclidean);
    auto dc = q.node_distances(c, MetricFlavor::euclidean);
    CHECK(da[b] <= da[c] + dc[b] + 1e-12);
    CHECK(da[b] == doctest::Approx(q.node_distances(b, MetricFlavor::euclidean)[a]));
  }
}

TEST_CASE("qh_distance: domain monotonicity") {
  // smaller domain (disc with extra puncture disc) has larger distances
  DomainSpec big = unit_disc_interior();
  std::vector<cpx> gon;
  for (int k = 0; k < 512; ++k) {
    double t = 2 * kPi * k / 512;
    gon.emplace_back(std::cos(t), std::sin(t));
  }
  DomainSpec small("disc-minus-disc",
                   {BoundaryComponent::polyline(gon), BoundaryComponent::disc(cpx(0, 0.5), 0.2)},
                   false, cpx(0, 0));
  BBox w;
  w.expand(cpx(-1, -1));
  w.expand(cpx(1, 1));
  MetricGraph gb = build_graph(big, 0.02, w, false);
  MetricGraph gs = build_graph(small, 0.02, w, false);
  GraphQuery qb(gb), qs(gs);
  std::mt19937_64 rng(7u);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  int done = 0;
  while (done < 8) {
    cpx a(u(rng), u(rng)), b(u(rng), u(rng));
    if (!small.in_domain(PlanePoint(a)) || !small.in_domain(PlanePoint(b))) continue;
    ++done;
    double kb = qb.distance(a, b, MetricFlavor::euclidean).value;
    double ks = qs.distance(a, b, MetricFlavor::euclidean).value;
    CHECK(ks >= kb - 0.05);
  }
}

TEST_CASE("qh_distance: resolution convergence on half-plane") {
  DomainSpec dom = half_plane();
  double truth = std::log(2.0);
  double prev_err = 1e9;
  for (double h : {4e-2, 1e-2, 2.5e-3}) {
    auto r = qh_distance(dom, PlanePoint(cpx(0, 1)), PlanePoint(cpx(0, 2)),
                         MetricFlavor::euclidean, h);
    double err = std::abs(r.value - truth);
    CHECK(err < prev_err + 1e-6);
    prev_err = err;
  }
  CHECK(prev_err < 0.01 * truth);
}

TEST_CASE("geodesic value matches its path quadrature") {
  DomainSpec dom = unit_disc_interior();
  auto r = qh_distance(dom, PlanePoint(cpx(-0.3, 0.1)), PlanePoint(cpx(0.4, -0.2)),
                       MetricFlavor::euclidean, 0.01);
  const auto& v = r.path.vertices();
  double sum = 0.0;
  for (size_t i = 0; i + 1 < v.size(); ++i)
    sum += qh_edge_weight(dom, v[i], v[i + 1], MetricFlavor::euclidean);
  CHECK(r.value == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("edges never tunnel through a slit") {
  DomainSpec dom("plane-minus-slit", {BoundaryComponent::segment(cpx(-1, 0), cpx(1, 0))}, true);
  BBox w;
  w.expand(cpx(-2, -1.5));
  w.expand(cpx(2, 1.5));
  MetricGraph g = build_graph(dom, 5e-3, w, false);
  GraphQuery q(g);
  // crossing the slit must cost roughly the trip around an endpoint
  auto r = q.distance(cpx(0, 0.05), cpx(0, -0.05), MetricFlavor::euclidean);
  CHECK(r.value > 4.0);  // around the tip: >> the wormhole shortcut cost ~ 2
  for (cpx p : r.path.vertices()) CHECK(dom.in_domain(PlanePoint(p)));
}

TEST_CASE("verify_comparison: unit disc and translated disc") {
  DomainSpec disc = unit_disc_interior();
  std::mt19937_64 rng(31u);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  std::vector<std::pair<cpx, cpx>> pairs;
  pairs.emplace_back(cpx(0, 0), cpx(0.5, 0));
  while (pairs.size() < 25) {
    cpx a(u(rng), u(rng)), b(u(rng), u(rng));
    if (std::abs(a - b) > 0.05) pairs.emplace_back(a, b);
  }
  auto rep = verify_comparison(disc, pairs, 0.01);
  CHECK(rep.D == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(rep.upper == doctest::Approx(3.0 * (2.0 + rep.D)));
  CHECK(rep.violations.empty());
  CHECK(rep.worst_low >= rep.lower * 0.98);
  CHECK(rep.worst_high <= rep.upper * 1.02);

  // translated disc B(5,1): D = 4, upper bound 18
  std::vector<cpx> gon;
  for (int k = 0; k < 512; ++k) {
    double t = 2 * kPi * k / 512;
    gon.emplace_back(5.0 + std::cos(t), std::sin(t));
  }
  DomainSpec shifted("shifted-disc", {BoundaryComponent::polyline(gon)}, false, cpx(5, 0));
  std::vector<std::pair<cpx, cpx>> pairs2;
  std::uniform_real_distribution<double> v(-0.6, 0.6);
  while (pairs2.size() < 10) {
    cpx a(5 + v(rng), v(rng)), b(5 + v(rng), v(rng));
    if (std::abs(a - b) > 0.05) pairs2.emplace_back(a, b);
  }
  auto rep2 = verify_comparison(shifted, pairs2, 0.01);
  CHECK(rep2.D == doctest::Approx(4.0).epsilon(1e-3));
  CHECK(rep2.upper == doctest::Approx(18.0).epsilon(1e-3));
  CHECK(rep2.violations.empty());
}

TEST_CASE("verify_comparison: rejects domains containing infinity") {
  DomainSpec dom("disc-complement", {BoundaryComponent::disc(cpx(0, 0), 1.0)}, true);
  CHECK_THROWS_AS(verify_comparison(dom, {{cpx(3, 0), cpx(4, 0)}}, 0.05), error);
}
