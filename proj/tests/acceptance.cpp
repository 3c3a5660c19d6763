// End-to-end acceptance suite. Each test case prints exactly one
// "criterion N ... pass|FAIL" line so the run doubles as a checklist.
// Tolerances are pinned here, not read from anywhere else.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "circuma/approximation.hpp"
#include "circuma/hyperbolicity.hpp"
#include "circuma/koebe.hpp"
#include "circuma/metric_graph.hpp"
#include "circuma/sphere_bridge.hpp"
#include "circuma/uniformity.hpp"
#include "doctest.h"
#include "support/extremal_length.hpp"

using namespace circuma;

namespace {

void report(int n, const char* what, bool ok) {
  std::printf("criterion %2d  %-58s %s\n", n, what, ok ? "pass" : "FAIL");
  std::fflush(stdout);
  CHECK_MESSAGE(ok, what);
}

DomainSpec half_plane() {
  return DomainSpec("half-plane", {BoundaryComponent::segment(cpx(-100, 0), cpx(100, 0))}, true);
}

DomainSpec unit_disc_interior(cpx center = cpx(0, 0)) {
  std::vector<cpx> gon;
  for (int k = 0; k < 512; ++k) {
    double t = 2 * kPi * k / 512;
    gon.emplace_back(center.real() + std::cos(t), center.imag() + std::sin(t));
  }
  return DomainSpec("disc", {BoundaryComponent::polyline(gon)}, false, center);
}

std::vector<std::pair<cpx, cpx>> random_pairs(const DomainSpec& dom, cpx center, double spread,
                                              size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<std::pair<cpx, cpx>> pairs;
  while (pairs.size() < n) {
    cpx a = center + cpx(u(rng), u(rng)), b = center + cpx(u(rng), u(rng));
    if (std::abs(a - b) < 0.05) continue;
    if (!dom.in_domain(PlanePoint(a)) || !dom.in_domain(PlanePoint(b))) continue;
    if (dom.boundary_dist_e_raw(a) < 0.03 || dom.boundary_dist_e_raw(b) < 0.03) continue;
    pairs.emplace_back(a, b);
  }
  return pairs;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TEST_CASE("criterion 1: closed-form quasihyperbolic distances") {
  DomainSpec hp = half_plane();
  DomainSpec disc = unit_disc_interior();
  const double ln2 = std::log(2.0);
  bool ok = true;
  struct Probe { double h, tol; };
  for (Probe p : {Probe{1e-3, 1e-2}, Probe{2.5e-4, 2.5e-3}}) {
    double khp = qh_distance(hp, PlanePoint(cpx(0, 1)), PlanePoint(cpx(0, 2)),
                             MetricFlavor::euclidean, p.h)
                     .value;
    double kd = qh_distance(disc, PlanePoint(cpx(0, 0)), PlanePoint(cpx(0.5, 0)),
                            MetricFlavor::euclidean, p.h)
                    .value;
    ok = ok && std::abs(khp / ln2 - 1.0) <= p.tol && std::abs(kd / ln2 - 1.0) <= p.tol;
  }
  report(1, "half-plane and disc give ln 2 (1% at 1e-3, 0.25% at 2.5e-4)", ok);
}

TEST_CASE("criterion 2: euclidean vs spherical metric comparison") {
  std::mt19937_64 rng(2026);
  DomainSpec disc = unit_disc_interior();
  DomainSpec shifted = unit_disc_interior(cpx(5, 0));
  shifted = DomainSpec("shifted-disc", shifted.components(), false, cpx(5, 0));
  // disc with an off-center slit: D = dist(0, boundary) = 0.2
  std::vector<BoundaryComponent> comps = disc.components();
  comps.push_back(BoundaryComponent::segment(cpx(0.2, 0), cpx(0.7, 0)));
  DomainSpec slit_disc("disc-with-slit", comps, false, cpx(-0.5, 0));

  size_t violations = 0, total = 0;
  auto run = [&](const DomainSpec& dom, cpx center, double spread, size_t n) {
    auto rep = verify_comparison(dom, random_pairs(dom, center, spread, n, rng), 0.02);
    violations += rep.violations.size();
    total += rep.pairs.size();
  };
  run(disc, cpx(0, 0), 0.7, 334);
  run(shifted, cpx(5, 0), 0.7, 333);
  run(slit_disc, cpx(0, 0), 0.8, 333);
  report(2, "1000 pairs across 3 domains, zero violations at 2% slack",
         violations == 0 && total == 1000);
}

TEST_CASE("criterion 3: circle domain is a one-sweep fixpoint") {
  DomainSpec dom("two-discs",
                 {BoundaryComponent::disc(cpx(-2, 0), 0.8), BoundaryComponent::disc(cpx(2, 1), 0.5)},
                 true, std::nullopt);
  auto res = koebe_iterate(dom);
  bool ok = res.sweeps == 1 && res.trace.sweeps.size() == 1 && std::abs(res.a1) < 1e-6;
  for (double r : res.trace.sweeps[0].circularity) ok = ok && r < 1e-6;
  report(3, "two discs: 1 sweep, circularity < 1e-6, |a1| < 1e-6", ok);
}

TEST_CASE("criterion 4: slit [-2,2] uniformizes to the unit circle") {
  auto t0 = std::chrono::steady_clock::now();
  DomainSpec dom("slit", {BoundaryComponent::segment(cpx(-2, 0), cpx(2, 0))}, true, std::nullopt);
  auto res = koebe_iterate(dom);
  double elapsed = seconds_since(t0);
  bool ok = res.circles.discs.size() == 1 &&
            std::abs(res.circles.discs[0].first) <= 1e-3 &&
            std::abs(res.circles.discs[0].second - 1.0) <= 1e-3 &&
            std::abs(res.a1 - cpx(-1, 0)) <= 1e-3 && elapsed < 10.0;
  report(4, "|center| <= 1e-3, |radius-1| <= 1e-3, |a1+1| <= 1e-3, < 10 s", ok);
}

TEST_CASE("criterion 5: sweep-order rigidity up to an affine map") {
  DomainSpec dom("two-slits",
                 {BoundaryComponent::segment(cpx(-2, 0), cpx(-1, 0)),
                  BoundaryComponent::segment(cpx(1, 0.3), cpx(2, 0.6))},
                 true, std::nullopt);
  auto r1 = koebe_iterate(dom, 50, 1e-6, std::vector<size_t>{0, 1});
  auto r2 = koebe_iterate(dom, 50, 1e-6, std::vector<size_t>{1, 0});
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> U(-5, 5);
  std::vector<cpx> probes;
  while (probes.size() < 40) {
    cpx z(U(rng), U(rng));
    if (dom.in_domain(PlanePoint(z)) && dom.boundary_dist_e_raw(z) > 0.3) probes.push_back(z);
  }
  double res = mobius_rigidity_check(r1.chain, r2.chain, probes);
  report(5, "permuted sweep order: affine-fit residual < 1e-3", res < 1e-3);
}

TEST_CASE("criterion 6: ring modulus is preserved") {
  DomainSpec dom("two-discs",
                 {BoundaryComponent::disc(cpx(-1.25, 0), 1.0), BoundaryComponent::disc(cpx(1.25, 0), 1.0)},
                 true, std::nullopt);
  double before = circuma_test::ring_modulus_grid(dom, 0, 1, 14.0, 400);
  auto res = koebe_iterate(dom);
  REQUIRE(res.circles.discs.size() == 2);
  auto [c1, r1] = res.circles.discs[0];
  auto [c2, r2] = res.circles.discs[1];
  // inversive distance of the output pair; a Mobius map sends the pair to the
  // round ring 1 < |z| < exp(arccosh delta)
  double delta = (std::norm(c1 - c2) - r1 * r1 - r2 * r2) / (2.0 * r1 * r2);
  double after = annulus_modulus(1.0, std::exp(std::acosh(delta)));
  report(6, "extremal-length estimate matches output modulus within 3%",
         std::abs(before / after - 1.0) <= 0.03);
}

TEST_CASE("criterion 7: separation bound is consistent with measured A") {
  struct Case {
    DomainSpec dom;
    std::vector<std::pair<cpx, cpx>> pairs;
  };
  std::vector<Case> cases;
  cases.push_back({DomainSpec("far-discs",
                              {BoundaryComponent::disc(cpx(-5, 0), 1.0),
                               BoundaryComponent::disc(cpx(5, 0), 1.0)},
                              true, std::nullopt),
                   {{cpx(0, -3), cpx(0, 3)}, {cpx(-5, 3), cpx(5, -3)}}});
  cases.push_back({DomainSpec("two-slits",
                              {BoundaryComponent::segment(cpx(-2, 0), cpx(-1, 0)),
                               BoundaryComponent::segment(cpx(1, 0), cpx(2, 0))},
                              true, std::nullopt),
                   {{cpx(0, -1), cpx(0, 1)}, {cpx(-3, 1), cpx(3, 1)}}});
  cases.push_back({DomainSpec("specks",
                              {BoundaryComponent::disc(cpx(-1, 0), 0.1),
                               BoundaryComponent::disc(cpx(1, 0), 0.1)},
                              true, std::nullopt),
                   {{cpx(0, -1), cpx(0, 1)}, {cpx(-2, 0), cpx(2, 0)}}});
  bool ok = true;
  for (auto& c : cases) {
    auto sep = verify_separation(c.dom, 1.0);
    auto est = estimate_uniformity(c.dom, c.pairs, 5e-3);
    ok = ok && sep.implied_A <= est.A_est + 1.0;
  }
  report(7, "implied-A from separation never exceeds A_est + 1", ok);
}

TEST_CASE("criterion 8: component counting bound on a disc grid") {
  std::vector<BoundaryComponent> comps;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) comps.push_back(BoundaryComponent::disc(cpx(3.0 * i, 3.0 * j), 1.0));
  DomainSpec dom("grid", comps, true, std::nullopt);
  auto res = count_large_components(dom, 0.5, 6.0, 2.0);
  report(8, "3x3 disc grid: count 9, bound >= 9", res.count == 9 && res.bound >= 9.0);
}

TEST_CASE("criterion 9: approximation stages nest and stay uniform") {
  DomainSpec dom("four-discs",
                 {BoundaryComponent::disc(cpx(0, 0), 1.0), BoundaryComponent::disc(cpx(4, 0), 0.5),
                  BoundaryComponent::disc(cpx(0, 4), 0.25),
                  BoundaryComponent::disc(cpx(4, 4), 0.125)},
                 true, std::nullopt);
  auto seq = approximation_sequence(dom, {1.5, 0.75, 0.3});
  REQUIRE(seq.domains.size() == 3);
  bool nested = true;
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> U(-2.0, 6.0);
  for (int rep = 0; rep < 2000; ++rep) {
    PlanePoint p(cpx(U(rng), U(rng)));
    bool in0 = seq.domains[0].in_domain(p);
    bool in1 = seq.domains[1].in_domain(p);
    bool in2 = seq.domains[2].in_domain(p);
    if (in2 && !in1) nested = false;
    if (in1 && !in0) nested = false;
    if (dom.in_domain(p) && !in2) nested = false;
  }
  std::vector<std::pair<cpx, cpx>> pairs = {{cpx(-2, -2), cpx(6, 6)},
                                            {cpx(2, -1.5), cpx(2, 5.5)},
                                            {cpx(-2, 2), cpx(6, 2)}};
  const double A_bound = 30.0;  // one constant covers every stage
  std::vector<double> A_est;
  for (const auto& d : seq.domains) A_est.push_back(estimate_uniformity(d, pairs, 2e-2).A_est);
  bool bounded = true;
  for (double a : A_est) bounded = bounded && a <= A_bound;
  bool no_growth = A_est.back() <= A_est.front() + 1.0;
  report(9, "nesting exact over 2000 probes, A_est <= 30 and not growing",
         nested && bounded && no_growth);
}

TEST_CASE("criterion 10: hyperbolicity estimates behave") {
  // sampled quasihyperbolic geodesic line: delta vanishes up to graph error
  DomainSpec hp = half_plane();
  BBox w;
  w.expand(cpx(-2, 0.2));
  w.expand(cpx(2, 6));
  MetricGraph g = build_graph(hp, 0.02, w, false);
  GraphQuery q(g);
  std::vector<double> hs = {0.4, 0.8, 1.5, 2.8, 5.0};
  size_t n = hs.size();
  std::vector<std::vector<double>> D(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      D[i][j] = D[j][i] = q.distance(cpx(0, hs[i]), cpx(0, hs[j]), MetricFlavor::euclidean).value;
  bool line_ok = four_point_delta(D) <= 0.02;

  DomainSpec disc = unit_disc_interior();
  auto e1 = delta_four_point(disc, 24, MetricFlavor::euclidean, 0.02);
  auto e2 = delta_four_point(disc, 24, MetricFlavor::euclidean, 0.01);
  auto e3 = delta_four_point(disc, 24, MetricFlavor::euclidean, 0.02);
  bool stable = std::abs(e1.delta_four_point / e2.delta_four_point - 1.0) <= 0.10;
  bool deterministic = e3.delta_four_point == e1.delta_four_point;
  report(10, "line delta ~ 0; disc delta stable under h halving; repeatable",
         line_ok && stable && deterministic);
}

TEST_CASE("criterion 11: surgery length bound and arc equality") {
  DomainSpec dom("speck", {BoundaryComponent::disc(cpx(0, 0), 0.5)}, true, std::nullopt);
  double a = 1.0;
  Curve loop({cpx(1.5, 0), cpx(10, 0), cpx(10, 10), cpx(0, 10), cpx(0, 1.5)});
  auto rep = spherical_to_euclidean_surgery(loop, dom, a);
  bool bound_ok = rep.surgery_case == SurgeryCase::case2b && rep.length_bound_holds &&
                  rep.len_e_output <= 2.0 * surgery_K(a) * rep.len_s_input;

  Curve anti({cpx(2.5, 0), cpx(5, 0), cpx(5, 5), cpx(-5, 5), cpx(-5, 0), cpx(-2.5, 0)});
  auto rep2 = spherical_to_euclidean_surgery(anti, dom, a);
  bool eq_ok = rep2.arcs.size() == 1 &&
               std::abs(rep2.arcs[0].arc_len_e -
                        0.5 * kPi * std::abs(rep2.arcs[0].z1 - rep2.arcs[0].z2)) < 1e-9;
  report(11, "l_e <= 2K(a) l_s, antipodal arc equality to 1e-9", bound_ok && eq_ok);
}

TEST_CASE("criterion 12: randomized property suites (1e4 cases)") {
  std::mt19937_64 rng(2026);
  size_t cases = 0;
  bool ok = true;

  // metric axioms on quasihyperbolic graph distances: 4000 triples
  {
    DomainSpec disc = unit_disc_interior();
    BBox w;
    w.expand(cpx(-1, -1));
    w.expand(cpx(1, 1));
    MetricGraph g = build_graph(disc, 0.02, w, false);
    GraphQuery q(g);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(g.size()) - 1);
    std::vector<int> src;
    while (src.size() < 40) src.push_back(pick(rng));
    std::vector<std::vector<double>> D(src.size());
    for (size_t i = 0; i < src.size(); ++i) {
      auto all = q.node_distances(src[i], MetricFlavor::euclidean);
      D[i].resize(src.size());
      for (size_t j = 0; j < src.size(); ++j) D[i][j] = all[static_cast<size_t>(src[j])];
    }
    std::uniform_int_distribution<size_t> t(0, src.size() - 1);
    for (int rep = 0; rep < 4000; ++rep, ++cases) {
      size_t i = t(rng), j = t(rng), k = t(rng);
      ok = ok && D[i][i] == 0.0;
      ok = ok && std::abs(D[i][j] - D[j][i]) <= 1e-9 * (1.0 + D[i][j]);
      ok = ok && (src[i] == src[j] || D[i][j] > 0.0);
      ok = ok && D[i][k] <= D[i][j] + D[j][k] + 1e-9;
    }
  }

  // cigar inclusion: diameter constant never exceeds the length constant
  {
    DomainSpec disc = unit_disc_interior();
    std::uniform_real_distribution<double> U(-0.6, 0.6);
    int done = 0;
    while (done < 2000) {
      std::vector<cpx> v{cpx(U(rng), U(rng))};
      for (int k = 0; k < 8; ++k) {
        cpx nz = v.back() + cpx(0.12 * U(rng), 0.12 * U(rng));
        if (std::abs(nz) < 0.8) v.push_back(nz);
      }
      if (v.size() < 3) continue;
      auto rep = check_cigar(Curve(v), disc, 10.0);
      ok = ok && rep.A_diam <= rep.A_length + 1e-12;
      ++done;
      ++cases;
    }
  }

  // inner diameter metric bracket: rho_lo <= rho_hi <= lambda, rho_hi <= 2 rho_lo
  {
    DomainSpec disc = unit_disc_interior();
    std::uniform_real_distribution<double> U(-0.6, 0.6);
    int done = 0;
    while (done < 150) {
      cpx a(U(rng), U(rng)), b(U(rng), U(rng));
      if (std::abs(a - b) < 0.2) continue;
      auto r = inner_distances(disc, a, b, 2e-2);
      ok = ok && r.rho_lo <= r.rho_hi + 1e-12;
      ok = ok && r.rho_hi <= r.lambda * (1 + 1e-6);
      ok = ok && r.rho_hi <= 2 * r.rho_lo * (1 + 1e-5);
      ok = ok && r.lambda >= std::abs(a - b) - 1e-9;
      ++done;
      ++cases;
    }
  }

  // avoid_boundary: detour stays in the domain and in the r-neighborhood
  {
    std::uniform_real_distribution<double> cx(-1.0, 1.0), cr(0.05, 0.13);
    int done = 0;
    while (done < 350) {
      std::vector<BoundaryComponent> comps;
      for (int k = 0; k < 3; ++k) comps.push_back(BoundaryComponent::disc(cpx(cx(rng), 0.2 * cx(rng)), cr(rng)));
      std::optional<DomainSpec> maybe;
      try {
        maybe.emplace("specks", comps, true, std::nullopt);
      } catch (const error&) {
        continue;  // random specks touched each other
      }
      const DomainSpec& dom = *maybe;
      Curve c = Curve({cpx(-2, 0), cpx(2, 0)}).resample(129);
      if (!dom.in_domain(PlanePoint(c.front())) || !dom.in_domain(PlanePoint(c.back()))) continue;
      double r = 0.5;
      Curve out;
      try {
        out = avoid_boundary(c, dom, r);
      } catch (const error&) {
        continue;  // components too big or too close for this radius
      }
      const auto& v = out.vertices();
      ok = ok && v.front() == c.front() && v.back() == c.back();
      for (size_t i = 0; i + 1 < v.size(); ++i) ok = ok && !dom.segment_hits_boundary(v[i], v[i + 1]);
      for (cpx z : v) {
        ok = ok && dom.in_domain(PlanePoint(z));
        double d = 1e300;
        const auto& cv = c.vertices();
        for (size_t i = 0; i + 1 < cv.size(); ++i)
          d = std::min(d, dist_point_segment(z, cv[i], cv[i + 1]));
        ok = ok && d <= r + 1e-9;
      }
      ++done;
      ++cases;
    }
  }

  // CircleDomain validation matches a direct pairwise-overlap check
  {
    std::uniform_real_distribution<double> cx(-3.0, 3.0), cr(0.2, 1.2);
    std::uniform_int_distribution<int> nd(2, 4);
    for (int rep = 0; rep < 3500; ++rep, ++cases) {
      CircleDomain cd;
      int m = nd(rng);
      for (int k = 0; k < m; ++k) cd.discs.emplace_back(cpx(cx(rng), cx(rng)), cr(rng));
      bool overlap = false;
      for (size_t i = 0; i < cd.discs.size(); ++i)
        for (size_t j = i + 1; j < cd.discs.size(); ++j)
          overlap = overlap || std::abs(cd.discs[i].first - cd.discs[j].first) <=
                                   cd.discs[i].second + cd.discs[j].second;
      bool threw = false;
      try {
        cd.validate();
      } catch (const error&) {
        threw = true;
      }
      ok = ok && threw == overlap;
    }
  }

  report(12, "metric axioms, cigars, rho bracket, detours, disjointness", ok && cases >= 10000);
}
