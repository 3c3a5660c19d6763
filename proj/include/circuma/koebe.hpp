#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "circuma/curve.hpp"
#include "circuma/domain.hpp"
#include "circuma/errors.hpp"
#include "circuma/exterior_map.hpp"
#include "circuma/mapchain.hpp"
#include "circuma/uniformity.hpp"

namespace circuma {

struct CircleDomain {
  std::vector<std::pair<cpx, double>> discs;  // (center, radius), pairwise disjoint
  std::vector<cpx> points;
  bool contains_infinity = true;

  void validate() const {
    for (size_t i = 0; i < discs.size(); ++i) {
      if (!(discs[i].second > 0.0)) throw error(errc::invalid_domain, "disc radius must be positive");
      for (size_t j = i + 1; j < discs.size(); ++j)
        if (std::abs(discs[i].first - discs[j].first) <= discs[i].second + discs[j].second)
          throw error(errc::invalid_domain, "output discs overlap");
      for (cpx pt : points)
        if (std::abs(pt - discs[i].first) <= discs[i].second)
          throw error(errc::invalid_domain, "transported point inside a disc");
    }
  }

  DomainSpec as_domain(std::string name) const {
    std::vector<BoundaryComponent> comps;
    for (auto& [c, r] : discs) comps.push_back(BoundaryComponent::disc(c, r));
    for (cpx pt : points) comps.push_back(BoundaryComponent::point(pt));
    return DomainSpec(std::move(name), std::move(comps), contains_infinity);
  }
};

struct SweepRecord {
  std::vector<double> circularity;  // per non-point component, relative
  double hausdorff_to_previous = 0.0;
};

struct ConvergenceTrace {
  std::vector<SweepRecord> sweeps;
};

struct KoebeResult {
  CircleDomain circles;
  MapChain chain;
  ConvergenceTrace trace;
  cpx a1{0, 0};
  int sweeps = 0;
};

/// Symmetric Hausdorff distance of two finite point sets.
inline double hausdorff_distance(const std::vector<cpx>& E, const std::vector<cpx>& F) {
  if (E.empty() || F.empty()) throw error(errc::empty_set, "hausdorff distance of an empty set");
  auto directed = [](const std::vector<cpx>& A, const std::vector<cpx>& B) {
    double h = 0.0;
    for (cpx a : A) {
      double d = 1e300;
      for (cpx b : B) d = std::min(d, std::abs(a - b));
      h = std::max(h, d);
    }
    return h;
  };
  return std::max(directed(E, F), directed(F, E));
}

namespace detail {

/// Algebraic (Kasa) circle fit; returns (center, radius, relative residual).
struct CircleFit {
  cpx center;
  double radius;
  double residual;  // max |dist(sample, center) - radius| / radius
};

inline CircleFit fit_circle(const std::vector<cpx>& p) {
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0, sxz = 0, syz = 0, sz = 0;
  double n = static_cast<double>(p.size());
  for (cpx q : p) {
    double x = q.real(), y = q.imag(), z = x * x + y * y;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
    sxz += x * z;
    syz += y * z;
    sz += z;
  }
  // solve [sxx sxy sx; sxy syy sy; sx sy n] [a b c]^T = [sxz syz sz]^T
  double A[3][4] = {{sxx, sxy, sx, sxz}, {sxy, syy, sy, syz}, {sx, sy, n, sz}};
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    std::swap(A[col], A[piv]);
    for (int r = col + 1; r < 3; ++r) {
      double f = A[r][col] / A[col][col];
      for (int s = col; s < 4; ++s) A[r][s] -= f * A[col][s];
    }
  }
  double x3[3];
  for (int r = 3; r-- > 0;) {
    double s = A[r][3];
    for (int k = r + 1; k < 3; ++k) s -= A[r][k] * x3[k];
    x3[r] = s / A[r][r];
  }
  CircleFit f;
  f.center = cpx(0.5 * x3[0], 0.5 * x3[1]);
  f.radius = std::sqrt(std::max(x3[2] + std::norm(f.center), 0.0));
  f.residual = 0.0;
  for (cpx q : p)
    f.residual = std::max(f.residual, std::abs(std::abs(q - f.center) - f.radius));
  f.residual /= f.radius;
  return f;
}

// a shallow arc also fits a (huge) circle with tiny residual; require the
// enclosed area to match the fitted circle so slit traces are not mistaken
// for converged circles
inline bool is_circular(const std::vector<cpx>& t, double tol) {
  CircleFit f = fit_circle(t);
  if (f.residual >= tol) return false;
  double area = 0.0;
  for (size_t i = 0; i < t.size(); ++i) {
    cpx a = t[i], b = t[(i + 1) % t.size()];
    area += 0.5 * (a.real() * b.imag() - b.real() * a.imag());
  }
  return std::abs(area) > 0.5 * kPi * f.radius * f.radius;
}

inline std::vector<cpx> initial_trace(const BoundaryComponent& c, size_t n) {
  std::vector<cpx> t;
  switch (c.kind()) {
    case ComponentKind::disc:
      for (size_t k = 0; k < n; ++k)
        t.push_back(c.disc_center() + std::polar(c.disc_radius(), 2 * kPi * k / n));
      break;
    case ComponentKind::segment: {
      // out-and-back degenerate closed trace
      size_t half = n / 2;
      for (size_t k = 0; k < half; ++k)
        t.push_back(c.seg_p() + (c.seg_q() - c.seg_p()) * (static_cast<double>(k) / half));
      for (size_t k = 0; k < n - half; ++k)
        t.push_back(c.seg_q() + (c.seg_p() - c.seg_q()) * (static_cast<double>(k) / (n - half)));
      break;
    }
    case ComponentKind::polyline: {
      t = resample_closed(c.polyline_vertices(), n);
      break;
    }
    case ComponentKind::point:
      break;
  }
  return t;
}

inline double trace_diam(const std::vector<cpx>& t) {
  double d = 0.0;
  for (size_t i = 0; i < t.size(); ++i)
    for (size_t j = i + 1; j < t.size(); ++j) d = std::max(d, std::abs(t[i] - t[j]));
  return d;
}

}  // namespace detail

/// Koebe-style uniformization onto a circle domain: cyclic sweeps mapping one
/// complement component at a time onto a circle via its exterior map, with
/// the chain kept normalized (z + a1/z + ... at infinity) after every step.
inline KoebeResult koebe_iterate(const DomainSpec& dom, int max_sweeps = 50, double tol = 1e-6,
                                 std::optional<std::vector<size_t>> sweep_order = std::nullopt) {
  if (!dom.contains_infinity())
    throw error(errc::precondition_failed, "uniformization requires infinity in the domain");
  const size_t n_samples = 256;
  std::vector<std::vector<cpx>> traces;  // non-point components
  std::vector<cpx> points;
  for (const auto& c : dom.components()) {
    if (c.kind() == ComponentKind::point)
      points.push_back(c.point_pos());
    else
      traces.push_back(detail::initial_trace(c, n_samples));
  }
  std::vector<size_t> order(traces.size());
  if (sweep_order) {
    if (sweep_order->size() != traces.size())
      throw error(errc::precondition_failed, "sweep order must permute the non-point components");
    order = *sweep_order;
  } else {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return detail::trace_diam(traces[a]) > detail::trace_diam(traces[b]);
    });
  }

  MapChain chain;
  ConvergenceTrace trace;
  auto complement_samples = [&]() {
    std::vector<cpx> s;
    for (const auto& t : traces) s.insert(s.end(), t.begin(), t.end());
    s.insert(s.end(), points.begin(), points.end());
    return s;
  };
  std::vector<cpx> prev = complement_samples();

  auto apply_step = [&](const MapStep& step) {
    auto eval = [&](cpx z) { return std::visit([&](const auto& st) { return st(z); }, step); };
    // no arclength resampling here: mapped samples lie exactly on the
    // analytic image boundary, and chord resampling would introduce a
    // sagitta-scale error that puts a floor under the circularity residual
    for (auto& t : traces)
      for (cpx& z : t) z = eval(z);
    for (cpx& z : points) z = eval(z);
    chain.steps.push_back(step);
  };

  int sweep = 0;
  while (sweep < max_sweeps) {
    ++sweep;
    for (size_t oi : order) {
      auto& t = traces[oi];
      if (detail::is_circular(t, tol)) continue;
      LaurentMap g;
      try {
        g = exterior_map(t);
      } catch (const error& e) {
        if (e.code() == errc::not_starlike)
          throw error(errc::not_starlike, "component " + std::to_string(oi) + " in sweep " +
                                              std::to_string(sweep) + " is not starlike");
        throw;
      }
      // the mapped component's image is the unit circle by construction;
      // Newton inversion would sit on the branch points of slit traces
      MapStep step = LaurentInvStep{g};
      auto eval = [&](cpx z) { return std::visit([&](const auto& st) { return st(z); }, step); };
      for (size_t tj = 0; tj < traces.size(); ++tj) {
        if (tj == oi) {
          for (size_t k = 0; k < n_samples; ++k)
            traces[tj][k] = std::polar(1.0, 2 * kPi * static_cast<double>(k) / n_samples);
        } else {
          for (cpx& z : traces[tj]) z = eval(z);
        }
      }
      for (cpx& z : points) z = eval(z);
      chain.steps.push_back(step);
      // restore the normalization in closed form: the inverse behaves like
      // (z - c0)/cap at infinity
      apply_step(AffineStep{g.cap, g.c0});
    }
    SweepRecord rec;
    bool done = true;
    for (const auto& t : traces) {
      rec.circularity.push_back(detail::fit_circle(t).residual);
      done = done && detail::is_circular(t, tol);
    }
    std::vector<cpx> cur = complement_samples();
    rec.hausdorff_to_previous = hausdorff_distance(cur, prev);
    prev = std::move(cur);
    trace.sweeps.push_back(std::move(rec));
    if (done) break;
  }
  bool converged = true;
  for (const auto& t : traces) converged = converged && detail::is_circular(t, tol);
  if (!converged)
    throw error(errc::no_convergence,
                "no convergence after " + std::to_string(max_sweeps) + " sweeps (last residual " +
                    std::to_string(trace.sweeps.back().circularity.empty()
                                       ? 0.0
                                       : *std::max_element(trace.sweeps.back().circularity.begin(),
                                                           trace.sweeps.back().circularity.end())) +
                    ")");

  KoebeResult out;
  out.sweeps = sweep;
  out.chain = normalize_at_infinity(chain);
  out.a1 = laurent_a1(out.chain);
  // rebuild outputs through the final normalization (affine, exact on fits)
  AffineStep last{1.0, 0.0};
  if (out.chain.steps.size() > chain.steps.size())
    last = std::get<AffineStep>(out.chain.steps.back());
  for (const auto& t : traces) {
    std::vector<cpx> tt = t;
    for (cpx& z : tt) z = last(z);
    auto f = detail::fit_circle(tt);
    out.circles.discs.emplace_back(f.center, f.radius);
  }
  for (cpx ptz : points) out.circles.points.push_back(last(ptz));
  out.circles.validate();
  out.trace = std::move(trace);
  return out;
}

/// Normalized max residual of the best affine fit a z + b to g against f on
/// probe points (zero iff g = affine o f there).
inline double mobius_rigidity_check(const MapChain& f, const MapChain& g,
                                    const std::vector<cpx>& probes) {
  if (probes.size() < 3) throw error(errc::precondition_failed, "need at least 3 probes");
  size_t n = probes.size();
  std::vector<cpx> u(n), v(n);
  cpx mu{0, 0}, mv{0, 0};
  for (size_t i = 0; i < n; ++i) {
    u[i] = f(probes[i]);
    v[i] = g(probes[i]);
    mu += u[i];
    mv += v[i];
  }
  mu /= static_cast<double>(n);
  mv /= static_cast<double>(n);
  cpx num{0, 0};
  double den = 0.0;
  for (size_t i = 0; i < n; ++i) {
    num += (v[i] - mv) * std::conj(u[i] - mu);
    den += std::norm(u[i] - mu);
  }
  cpx a = num / den;
  cpx b = mv - a * mu;
  double res = 0.0, scale = 0.0;
  for (size_t i = 0; i < n; ++i) {
    res = std::max(res, std::abs(v[i] - a * u[i] - b));
    scale = std::max(scale, std::abs(v[i] - mv));
  }
  return res / std::max(scale, 1e-300);
}

/// Modulus of the round ring {r < |z| < R}.
inline double annulus_modulus(double r, double R) {
  if (!(r > 0.0) || !(R > r)) throw error(errc::bad_radii, "need 0 < r < R");
  return 2.0 * kPi / std::log(R / r);
}

struct QsProbeRow {
  double t = 0.0;      // inner diameter-metric ratio in the source
  double ratio = 0.0;  // Euclidean image distance ratio
};

/// Empirical quasisymmetry scatter of a chain on point triples.
inline std::vector<QsProbeRow> qs_distortion_probe(const MapChain& chain, const DomainSpec& dom,
                                                   const std::vector<std::array<cpx, 3>>& triples,
                                                   double h = 2e-2) {
  std::vector<QsProbeRow> rows;
  for (const auto& tr : triples) {
    auto dxy = inner_distances(dom, tr[0], tr[1], h);
    auto dxz = inner_distances(dom, tr[0], tr[2], h);
    QsProbeRow row;
    row.t = (0.5 * (dxy.rho_lo + dxy.rho_hi)) / (0.5 * (dxz.rho_lo + dxz.rho_hi));
    row.ratio = std::abs(chain(tr[0]) - chain(tr[1])) / std::abs(chain(tr[0]) - chain(tr[2]));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace circuma
