#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "circuma/curve.hpp"
#include "circuma/errors.hpp"
#include "circuma/mapchain.hpp"

namespace circuma {

namespace detail {

/// Exact exterior map of a straight segment (rotated/scaled Joukowski).
inline LaurentMap segment_exterior_map(cpx p, cpx q) {
  cpx mid = 0.5 * (p + q);
  double halflen = 0.5 * std::abs(q - p);
  double rot = std::arg(q - p);
  LaurentMap g;
  g.cap = halflen / 2.0;
  g.c0 = mid;
  g.c.assign(1, std::polar(halflen / 2.0, 2.0 * rot));
  g.fit_residual = 0.0;
  return g;
}

inline double shoelace_area(const std::vector<cpx>& v) {
  double a = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    cpx p = v[i], q = v[(i + 1) % v.size()];
    a += p.real() * q.imag() - q.real() * p.imag();
  }
  return 0.5 * a;
}

/// Complex least squares for g(e^{i theta_j}) ~ p_j with unknowns
/// (cap, c0, c_1..c_M); normal equations with a small ridge.
inline void laurent_lsq(const std::vector<double>& theta, const std::vector<cpx>& p, int M,
                        cpx& cap, cpx& c0, std::vector<cpx>& c) {
  size_t n = theta.size(), m = static_cast<size_t>(M) + 2;
  std::vector<std::vector<cpx>> A(n, std::vector<cpx>(m));
  for (size_t j = 0; j < n; ++j) {
    cpx w = std::polar(1.0, theta[j]);
    A[j][0] = w;
    A[j][1] = 1.0;
    cpx pw = 1.0;
    for (int k = 1; k <= M; ++k) {
      pw /= w;
      A[j][static_cast<size_t>(k) + 1] = pw;
    }
  }
  std::vector<std::vector<cpx>> G(m, std::vector<cpx>(m, 0.0));
  std::vector<cpx> rhs(m, 0.0);
  for (size_t j = 0; j < n; ++j)
    for (size_t r = 0; r < m; ++r) {
      cpx ar = std::conj(A[j][r]);
      rhs[r] += ar * p[j];
      for (size_t s = 0; s < m; ++s) G[r][s] += ar * A[j][s];
    }
  double ridge = 1e-10 * static_cast<double>(n);
  for (size_t r = 0; r < m; ++r) G[r][r] += ridge;
  // Gaussian elimination with partial pivoting
  for (size_t col = 0; col < m; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < m; ++r)
      if (std::abs(G[r][col]) > std::abs(G[piv][col])) piv = r;
    std::swap(G[col], G[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (size_t r = col + 1; r < m; ++r) {
      cpx f = G[r][col] / G[col][col];
      for (size_t s = col; s < m; ++s) G[r][s] -= f * G[col][s];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<cpx> x(m);
  for (size_t r = m; r-- > 0;) {
    cpx s = rhs[r];
    for (size_t k = r + 1; k < m; ++k) s -= G[r][k] * x[k];
    x[r] = s / G[r][r];
  }
  cap = x[0];
  c0 = x[1];
  c.assign(x.begin() + 2, x.end());
}

}  // namespace detail

/// Exterior Riemann map of a closed curve as a truncated Laurent series,
/// by boundary-correspondence iteration on arclength samples. Slit-like
/// (zero-area out-and-back) traces are fitted with the Joukowski-style
/// correspondence; straight segments are exact.
inline LaurentMap exterior_map(const std::vector<cpx>& trace, int modes = 64,
                               double rel_tol = 1e-6) {
  // use the samples as given when already at working resolution: chord
  // resampling would push points off the analytic curve by the polygon
  // sagitta, putting a floor under the fit residual
  std::vector<cpx> p = trace.size() == 256 ? trace : resample_closed(trace, 256);
  size_t n = p.size();
  double diam = 0.0;
  size_t tip1 = 0, tip2 = 0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (std::abs(p[i] - p[j]) > diam) {
        diam = std::abs(p[i] - p[j]);
        tip1 = i;
        tip2 = j;
      }
  if (diam <= 0.0) throw error(errc::degenerate_component, "trace has zero diameter");
  double area = std::abs(detail::shoelace_area(p));
  bool slit_like = area < 1e-6 * diam * diam;

  std::vector<double> theta(n);
  if (slit_like) {
    // straight slit: exact closed form
    double straight = 0.0;
    for (cpx z : p) straight = std::max(straight, dist_point_segment(z, p[tip1], p[tip2]));
    if (straight < 1e-9 * diam) return detail::segment_exterior_map(p[tip1], p[tip2]);
    // curved slit: Joukowski correspondence along arclength from a tip
    std::vector<double> s(n + 1, 0.0);
    for (size_t i = 0; i < n; ++i)
      s[i + 1] = s[i] + std::abs(p[(tip1 + i + 1) % n] - p[(tip1 + i) % n]);
    double total = s[n], half = 0.5 * total;
    for (size_t i = 0; i < n; ++i) {
      size_t j = (tip1 + i) % n;
      double t = s[i];
      theta[j] = t <= half ? std::acos(std::clamp(1.0 - 2.0 * t / half, -1.0, 1.0))
                           : 2 * kPi - std::acos(std::clamp(1.0 - 2.0 * (total - t) / half, -1.0, 1.0));
    }
  } else {
    // closed curve: polar angle about the centroid, must wind once monotonically
    if (detail::shoelace_area(p) < 0) std::reverse(p.begin(), p.end());
    cpx ctr{0, 0};
    for (cpx z : p) ctr += z;
    ctr /= static_cast<double>(n);
    double prev = std::arg(p[0] - ctr), acc = prev;
    theta[0] = prev;
    double worst = 0.0;
    for (size_t i = 1; i <= n; ++i) {
      double ai = std::arg(p[i % n] - ctr);
      double d = ai - prev;
      while (d > kPi) d -= 2 * kPi;
      while (d < -kPi) d += 2 * kPi;
      worst = std::min(worst, d);
      acc += d;
      if (i < n) theta[i] = acc;
      prev = ai;
    }
    if (worst < -0.3)
      throw error(errc::not_starlike, "trace is not starlike about its centroid");
    if (std::abs((acc - theta[0]) - 2 * kPi) > 0.5)
      throw error(errc::not_starlike, "trace does not wind once about its centroid");
  }

  cpx cap, c0;
  std::vector<cpx> c;
  double best = 1e300;
  std::vector<double> best_theta = theta;
  auto eval_pair = [&](double th, cpx& val, cpx& der) {
    cpx w = std::polar(1.0, th);
    val = cap * w + c0;
    der = cap;
    cpx pw = 1.0;
    cpx pd = 1.0 / w;
    for (int k = 1; k <= modes; ++k) {
      pw /= w;
      pd /= w;
      val += c[static_cast<size_t>(k) - 1] * pw;
      der -= static_cast<double>(k) * c[static_cast<size_t>(k) - 1] * pd;
    }
    der *= cpx(0, 1) * w;
  };
  double last_res = 1e300;
  for (int it = 0; it < 80; ++it) {
    detail::laurent_lsq(theta, p, modes, cap, c0, c);
    double res = 0.0;
    std::vector<double> nt = theta;
    // once the correspondence is roughly settled, project each sample all
    // the way onto the parameterized curve; early on a single damped step
    // keeps the parameterization from folding
    int inner_max = last_res < 1e-3 * diam ? 8 : 1;
    for (size_t j = 0; j < n; ++j) {
      cpx val, tang;
      eval_pair(theta[j], val, tang);
      res = std::max(res, std::abs(val - p[j]));
      // project the sample onto the parameterized curve: Newton in the
      // tangent direction, iterated to convergence rather than a single step
      double th = theta[j];
      for (int inner = 0; inner < inner_max; ++inner) {
        if (std::abs(tang) <= 1e-12 * diam) break;
        double step = std::clamp(((p[j] - val) / tang).real(), -0.2, 0.2);
        th += step;
        if (std::abs(step) < 1e-14) break;
        eval_pair(th, val, tang);
      }
      nt[j] = th;
    }
    if (res < best) {
      best = res;
      best_theta = theta;
    }
    if (res < 0.1 * rel_tol * diam) break;
    last_res = res;
    theta = nt;
  }
  detail::laurent_lsq(best_theta, p, modes, cap, c0, c);
  // rotate the parameter so the leading coefficient is real positive
  double alpha = std::arg(cap);
  LaurentMap out;
  out.cap = std::abs(cap);
  out.c0 = c0;
  out.c.resize(c.size());
  for (size_t k = 0; k < c.size(); ++k)
    out.c[k] = c[k] * std::polar(1.0, static_cast<double>(k + 1) * alpha);
  double res = 0.0;
  for (size_t j = 0; j < n; ++j) res = std::max(res, std::abs(out(std::polar(1.0, best_theta[j] + alpha)) - p[j]));
  out.fit_residual = res;
  if (res > rel_tol * diam)
    throw error(errc::fit_residual_too_large, "exterior map fit residual exceeds tolerance");
  return out;
}

}  // namespace circuma
