#pragma once

#include <cmath>
#include <complex>
#include <variant>
#include <vector>

#include "circuma/errors.hpp"
#include "circuma/geometry.hpp"

namespace circuma {

// Elementary conformal maps fixing infinity. A MapChain applies its steps in
// order; each step is injective on the domain it was recorded for.

struct AffineStep {
  cpx a{1, 0}, b{0, 0};  // z -> a z + b, a != 0
  cpx operator()(cpx z) const { return a * z + b; }
  cpx inverse(cpx w) const { return (w - b) / a; }
};

/// Exterior of the segment center + e^{i rot}[-halflen, halflen] onto the
/// exterior of the unit circle (inverse Joukowski with the |w| >= 1 branch).
struct InvJoukowskiStep {
  cpx center{0, 0};
  double halflen = 1.0;
  double rot = 0.0;
  cpx operator()(cpx z) const {
    cpx u = (z - center) * std::polar(1.0, -rot) / (halflen / 2.0);
    cpx s = std::sqrt(u * u - 4.0);
    cpx w1 = 0.5 * (u + s), w2 = 0.5 * (u - s);
    return std::abs(w1) >= std::abs(w2) ? w1 : w2;
  }
  cpx inverse(cpx w) const {
    cpx u = w + 1.0 / w;
    return center + std::polar(halflen / 2.0, rot) * u;
  }
};

/// Truncated Laurent map g(w) = cap w + c0 + sum c_k w^{-k} from the exterior
/// of the unit circle onto the exterior of a closed curve; cap real > 0.
struct LaurentMap {
  double cap = 1.0;
  cpx c0{0, 0};
  std::vector<cpx> c;  // c[k-1] multiplies w^{-k}
  double fit_residual = 0.0;

  cpx operator()(cpx w) const {
    cpx s = cap * w + c0, p = 1.0;
    for (const cpx& ck : c) {
      p /= w;
      s += ck * p;
    }
    return s;
  }
  cpx deriv(cpx w) const {
    cpx s = cap, p = 1.0 / w;
    for (size_t k = 0; k < c.size(); ++k) {
      p /= w;
      s -= static_cast<double>(k + 1) * c[k] * p;
    }
    return s;
  }
};

/// Chain step applying the inverse of a Laurent map (curve exterior to circle
/// exterior), evaluated by Newton iteration with the affine part as predictor.
struct LaurentInvStep {
  LaurentMap g;
  cpx operator()(cpx z) const {
    cpx w = (z - g.c0) / g.cap;
    if (std::abs(w) < 1e-9)
      w = cpx(1.05, 0);
    else if (std::abs(w) < 1.0)
      w /= std::abs(w);
    for (int it = 0; it < 60; ++it) {
      cpx f = g(w) - z;
      cpx d = g.deriv(w);
      if (std::abs(d) < 1e-300) break;
      cpx step = f / d;
      w -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(w))) break;
    }
    return w;
  }
  cpx inverse(cpx w) const { return g(w); }
};

using MapStep = std::variant<AffineStep, InvJoukowskiStep, LaurentInvStep>;

struct MapChain {
  std::vector<MapStep> steps;

  cpx operator()(cpx z) const {
    for (const auto& s : steps)
      z = std::visit([&](const auto& st) { return st(z); }, s);
    return z;
  }
  cpx inverse(cpx w) const {
    for (auto it = steps.rbegin(); it != steps.rend(); ++it)
      w = std::visit([&](const auto& st) { return st.inverse(w); }, *it);
    return w;
  }
};

namespace detail {

/// Leading coefficient and constant term of the chain at infinity by circle
/// averaging: modes below the sample count cancel exactly.
inline std::pair<cpx, cpx> expansion_at_infinity(const MapChain& f, double R) {
  const int N = 64;
  cpx lead{0, 0}, con{0, 0};
  std::vector<cpx> vals(N);
  for (int k = 0; k < N; ++k) {
    cpx z = std::polar(R, 2 * kPi * k / N);
    vals[k] = f(z);
    lead += vals[k] / z;
  }
  lead /= static_cast<double>(N);
  for (int k = 0; k < N; ++k) con += vals[k] - lead * std::polar(R, 2 * kPi * k / N);
  con /= static_cast<double>(N);
  return {lead, con};
}

}  // namespace detail

/// Post-composes with the unique affine map making the expansion at infinity
/// z + a1/z + ...; idempotent (an already normalized chain is returned as is).
inline MapChain normalize_at_infinity(const MapChain& f, double R = 1e3) {
  auto [lead, con] = detail::expansion_at_infinity(f, R);
  if (std::abs(lead) < 1e-12)
    throw error(errc::degenerate_at_infinity, "map has vanishing derivative at infinity");
  if (std::abs(lead - 1.0) < 1e-11 && std::abs(con) < 1e-11 * R) return f;
  MapChain out = f;
  out.steps.push_back(AffineStep{1.0 / lead, -con / lead});
  return out;
}

/// a1 of a normalized chain (expansion z + a1/z + ...), by circle averaging
/// of (f(z) - z) z.
inline cpx laurent_a1(const MapChain& f, double R = 1e2) {
  const int N = 64;
  cpx a1{0, 0};
  for (int k = 0; k < N; ++k) {
    cpx z = std::polar(R, 2 * kPi * (k + 0.5) / N);
    a1 += (f(z) - z) * z;
  }
  return a1 / static_cast<double>(N);
}

}  // namespace circuma
