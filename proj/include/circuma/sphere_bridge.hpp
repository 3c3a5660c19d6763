#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "circuma/mapchain.hpp"
#include "circuma/uniformity.hpp"

namespace circuma {

/// Euclidean-vs-spherical length comparison constant on B_e(0,3a).
inline double surgery_K(double a) { return 0.5 * (1.0 + 9.0 * a * a); }

/// Distance comparison constant.
inline double surgery_C(double a) { return kPi * a; }

struct DistanceLemmaRow {
  cpx z;
  double d_sigma_omega = 0.0;      // spherical distance to the full complement (incl. infinity)
  double d_sigma_omega_hat = 0.0;  // spherical distance to the finite complement only
  double d_e = 0.0;                // euclidean distance to the finite complement
  bool holds = false;
};

struct DistanceLemmaReport {
  double a = 0.0;
  double C = 0.0;
  std::vector<DistanceLemmaRow> rows;
  bool all_hold = true;
};

/// Verifies, per sample z, the chain
///   dist_s(z, comp) <= dist_s(z, finite comp) <= C(a) dist_s(z, comp)
///                   <= 2 C(a) dist_e(z, finite comp)
/// for a domain containing infinity whose finite complement lies in
/// B_e(0,a).
inline DistanceLemmaReport check_distance_lemma(const DomainSpec& dom, double a,
                                                const std::vector<cpx>& samples) {
  if (!dom.contains_infinity())
    throw error(errc::precondition_failed, "domain must contain infinity");
  if (!(a > 0)) throw error(errc::precondition_failed, "radius a must be positive");
  for (const auto& c : dom.components())
    for (cpx s : c.boundary_samples())
      if (std::abs(s) > a * (1.0 + 1e-12))
        throw error(errc::complement_not_contained,
                    "a boundary component leaves the ball of radius a");
  DistanceLemmaReport rep;
  rep.a = a;
  rep.C = surgery_C(a);
  for (cpx z : samples) {
    if (!dom.in_domain(PlanePoint(z)))
      throw error(errc::point_outside_domain, "lemma sample not in the domain");
    DistanceLemmaRow row;
    row.z = z;
    row.d_sigma_omega_hat = dom.dist_sigma_raw(z);
    row.d_sigma_omega =
        std::min(row.d_sigma_omega_hat, spherical_distance(PlanePoint(z), PlanePoint::infinity()));
    row.d_e = dom.boundary_dist_e_raw(z);
    double eps = 1e-12 * (1.0 + std::abs(row.d_sigma_omega_hat));
    row.holds = row.d_sigma_omega <= row.d_sigma_omega_hat + eps &&
                row.d_sigma_omega_hat <= rep.C * row.d_sigma_omega + eps &&
                rep.C * row.d_sigma_omega <= 2.0 * rep.C * row.d_e + eps;
    rep.all_hold = rep.all_hold && row.holds;
    rep.rows.push_back(row);
  }
  return rep;
}

enum class SurgeryCase { case1, case2a, case2b, case3 };

inline const char* surgery_case_name(SurgeryCase c) {
  switch (c) {
    case SurgeryCase::case1: return "case1";
    case SurgeryCase::case2a: return "case2a";
    case SurgeryCase::case2b: return "case2b";
    case SurgeryCase::case3: return "case3";
  }
  return "?";
}

struct ArcReplacement {
  cpx z1, z2;          // endpoints on the control circle
  double radius = 0.0;
  double arc_len_e = 0.0;  // analytic arc length r * |sweep|
  Curve arc;               // inscribed polyline rendering (length <= arc_len_e)
};

struct SurgeryReport {
  Curve input;
  Curve output;
  SurgeryCase surgery_case = SurgeryCase::case1;
  std::vector<ArcReplacement> arcs;
  double verified_A = 0.0;          // measured length-cigar constant of the output
  double len_e_output = 0.0;
  double len_s_input = 0.0;
  bool length_bound_holds = true;   // len_e(output) <= 2 K(a) len_s(input) when surgery applied
  double K = 0.0;
  double C = 0.0;
};

namespace detail {

/// Crossing parameters t in [0,1] of the segment p + t(q-p) with |z| = r,
/// in increasing order.
inline std::vector<double> segment_circle_params(cpx p, cpx q, double r) {
  cpx d = q - p;
  double A = std::norm(d);
  std::vector<double> out;
  if (A < 1e-300) return out;
  double B = 2.0 * (p.real() * d.real() + p.imag() * d.imag());
  double Cc = std::norm(p) - r * r;
  double disc = B * B - 4.0 * A * Cc;
  if (disc < 0.0) return out;
  double sq = std::sqrt(disc);
  for (double t : {(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)})
    if (t >= 0.0 && t <= 1.0) out.push_back(t);
  std::sort(out.begin(), out.end());
  if (out.size() == 2 && out[1] - out[0] < 1e-14) out.pop_back();
  return out;
}

struct CurveCrossing {
  size_t seg;   // crossing lies on segment [v[seg], v[seg+1]]
  double t;     // local parameter
  cpx z;
};

inline std::vector<CurveCrossing> curve_circle_crossings(const std::vector<cpx>& v, double r) {
  std::vector<CurveCrossing> out;
  for (size_t i = 0; i + 1 < v.size(); ++i)
    for (double t : segment_circle_params(v[i], v[i + 1], r))
      out.push_back({i, t, v[i] + t * (v[i + 1] - v[i])});
  return out;
}

/// Minor arc on |z| = r from z1 to z2 as an inscribed polyline plus its
/// analytic length. Antipodal points take the positive sweep.
inline ArcReplacement minor_arc(cpx z1, cpx z2, double r, size_t segments = 128) {
  double t1 = std::arg(z1), t2 = std::arg(z2);
  double sweep = t2 - t1;
  while (sweep > kPi) sweep -= 2 * kPi;
  while (sweep < -kPi) sweep += 2 * kPi;
  if (std::abs(std::abs(sweep) - kPi) < 1e-15) sweep = kPi;
  ArcReplacement rep;
  rep.z1 = z1;
  rep.z2 = z2;
  rep.radius = r;
  rep.arc_len_e = r * std::abs(sweep);
  std::vector<cpx> pts;
  pts.push_back(z1);
  for (size_t k = 1; k < segments; ++k)
    pts.push_back(std::polar(r, t1 + sweep * static_cast<double>(k) / segments));
  pts.push_back(z2);
  rep.arc = Curve(std::move(pts));
  return rep;
}

/// Case-2 body: if the piece leaves the closed 3a-ball, clip at the first
/// and last crossings of its boundary circle and bridge with the minor arc.
/// Returns the (possibly unchanged) vertex list and records the arc.
inline std::vector<cpx> clip_to_ball(const std::vector<cpx>& v, double a,
                                     std::vector<ArcReplacement>& arcs, bool& changed) {
  double r = 3.0 * a;
  changed = false;
  bool inside = true;
  for (cpx z : v)
    if (std::abs(z) > r * (1.0 + 1e-12)) inside = false;
  if (inside) return v;
  auto xs = curve_circle_crossings(v, r);
  if (xs.size() < 2)
    throw error(errc::precondition_failed, "curve leaves the ball without a crossing pair");
  const CurveCrossing& c1 = xs.front();
  const CurveCrossing& c2 = xs.back();
  ArcReplacement arc = minor_arc(c1.z, c2.z, r);
  if (arc.arc_len_e > 0.5 * kPi * std::abs(c1.z - c2.z) * (1.0 + 1e-9))
    throw error(errc::precondition_failed, "minor arc violates the chord bound");
  std::vector<cpx> out;
  for (size_t i = 0; i <= c1.seg; ++i) out.push_back(v[i]);
  for (cpx z : arc.arc.vertices()) out.push_back(z);
  for (size_t i = c2.seg + 1; i < v.size(); ++i) out.push_back(v[i]);
  // drop duplicated joints
  std::vector<cpx> dedup;
  for (cpx z : out)
    if (dedup.empty() || std::abs(z - dedup.back()) > 1e-14) dedup.push_back(z);
  arcs.push_back(std::move(arc));
  changed = true;
  return dedup;
}

}  // namespace detail

/// Rewrites a curve, per the endpoint configuration relative to the control
/// circles at radii a, 2a, 3a, into one staying in the closed 3a-ball where
/// the euclidean and spherical lengths are comparable. The output always
/// keeps the input endpoints.
inline SurgeryReport spherical_to_euclidean_surgery(const Curve& curve, const DomainSpec& dom,
                                                    double a) {
  if (curve.size() < 2) throw error(errc::precondition_failed, "surgery needs a real curve");
  if (!(a > 0)) throw error(errc::precondition_failed, "radius a must be positive");
  if (!dom.contains_infinity())
    throw error(errc::precondition_failed, "domain must contain infinity");
  for (const auto& c : dom.components())
    for (cpx s : c.boundary_samples())
      if (std::abs(s) > a * (1.0 + 1e-12))
        throw error(errc::complement_not_contained,
                    "a boundary component leaves the ball of radius a");

  double tol = 1e-9 * a;
  double rx = std::abs(curve.front()), ry = std::abs(curve.back());
  for (double rr : {rx, ry})
    if (std::abs(rr - 2 * a) < tol || std::abs(rr - 3 * a) < tol)
      throw error(errc::case_undetermined, "endpoint on a dividing circle within tolerance");

  SurgeryReport rep;
  rep.input = curve;
  rep.len_s_input = curve.length_s();
  rep.K = surgery_K(a);
  rep.C = surgery_C(a);

  std::vector<cpx> out;
  if (rx < 3 * a && ry < 3 * a) {
    bool changed = false;
    out = detail::clip_to_ball(curve.vertices(), a, rep.arcs, changed);
    rep.surgery_case = changed ? SurgeryCase::case2b : SurgeryCase::case2a;
  } else if ((rx < 2 * a && ry > 3 * a) || (ry < 2 * a && rx > 3 * a)) {
    rep.surgery_case = SurgeryCase::case3;
    std::vector<cpx> v = curve.vertices();
    bool reversed = ry < 2 * a;
    if (reversed) std::reverse(v.begin(), v.end());
    auto xs = detail::curve_circle_crossings(v, 2 * a);
    if (xs.empty())
      throw error(errc::case_undetermined, "curve does not meet the 2a-circle in the domain");
    // split at the first crossing; the inner piece gets the case-2 surgery
    const detail::CurveCrossing& cz = xs.front();
    std::vector<cpx> inner(v.begin(), v.begin() + static_cast<long>(cz.seg) + 1);
    inner.push_back(cz.z);
    std::vector<cpx> outer;
    outer.push_back(cz.z);
    for (size_t i = cz.seg + 1; i < v.size(); ++i) outer.push_back(v[i]);
    bool changed = false;
    inner = detail::clip_to_ball(inner, a, rep.arcs, changed);
    out = inner;
    for (size_t i = 1; i < outer.size(); ++i) out.push_back(outer[i]);
    if (reversed) std::reverse(out.begin(), out.end());
  } else if (rx > a && ry > a) {
    rep.surgery_case = SurgeryCase::case1;
    out = curve.vertices();
  } else {
    throw error(errc::case_undetermined, "endpoint configuration matches no proof case");
  }

  rep.output = Curve(std::move(out));
  rep.len_e_output = rep.output.length_e();
  if (std::abs(rep.output.front() - curve.front()) > 1e-12 ||
      std::abs(rep.output.back() - curve.back()) > 1e-12)
    throw error(errc::precondition_failed, "surgery moved an endpoint");

  if (rep.surgery_case == SurgeryCase::case2a || rep.surgery_case == SurgeryCase::case2b)
    rep.length_bound_holds =
        rep.len_e_output <= 2.0 * rep.K * rep.len_s_input * (1.0 + 1e-12);

  CigarReport cig = check_cigar(rep.output, dom, 0.0);
  rep.verified_A = cig.A_length;
  return rep;
}

struct BilipschitzProbe {
  double L_est = 0.0;
  std::vector<double> ratios;  // per pair: max(forward ratio, inverse ratio)
};

/// Max spherical quasihyperbolic distortion of the chain over sample pairs.
inline BilipschitzProbe bilipschitz_probe(const MapChain& chain, const DomainSpec& dom_src,
                                          const DomainSpec& dom_dst,
                                          const std::vector<std::pair<cpx, cpx>>& pairs,
                                          double h) {
  BilipschitzProbe out;
  for (const auto& [x, y] : pairs) {
    double ks = qh_distance(dom_src, PlanePoint(x), PlanePoint(y), MetricFlavor::spherical, h).value;
    cpx fx = chain(x), fy = chain(y);
    double kd =
        qh_distance(dom_dst, PlanePoint(fx), PlanePoint(fy), MetricFlavor::spherical, h).value;
    double r = std::max(kd / ks, ks / kd);
    out.ratios.push_back(r);
    out.L_est = std::max(out.L_est, r);
  }
  return out;
}

}  // namespace circuma
