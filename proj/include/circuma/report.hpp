#pragma once

#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "circuma/errors.hpp"

namespace circuma {

/// Anchor formulas keyed by record name. Records can only be built through
/// make_record, so every emitted line carries its formula.
inline const std::map<std::string, std::string>& anchor_table() {
  static const std::map<std::string, std::string> table = {
      {"qh.dist", "k = inf int |dz| / dist(z, bd)"},
      {"qh.dist.spherical", "k = inf int 2 |dz| / ((1+|z|^2) dist_sigma(z, bd))"},
      {"qh.comparison", "(pi sqrt2)^{-1} k^e <= k^sigma <= 3(2+D) k^e"},
      {"delta.four_point", "(x|z) >= min((x|y),(y|z)) - delta"},
      {"delta.thin", "geodesic triangles are delta-thin"},
      {"uniform.cigar_length", "min(l(g[0,t]), l(g[t,1])) <= A dist(g(t), bd)"},
      {"uniform.cigar_diam", "min(diam(g[0,t]), diam(g[t,1])) <= A dist(g(t), bd)"},
      {"uniform.quasiconvex", "l(g) <= A lambda(x,y)"},
      {"uniform.A_est", "A = sup over pairs of the cigar/quasiconvexity constants"},
      {"uniform.separation", "min(diam S1, diam S2) <= 2(A+1)^2 dist(S1,S2)"},
      {"uniform.turning", "diam(E) <= C(A) |x-y| within a component"},
      {"uniform.count", "#components <= 2(A+1)^2 (1 + R^2/r^2)"},
      {"uniform.llc", "1-LLC: in-ball and out-of-ball connectivity at factor M"},
      {"uniform.rho_bracket", "rho_lo <= rho <= rho_hi <= min(2 rho_lo, lambda)"},
      {"approx.nesting", "Omega_1 super Omega_2 super ... (kept components nest)"},
      {"approx.residual", "residual components are the ones below every threshold"},
      {"koebe.normalization", "f(z) = z + a1/z + ... near infinity"},
      {"koebe.circularity", "max | |z - c| - r | / r over trace samples"},
      {"koebe.a1", "a1 = lim z (f(z) - z)"},
      {"koebe.rigidity", "second uniformization = affine o first"},
      {"koebe.modulus", "mod(ring) = 2 pi (log((1-r0')/(8 r0')))^{-1} scale"},
      {"sphere.distance_lemma",
       "dist_s(z,comp) <= dist_s(z,comp^) <= C(a) dist_s(z,comp) <= 2C(a) dist_e(z,comp)"},
      {"sphere.arc_bound", "l_e(arc) <= (pi/2) |z1 - z2|"},
      {"sphere.length_bound", "l_e(output) <= 2 K(a) l_s(input), K(a) = (1+9a^2)/2"},
      {"sphere.case", "surgery case by endpoint position vs circles at 2a, 3a"},
      {"sphere.bilipschitz", "L = max(k^s(fx,fy)/k^s(x,y), inverse)"},
  };
  return table;
}

enum class RecordStatus { pass, fail, estimate };

inline const char* record_status_name(RecordStatus s) {
  switch (s) {
    case RecordStatus::pass: return "pass";
    case RecordStatus::fail: return "fail";
    case RecordStatus::estimate: return "estimate";
  }
  return "?";
}

struct ReportRecord {
  std::string name;
  std::string anchor;
  std::string measured;
  std::string bound;
  RecordStatus status = RecordStatus::estimate;
};

/// Deterministic float formatting shared by every report field.
inline std::string fmt_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline ReportRecord make_record(const std::string& name, const std::string& measured,
                                const std::string& bound, RecordStatus status) {
  auto it = anchor_table().find(name);
  if (it == anchor_table().end())
    throw error(errc::precondition_failed, "no anchor registered for record " + name);
  return ReportRecord{name, it->second, measured, bound, status};
}

inline ReportRecord make_record(const std::string& name, double measured, double bound,
                                RecordStatus status) {
  return make_record(name, fmt_value(measured), fmt_value(bound), status);
}

struct Report {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;  // echoed in insertion order
  std::vector<ReportRecord> records;

  void echo(const std::string& k, const std::string& v) { config.emplace_back(k, v); }
  void echo(const std::string& k, double v) { config.emplace_back(k, fmt_value(v)); }
  void add(ReportRecord r) { records.push_back(std::move(r)); }

  bool ok() const {
    for (const auto& r : records)
      if (r.status == RecordStatus::fail) return false;
    return true;
  }

  void emit(std::ostream& os) const {
    os << "command=" << command << "\n";
    for (const auto& [k, v] : config) os << "config." << k << "=" << v << "\n";
    for (const auto& r : records)
      os << "record name=" << r.name << " measured=" << r.measured << " bound=" << r.bound
         << " status=" << record_status_name(r.status) << " anchor=\"" << r.anchor << "\"\n";
    os << "ok=" << (ok() ? "true" : "false") << "\n";
  }
};

}  // namespace circuma
