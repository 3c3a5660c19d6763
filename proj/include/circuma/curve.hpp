#pragma once

#include <cstddef>
#include <vector>

#include "circuma/geometry.hpp"

namespace circuma {

/// Polyline curve with cumulative Euclidean and spherical arclength tables.
/// Universal carrier for geodesics, uniform curves, and boundary traces.
class Curve {
 public:
  Curve() = default;
  explicit Curve(std::vector<cpx> vertices) : vertices_(std::move(vertices)) {
    cum_len_e_.resize(vertices_.size(), 0.0);
    cum_len_s_.resize(vertices_.size(), 0.0);
    for (size_t i = 1; i < vertices_.size(); ++i) {
      cum_len_e_[i] = cum_len_e_[i - 1] + std::abs(vertices_[i] - vertices_[i - 1]);
      cum_len_s_[i] = cum_len_s_[i - 1] + spherical_segment_length(vertices_[i - 1], vertices_[i]);
    }
  }

  const std::vector<cpx>& vertices() const { return vertices_; }
  size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }
  cpx front() const { return vertices_.front(); }
  cpx back() const { return vertices_.back(); }
  cpx operator[](size_t i) const { return vertices_[i]; }

  double length_e() const { return cum_len_e_.empty() ? 0.0 : cum_len_e_.back(); }
  double length_s() const { return cum_len_s_.empty() ? 0.0 : cum_len_s_.back(); }
  double prefix_len_e(size_t i) const { return cum_len_e_[i]; }
  double prefix_len_s(size_t i) const { return cum_len_s_[i]; }
  const std::vector<double>& cum_len_e() const { return cum_len_e_; }
  const std::vector<double>& cum_len_s() const { return cum_len_s_; }

  /// Diameter of the trace (max pairwise vertex distance).
  double trace_diameter() const {
    double d = 0.0;
    for (size_t i = 0; i < vertices_.size(); ++i)
      for (size_t j = i + 1; j < vertices_.size(); ++j)
        d = std::max(d, std::abs(vertices_[i] - vertices_[j]));
    return d;
  }

  /// Prefix trace diameters: out[i] = diam({v_0..v_i}). O(n^2) incremental.
  std::vector<double> prefix_diameters() const {
    std::vector<double> out(vertices_.size(), 0.0);
    for (size_t i = 1; i < vertices_.size(); ++i) {
      double d = out[i - 1];
      for (size_t j = 0; j < i; ++j) d = std::max(d, std::abs(vertices_[i] - vertices_[j]));
      out[i] = d;
    }
    return out;
  }

  std::vector<double> suffix_diameters() const {
    size_t n = vertices_.size();
    std::vector<double> out(n, 0.0);
    for (size_t k = 1; k < n; ++k) {
      size_t i = n - 1 - k;
      double d = out[i + 1];
      for (size_t j = i + 1; j < n; ++j) d = std::max(d, std::abs(vertices_[i] - vertices_[j]));
      out[i] = d;
    }
    return out;
  }

  /// Resample as an open polyline with n vertices, uniform in Euclidean arclength.
  Curve resample(size_t n) const {
    if (vertices_.size() < 2 || n < 2) return *this;
    std::vector<cpx> out;
    out.reserve(n);
    double total = length_e();
    size_t seg = 0;
    for (size_t k = 0; k < n; ++k) {
      double s = total * static_cast<double>(k) / static_cast<double>(n - 1);
      while (seg + 2 < vertices_.size() && cum_len_e_[seg + 1] < s) ++seg;
      double s0 = cum_len_e_[seg], s1 = cum_len_e_[seg + 1];
      double t = s1 > s0 ? (s - s0) / (s1 - s0) : 0.0;
      out.push_back(vertices_[seg] + t * (vertices_[seg + 1] - vertices_[seg]));
    }
    return Curve(std::move(out));
  }

  Curve reversed() const {
    std::vector<cpx> v(vertices_.rbegin(), vertices_.rend());
    return Curve(std::move(v));
  }

  /// Concatenate with another curve starting where this one ends.
  Curve concat(const Curve& other) const {
    std::vector<cpx> v = vertices_;
    size_t start = 0;
    if (!v.empty() && !other.empty() && std::abs(v.back() - other.front()) == 0.0) start = 1;
    for (size_t i = start; i < other.size(); ++i) v.push_back(other[i]);
    return Curve(std::move(v));
  }

 private:
  std::vector<cpx> vertices_;
  std::vector<double> cum_len_e_;
  std::vector<double> cum_len_s_;
};

/// Resample a closed polyline (first vertex not repeated) to n vertices,
/// uniform in arclength. Keeps the starting vertex and orientation.
inline std::vector<cpx> resample_closed(const std::vector<cpx>& pts, size_t n) {
  size_t m = pts.size();
  std::vector<double> cum(m + 1, 0.0);
  for (size_t i = 0; i < m; ++i) cum[i + 1] = cum[i] + std::abs(pts[(i + 1) % m] - pts[i]);
  double total = cum[m];
  std::vector<cpx> out(n);
  size_t seg = 0;
  for (size_t k = 0; k < n; ++k) {
    double s = total * static_cast<double>(k) / static_cast<double>(n);
    while (seg + 1 < m && cum[seg + 1] < s) ++seg;
    double s0 = cum[seg], s1 = cum[seg + 1];
    double t = s1 > s0 ? (s - s0) / (s1 - s0) : 0.0;
    out[k] = pts[seg] + t * (pts[(seg + 1) % m] - pts[seg]);
  }
  return out;
}

}  // namespace circuma
