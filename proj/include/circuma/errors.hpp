#pragma once

#include <stdexcept>
#include <string>

namespace circuma {

enum class errc {
  point_outside_domain,
  empty_window,
  disconnected,
  infinity_in_domain,
  curve_exits_domain,
  degenerate_component,
  precondition_failed,
  large_component_hit,
  bad_thresholds,
  not_starlike,
  fit_residual_too_large,
  degenerate_at_infinity,
  no_convergence,
  bad_radii,
  empty_set,
  complement_not_contained,
  case_undetermined,
  invalid_domain,
  io_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::point_outside_domain: return "PointOutsideDomain";
    case errc::empty_window: return "EmptyWindow";
    case errc::disconnected: return "Disconnected";
    case errc::infinity_in_domain: return "InfinityInDomain";
    case errc::curve_exits_domain: return "CurveExitsDomain";
    case errc::degenerate_component: return "DegenerateComponent";
    case errc::precondition_failed: return "PreconditionFailed";
    case errc::large_component_hit: return "LargeComponentHit";
    case errc::bad_thresholds: return "BadThresholds";
    case errc::not_starlike: return "NotStarlike";
    case errc::fit_residual_too_large: return "FitResidualTooLarge";
    case errc::degenerate_at_infinity: return "DegenerateAtInfinity";
    case errc::no_convergence: return "NoConvergence";
    case errc::bad_radii: return "BadRadii";
    case errc::empty_set: return "EmptySet";
    case errc::complement_not_contained: return "ComplementNotContained";
    case errc::case_undetermined: return "CaseUndetermined";
    case errc::invalid_domain: return "InvalidDomain";
    case errc::io_error: return "IOError";
  }
  return "UnknownError";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

}  // namespace circuma
