#pragma once

#include <string>
#include <vector>

#include "circuma/domain.hpp"
#include "circuma/errors.hpp"

namespace circuma {

struct FilteredDomain {
  DomainSpec domain;
  std::vector<size_t> kept;  // indices into the source component list
  bool all_components_dropped = false;
};

/// Keeps exactly the complement components of diameter > delta. An empty
/// result is legal (whole plane / sphere) and flagged.
inline FilteredDomain filter_components(const DomainSpec& dom, double delta) {
  if (!(delta > 0.0)) throw error(errc::precondition_failed, "delta must be positive");
  FilteredDomain out;
  std::vector<BoundaryComponent> keep;
  for (size_t i = 0; i < dom.components().size(); ++i) {
    if (dom.components()[i].diameter() > delta) {
      keep.push_back(dom.components()[i]);
      out.kept.push_back(i);
    }
  }
  out.all_components_dropped = keep.empty() && !dom.components().empty();
  out.domain = dom.with_components(std::move(keep), dom.name() + "@" + std::to_string(delta));
  return out;
}

struct ApproximationSequence {
  DomainSpec base;
  std::vector<double> thresholds;  // strictly decreasing
  std::vector<DomainSpec> domains;
  // residual at desk scale: point components plus components dropped even at
  // the finest threshold (indices into the base component list)
  std::vector<size_t> residual;
};

/// Nested finitely connected approximations: one filtered domain per
/// threshold, complements growing as the threshold shrinks.
inline ApproximationSequence approximation_sequence(const DomainSpec& dom,
                                                    const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw error(errc::bad_thresholds, "need at least one threshold");
  for (size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0)) throw error(errc::bad_thresholds, "thresholds must be positive");
    if (i > 0 && !(thresholds[i] < thresholds[i - 1]))
      throw error(errc::bad_thresholds, "thresholds must be strictly decreasing");
  }
  ApproximationSequence seq;
  seq.base = dom;
  seq.thresholds = thresholds;
  std::vector<size_t> prev_kept;
  for (size_t n = 0; n < thresholds.size(); ++n) {
    FilteredDomain f = filter_components(dom, thresholds[n]);
    // nesting: every component kept at the coarser threshold stays kept
    if (n > 0) {
      for (size_t idx : prev_kept) {
        bool still = false;
        for (size_t j : f.kept) still |= (j == idx);
        if (!still)
          throw error(errc::bad_thresholds, "filtering lost a previously kept component");
      }
    }
    prev_kept = f.kept;
    seq.domains.push_back(std::move(f.domain));
  }
  // every non-point component must appear from some stage on; points never do
  for (size_t i = 0; i < dom.components().size(); ++i) {
    bool in_finest = false;
    for (size_t j : prev_kept) in_finest |= (j == i);
    if (!in_finest) seq.residual.push_back(i);
  }
  return seq;
}

}  // namespace circuma
