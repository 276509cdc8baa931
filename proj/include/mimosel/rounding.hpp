#pragma once

#include <cstdint>
#include <vector>

#include "mimosel/interference_model.hpp"
#include "mimosel/rng.hpp"
#include "mimosel/scp.hpp"
#include "mimosel/selection.hpp"

namespace mimosel {

struct RoundingConfig {
  int n_samples = 1000;
  /// Draw i uses the stream derive_seed(seed, {i}).
  std::uint64_t seed = 1;
  /// Duality-measure threshold of the projection solve.
  double projection_tolerance = 1e-8;

  void validate() const;
};

/// z = c_star + sqrt(sigma_diag) .* n, n standard normal.
RVector sample_candidate(const RelaxedSolution& relaxed, Rng& rng);

/// Euclidean projection of z onto the unit box intersected with the mode's
/// convex constraints, equalities relaxed to "<=" and lower bounds dropped.
RVector project_to_relaxed_set(const RVector& z, const SelectionMode& mode,
                               const ArrayGeometry& geometry, double tolerance = 1e-8);

struct RoundingResult {
  /// Best structured rounding over all projected samples.
  SelectionVector best;
  double sinr_db = 0.0;
  /// Rounding of the single projected sample with the largest f.
  SelectionVector final_rounding;
  double final_rounding_sinr_db = 0.0;
  RVector best_projected;
  double best_projected_f = 0.0;
  /// Best SINR (dB) seen after each sample.
  std::vector<double> best_so_far;
  int failed_samples = 0;
  /// True when every sample failed and the result rounds c_star.
  bool fell_back = false;
};

RoundingResult randomized_rounding(const CovarianceModel& model, const SelectionMode& mode,
                                   const RelaxedSolution& relaxed, const RoundingConfig& config = {});

}  // namespace mimosel
