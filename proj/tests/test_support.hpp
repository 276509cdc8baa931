#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "mimosel/interference_model.hpp"
#include "mimosel/rng.hpp"
#include "mimosel/scenario_io.hpp"
#include "mimosel/selection.hpp"

#ifndef MIMOSEL_SOURCE_DIR
#define MIMOSEL_SOURCE_DIR "."
#endif

namespace mimosel::testing {

inline std::string scenario_path(const char* name) {
  return std::string(MIMOSEL_SOURCE_DIR) + "/scenarios/" + name;
}

inline Scenario reference_5x5(double theta_deg = 18.0) {
  return parse_scenario(scenario_path("reference_5x5.scn")).with_target(Angle::degrees(theta_deg));
}

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.uniform() * (hi - lo + 1));
}

/// Random scenario with 0-3 jammers, 0-4 clutter patches, random angles
/// and powers. At least one interference source.
inline Scenario random_scenario(Rng& rng, int M, int N) {
  Scenario s;
  s.geometry = {M, N, uniform(rng, 0.3, 3.0), uniform(rng, 0.3, 1.0)};
  s.target_theta = Angle::degrees(uniform(rng, -80.0, 80.0));
  s.target_power_dbw = uniform(rng, 0.0, 25.0);
  const int jammers = uniform_int(rng, 0, 3);
  for (int i = 0; i < jammers; ++i)
    s.jammers.push_back({Angle::degrees(uniform(rng, -85.0, 85.0)), uniform(rng, 0.0, 20.0)});
  s.jammer_model = rng.uniform() < 0.5 ? JammerModel::barrage : JammerModel::coherent;
  s.clutter.rank = uniform_int(rng, jammers == 0 ? 1 : 0, 4);
  s.clutter.span_lo_deg = uniform(rng, -60.0, 0.0);
  s.clutter.span_hi_deg = uniform(rng, 0.0, 60.0);
  s.clutter.cnr_db = uniform(rng, 0.0, 20.0);
  return s;
}

inline SelectionVector random_nonzero_selection(Rng& rng, int M, int N) {
  SelectionVector c(M, N);
  while (c.count() == 0)
    for (std::size_t i = 0; i < c.size(); ++i) c.set(i, rng.uniform() < 0.5);
  return c;
}

inline RVector random_box_point(Rng& rng, int n, double lo = 0.0, double hi = 1.0) {
  RVector c(n);
  for (int i = 0; i < n; ++i) c[i] = uniform(rng, lo, hi);
  return c;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace mimosel::testing
