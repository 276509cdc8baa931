#pragma once

#include <string>
#include <string_view>

#include "mimosel/interference_model.hpp"

namespace mimosel {

/// Parse the line-oriented scenario format:
///
///   # comment
///   M = 5
///   N = 5
///   d_t = 2.5
///   d_r = 0.5
///   target_power_dbw = 20
///   jammer = 20, 13          (degrees, dBW; repeatable)
///   clutter_rank = 5
///   clutter_span = 0, 90
///   clutter_cnr_db = 13
///
/// Mandatory: M, N, d_t, d_r, target_power_dbw. Optional: target_theta_deg,
/// noise_power_dbw, jammer_model (barrage|coherent), clutter_rank,
/// clutter_span, clutter_cnr_db, require_interference, nonoverlapping_virtual.
/// Errors carry the offending line number.
Scenario parse_scenario_text(std::string_view text);
Scenario parse_scenario(const std::string& path);

/// Inverse of parse_scenario_text up to formatting.
std::string format_scenario(const Scenario& scenario);

}  // namespace mimosel
