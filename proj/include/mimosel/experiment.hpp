#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mimosel/interference_model.hpp"
#include "mimosel/oracle.hpp"
#include "mimosel/rounding.hpp"
#include "mimosel/scp.hpp"
#include "mimosel/selection.hpp"

namespace mimosel {

/// Inclusive azimuth grid start, start + step, ..., <= stop (degrees).
struct ThetaGrid {
  double start = 0.0;
  double stop = 90.0;
  double step = 2.0;

  /// "START:STOP:STEP" or a single value.
  static ThetaGrid parse(std::string_view text);
  std::vector<double> values() const;
  void validate() const;
};

/// One row of the cardinality table: counts for each mode at one size.
struct CardinalitySet {
  int k_joint;
  int kt_factored, kr_factored;
  int km_mfc, kr_mfc;
  int kt_hybrid, km_hybrid, kr_hybrid;

  /// joint, factored, mfc, hybrid.
  std::vector<SelectionMode> modes() const;
};

/// The 13 configurations from 2 to 25 elements on the 5x5 array.
const std::vector<CardinalitySet>& cardinality_table();

struct ExperimentPlan {
  Scenario scenario;
  std::string scenario_path;
  std::vector<SelectionMode> modes;
  ThetaGrid theta;
  bool run_oracle = false;
  bool power_adjust = false;
  PowerAdjustScope adjust_scope = PowerAdjustScope::target_only;
  std::uint64_t seed = 1;
  SolverConfig solver;
  int n_samples = 1000;
  OracleConfig oracle;
  /// Grid points evaluated concurrently.
  int threads = 1;
  std::string output_path;
  /// When nonempty, one SCP trace CSV per (theta, mode) is written here.
  std::string trace_dir;

  void validate() const;
};

struct SweepRow {
  double theta_deg = 0.0;
  SelectionMode mode;
  bool power_adjust = false;
  double sinr_full_db = 0.0;
  double sinr_scp_db = 0.0;
  std::optional<double> sinr_oracle_db;
  SelectionVector selection;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;

  /// Rounding of the single best projected sample.
  double sinr_final_rounding_db = 0.0;
  /// Penalized objective over the outer iterations.
  std::vector<double> merit_trace;
  double max_final_slack = 0.0;
  int rejected_steps = 0;
  std::optional<SelectionVector> oracle_selection;

  std::optional<double> gap_db() const;
};

/// Run every (theta, mode) point. A failing point yields a row with
/// failed = true and does not stop the sweep. With power adjustment, each
/// factored and hybrid row is followed by its adjusted counterpart.
std::vector<SweepRow> run_sweep(const ExperimentPlan& plan);

/// Evaluate a single (theta, mode) point. theta_index and mode_index select
/// the random stream.
std::vector<SweepRow> run_point(const ExperimentPlan& plan, std::size_t theta_index,
                                std::size_t mode_index);

extern const char* const kCsvHeader;

std::string format_results(const std::vector<SweepRow>& rows);
/// Throws IoError on failure.
void emit_results(const std::vector<SweepRow>& rows, const std::string& path);

/// The columns of a results CSV as printed.
struct CsvRecord {
  double theta_deg = 0.0;
  std::string mode;
  bool power_adjust = false;
  double sinr_full_db = 0.0;
  double sinr_scp_db = 0.0;
  double sinr_oracle_db = 0.0;  // NaN when absent
  double gap_db = 0.0;
  std::string selection_bits;
  std::uint64_t seed = 0;
};

std::vector<CsvRecord> parse_results_csv(std::string_view text);
std::vector<CsvRecord> read_results_csv(const std::string& path);

/// gnuplot script plotting SINR against azimuth, one curve per
/// (mode, power_adjust) pair, plus the full-array reference.
std::string gnuplot_script(const std::vector<CsvRecord>& records, const std::string& csv_path,
                           const std::string& output_png = "");

}  // namespace mimosel
