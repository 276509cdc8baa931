// Command-line front end: azimuth sweeps over selection modes, CSV output,
// and a gnuplot script generator for the resulting tables.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mimosel/errors.hpp"
#include "mimosel/experiment.hpp"
#include "mimosel/scenario_io.hpp"

namespace {

using namespace mimosel;

enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kUsage = 2,
  kParse = 3,
  kIo = 4,
  kNumerical = 5,
  kInfeasible = 6,
  kNonConvergence = 7,
  kBudget = 8,
  kPartial = 9,
};

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::invalid_argument: return kUsage;
    case ErrorCategory::parse: return kParse;
    case ErrorCategory::io: return kIo;
    case ErrorCategory::numerical: return kNumerical;
    case ErrorCategory::infeasible: return kInfeasible;
    case ErrorCategory::non_convergence: return kNonConvergence;
    case ErrorCategory::budget: return kBudget;
  }
  return kOther;
}

struct SweepOptions {
  std::string scenario;
  std::string mode = "all";
  std::optional<int> k, kt, kr, km;
  std::string theta = "0:90:2";
  std::uint64_t seed = 1;
  int samples = 1000;
  int scp_iters = 10;
  double psi = 10.0;
  bool power_adjust = false;
  bool adjust_clutter = false;
  bool oracle = false;
  std::uint64_t oracle_budget = 10'000'000;
  bool cardinality_table = false;
  int threads = 1;
  std::string trace_dir;
  std::string out = "-";
};

int need(const std::optional<int>& v, const char* flag, const std::string& mode) {
  if (!v) throw InvalidArgument(std::string("mode ") + mode + " needs " + flag);
  return *v;
}

std::vector<SelectionMode> requested_modes(const SweepOptions& o) {
  const std::string& m = o.mode;
  if (o.cardinality_table) {
    std::vector<SelectionMode> out;
    for (const auto& set : cardinality_table()) {
      const auto modes = set.modes();
      if (m == "all") {
        out.insert(out.end(), modes.begin(), modes.end());
      } else {
        out.push_back(modes.at(static_cast<std::size_t>(parse_mode_kind(m))));
      }
    }
    return out;
  }
  if (m == "joint") return {SelectionMode::joint(need(o.k, "--k", m))};
  if (m == "factored") return {SelectionMode::factored(need(o.kt, "--kt", m), need(o.kr, "--kr", m))};
  if (m == "mfc") return {SelectionMode::mfc(need(o.km, "--km", m), need(o.kr, "--kr", m))};
  if (m == "hybrid")
    return {SelectionMode::hybrid(need(o.kt, "--kt", m), need(o.km, "--km", m), need(o.kr, "--kr", m))};
  if (m == "all") {
    const int km = need(o.km, "--km", m);
    const int kr = need(o.kr, "--kr", m);
    const int kt = need(o.kt, "--kt", m);
    // Factored and MFC share (k_m, k_r): the factored rectangle has k_m columns.
    return {SelectionMode::joint(o.k.value_or(km * kr)), SelectionMode::factored(km, kr),
            SelectionMode::mfc(km, kr), SelectionMode::hybrid(kt, km, kr)};
  }
  throw InvalidArgument("unknown mode: " + m);
}

int run_sweep_command(const SweepOptions& o) {
  ExperimentPlan plan;
  plan.scenario_path = o.scenario;
  plan.scenario = parse_scenario(o.scenario);
  plan.modes = requested_modes(o);
  plan.theta = ThetaGrid::parse(o.theta);
  plan.seed = o.seed;
  plan.n_samples = o.samples;
  plan.solver.max_outer_iterations = o.scp_iters;
  plan.solver.psi = o.psi;
  plan.power_adjust = o.power_adjust;
  plan.adjust_scope = o.adjust_clutter ? PowerAdjustScope::target_and_clutter
                                       : PowerAdjustScope::target_only;
  plan.run_oracle = o.oracle;
  plan.oracle.budget = o.oracle_budget;
  plan.oracle.threads = o.threads;
  plan.threads = o.threads;
  plan.trace_dir = o.trace_dir;
  plan.output_path = o.out;
  plan.validate();

  const auto rows = run_sweep(plan);
  if (o.out == "-") {
    std::cout << format_results(rows);
    std::cout.flush();
  } else {
    emit_results(rows, o.out);
  }

  int failed = 0;
  for (const auto& r : rows) {
    if (!r.failed) continue;
    ++failed;
    std::cerr << "mimosel: theta " << r.theta_deg << " mode " << r.mode.label() << ": " << r.error
              << "\n";
  }
  if (failed) {
    std::cerr << "mimosel: " << failed << " of " << rows.size() << " rows failed\n";
    return kPartial;
  }
  return kOk;
}

int run_gnuplot_command(const std::string& csv, const std::string& out, const std::string& png) {
  const auto records = read_results_csv(csv);
  const std::string script = gnuplot_script(records, csv, png);
  if (out == "-") {
    std::cout << script;
    return kOk;
  }
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  f << script;
  if (!f) throw IoError("cannot write " + out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Antenna selection for MIMO beamforming under jamming and clutter"};
  app.require_subcommand(0, 1);

  SweepOptions o;
  app.add_option("--scenario", o.scenario, "Scenario file");
  app.add_option("--mode", o.mode, "joint, factored, mfc, hybrid or all")
      ->check(CLI::IsMember({"joint", "factored", "mfc", "hybrid", "all"}));
  app.add_option("--k", o.k, "Joint selection size (default km*kr with --mode all)");
  app.add_option("--kt", o.kt, "Transmitters (factored, hybrid)");
  app.add_option("--kr", o.kr, "Receivers");
  app.add_option("--km", o.km, "Matched filters per receiver (mfc, hybrid)");
  app.add_option("--theta", o.theta, "Azimuth grid START:STOP:STEP in degrees")
      ->capture_default_str();
  app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
  app.add_option("--samples", o.samples, "Rounding samples per point")->capture_default_str();
  app.add_option("--scp-iters", o.scp_iters, "Outer convex-concave iterations")
      ->capture_default_str();
  app.add_option("--psi", o.psi, "Exact-penalty weight")->capture_default_str();
  app.add_flag("--power-adjust", o.power_adjust,
               "Also emit factored/hybrid rows with transmit power concentrated on k_t elements");
  app.add_flag("--adjust-clutter", o.adjust_clutter,
               "Scale clutter power along with the target under --power-adjust");
  app.add_flag("--oracle", o.oracle, "Run the exhaustive search at every point");
  app.add_option("--oracle-budget", o.oracle_budget, "Largest enumeration allowed")
      ->capture_default_str();
  app.add_flag("--cardinality-table", o.cardinality_table,
               "Sweep the 13 preset element counts (5x5 array) instead of --k/--kt/--kr/--km");
  app.add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  app.add_option("--trace-dir", o.trace_dir, "Write one solver trace CSV per point here");
  app.add_option("--out", o.out, "Output CSV ('-' for stdout)")->capture_default_str();

  auto* gp = app.add_subcommand("gnuplot", "Emit a gnuplot script for a results CSV");
  std::string gp_csv, gp_out = "-", gp_png;
  gp->add_option("--csv", gp_csv, "Results CSV")->required();
  gp->add_option("--out", gp_out, "Script path ('-' for stdout)")->capture_default_str();
  gp->add_option("--png", gp_png, "Make the script render to this PNG");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*gp) return run_gnuplot_command(gp_csv, gp_out, gp_png);
    if (o.scenario.empty()) {
      std::cerr << "mimosel: --scenario is required\n" << app.help();
      return kUsage;
    }
    return run_sweep_command(o);
  } catch (const Error& e) {
    std::cerr << "mimosel: " << to_string(e.category()) << " error: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "mimosel: error: " << e.what() << "\n";
    return kOther;
  }
}
