#include "mimosel/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "mimosel/errors.hpp"
#include "mimosel/rng.hpp"

namespace mimosel {

namespace {

double parse_number(std::string_view v, const char* what) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (v.empty() || r.ec != std::errc() || r.ptr != end)
    throw InvalidArgument(std::string("cannot parse ") + what + " '" + std::string(v) + "'");
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto p = s.find(sep);
    out.push_back(s.substr(0, p));
    if (p == std::string_view::npos) return out;
    s.remove_prefix(p + 1);
  }
}

void append_number(std::string& out, double v) {
  char buf[64];
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  std::snprintf(buf, sizeof buf, "%.6f", v);
  out += buf;
}

bool has_transmit_count(const SelectionMode& mode) {
  return mode.kind == ModeKind::factored || mode.kind == ModeKind::hybrid;
}

SweepRow failed_row(double theta, const SelectionMode& mode, bool adjusted, double full,
                    std::uint64_t seed, const std::string& why) {
  SweepRow r;
  r.theta_deg = theta;
  r.mode = mode;
  r.power_adjust = adjusted;
  r.sinr_full_db = full;
  r.sinr_scp_db = std::numeric_limits<double>::quiet_NaN();
  r.sinr_final_rounding_db = r.sinr_scp_db;
  r.seed = seed;
  r.failed = true;
  r.error = why;
  return r;
}

struct PipelineOutput {
  RelaxedSolution relaxed;
  RoundingResult rounded;
  std::optional<OracleResult> oracle;
};

PipelineOutput run_pipeline(const CovarianceModel& model, const SelectionMode& mode,
                            const ExperimentPlan& plan, std::uint64_t stream) {
  PipelineOutput out;
  out.relaxed = run_scp(model, mode, plan.solver);
  RoundingConfig rc;
  rc.n_samples = plan.n_samples;
  rc.seed = stream;
  out.rounded = randomized_rounding(model, mode, out.relaxed, rc);
  if (plan.run_oracle) out.oracle = exhaustive_optimum(model, mode, plan.oracle);
  return out;
}

SweepRow make_row(double theta, const SelectionMode& mode, bool adjusted, double full,
                  const PipelineOutput& p, std::uint64_t seed) {
  SweepRow r;
  r.theta_deg = theta;
  r.mode = mode;
  r.power_adjust = adjusted;
  r.sinr_full_db = full;
  r.sinr_scp_db = p.rounded.sinr_db;
  r.sinr_final_rounding_db = p.rounded.final_rounding_sinr_db;
  r.selection = p.rounded.best;
  r.seed = seed;
  r.merit_trace = p.relaxed.objective_trace;
  r.rejected_steps = p.relaxed.rejected_steps;
  if (!p.relaxed.iterations.empty()) {
    for (auto it = p.relaxed.iterations.rbegin(); it != p.relaxed.iterations.rend(); ++it) {
      if (it->accepted) {
        r.max_final_slack = it->max_slack;
        break;
      }
    }
  }
  if (p.oracle) {
    r.sinr_oracle_db = p.oracle->sinr_db;
    r.oracle_selection = p.oracle->best;
  }
  return r;
}

void write_trace(const ExperimentPlan& plan, double theta, const SelectionMode& mode,
                 bool adjusted, const RelaxedSolution& relaxed) {
  std::string label = mode.label();
  for (char& ch : label)
    if (ch == ':') ch = '_';
  char name[128];
  std::snprintf(name, sizeof name, "trace_theta%+07.2f_%s%s.csv", theta, label.c_str(),
                adjusted ? "_adj" : "");
  const std::filesystem::path path = std::filesystem::path(plan.trace_dir) / name;
  std::ofstream out(path, std::ios::binary);
  out << scp_trace_csv(relaxed);
  if (!out) throw IoError("cannot write trace file " + path.string());
}

}  // namespace

ThetaGrid ThetaGrid::parse(std::string_view text) {
  const auto parts = split(text, ':');
  ThetaGrid g;
  if (parts.size() == 1) {
    g.start = g.stop = parse_number(parts[0], "azimuth");
    g.step = 1.0;
  } else if (parts.size() == 3) {
    g.start = parse_number(parts[0], "azimuth start");
    g.stop = parse_number(parts[1], "azimuth stop");
    g.step = parse_number(parts[2], "azimuth step");
  } else {
    throw InvalidArgument("azimuth grid must be START:STOP:STEP, got '" + std::string(text) + "'");
  }
  g.validate();
  return g;
}

void ThetaGrid::validate() const {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
    throw InvalidArgument("azimuth grid values must be finite");
  if (!(step > 0.0)) throw InvalidArgument("azimuth step must be positive");
  if (start > stop) throw InvalidArgument("azimuth grid is empty (start > stop)");
  if (std::abs(start) > 90.0 || std::abs(stop) > 90.0)
    throw InvalidArgument("azimuth grid must lie in [-90, 90]");
}

std::vector<double> ThetaGrid::values() const {
  validate();
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(n);
  for (long i = 0; i < n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

std::vector<SelectionMode> CardinalitySet::modes() const {
  return {SelectionMode::joint(k_joint), SelectionMode::factored(kt_factored, kr_factored),
          SelectionMode::mfc(km_mfc, kr_mfc),
          SelectionMode::hybrid(kt_hybrid, km_hybrid, kr_hybrid)};
}

const std::vector<CardinalitySet>& cardinality_table() {
  static const std::vector<CardinalitySet> table = {
      {2, 1, 2, 1, 2, 4, 1, 2},   {3, 1, 3, 1, 3, 4, 1, 3},   {4, 2, 2, 2, 2, 4, 2, 2},
      {5, 1, 5, 1, 5, 4, 1, 5},   {6, 2, 3, 2, 3, 4, 2, 3},   {8, 2, 4, 2, 4, 4, 2, 4},
      {9, 3, 3, 3, 3, 4, 3, 3},   {10, 2, 5, 2, 5, 4, 2, 5},  {12, 3, 4, 3, 4, 4, 3, 4},
      {15, 3, 5, 3, 5, 4, 3, 5},  {16, 4, 4, 4, 4, 4, 4, 4},  {20, 4, 5, 4, 5, 4, 4, 5},
      {25, 5, 5, 5, 5, 5, 5, 5},
  };
  return table;
}

void ExperimentPlan::validate() const {
  scenario.validate();
  theta.validate();
  if (modes.empty()) throw InvalidArgument("no selection modes requested");
  for (const auto& m : modes) m.validate(scenario.geometry);
  solver.validate();
  if (n_samples < 1) throw InvalidArgument("n_samples must be >= 1");
  if (threads < 1) throw InvalidArgument("threads must be >= 1");
  if (run_oracle)
    for (const auto& m : modes) check_oracle_budget(m, scenario.geometry, oracle.budget);
}

std::optional<double> SweepRow::gap_db() const {
  if (failed || !sinr_oracle_db) return std::nullopt;
  return *sinr_oracle_db - sinr_scp_db;
}

std::vector<SweepRow> run_point(const ExperimentPlan& plan, std::size_t theta_index,
                                std::size_t mode_index) {
  const double theta = plan.theta.values().at(theta_index);
  const SelectionMode& mode = plan.modes.at(mode_index);
  const bool adjust = plan.power_adjust && has_transmit_count(mode);
  const std::uint64_t stream = derive_seed(plan.seed, {theta_index, mode_index});
  std::vector<SweepRow> rows;

  double full = std::numeric_limits<double>::quiet_NaN();
  std::optional<CovarianceModel> model;
  PipelineOutput base;
  try {
    model.emplace(build_model(plan.scenario.with_target(Angle::degrees(theta))));
    const ArrayGeometry& g = model->geometry();
    full = sinr_direct(*model, SelectionVector::ones(g.M, g.N));
    base = run_pipeline(*model, mode, plan, stream);
    rows.push_back(make_row(theta, mode, false, full, base, plan.seed));
    if (!plan.trace_dir.empty()) write_trace(plan, theta, mode, false, base.relaxed);
  } catch (const std::exception& e) {
    rows.push_back(failed_row(theta, mode, false, full, plan.seed, e.what()));
    if (adjust) rows.push_back(failed_row(theta, mode, true, full, plan.seed, e.what()));
    return rows;
  }
  if (!adjust) return rows;

  try {
    const CovarianceModel adjusted = apply_power_adjustment(*model, mode.k_t, plan.adjust_scope);
    if (plan.adjust_scope == PowerAdjustScope::target_only) {
      // f does not depend on sigma_s^2, so the selections carry over and only
      // the SINR values move.
      SweepRow r = rows.front();
      r.power_adjust = true;
      r.sinr_scp_db = sinr_direct(adjusted, r.selection);
      r.sinr_final_rounding_db =
          sinr_direct(adjusted, base.rounded.final_rounding);
      if (r.oracle_selection) r.sinr_oracle_db = sinr_direct(adjusted, *r.oracle_selection);
      rows.push_back(r);
    } else {
      const PipelineOutput p = run_pipeline(adjusted, mode, plan, stream);
      rows.push_back(make_row(theta, mode, true, full, p, plan.seed));
      if (!plan.trace_dir.empty()) write_trace(plan, theta, mode, true, p.relaxed);
    }
  } catch (const std::exception& e) {
    rows.push_back(failed_row(theta, mode, true, full, plan.seed, e.what()));
  }
  return rows;
}

std::vector<SweepRow> run_sweep(const ExperimentPlan& plan) {
  plan.validate();
  if (!plan.trace_dir.empty()) std::filesystem::create_directories(plan.trace_dir);
  const std::size_t n_theta = plan.theta.values().size();
  const std::size_t n_modes = plan.modes.size();
  const std::size_t tasks = n_theta * n_modes;
  std::vector<std::vector<SweepRow>> results(tasks);

  const int threads = static_cast<int>(std::min<std::size_t>(plan.threads, tasks));
  auto work = [&](std::size_t t) { results[t] = run_point(plan, t / n_modes, t % n_modes); };
  if (threads <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) work(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i)
      pool.emplace_back([&] {
        for (std::size_t t; (t = next.fetch_add(1)) < tasks;) work(t);
      });
    for (auto& th : pool) th.join();
  }

  std::vector<SweepRow> rows;
  for (auto& r : results)
    for (auto& row : r) rows.push_back(std::move(row));
  return rows;
}

const char* const kCsvHeader =
    "theta_deg,mode,power_adjust,sinr_full_db,sinr_scp_db,sinr_oracle_db,gap_db,selection_bits,seed";

std::string format_results(const std::vector<SweepRow>& rows) {
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    append_number(out, r.theta_deg);
    out += ',';
    out += r.mode.label();
    out += r.power_adjust ? ",1," : ",0,";
    append_number(out, r.sinr_full_db);
    out += ',';
    append_number(out, r.failed ? kNan : r.sinr_scp_db);
    out += ',';
    append_number(out, r.failed ? kNan : r.sinr_oracle_db.value_or(kNan));
    out += ',';
    append_number(out, r.gap_db().value_or(kNan));
    out += ',';
    out += r.failed ? std::string("failed") : r.selection.to_bitstring();
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

void emit_results(const std::vector<SweepRow>& rows, const std::string& path) {
  if (rows.empty()) throw InvalidArgument("result table is empty");
  const std::string text = format_results(rows);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open output file " + path);
  out << text;
  out.flush();
  if (!out) throw IoError("cannot write output file " + path);
}

std::vector<CsvRecord> parse_results_csv(std::string_view text) {
  std::vector<CsvRecord> out;
  std::size_t line_no = 0;
  bool header = true;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != kCsvHeader) throw ParseError(line_no, "unexpected CSV header");
      header = false;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 9) throw ParseError(line_no, "expected 9 fields, got " + std::to_string(f.size()));
    try {
      CsvRecord r;
      r.theta_deg = parse_number(f[0], "theta_deg");
      r.mode = std::string(f[1]);
      if (f[2] != "0" && f[2] != "1") throw InvalidArgument("power_adjust must be 0 or 1");
      r.power_adjust = f[2] == "1";
      r.sinr_full_db = parse_number(f[3], "sinr_full_db");
      r.sinr_scp_db = parse_number(f[4], "sinr_scp_db");
      r.sinr_oracle_db = parse_number(f[5], "sinr_oracle_db");
      r.gap_db = parse_number(f[6], "gap_db");
      r.selection_bits = std::string(f[7]);
      const auto* end = f[8].data() + f[8].size();
      const auto res = std::from_chars(f[8].data(), end, r.seed);
      if (f[8].empty() || res.ec != std::errc() || res.ptr != end)
        throw InvalidArgument("cannot parse seed '" + std::string(f[8]) + "'");
      out.push_back(std::move(r));
    } catch (const InvalidArgument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (header) throw ParseError(0, "missing CSV header");
  return out;
}

std::vector<CsvRecord> read_results_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open results file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_results_csv(buf.str());
}

std::string gnuplot_script(const std::vector<CsvRecord>& records, const std::string& csv_path,
                           const std::string& output_png) {
  std::vector<std::pair<std::string, bool>> curves;
  for (const auto& r : records) {
    const std::pair<std::string, bool> key{r.mode, r.power_adjust};
    if (std::find(curves.begin(), curves.end(), key) == curves.end()) curves.push_back(key);
  }
  bool have_oracle = false;
  for (const auto& r : records) have_oracle = have_oracle || !std::isnan(r.sinr_oracle_db);

  std::ostringstream s;
  s << "set datafile separator ','\n";
  if (!output_png.empty()) {
    s << "set terminal pngcairo size 900,600\n";
    s << "set output '" << output_png << "'\n";
  }
  s << "set xlabel 'target azimuth (deg)'\n";
  s << "set ylabel 'output SINR (dB)'\n";
  s << "set key outside right\n";
  s << "set grid\n";
  s << "data = '" << csv_path << "'\n";
  s << "plot \\\n";
  if (curves.empty()) {
    s << "  data every ::1 using 1:4 with lines title 'full array'\n";
    return s.str();
  }
  const std::string first = curves.front().first;
  s << "  data every ::1 using 1:(strcol(2) eq '" << first
    << "' && $3 == 0 ? $4 : NaN) with lines lw 2 dt 2 title 'full array'";
  for (const auto& [mode, adj] : curves) {
    const std::string title = mode + (adj ? " (power adjusted)" : "");
    s << ", \\\n  data every ::1 using 1:(strcol(2) eq '" << mode << "' && $3 == " << (adj ? 1 : 0)
      << " ? $5 : NaN) with linespoints title '" << title << "'";
    if (have_oracle)
      s << ", \\\n  data every ::1 using 1:(strcol(2) eq '" << mode << "' && $3 == " << (adj ? 1 : 0)
        << " ? $6 : NaN) with lines dt 3 title '" << title << " exhaustive'";
  }
  s << "\n";
  return s.str();
}

}  // namespace mimosel
