// Acceptance run over the ten contract criteria. Prints one PASS/FAIL line
// per criterion and exits nonzero if any fails. Pass criterion numbers as
// arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mimosel/experiment.hpp"
#include "mimosel/oracle.hpp"
#include "mimosel/rng.hpp"
#include "mimosel/scenario_io.hpp"
#include "test_support.hpp"

using namespace mimosel;
using namespace mimosel::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const std::vector<SelectionMode> kReferenceModes = {SelectionMode::joint(12), SelectionMode::factored(3, 4),
                                                SelectionMode::mfc(3, 4), SelectionMode::hybrid(4, 3, 4)};

Outcome determinant_identity() {
  const auto t0 = Clock::now();
  Rng rng(20240101);
  std::vector<CovarianceModel> models = {build_model(reference_5x5(18.0))};
  for (int i = 0; i < 5; ++i) models.push_back(build_model(random_scenario(rng, 2 + i % 4, 2 + (i + 1) % 4)));
  double worst = 0.0;
  for (const auto& model : models) {
    for (int t = 0; t < 200; ++t) {
      const auto c = random_nonzero_selection(rng, model.geometry().M, model.geometry().N);
      const double direct = db_to_linear(sinr_direct(model, c));
      const double det = model.sigma_s2() / model.sigma_n2() * h_ratio(model, c.to_real());
      worst = std::max(worst, rel_diff(direct, det));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && secs < 10.0,
          fmt("6 scenarios x 200 selections, max rel diff %.2e, %.2f s", worst, secs)};
}

Outcome factored_characterization() {
  const auto t0 = Clock::now();
  long checked = 0, mismatches = 0;
  for (int dim : {2, 3}) {
    for (int kt = 1; kt <= dim; ++kt)
      for (int kr = 1; kr <= dim; ++kr)
        for (std::uint64_t mask = 0; mask < (1ULL << (dim * dim)); ++mask) {
          const auto c = SelectionVector::from_mask(mask, dim, dim);
          ++checked;
          if (factored_quadratic_membership(c, kt, kr).all() != is_feasible(c, SelectionMode::factored(kt, kr)))
            ++mismatches;
        }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 5.0,
          fmt("%ld (c, k_t, k_r) cases, %ld mismatches, %.2f s", checked, mismatches, secs)};
}

Outcome hybrid_bounds() {
  const ArrayGeometry g{4, 4, 2.0, 0.5};
  const int kt = 3, km = 2, kr = 3;
  long count = 0, violations = 0;
  auto qt = [&](std::uint64_t mask) {
    long q = 0;
    for (int m = 0; m < 4; ++m) {
      const long col = std::popcount((mask >> (4 * m)) & 0xFULL);
      q += col * col;
    }
    return q;
  };
  enumerate_feasible(SelectionMode::hybrid(kt, km, kr), g, [&](std::uint64_t mask) {
    ++count;
    const long q = qt(mask);
    // (k_r k_m)^2 / k_t <= q  <=>  (k_r k_m)^2 <= k_t q
    if (long(kr * km) * (kr * km) > long(kt) * q || q > long(kr) * kr * km) ++violations;
  });
  // With k_m = k_t the upper bound k_r^2 k_m is reached.
  long top = 0, count_eq = 0, violations_eq = 0;
  enumerate_feasible(SelectionMode::hybrid(kt, kt, kr), g, [&](std::uint64_t mask) {
    ++count_eq;
    const long q = qt(mask);
    top = std::max(top, q);
    if (long(kr * kt) * (kr * kt) > long(kt) * q || q > long(kr) * kr * kt) ++violations_eq;
  });
  const bool attained = top == long(kr) * kr * kt;
  return {count > 0 && violations == 0 && violations_eq == 0 && attained,
          fmt("%ld hybrid(3,2,3) and %ld hybrid(3,3,3) selections, %ld violations, max c'Q_t c = %ld (bound %d)",
              count, count_eq, violations + violations_eq, top, kr * kr * kt)};
}

std::map<std::string, double> oracle_cache;

double cached_oracle(const CovarianceModel& model, const SelectionMode& mode, double theta) {
  const std::string key = fmt("%s@%.3f", mode.label().c_str(), theta);
  auto it = oracle_cache.find(key);
  if (it != oracle_cache.end()) return it->second;
  const double v = exhaustive_optimum(model, mode).sinr_db;
  oracle_cache[key] = v;
  return v;
}

Outcome mode_ordering() {
  const auto t0 = Clock::now();
  const auto model = build_model(reference_5x5(18.0));
  double v[4];
  for (int i = 0; i < 4; ++i) v[i] = cached_oracle(model, kReferenceModes[i], 18.0);
  const double jnt = v[0], fct = v[1], mfc = v[2], hyb = v[3];
  const double eps = 1e-9;
  const bool ok = fct <= hyb + eps && hyb <= mfc + eps && mfc <= jnt + eps;
  return {ok, fmt("theta 18: fct %.4f <= hyb %.4f <= mfc %.4f <= jnt %.4f dB, %.1f s", fct, hyb, mfc, jnt,
                  seconds_since(t0))};
}

struct QualitySweep {
  std::vector<SweepRow> rows;
  double sweep_seconds = 0.0;
  double joint_oracle_seconds = 0.0;
  double other_oracle_seconds = 0.0;
  // by mode label: gaps over theta
  std::map<std::string, std::vector<double>> gaps;
  std::map<std::string, std::pair<double, double>> worst;  // label -> (gap, theta)
};

const QualitySweep& quality_sweep() {
  static QualitySweep q = [] {
    QualitySweep out;
    ExperimentPlan plan;
    plan.scenario = parse_scenario(scenario_path("reference_5x5.scn"));
    plan.modes = kReferenceModes;
    plan.theta = ThetaGrid::parse("0:90:2");
    plan.n_samples = 1000;
    plan.power_adjust = true;
    plan.seed = 1;
    auto t0 = Clock::now();
    out.rows = run_sweep(plan);
    out.sweep_seconds = seconds_since(t0);

    std::ofstream csv("acceptance_5x5.csv");
    for (auto& r : out.rows) {
      if (r.failed) continue;
      const auto model = build_model(plan.scenario.with_target(Angle::degrees(r.theta_deg)));
      t0 = Clock::now();
      double o = cached_oracle(model, r.mode, r.theta_deg);
      (r.mode.kind == ModeKind::joint ? out.joint_oracle_seconds : out.other_oracle_seconds) += seconds_since(t0);
      if (r.power_adjust) o += 10.0 * std::log10(double(plan.scenario.geometry.M) / r.mode.k_t);
      r.sinr_oracle_db = o;
      if (r.power_adjust) continue;
      const double gap = o - r.sinr_scp_db;
      const std::string label = r.mode.label();
      out.gaps[label].push_back(gap);
      auto& w = out.worst[label];
      if (out.gaps[label].size() == 1 || gap > w.first) w = {gap, r.theta_deg};
    }
    csv << format_results(out.rows);
    return out;
  }();
  return q;
}

Outcome relaxation_quality() {
  const auto& q = quality_sweep();
  bool ok = q.sweep_seconds + q.other_oracle_seconds < 15 * 60.0;
  std::string detail;
  int failed = 0;
  for (const auto& r : q.rows) failed += r.failed;
  ok = ok && failed == 0;
  for (const auto& mode : kReferenceModes) {
    const auto it = q.gaps.find(mode.label());
    if (it == q.gaps.end() || it->second.size() != 46) {
      ok = false;
      detail += mode.label() + ": missing rows; ";
      continue;
    }
    const double med = median(it->second);
    const auto [worst, theta] = q.worst.at(mode.label());
    const bool mode_ok = med <= 0.5 && worst <= 2.0;
    ok = ok && mode_ok;
    detail += fmt("%s median %.3f max %.3f (theta %.0f)%s; ", mode.label().c_str(), med, worst, theta,
                  mode_ok ? "" : " OUT OF BOUNDS");
  }
  detail += fmt("%d failed rows; sweep %.0f s, oracles %.0f s + joint %.0f s", failed, q.sweep_seconds,
                q.other_oracle_seconds, q.joint_oracle_seconds);
  return {ok, detail};
}

Outcome power_adjustment() {
  const auto& q = quality_sweep();
  const double shift53 = 10.0 * std::log10(5.0 / 3.0);
  double worst = 0.0;
  int pairs = 0, surpass_checks = 0, surpass_ok = 0;
  std::map<double, double> joint_oracle;
  for (const auto& r : q.rows)
    if (r.mode.kind == ModeKind::joint && r.sinr_oracle_db) joint_oracle[r.theta_deg] = *r.sinr_oracle_db;
  for (std::size_t i = 1; i < q.rows.size(); ++i) {
    const auto& r = q.rows[i];
    if (!r.power_adjust) continue;
    const auto& base = q.rows[i - 1];
    const double expect = 10.0 * std::log10(5.0 / r.mode.k_t);
    worst = std::max(worst, std::abs(r.sinr_scp_db - base.sinr_scp_db - expect));
    ++pairs;
    const double jnt = joint_oracle.at(r.theta_deg);
    if (jnt - *base.sinr_oracle_db < expect) {
      ++surpass_checks;
      surpass_ok += *r.sinr_oracle_db > jnt;
    }
  }
  const bool ok = pairs == 92 && worst <= 1e-12 && std::abs(shift53 - 2.2185) < 5e-5 && surpass_ok == surpass_checks;
  return {ok, fmt("%d adjusted rows, max |shift - 10log10(M/k_t)| = %.1e dB, 10log10(5/3) = %.4f dB, "
                  "adjusted optimum beats joint at %d/%d angles where the gap is below the shift",
                  pairs, worst, shift53, surpass_ok, surpass_checks)};
}

Outcome gradient_check() {
  Rng rng(777);
  double worst = 0.0;
  for (int s = 0; s < 5; ++s) {
    const auto model = build_model(random_scenario(rng, 2 + s % 4, 2 + (s + 2) % 4));
    const int n = static_cast<int>(model.size());
    for (int t = 0; t < 20; ++t) {
      const RVector c = random_box_point(rng, n, 0.05, 0.95);
      const RVector g = grad_f(model, c);
      RVector fd(n);
      for (int i = 0; i < n; ++i) {
        RVector cp = c, cm = c;
        cp[i] += 1e-6;
        cm[i] -= 1e-6;
        fd[i] = (f_logdet(model, cp) - f_logdet(model, cm)) / 2e-6;
      }
      worst = std::max(worst, (g - fd).norm() / fd.norm());
    }
  }
  return {worst <= 1e-5, fmt("100 points over 5 scenarios, max relative error %.2e", worst)};
}

Outcome ccp_monotonicity() {
  const auto& q = quality_sweep();
  double worst = 0.0;
  int runs = 0;
  for (const auto& r : q.rows) {
    if (r.power_adjust || r.failed) continue;
    ++runs;
    for (std::size_t i = 1; i < r.merit_trace.size(); ++i)
      worst = std::min(worst, r.merit_trace[i] - r.merit_trace[i - 1]);
  }
  return {runs == 184 && worst >= -1e-9, fmt("%d runs, most negative step %.2e", runs, worst)};
}

Outcome joint_loss() {
  const auto t0 = Clock::now();
  const auto model = build_model(reference_5x5(18.0));
  const double full = sinr_direct(model, SelectionVector::ones(5, 5));
  std::vector<double> loss;
  std::string trail;
  for (int k = 15; k <= 25; ++k) {
    loss.push_back(full - exhaustive_optimum(model, SelectionMode::joint(k)).sinr_db);
    trail += fmt("%s%d:%.3f", k == 15 ? "" : " ", k, loss.back());
  }
  bool monotone = true;
  for (std::size_t i = 1; i < loss.size(); ++i) monotone = monotone && loss[i] <= loss[i - 1] + 1e-12;
  const bool ok = loss.front() <= 1.0 && monotone && std::abs(loss.back()) <= 1e-9;
  return {ok, fmt("loss by k [%s] dB, %.0f s", trail.c_str(), seconds_since(t0))};
}

Outcome scaled_experiment() {
  const auto t0 = Clock::now();
  ExperimentPlan plan;
  plan.scenario = parse_scenario(scenario_path("reference_10x10.scn"));
  plan.modes = {SelectionMode::joint(54), SelectionMode::factored(6, 9), SelectionMode::mfc(6, 9),
                SelectionMode::hybrid(7, 6, 9)};
  plan.theta = ThetaGrid::parse("0:30:2");
  plan.n_samples = 1000;
  plan.seed = 1;
  const auto rows = run_sweep(plan);
  std::ofstream("acceptance_10x10.csv") << format_results(rows);
  int failed = 0, infeasible = 0;
  std::map<double, std::map<ModeKind, double>> by_theta;
  for (const auto& r : rows) {
    if (r.failed) {
      ++failed;
      continue;
    }
    infeasible += !is_feasible(r.selection, r.mode);
    by_theta[r.theta_deg][r.mode.kind] = r.sinr_scp_db;
  }
  int ordered = 0, jm = 0, mh = 0, hf = 0;
  for (auto& [theta, v] : by_theta) {
    if (v.size() != 4) continue;
    const bool a = v[ModeKind::joint] >= v[ModeKind::mfc], b = v[ModeKind::mfc] >= v[ModeKind::hybrid],
               c = v[ModeKind::hybrid] >= v[ModeKind::factored];
    jm += a;
    mh += b;
    hf += c;
    ordered += a && b && c;
  }
  const int points = static_cast<int>(plan.theta.values().size());
  const bool ok = failed == 0 && infeasible == 0 && ordered >= 0.8 * points;
  return {ok, fmt("%zu rows, %d failed, %d infeasible; full ordering at %d/%d angles "
                  "(jnt>=mfc %d, mfc>=hyb %d, hyb>=fct %d), %.0f s",
                  rows.size(), failed, infeasible, ordered, points, jm, mh, hf, seconds_since(t0))};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"determinant identity", determinant_identity},
      {"factored quadratic-set characterization", factored_characterization},
      {"hybrid transmit-form bounds", hybrid_bounds},
      {"oracle mode ordering", mode_ordering},
      {"relaxation quality", relaxation_quality},
      {"power adjustment shift", power_adjustment},
      {"gradient vs finite differences", gradient_check},
      {"CCP monotonicity", ccp_monotonicity},
      {"joint selection loss", joint_loss},
      {"10x10 scaled experiment", scaled_experiment},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
