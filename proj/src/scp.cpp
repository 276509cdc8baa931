#include "mimosel/scp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mimosel/errors.hpp"

namespace mimosel {

void SolverConfig::validate() const {
  if (max_outer_iterations < 1) throw InvalidArgument("max_outer_iterations must be >= 1");
  if (!(psi > 0.0)) throw InvalidArgument("psi must be positive");
  if (!(trust_radius > 0.0)) throw InvalidArgument("trust radius must be positive");
  if (!(step_tolerance >= 0.0)) throw InvalidArgument("step tolerance must be nonnegative");
  if (!(variance_floor > 0.0)) throw InvalidArgument("variance floor must be positive");
}

Surrogate build_surrogate(const CovarianceModel& model, const SelectionMode& mode,
                          const RVector& c_prev, const SolverConfig& config) {
  const ArrayGeometry& geom = model.geometry();
  const int n = static_cast<int>(geom.size());
  if (c_prev.size() != n) throw InvalidArgument("c_prev has the wrong length");
  if ((c_prev.array() < 0.0).any() || (c_prev.array() > 1.0).any())
    throw InvalidArgument("c_prev must lie in the unit box");
  mode.validate(geom);

  Surrogate s;
  s.psi = config.psi;
  s.constraints = constraints_for(mode, geom);

  // Both halves of an equality and the linearized lower bound carry a slack;
  // upper bounds stay hard.
  int slacks = 0;
  for (const auto& con : s.constraints) slacks += con.sense == Sense::eq ? 2 : con.sense == Sense::ge ? 1 : 0;

  ConvexProgram& p = s.program;
  p.num_primary = n;
  p.num_slack = slacks;
  p.logdet = LogDetTerm{model.A_s(), model.B_s()};

  const LogDetValue f2 = logdet_block(model.A_jc(), model.B_jc(), c_prev, true, false);
  p.linear = RVector::Zero(n + slacks);
  p.linear.head(n) = -f2.gradient;
  p.linear.tail(slacks).setConstant(-config.psi);
  s.constant = -f2.value + f2.gradient.dot(c_prev);

  p.lower = (c_prev.array() - config.trust_radius).max(0.0);
  p.upper = (c_prev.array() + config.trust_radius).min(1.0);

  // q is homogeneous, so its tangent at p is grad q(p)'c - q(p).
  int slack = 0;
  for (const auto& con : s.constraints) {
    const double qp = con.form.value(c_prev);
    switch (con.sense) {
      case Sense::eq:
        p.quadratic.push_back({con.form, con.bound, slack++});
        p.linear_rows.push_back({con.form.gradient(c_prev), con.bound + qp, slack++});
        break;
      case Sense::le:
        p.quadratic.push_back({con.form, con.bound, -1});
        break;
      case Sense::ge:
        p.linear_rows.push_back({con.form.gradient(c_prev), con.bound + qp, slack++});
        ++s.linearized_lower_bounds;
        break;
    }
  }
  return s;
}

double Surrogate::value(const RVector& c) const {
  const int np = program.num_primary;
  double v = constant + program.linear.head(np).dot(c);
  if (program.logdet) v += logdet_block(program.logdet->A, program.logdet->B, c, false, false).value;
  double excess = 0.0;
  for (const auto& row : program.quadratic) excess += std::max(0.0, row.form.value(c) - row.bound);
  for (const auto& row : program.linear_rows) excess += std::max(0.0, row.bound - row.a.dot(c));
  return v - psi * excess;
}

double penalized_objective(const CovarianceModel& model,
                           const std::vector<QuadraticConstraint>& constraints, double psi,
                           const RVector& c) {
  double viol = 0.0;
  for (const auto& con : constraints) viol += con.violation(c);
  return f_logdet(model, c) - psi * viol;
}

RelaxedSolution run_scp(const CovarianceModel& model, const SelectionMode& mode,
                        const SolverConfig& config) {
  config.validate();
  const ArrayGeometry& geom = model.geometry();
  mode.validate(geom);
  const int n = static_cast<int>(geom.size());
  const auto constraints = constraints_for(mode, geom);

  RVector c;
  if (config.warm_start) {
    if (config.warm_start->size() != n) throw InvalidArgument("warm start has the wrong length");
    c = config.warm_start->cwiseMax(0.0).cwiseMin(1.0);
    // Shrink toward 0 until the hard (convex) rows hold strictly.
    double scale = 1.0;
    for (const auto& con : constraints) {
      if (con.sense == Sense::ge) continue;
      const double q = con.form.value(c);
      if (q > 0.0) scale = std::min(scale, std::sqrt(0.99 * con.bound / q));
    }
    c *= scale;
  } else {
    c = RVector::Constant(n, static_cast<double>(mode.total()) / n);
  }

  RelaxedSolution out;
  out.history.push_back(c);
  double merit = penalized_objective(model, constraints, config.psi, c);
  out.objective_trace.push_back(merit);

  for (int l = 1; l <= config.max_outer_iterations; ++l) {
    const Surrogate sur = build_surrogate(model, mode, c, config);
    const BarrierResult res = solve_convex_subproblem(sur.program, config.barrier, c);
    const RVector next = res.x.head(n).cwiseMax(0.0).cwiseMin(1.0);

    ScpIteration rec;
    rec.iteration = l;
    rec.surrogate = res.objective + sur.constant;
    rec.max_slack = sur.program.num_slack > 0 ? res.x.tail(sur.program.num_slack).maxCoeff() : 0.0;
    rec.step_norm = (next - c).norm();
    rec.duality_measure = res.duality_measure;

    const double next_merit = penalized_objective(model, constraints, config.psi, next);
    if (next_merit < merit) {
      // The subproblem at c would be rebuilt identically, so stop here.
      rec.accepted = false;
      rec.objective = merit;
      out.iterations.push_back(rec);
      ++out.rejected_steps;
      break;
    }
    rec.objective = next_merit;
    out.iterations.push_back(rec);
    c = next;
    merit = next_merit;
    out.history.push_back(c);
    out.objective_trace.push_back(merit);
    if (rec.step_norm < config.step_tolerance) break;
  }

  out.c_star = c;
  const double count = static_cast<double>(out.history.size());
  RVector mean = RVector::Zero(n);
  for (const auto& h : out.history) mean += h;
  mean /= count;
  RVector var = RVector::Zero(n);
  for (const auto& h : out.history) var += (h - mean).array().square().matrix();
  var /= count;
  out.sigma_diag = var.cwiseMax(config.variance_floor);
  return out;
}

std::string scp_trace_csv(const RelaxedSolution& solution) {
  std::string out = "iteration,objective,surrogate,max_slack,step_norm,duality_measure,accepted\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "0,%.12g,,,,,1\n", solution.objective_trace.front());
  out += buf;
  for (const auto& it : solution.iterations) {
    std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.6g,%.6g,%.3g,%d\n", it.iteration, it.objective,
                  it.surrogate, it.max_slack, it.step_norm, it.duality_measure, it.accepted ? 1 : 0);
    out += buf;
  }
  return out;
}

}  // namespace mimosel
