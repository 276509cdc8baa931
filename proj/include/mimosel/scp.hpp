#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mimosel/convex_solver.hpp"
#include "mimosel/interference_model.hpp"
#include "mimosel/selection.hpp"

namespace mimosel {

struct SolverConfig {
  int max_outer_iterations = 10;
  double psi = 10.0;
  /// Half-width of the box |c - c_prev| <= radius. 1 leaves only [0, 1].
  double trust_radius = 1.0;
  /// Stop once ||c^(l) - c^(l-1)|| falls below this.
  double step_tolerance = 1e-7;
  double variance_floor = 1e-4;
  BarrierConfig barrier;
  std::optional<RVector> warm_start;

  void validate() const;
};

/// One convexified subproblem around c_prev. Variables are (c, slacks). The
/// convex rows (upper bounds and the convex half of each equality) are hard
/// constraints; each linearized row carries one penalized slack.
struct Surrogate {
  ConvexProgram program;
  /// Added to program.objective() to give the surrogate value.
  double constant = 0.0;
  double psi = 0.0;
  std::vector<QuadraticConstraint> constraints;
  /// Number of linearized lower-bound rows coming from "ge" constraints.
  int linearized_lower_bounds = 0;

  /// Surrogate at c with every slack at its smallest feasible value and hard
  /// rows penalized like slacked ones. Never exceeds penalized_objective(c);
  /// equal at c = c_prev.
  double value(const RVector& c) const;
};

Surrogate build_surrogate(const CovarianceModel& model, const SelectionMode& mode,
                          const RVector& c_prev, const SolverConfig& config = {});

/// f(c) - psi * (total constraint violation): the exact-penalty merit.
double penalized_objective(const CovarianceModel& model,
                           const std::vector<QuadraticConstraint>& constraints, double psi,
                           const RVector& c);

struct ScpIteration {
  int iteration = 0;
  /// Penalized objective at the accepted iterate.
  double objective = 0.0;
  /// Optimal surrogate value of the subproblem.
  double surrogate = 0.0;
  double max_slack = 0.0;
  double step_norm = 0.0;
  double duality_measure = 0.0;
  bool accepted = true;
};

struct RelaxedSolution {
  RVector c_star;
  /// Outer iterates, starting with the initial point.
  std::vector<RVector> history;
  RVector sigma_diag;
  /// Penalized objective of each history entry.
  std::vector<double> objective_trace;
  std::vector<ScpIteration> iterations;
  int rejected_steps = 0;
};

RelaxedSolution run_scp(const CovarianceModel& model, const SelectionMode& mode,
                        const SolverConfig& config = {});

/// iteration,objective,surrogate,max_slack,step_norm,duality_measure,accepted
std::string scp_trace_csv(const RelaxedSolution& solution);

}  // namespace mimosel
