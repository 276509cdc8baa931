#pragma once

#include <optional>
#include <vector>

#include "mimosel/selection.hpp"
#include "mimosel/types.hpp"

namespace mimosel {

/// log det(A^H diag(c) A + diag(B)) over the primary variables c.
struct LogDetTerm {
  CMatrix A;
  RVector B;
};

/// form(c) - slack <= bound. slack < 0 means the row has no slack variable.
struct QuadraticRow {
  QuadraticForm form;
  double bound = 0.0;
  int slack = -1;
};

/// a'c + slack >= bound.
struct LinearRow {
  RVector a;
  double bound = 0.0;
  int slack = -1;
};

/// A concave maximization over x = (c, s) with c the primary variables and s
/// nonnegative slacks:
///
///   maximize   logdet-term(c) + linear'x - 1/2 sum_i w_i (c_i - z_i)^2
///   subject to lower <= c <= upper, s >= 0, quadratic rows, linear rows,
///              E c = e.
struct ConvexProgram {
  int num_primary = 0;
  int num_slack = 0;
  std::optional<LogDetTerm> logdet;
  RVector linear;       // size num_primary + num_slack, or empty for zero
  RVector prox_weight;  // size num_primary, or empty
  RVector prox_center;
  RVector lower;  // size num_primary; -inf allowed
  RVector upper;  // +inf allowed
  std::vector<QuadraticRow> quadratic;
  std::vector<LinearRow> linear_rows;
  RMatrix eq_matrix;  // rows x num_primary, may be empty
  RVector eq_rhs;

  int num_variables() const noexcept { return num_primary + num_slack; }
  /// Objective value at x (the quantity being maximized). Throws
  /// NotPositiveDefinite outside the log-det domain.
  double objective(const RVector& x) const;
  /// Largest constraint violation at x (0 when feasible).
  double max_violation(const RVector& x) const;
};

struct BarrierConfig {
  double t0 = 1.0;
  double growth = 10.0;
  /// Stop when the duality measure m / t falls below this.
  double tolerance = 1e-7;
  double newton_tolerance = 1e-8;
  int max_newton_per_stage = 200;
  int max_newton_total = 5000;
};

struct BarrierResult {
  RVector x;
  double objective = 0.0;
  /// m / t at termination: a bound on the gap to the optimum.
  double duality_measure = 0.0;
  int newton_iterations = 0;
  int stages = 0;
};

/// Primal log-barrier method with damped Newton centering. `start` may hold
/// only the primary part; it is moved strictly inside the bounds and slacks
/// are initialized to cover any violation.
///
/// Throws InfeasibleProgram when no strictly feasible start can be formed
/// (conflicting bounds, a violated slack-free row), NotPositiveDefinite when
/// the log-det term is singular at the start, NonConvergence when the Newton
/// budget is exhausted.
BarrierResult solve_convex_subproblem(const ConvexProgram& program, const BarrierConfig& config,
                                      const std::optional<RVector>& start = std::nullopt);

}  // namespace mimosel
