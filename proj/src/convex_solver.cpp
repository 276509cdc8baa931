#include "mimosel/convex_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mimosel/errors.hpp"
#include "mimosel/interference_model.hpp"

namespace mimosel {

namespace {

constexpr double kArmijo = 0.01;
constexpr double kShrink = 0.5;
// Accepted steps this short make no measurable progress.
constexpr double kStallStep = 1e-8;
// Newton decrement squared below which a full step is safe.
constexpr double kQuadraticRegion = 0.0625;

struct Derivatives {
  double value = 0.0;
  RVector grad;
  RMatrix hess;
};

class BarrierProblem {
 public:
  explicit BarrierProblem(const ConvexProgram& p) : p_(p), n_(p.num_variables()) {}

  int barrier_terms() const {
    int m = p_.num_slack + static_cast<int>(p_.quadratic.size() + p_.linear_rows.size());
    for (int i = 0; i < p_.num_primary; ++i) {
      m += std::isfinite(p_.lower[i]);
      m += std::isfinite(p_.upper[i]);
    }
    return m;
  }

  // -(objective) and its derivatives. nullopt outside the log-det domain.
  std::optional<double> negated_objective(const RVector& x, RVector* grad, RMatrix* hess) const {
    const auto c = x.head(p_.num_primary);
    double v = 0.0;
    if (grad) grad->setZero(n_);
    if (hess) hess->setZero(n_, n_);
    if (p_.logdet) {
      LogDetValue ld;
      try {
        ld = logdet_block(p_.logdet->A, p_.logdet->B, c, grad != nullptr, hess != nullptr);
      } catch (const NotPositiveDefinite&) {
        return std::nullopt;
      }
      v -= ld.value;
      if (grad) grad->head(p_.num_primary) -= ld.gradient;
      if (hess) hess->topLeftCorner(p_.num_primary, p_.num_primary) -= ld.hessian;
    }
    if (p_.linear.size() > 0) {
      v -= p_.linear.dot(x);
      if (grad) *grad -= p_.linear;
    }
    if (p_.prox_weight.size() > 0) {
      const RVector d = c - p_.prox_center;
      v += 0.5 * (p_.prox_weight.array() * d.array().square()).sum();
      if (grad) grad->head(p_.num_primary) += p_.prox_weight.cwiseProduct(d);
      if (hess) hess->diagonal().head(p_.num_primary) += p_.prox_weight;
    }
    return v;
  }

  // Log barrier. nullopt when x is not strictly feasible.
  std::optional<double> barrier(const RVector& x, RVector* grad, RMatrix* hess) const {
    const int np = p_.num_primary;
    const auto c = x.head(np);
    double v = 0.0;
    if (grad) grad->setZero(n_);
    if (hess) hess->setZero(n_, n_);

    auto scalar_term = [&](int i, double d, double sign) {
      // -log(d) with d = sign * x_i + const
      v -= std::log(d);
      if (grad) (*grad)[i] -= sign / d;
      if (hess) (*hess)(i, i) += 1.0 / (d * d);
    };
    for (int i = 0; i < np; ++i) {
      if (std::isfinite(p_.lower[i])) {
        const double d = c[i] - p_.lower[i];
        if (!(d > 0.0)) return std::nullopt;
        scalar_term(i, d, 1.0);
      }
      if (std::isfinite(p_.upper[i])) {
        const double d = p_.upper[i] - c[i];
        if (!(d > 0.0)) return std::nullopt;
        scalar_term(i, d, -1.0);
      }
    }
    for (int j = 0; j < p_.num_slack; ++j) {
      const double d = x[np + j];
      if (!(d > 0.0)) return std::nullopt;
      scalar_term(np + j, d, 1.0);
    }

    RVector gd(n_);
    for (const QuadraticRow& row : p_.quadratic) {
      const double s = row.slack >= 0 ? x[np + row.slack] : 0.0;
      const double d = row.bound + s - row.form.value(c);
      if (!(d > 0.0)) return std::nullopt;
      v -= std::log(d);
      if (!grad && !hess) continue;
      gd.setZero();
      gd.head(np) = -row.form.gradient(c);
      if (row.slack >= 0) gd[np + row.slack] = 1.0;
      if (grad) *grad -= gd / d;
      if (hess) {
        hess->noalias() += (gd / (d * d)) * gd.transpose();
        RMatrix& H = *hess;
        row.form.add_hessian(H, 1.0 / d);
      }
    }
    for (const LinearRow& row : p_.linear_rows) {
      const double s = row.slack >= 0 ? x[np + row.slack] : 0.0;
      const double d = row.a.dot(c) + s - row.bound;
      if (!(d > 0.0)) return std::nullopt;
      v -= std::log(d);
      if (!grad && !hess) continue;
      gd.setZero();
      gd.head(np) = row.a;
      if (row.slack >= 0) gd[np + row.slack] = 1.0;
      if (grad) *grad -= gd / d;
      if (hess) hess->noalias() += (gd / (d * d)) * gd.transpose();
    }
    return v;
  }

  // t * (-objective) + barrier.
  std::optional<double> centering(const RVector& x, double t, RVector* grad, RMatrix* hess) const {
    RVector g0, g1;
    RMatrix h0, h1;
    const auto b = barrier(x, grad ? &g1 : nullptr, hess ? &h1 : nullptr);
    if (!b) return std::nullopt;
    const auto o = negated_objective(x, grad ? &g0 : nullptr, hess ? &h0 : nullptr);
    if (!o) return std::nullopt;
    if (grad) *grad = t * g0 + g1;
    if (hess) *hess = t * h0 + h1;
    return t * *o + *b;
  }

 private:
  const ConvexProgram& p_;
  int n_;
};

void check_shapes(const ConvexProgram& p) {
  const int np = p.num_primary;
  if (np < 1) throw InvalidArgument("convex program needs at least one primary variable");
  if (p.num_slack < 0) throw InvalidArgument("negative slack count");
  if (p.lower.size() != np || p.upper.size() != np)
    throw InvalidArgument("bounds must have one entry per primary variable");
  if (p.linear.size() != 0 && p.linear.size() != p.num_variables())
    throw InvalidArgument("linear objective has the wrong length");
  if (p.prox_weight.size() != 0 &&
      (p.prox_weight.size() != np || p.prox_center.size() != np))
    throw InvalidArgument("proximity term has the wrong length");
  if (p.logdet && p.logdet->A.rows() != np)
    throw InvalidArgument("log-det term must have one row per primary variable");
  for (const auto& row : p.quadratic)
    if (row.slack >= p.num_slack) throw InvalidArgument("quadratic row slack index out of range");
  for (const auto& row : p.linear_rows) {
    if (row.slack >= p.num_slack) throw InvalidArgument("linear row slack index out of range");
    if (row.a.size() != np) throw InvalidArgument("linear row has the wrong length");
  }
  if (p.eq_matrix.size() != 0 && (p.eq_matrix.cols() != np || p.eq_matrix.rows() != p.eq_rhs.size()))
    throw InvalidArgument("equality constraints have the wrong shape");
}

RVector initial_point(const ConvexProgram& p, const std::optional<RVector>& start) {
  const int np = p.num_primary;
  RVector x = RVector::Zero(p.num_variables());
  RVector c(np);
  for (int i = 0; i < np; ++i) {
    const double lo = p.lower[i], hi = p.upper[i];
    if (!(lo < hi)) {
      throw InfeasibleProgram("bounds of variable " + std::to_string(i) + " leave no interior (" +
                              std::to_string(lo) + " >= " + std::to_string(hi) + ")");
    }
    double v;
    if (start && start->size() >= np) {
      v = (*start)[i];
    } else if (std::isfinite(lo) && std::isfinite(hi)) {
      v = 0.5 * (lo + hi);
    } else if (std::isfinite(lo)) {
      v = lo + 1.0;
    } else if (std::isfinite(hi)) {
      v = hi - 1.0;
    } else {
      v = 0.0;
    }
    // Points already strictly inside stay put, so a start that satisfies
    // the slack-free rows keeps satisfying them.
    if (!(v > lo && v < hi)) {
      const double span = hi - lo;
      const double margin = std::isfinite(span) ? std::min(1e-4, 0.25 * span) : 1e-4;
      if (std::isfinite(lo)) v = std::max(v, lo + margin);
      if (std::isfinite(hi)) v = std::min(v, hi - margin);
    }
    c[i] = v;
  }
  if (p.eq_matrix.size() != 0) {
    const RMatrix& E = p.eq_matrix;
    const RVector r = E * c - p.eq_rhs;
    c -= E.transpose() * (E * E.transpose()).ldlt().solve(r);
    if ((E * c - p.eq_rhs).norm() > 1e-9 * (1.0 + p.eq_rhs.norm()))
      throw InfeasibleProgram("equality constraints are inconsistent");
    for (int i = 0; i < np; ++i)
      if (!(c[i] > p.lower[i] && c[i] < p.upper[i]))
        throw InfeasibleProgram("no strictly feasible point found on the equality constraints");
  }
  x.head(np) = c;

  // Slacks cover whatever the start violates, plus a unit margin.
  RVector need = RVector::Zero(p.num_slack);
  for (const auto& row : p.quadratic) {
    const double excess = row.form.value(c) - row.bound;
    if (row.slack >= 0) {
      need[row.slack] = std::max(need[row.slack], excess);
    } else if (!(excess < 0.0)) {
      throw InfeasibleProgram("start point violates slack-free constraint " + row.form.name());
    }
  }
  for (const auto& row : p.linear_rows) {
    const double excess = row.bound - row.a.dot(c);
    if (row.slack >= 0) {
      need[row.slack] = std::max(need[row.slack], excess);
    } else if (!(excess < 0.0)) {
      throw InfeasibleProgram("start point violates a slack-free linear constraint");
    }
  }
  for (int j = 0; j < p.num_slack; ++j) x[np + j] = 1.0 + std::max(0.0, need[j]);
  return x;
}

// Newton step, with the equality constraints (if any) as a KKT system.
RVector newton_step(const ConvexProgram& p, const RMatrix& H, const RVector& g) {
  const Eigen::Index n = H.rows();
  if (p.eq_matrix.size() == 0) {
    Eigen::LLT<RMatrix> llt(H);
    if (llt.info() == Eigen::Success) return -llt.solve(g);
    // Roundoff can cost H its definiteness at large t; a small diagonal shift
    // keeps the step a descent direction.
    double shift = 1e-14 * std::max(H.diagonal().cwiseAbs().maxCoeff(), 1.0);
    for (int attempt = 0; attempt < 16; ++attempt, shift *= 10.0) {
      RMatrix shifted = H;
      shifted.diagonal().array() += shift;
      llt.compute(shifted);
      if (llt.info() == Eigen::Success) return -llt.solve(g);
    }
    return -H.ldlt().solve(g);
  }
  const Eigen::Index me = p.eq_matrix.rows();
  RMatrix K = RMatrix::Zero(n + me, n + me);
  K.topLeftCorner(n, n) = H;
  K.block(n, 0, me, p.num_primary) = p.eq_matrix;
  K.block(0, n, p.num_primary, me) = p.eq_matrix.transpose();
  RVector rhs = RVector::Zero(n + me);
  rhs.head(n) = -g;
  return K.partialPivLu().solve(rhs).head(n);
}

}  // namespace

double ConvexProgram::objective(const RVector& x) const {
  const auto c = x.head(num_primary);
  double v = 0.0;
  if (logdet) v += logdet_block(logdet->A, logdet->B, c, false, false).value;
  if (linear.size() > 0) v += linear.dot(x);
  if (prox_weight.size() > 0)
    v -= 0.5 * (prox_weight.array() * (c - prox_center).array().square()).sum();
  return v;
}

double ConvexProgram::max_violation(const RVector& x) const {
  const auto c = x.head(num_primary);
  double worst = 0.0;
  for (int i = 0; i < num_primary; ++i) {
    worst = std::max(worst, lower[i] - c[i]);
    worst = std::max(worst, c[i] - upper[i]);
  }
  for (int j = 0; j < num_slack; ++j) worst = std::max(worst, -x[num_primary + j]);
  for (const auto& row : quadratic) {
    const double s = row.slack >= 0 ? x[num_primary + row.slack] : 0.0;
    worst = std::max(worst, row.form.value(c) - s - row.bound);
  }
  for (const auto& row : linear_rows) {
    const double s = row.slack >= 0 ? x[num_primary + row.slack] : 0.0;
    worst = std::max(worst, row.bound - row.a.dot(c) - s);
  }
  if (eq_matrix.size() != 0) worst = std::max(worst, (eq_matrix * c - eq_rhs).cwiseAbs().maxCoeff());
  return worst;
}

BarrierResult solve_convex_subproblem(const ConvexProgram& program, const BarrierConfig& config,
                                      const std::optional<RVector>& start) {
  check_shapes(program);
  if (!(config.t0 > 0.0) || !(config.growth > 1.0) || !(config.tolerance > 0.0))
    throw InvalidArgument("barrier parameters must be positive (growth > 1)");

  const BarrierProblem problem(program);
  RVector x = initial_point(program, start);
  if (!problem.negated_objective(x, nullptr, nullptr))
    throw NotPositiveDefinite("log-det term is not positive definite at the start point");

  const int m = std::max(1, problem.barrier_terms());
  BarrierResult result;
  double t = config.t0;
  RVector g;
  RMatrix H;

  while (true) {
    ++result.stages;
    double previous = std::numeric_limits<double>::infinity();
    for (int it = 0; it < config.max_newton_per_stage; ++it) {
      const auto value = problem.centering(x, t, &g, &H);
      if (!value) throw NonConvergence("barrier iterate left the domain");
      const RVector dx = newton_step(program, H, g);
      const double decrement2 = -g.dot(dx);
      if (!std::isfinite(decrement2)) throw NonConvergence("Newton system is singular");
      if (decrement2 / 2.0 <= config.newton_tolerance) break;
      // Inside the quadratic region the decrement must shrink fast; when it
      // does not, roundoff dominates and x is centered to working precision.
      const bool quadratic = decrement2 < kQuadraticRegion;
      if (quadratic && decrement2 > 0.25 * previous) break;
      previous = decrement2;
      if (++result.newton_iterations > config.max_newton_total)
        throw NonConvergence("barrier method exceeded " + std::to_string(config.max_newton_total) +
                             " Newton iterations");

      double step = 1.0;
      bool moved = false;
      while (step > 1e-14) {
        const RVector trial = x + step * dx;
        const auto tv = problem.centering(trial, t, nullptr, nullptr);
        // The centering function is self-concordant, so a full step from the
        // quadratic region is a descent step; Armijo comparisons at large t
        // would only measure roundoff.
        if (tv && (quadratic || *tv <= *value - kArmijo * step * decrement2)) {
          x = trial;
          moved = true;
          break;
        }
        step *= kShrink;
      }
      if (!moved || step < kStallStep) break;
    }
    result.duality_measure = m / t;
    if (result.duality_measure < config.tolerance) break;
    t *= config.growth;
  }

  result.x = std::move(x);
  result.objective = program.objective(result.x);
  return result;
}

}  // namespace mimosel
