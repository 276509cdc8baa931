#include "mimosel/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mimosel/convex_solver.hpp"
#include "mimosel/errors.hpp"

namespace mimosel {

void RoundingConfig::validate() const {
  if (n_samples < 1) throw InvalidArgument("n_samples must be >= 1");
  if (!(projection_tolerance > 0.0)) throw InvalidArgument("projection tolerance must be positive");
}

RVector sample_candidate(const RelaxedSolution& relaxed, Rng& rng) {
  RVector z(relaxed.c_star.size());
  for (Eigen::Index i = 0; i < z.size(); ++i)
    z[i] = relaxed.c_star[i] + std::sqrt(relaxed.sigma_diag[i]) * rng.normal();
  return z;
}

RVector project_to_relaxed_set(const RVector& z, const SelectionMode& mode,
                               const ArrayGeometry& geometry, double tolerance) {
  const int n = static_cast<int>(geometry.size());
  if (z.size() != n) throw InvalidArgument("sample has the wrong length");
  if (!z.allFinite()) throw InvalidArgument("sample is not finite");
  mode.validate(geometry);

  std::vector<QuadraticRow> rows;
  for (const auto& con : constraints_for(mode, geometry))
    if (con.sense != Sense::ge) rows.push_back({con.form, con.bound, -1});

  const RVector clamped = z.cwiseMax(0.0).cwiseMin(1.0);
  bool inside = true;
  for (const auto& row : rows) inside = inside && row.form.value(clamped) <= row.bound;
  if (inside) return clamped;

  ConvexProgram p;
  p.num_primary = n;
  p.prox_weight = RVector::Ones(n);
  p.prox_center = z;
  p.lower = RVector::Zero(n);
  p.upper = RVector::Ones(n);
  p.quadratic = rows;

  const RVector ones = RVector::Ones(n);
  double ratio = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) ratio = std::min(ratio, row.bound / row.form.value(ones));
  const double delta = std::min(0.5, 0.5 * std::sqrt(ratio));

  BarrierConfig cfg;
  cfg.tolerance = tolerance;
  const BarrierResult res = solve_convex_subproblem(p, cfg, RVector::Constant(n, delta));
  return res.x.cwiseMax(0.0).cwiseMin(1.0);
}

namespace {

bool better(double sinr, const SelectionVector& sel, double best_sinr, const SelectionVector& best) {
  if (sinr != best_sinr) return sinr > best_sinr;
  return sel < best;
}

}  // namespace

RoundingResult randomized_rounding(const CovarianceModel& model, const SelectionMode& mode,
                                   const RelaxedSolution& relaxed, const RoundingConfig& config) {
  config.validate();
  const ArrayGeometry& geom = model.geometry();
  mode.validate(geom);
  if (relaxed.c_star.size() != static_cast<Eigen::Index>(geom.size()) ||
      relaxed.sigma_diag.size() != relaxed.c_star.size())
    throw InvalidArgument("relaxed solution does not match the model");

  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  RoundingResult out;
  out.sinr_db = kNegInf;
  out.best_projected_f = kNegInf;
  bool have_best = false;
  bool have_projected = false;

  for (int i = 0; i < config.n_samples; ++i) {
    Rng rng(derive_seed(config.seed, {static_cast<std::uint64_t>(i)}));
    const RVector z = sample_candidate(relaxed, rng);
    RVector zhat;
    try {
      zhat = project_to_relaxed_set(z, mode, geom, config.projection_tolerance);
    } catch (const Error&) {
      ++out.failed_samples;
      out.best_so_far.push_back(out.sinr_db);
      continue;
    }

    try {
      const double f = f_logdet(model, zhat);
      if (!have_projected || f >= out.best_projected_f) {
        out.best_projected_f = f;
        out.best_projected = zhat;
        have_projected = true;
      }
    } catch (const NotPositiveDefinite&) {
    }

    const SelectionVector sel = structured_round(zhat, mode, geom);
    const double sinr = sinr_direct(model, sel);
    if (!have_best || better(sinr, sel, out.sinr_db, out.best)) {
      out.best = sel;
      out.sinr_db = sinr;
      have_best = true;
    }
    out.best_so_far.push_back(out.sinr_db);
  }

  if (!have_best) {
    out.fell_back = true;
    out.best = structured_round(relaxed.c_star, mode, geom);
    out.sinr_db = sinr_direct(model, out.best);
  }
  if (have_projected) {
    out.final_rounding = structured_round(out.best_projected, mode, geom);
    out.final_rounding_sinr_db = sinr_direct(model, out.final_rounding);
  } else {
    out.final_rounding = out.best;
    out.final_rounding_sinr_db = out.sinr_db;
  }
  return out;
}

}  // namespace mimosel
