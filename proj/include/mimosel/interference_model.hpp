#pragma once

#include <vector>

#include "mimosel/array_model.hpp"
#include "mimosel/selection.hpp"
#include "mimosel/types.hpp"

namespace mimosel {

enum class JammerModel {
  /// Jammer i contributes M columns e_m kron a_r(theta_i), each with its power.
  barrage,
  /// Jammer i contributes one column 1_M kron a_r(theta_i).
  coherent,
};

struct Jammer {
  Angle theta;
  double power_dbw = 0.0;
};

/// Discrete low-rank clutter: `rank` patches spaced uniformly (inclusive) over
/// [span_lo, span_hi] degrees, equal power per patch, total CNR in dB.
struct ClutterSpec {
  int rank = 0;
  double span_lo_deg = 0.0;
  double span_hi_deg = 0.0;
  double cnr_db = 0.0;

  /// Patch angles (degrees). A single patch sits at the span centre.
  std::vector<double> patch_angles_deg() const;
};

struct Scenario {
  ArrayGeometry geometry;
  Angle target_theta;
  double target_power_dbw = 0.0;
  std::vector<Jammer> jammers;
  JammerModel jammer_model = JammerModel::barrage;
  ClutterSpec clutter;
  double noise_power_dbw = 0.0;
  /// Reject a model with neither clutter nor jammers.
  bool require_interference = false;
  /// Enforce d_t = N * d_r.
  bool require_nonoverlapping = false;

  void validate() const;
  Scenario with_target(Angle theta) const;
};

double db_to_linear(double db);
double linear_to_db(double linear);

/// Immutable analytic model of a scenario: the matrices A_s = [a_s, A_jc],
/// A_jc (clutter columns first, then jammer columns), the diagonals
/// B_jc = sigma_n^2 / p_i and B_s = [0, B_jc], and the linear powers.
class CovarianceModel {
 public:
  CovarianceModel(ArrayGeometry geometry, CVector a_s, CMatrix A_jc, RVector powers,
                  int clutter_columns, double sigma_s2, double sigma_n2);

  const ArrayGeometry& geometry() const noexcept { return geometry_; }
  std::size_t size() const noexcept { return geometry_.size(); }

  const CMatrix& A_s() const noexcept { return A_s_; }
  const CMatrix& A_jc() const noexcept { return A_jc_; }
  const RVector& B_s() const noexcept { return B_s_; }
  const RVector& B_jc() const noexcept { return B_jc_; }
  auto a_s() const { return A_s_.col(0); }
  /// Linear interference powers p_i, one per column of A_jc.
  const RVector& powers() const noexcept { return powers_; }
  int clutter_columns() const noexcept { return clutter_columns_; }
  int interference_columns() const noexcept { return static_cast<int>(A_jc_.cols()); }

  double sigma_s2() const noexcept { return sigma_s2_; }
  double sigma_n2() const noexcept { return sigma_n2_; }

  CovarianceModel with_sigma_s2(double sigma_s2) const;
  CovarianceModel with_powers(RVector powers) const;

 private:
  ArrayGeometry geometry_;
  CMatrix A_s_;
  CMatrix A_jc_;
  RVector B_s_;
  RVector B_jc_;
  RVector powers_;
  int clutter_columns_ = 0;
  double sigma_s2_ = 1.0;
  double sigma_n2_ = 1.0;
};

CovarianceModel build_model(const Scenario& scenario);

/// R = A_jc diag(p) A_jc^H + sigma_n^2 I over the full virtual array.
CMatrix covariance_full(const CovarianceModel& model);
/// R restricted to the selected rows and columns.
CMatrix covariance_full(const CovarianceModel& model, const SelectionVector& c);

/// w = R^-1 a / (a^H R^-1 a). Throws NotPositiveDefinite if R is not PD.
CVector mvdr_weights(const CMatrix& R, const CVector& a);

/// sigma_s^2 a_S^H R_S^-1 a_S on the selected sub-array (linear).
double sinr_direct_linear(const CovarianceModel& model, const SelectionVector& c);
/// Same in dB.
double sinr_direct(const CovarianceModel& model, const SelectionVector& c);

/// log det(A^H diag(c) A + diag(B)) with its gradient and (optionally) its
/// Hessian. Gradient entry i is u_i^H X^-1 u_i with u_i the conjugated i-th row
/// of A; Hessian entry (i, j) is -|u_i^H X^-1 u_j|^2.
struct LogDetValue {
  double value = 0.0;
  RVector gradient;
  RMatrix hessian;  // empty unless requested
};

LogDetValue logdet_block(const CMatrix& A, const RVector& B, const RVector& c,
                         bool with_gradient, bool with_hessian);

/// f(c) = logdet(A_s^H diag(c) A_s + B_s) - logdet(A_jc^H diag(c) A_jc + B_jc).
/// Accepts fractional c; throws NotPositiveDefinite when the signal block is
/// singular (e.g. c = 0).
double f_logdet(const CovarianceModel& model, const RVector& c);
/// h(c) = exp(f(c)), the determinant ratio.
double h_ratio(const CovarianceModel& model, const RVector& c);
RVector grad_f(const CovarianceModel& model, const RVector& c);

enum class PowerAdjustScope { target_only, target_and_clutter };

/// Concentrate the transmit power on k_t transmitters: sigma_s^2 (and, when
/// requested, the clutter powers) scale by M / k_t.
CovarianceModel apply_power_adjustment(const CovarianceModel& model, int k_t,
                                       PowerAdjustScope scope = PowerAdjustScope::target_only);

}  // namespace mimosel
