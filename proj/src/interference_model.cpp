#include "mimosel/interference_model.hpp"

#include <cmath>
#include <string>

#include "mimosel/errors.hpp"

namespace mimosel {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

std::vector<double> ClutterSpec::patch_angles_deg() const {
  std::vector<double> out;
  if (rank <= 0) return out;
  if (rank == 1) {
    out.push_back(0.5 * (span_lo_deg + span_hi_deg));
    return out;
  }
  const double step = (span_hi_deg - span_lo_deg) / (rank - 1);
  for (int i = 0; i < rank; ++i) out.push_back(span_lo_deg + step * i);
  return out;
}

void Scenario::validate() const {
  geometry.validate(require_nonoverlapping);
  if (!std::isfinite(target_power_dbw)) throw InvalidArgument("target power must be finite");
  if (!std::isfinite(noise_power_dbw)) throw InvalidArgument("noise power must be finite");
  for (const auto& j : jammers)
    if (!std::isfinite(j.power_dbw)) throw InvalidArgument("jammer power must be finite");
  if (clutter.rank < 0) throw InvalidArgument("clutter rank must be >= 0");
  if (clutter.rank > 0) {
    if (!std::isfinite(clutter.cnr_db)) throw InvalidArgument("clutter CNR must be finite");
    if (!std::isfinite(clutter.span_lo_deg) || !std::isfinite(clutter.span_hi_deg) ||
        clutter.span_hi_deg < clutter.span_lo_deg)
      throw InvalidArgument("clutter span must be a finite interval lo <= hi");
  }
  if (require_interference && clutter.rank == 0 && jammers.empty())
    throw InvalidArgument("scenario requires interference but has no clutter and no jammers");
}

Scenario Scenario::with_target(Angle theta) const {
  Scenario s = *this;
  s.target_theta = theta;
  return s;
}

// ---------------------------------------------------------------------------

CovarianceModel::CovarianceModel(ArrayGeometry geometry, CVector a_s, CMatrix A_jc,
                                 RVector powers, int clutter_columns, double sigma_s2,
                                 double sigma_n2)
    : geometry_(geometry),
      A_jc_(std::move(A_jc)),
      powers_(std::move(powers)),
      clutter_columns_(clutter_columns),
      sigma_s2_(sigma_s2),
      sigma_n2_(sigma_n2) {
  const auto MN = static_cast<Eigen::Index>(geometry_.size());
  if (a_s.size() != MN || A_jc_.rows() != MN)
    throw InvalidArgument("model matrices must have M*N rows");
  if (powers_.size() != A_jc_.cols())
    throw InvalidArgument("one interference power per column of A_jc is required");
  if (!(sigma_n2_ > 0.0)) throw InvalidArgument("noise power must be positive");
  if (!(sigma_s2_ > 0.0)) throw InvalidArgument("target power must be positive");
  for (Eigen::Index i = 0; i < powers_.size(); ++i)
    if (!(powers_[i] > 0.0) || !std::isfinite(powers_[i]))
      throw InvalidArgument("interference powers must be positive and finite");

  const Eigen::Index n = A_jc_.cols();
  A_s_.resize(MN, n + 1);
  A_s_.col(0) = a_s;
  A_s_.rightCols(n) = A_jc_;
  B_jc_ = sigma_n2_ * powers_.cwiseInverse();
  B_s_.resize(n + 1);
  B_s_[0] = 0.0;
  B_s_.tail(n) = B_jc_;
}

CovarianceModel CovarianceModel::with_sigma_s2(double sigma_s2) const {
  return CovarianceModel(geometry_, A_s_.col(0), A_jc_, powers_, clutter_columns_, sigma_s2,
                         sigma_n2_);
}

CovarianceModel CovarianceModel::with_powers(RVector powers) const {
  return CovarianceModel(geometry_, A_s_.col(0), A_jc_, std::move(powers), clutter_columns_,
                         sigma_s2_, sigma_n2_);
}

CovarianceModel build_model(const Scenario& scenario) {
  scenario.validate();
  const ArrayGeometry& g = scenario.geometry;
  const double sigma_n2 = db_to_linear(scenario.noise_power_dbw);
  const auto MN = static_cast<Eigen::Index>(g.size());

  std::vector<CVector> columns;
  std::vector<double> powers;

  const auto patches = scenario.clutter.patch_angles_deg();
  if (!patches.empty()) {
    const double per_patch = db_to_linear(scenario.clutter.cnr_db) * sigma_n2 /
                             static_cast<double>(patches.size());
    for (double deg : patches) {
      const Angle th = Angle::degrees(deg);
      columns.push_back(steering_virtual(g, th, th));
      powers.push_back(per_patch);
    }
  }
  const int clutter_columns = static_cast<int>(columns.size());

  for (const Jammer& j : scenario.jammers) {
    const CVector ar = steering_rx(g, j.theta);
    const double p = db_to_linear(j.power_dbw);
    if (scenario.jammer_model == JammerModel::barrage) {
      for (int m = 0; m < g.M; ++m) {
        CVector col = CVector::Zero(MN);
        col.segment(static_cast<Eigen::Index>(m) * g.N, g.N) = ar;
        columns.push_back(std::move(col));
        powers.push_back(p);
      }
    } else {
      CVector col(MN);
      for (int m = 0; m < g.M; ++m) col.segment(static_cast<Eigen::Index>(m) * g.N, g.N) = ar;
      columns.push_back(std::move(col));
      powers.push_back(p);
    }
  }

  CMatrix A_jc(MN, static_cast<Eigen::Index>(columns.size()));
  RVector p(static_cast<Eigen::Index>(powers.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    A_jc.col(static_cast<Eigen::Index>(i)) = columns[i];
    p[static_cast<Eigen::Index>(i)] = powers[i];
  }
  const CVector a_s = steering_virtual(g, scenario.target_theta, scenario.target_theta);
  return CovarianceModel(g, a_s, std::move(A_jc), std::move(p), clutter_columns,
                         db_to_linear(scenario.target_power_dbw), sigma_n2);
}

// ---------------------------------------------------------------------------

CMatrix covariance_full(const CovarianceModel& model) {
  const auto MN = static_cast<Eigen::Index>(model.size());
  const CMatrix& A = model.A_jc();
  CMatrix R = A * model.powers().cast<Complex>().asDiagonal() * A.adjoint();
  R.diagonal().array() += model.sigma_n2();
  // Exact Hermitian symmetry.
  R = 0.5 * (R + R.adjoint()).eval();
  (void)MN;
  return R;
}

namespace {

std::vector<Eigen::Index> selected_rows(const CovarianceModel& model, const SelectionVector& c) {
  if (c.size() != model.size())
    throw InvalidArgument("selection length does not match the model");
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i]) rows.push_back(static_cast<Eigen::Index>(i));
  return rows;
}

}  // namespace

CMatrix covariance_full(const CovarianceModel& model, const SelectionVector& c) {
  const auto rows = selected_rows(model, c);
  const auto k = static_cast<Eigen::Index>(rows.size());
  CMatrix A_sub(k, model.A_jc().cols());
  for (Eigen::Index r = 0; r < k; ++r) A_sub.row(r) = model.A_jc().row(rows[r]);
  CMatrix R = A_sub * model.powers().cast<Complex>().asDiagonal() * A_sub.adjoint();
  R.diagonal().array() += model.sigma_n2();
  R = 0.5 * (R + R.adjoint()).eval();
  return R;
}

CVector mvdr_weights(const CMatrix& R, const CVector& a) {
  if (R.rows() != R.cols() || R.rows() != a.size())
    throw InvalidArgument("mvdr_weights: dimension mismatch");
  if (a.squaredNorm() == 0.0) throw InvalidArgument("mvdr_weights: zero steering vector");
  Eigen::LLT<CMatrix> llt(R);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("mvdr_weights: covariance is not positive definite");
  const CVector Ria = llt.solve(a);
  const Complex denom = a.dot(Ria);  // a^H R^-1 a
  return Ria / denom.real();
}

double sinr_direct_linear(const CovarianceModel& model, const SelectionVector& c) {
  const auto rows = selected_rows(model, c);
  if (rows.empty()) throw InvalidArgument("sinr_direct: selection has no active element");
  const CMatrix R = covariance_full(model, c);
  CVector a(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) a[static_cast<Eigen::Index>(r)] = model.a_s()[rows[r]];
  Eigen::LLT<CMatrix> llt(R);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("sinr_direct: reduced covariance is not positive definite");
  const CVector y = llt.matrixL().solve(a);
  return model.sigma_s2() * y.squaredNorm();
}

double sinr_direct(const CovarianceModel& model, const SelectionVector& c) {
  return linear_to_db(sinr_direct_linear(model, c));
}

LogDetValue logdet_block(const CMatrix& A, const RVector& B, const RVector& c,
                         bool with_gradient, bool with_hessian) {
  if (c.size() != A.rows()) throw InvalidArgument("logdet_block: length mismatch");
  if (B.size() != A.cols()) throw InvalidArgument("logdet_block: B size mismatch");
  LogDetValue out;
  const Eigen::Index d = A.cols();
  const Eigen::Index n = A.rows();
  if (d == 0) {
    if (with_gradient) out.gradient = RVector::Zero(n);
    if (with_hessian) out.hessian = RMatrix::Zero(n, n);
    return out;
  }
  CMatrix X = A.adjoint() * c.cast<Complex>().asDiagonal() * A;
  X.diagonal().real() += B;
  X = 0.5 * (X + X.adjoint()).eval();
  Eigen::LLT<CMatrix> llt(X);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("log-det argument is not positive definite");
  const auto& L = llt.matrixLLT();
  for (Eigen::Index i = 0; i < d; ++i) {
    const double lii = L(i, i).real();
    if (!(lii > 0.0) || !std::isfinite(lii))
      throw NotPositiveDefinite("log-det argument is not positive definite");
    out.value += 2.0 * std::log(lii);
  }
  if (!with_gradient && !with_hessian) return out;

  // Column i of V is L^-1 u_i with u_i = conj(A.row(i))^T.
  CMatrix V = A.adjoint();
  llt.matrixL().solveInPlace(V);
  if (with_gradient) out.gradient = V.colwise().squaredNorm().transpose();
  if (with_hessian) {
    const CMatrix G = V.adjoint() * V;
    out.hessian = -G.cwiseAbs2();
  }
  return out;
}

double f_logdet(const CovarianceModel& model, const RVector& c) {
  const double f1 = logdet_block(model.A_s(), model.B_s(), c, false, false).value;
  const double f2 = logdet_block(model.A_jc(), model.B_jc(), c, false, false).value;
  return f1 - f2;
}

double h_ratio(const CovarianceModel& model, const RVector& c) {
  return std::exp(f_logdet(model, c));
}

RVector grad_f(const CovarianceModel& model, const RVector& c) {
  const auto g1 = logdet_block(model.A_s(), model.B_s(), c, true, false);
  const auto g2 = logdet_block(model.A_jc(), model.B_jc(), c, true, false);
  return g1.gradient - g2.gradient;
}

CovarianceModel apply_power_adjustment(const CovarianceModel& model, int k_t,
                                       PowerAdjustScope scope) {
  const int M = model.geometry().M;
  if (k_t < 1 || k_t > M)
    throw InvalidArgument("power adjustment needs 1 <= k_t <= M, got k_t = " + std::to_string(k_t));
  if (k_t == M) return model;
  const double gain = static_cast<double>(M) / static_cast<double>(k_t);
  CovarianceModel out = model.with_sigma_s2(model.sigma_s2() * gain);
  if (scope == PowerAdjustScope::target_and_clutter && model.clutter_columns() > 0) {
    RVector p = model.powers();
    p.head(model.clutter_columns()) *= gain;
    out = out.with_powers(std::move(p));
  }
  return out;
}

}  // namespace mimosel
