#include "mimosel/array_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mimosel/errors.hpp"

namespace mimosel {

const char* to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::invalid_argument: return "invalid-argument";
    case ErrorCategory::parse: return "parse";
    case ErrorCategory::numerical: return "numerical";
    case ErrorCategory::infeasible: return "infeasible";
    case ErrorCategory::non_convergence: return "non-convergence";
    case ErrorCategory::budget: return "budget";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

Angle Angle::degrees(double deg) {
  if (!std::isfinite(deg)) throw InvalidArgument("angle must be finite");
  return radians_unchecked(deg * (std::numbers::pi / 180.0));
}

Angle Angle::radians(double rad) {
  if (!std::isfinite(rad)) throw InvalidArgument("angle must be finite");
  return radians_unchecked(rad);
}

double Angle::deg() const noexcept { return rad_ * (180.0 / std::numbers::pi); }

void ArrayGeometry::validate(bool require_nonoverlapping) const {
  if (M < 1) throw InvalidArgument("M must be >= 1, got " + std::to_string(M));
  if (N < 1) throw InvalidArgument("N must be >= 1, got " + std::to_string(N));
  if (!(d_t > 0.0) || !std::isfinite(d_t)) throw InvalidArgument("d_t must be > 0");
  if (!(d_r > 0.0) || !std::isfinite(d_r)) throw InvalidArgument("d_r must be > 0");
  if (require_nonoverlapping && std::abs(d_t - N * d_r) > 1e-12 * std::abs(N * d_r)) {
    throw InvalidArgument("non-overlapping virtual array requires d_t = N * d_r");
  }
}

namespace {

CVector ula_steering(int count, double spacing, Angle theta) {
  const double phase = 2.0 * std::numbers::pi * spacing * std::sin(theta.rad());
  CVector a(count);
  for (int i = 0; i < count; ++i) a[i] = std::polar(1.0, phase * i);
  return a;
}

}  // namespace

CVector steering_tx(const ArrayGeometry& geom, Angle theta) {
  return ula_steering(geom.M, geom.d_t, theta);
}

CVector steering_rx(const ArrayGeometry& geom, Angle theta) {
  return ula_steering(geom.N, geom.d_r, theta);
}

CVector steering_virtual(const ArrayGeometry& geom, Angle theta_t, Angle theta_r) {
  const CVector at = steering_tx(geom, theta_t);
  const CVector ar = steering_rx(geom, theta_r);
  CVector a(geom.size());
  for (int m = 0; m < geom.M; ++m) {
    for (int n = 0; n < geom.N; ++n) a[geom.flat(n, m)] = at[m] * ar[n];
  }
  return a;
}

}  // namespace mimosel
