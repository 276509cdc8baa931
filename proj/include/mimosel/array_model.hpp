#pragma once

#include <cstddef>

#include "mimosel/types.hpp"

namespace mimosel {

/// Azimuth angle. Constructed from degrees or radians, stored in radians.
class Angle {
 public:
  constexpr Angle() = default;

  static Angle degrees(double deg);
  static Angle radians(double rad);

  double rad() const noexcept { return rad_; }
  double deg() const noexcept;

  Angle operator-() const noexcept { return radians_unchecked(-rad_); }

 private:
  static constexpr Angle radians_unchecked(double rad) {
    Angle a;
    a.rad_ = rad;
    return a;
  }

  double rad_ = 0.0;
};

/// Collocated uniform linear transmit and receive arrays. Spacings are in
/// wavelengths.
///
/// Flat virtual-array index convention used everywhere: i = m * N + n for
/// transmitter m and receiver n, i.e. c = vec(C) column-major with C of
/// shape N x M (rows are receivers, columns are transmitters).
struct ArrayGeometry {
  int M = 1;
  int N = 1;
  double d_t = 0.5;
  double d_r = 0.5;

  /// Throws InvalidArgument on violated invariants. With
  /// require_nonoverlapping the transmit spacing must equal N * d_r.
  void validate(bool require_nonoverlapping = false) const;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(M) * static_cast<std::size_t>(N);
  }
  std::size_t flat(int rx, int tx) const noexcept {
    return static_cast<std::size_t>(tx) * static_cast<std::size_t>(N) +
           static_cast<std::size_t>(rx);
  }
  int rx_of(std::size_t i) const noexcept { return static_cast<int>(i % N); }
  int tx_of(std::size_t i) const noexcept { return static_cast<int>(i / N); }

  bool operator==(const ArrayGeometry&) const = default;
};

/// a_t(theta): entry m is exp(j 2 pi m d_t sin(theta)), m = 0..M-1.
CVector steering_tx(const ArrayGeometry& geom, Angle theta);

/// a_r(theta): entry n is exp(j 2 pi n d_r sin(theta)), n = 0..N-1.
CVector steering_rx(const ArrayGeometry& geom, Angle theta);

/// a_t(theta_t) kron a_r(theta_r), length M*N.
CVector steering_virtual(const ArrayGeometry& geom, Angle theta_t,
                         Angle theta_r);

}  // namespace mimosel
