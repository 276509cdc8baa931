#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "mimosel/array_model.hpp"
#include "mimosel/errors.hpp"
#include "test_support.hpp"

using namespace mimosel;
using mimosel::testing::uniform;

namespace {

// Independent scalar evaluation of exp(j 2 pi idx d sin(theta)).
std::complex<double> scalar_entry(int idx, double d, double theta_deg) {
  const double phase = 2.0 * std::numbers::pi * idx * d * std::sin(theta_deg * std::numbers::pi / 180.0);
  return {std::cos(phase), std::sin(phase)};
}

}  // namespace

TEST_CASE("angle conversion") {
  CHECK(Angle::degrees(180.0).rad() == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(Angle::radians(std::numbers::pi / 2).deg() == doctest::Approx(90.0).epsilon(1e-15));
  CHECK((-Angle::degrees(30.0)).deg() == doctest::Approx(-30.0));
  CHECK_THROWS_AS(Angle::degrees(std::nan("")), InvalidArgument);
  CHECK_THROWS_AS(Angle::radians(INFINITY), InvalidArgument);
}

TEST_CASE("geometry validation") {
  CHECK_NOTHROW((ArrayGeometry{5, 5, 2.5, 0.5}).validate(true));
  CHECK_THROWS_AS((ArrayGeometry{5, 5, 2.0, 0.5}).validate(true), InvalidArgument);
  CHECK_NOTHROW((ArrayGeometry{5, 5, 2.0, 0.5}).validate(false));
  CHECK_THROWS_AS((ArrayGeometry{0, 5, 1.0, 0.5}).validate(), InvalidArgument);
  CHECK_THROWS_AS((ArrayGeometry{5, 0, 1.0, 0.5}).validate(), InvalidArgument);
  CHECK_THROWS_AS((ArrayGeometry{5, 5, 0.0, 0.5}).validate(), InvalidArgument);
  CHECK_THROWS_AS((ArrayGeometry{5, 5, 1.0, -0.5}).validate(), InvalidArgument);

  const ArrayGeometry g{3, 4, 2.0, 0.5};
  CHECK(g.size() == 12);
  CHECK(g.flat(1, 2) == 9);
  CHECK(g.rx_of(9) == 1);
  CHECK(g.tx_of(9) == 2);
}

TEST_CASE("steering vectors at broadside are all ones") {
  const ArrayGeometry g{5, 5, 2.5, 0.5};
  const CVector at = steering_tx(g, Angle::degrees(0.0));
  const CVector ar = steering_rx(g, Angle::degrees(0.0));
  const CVector av = steering_virtual(g, Angle::degrees(0.0), Angle::degrees(0.0));
  REQUIRE(at.size() == 5);
  REQUIRE(av.size() == 25);
  CHECK((at - CVector::Ones(5)).norm() == 0.0);
  CHECK((ar - CVector::Ones(5)).norm() == 0.0);
  CHECK((av - CVector::Ones(25)).norm() == 0.0);
}

TEST_CASE("two-element closed forms") {
  const ArrayGeometry g{2, 2, 0.5, 0.5};
  const CVector at = steering_tx(g, Angle::degrees(30.0));
  CHECK(std::abs(at[0] - Complex(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(at[1] - Complex(0.0, 1.0)) < 1e-15);
  const CVector ar = steering_rx(g, Angle::degrees(90.0));
  CHECK(std::abs(ar[1] - Complex(-1.0, 0.0)) < 1e-15);
}

TEST_CASE("entries match the scalar formula") {
  const ArrayGeometry g{5, 5, 2.5, 0.5};
  const CVector at = steering_tx(g, Angle::degrees(18.0));
  for (int m = 0; m < 5; ++m) CHECK(std::abs(at[m] - scalar_entry(m, 2.5, 18.0)) < 1e-12);
  const CVector ar = steering_rx(g, Angle::degrees(50.0));
  for (int n = 0; n < 5; ++n) CHECK(std::abs(ar[n] - scalar_entry(n, 0.5, 50.0)) < 1e-12);
}

TEST_CASE("virtual steering is the Kronecker product") {
  const ArrayGeometry g2{2, 2, 1.0, 0.5};
  const Angle tt = Angle::degrees(12.0), tr = Angle::degrees(-40.0);
  const CVector a = steering_tx(g2, tt), b = steering_rx(g2, tr);
  const CVector v = steering_virtual(g2, tt, tr);
  CHECK(v[0] == a[0] * b[0]);
  CHECK(v[1] == a[0] * b[1]);
  CHECK(v[2] == a[1] * b[0]);
  CHECK(v[3] == a[1] * b[1]);

  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const ArrayGeometry g{1 + trial % 6, 1 + (trial / 6) % 5, uniform(rng, 0.2, 3.0), uniform(rng, 0.2, 1.0)};
    const Angle t1 = Angle::degrees(uniform(rng, -90, 90)), t2 = Angle::degrees(uniform(rng, -90, 90));
    const CVector at = steering_tx(g, t1), ar = steering_rx(g, t2);
    const CVector av = steering_virtual(g, t1, t2);
    for (int m = 0; m < g.M; ++m)
      for (int n = 0; n < g.N; ++n) REQUIRE(av[g.flat(n, m)] == at[m] * ar[n]);
    CHECK(av.norm() == doctest::Approx(std::sqrt(double(g.size()))).epsilon(1e-12));
  }
}

TEST_CASE("unit modulus and conjugate symmetry") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const ArrayGeometry g{1 + trial % 10, 1 + trial % 7, uniform(rng, 0.1, 5.0), uniform(rng, 0.1, 2.0)};
    const Angle th = Angle::degrees(uniform(rng, -90, 90));
    const CVector at = steering_tx(g, th), ar = steering_rx(g, th);
    for (int m = 0; m < g.M; ++m) REQUIRE(std::abs(std::abs(at[m]) - 1.0) < 1e-12);
    for (int n = 0; n < g.N; ++n) REQUIRE(std::abs(std::abs(ar[n]) - 1.0) < 1e-12);
    CHECK((steering_tx(g, -th) - at.conjugate()).norm() < 1e-12);
    CHECK((steering_rx(g, -th) - ar.conjugate()).norm() < 1e-12);
  }
}
