#include <cmath>

#include "doctest.h"
#include "mimosel/errors.hpp"
#include "mimosel/rounding.hpp"
#include "test_support.hpp"

using namespace mimosel;
using namespace mimosel::testing;

namespace {

// Projection onto {0 <= c <= 1, c'c <= k}: c(mu) = clamp(z / (1 + mu)), with mu
// found by bisection so that the ball constraint is tight when active.
RVector joint_projection_oracle(const RVector& z, double k) {
  auto at = [&](double mu) { return (z.array() / (1.0 + mu)).max(0.0).min(1.0).matrix().eval(); };
  if (at(0.0).squaredNorm() <= k) return at(0.0);
  double lo = 0.0, hi = 1.0;
  while (at(hi).squaredNorm() > k) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (at(mid).squaredNorm() > k ? lo : hi) = mid;
  }
  return at(hi);
}

RelaxedSolution point_mass(const RVector& c) {
  RelaxedSolution r;
  r.c_star = c;
  r.history = {c};
  r.sigma_diag = RVector::Zero(c.size());
  r.objective_trace = {0.0};
  return r;
}

}  // namespace

TEST_CASE("derived seeds and generator") {
  CHECK(derive_seed(1, {0}) != derive_seed(1, {1}));
  CHECK(derive_seed(1, {0, 1}) != derive_seed(1, {1, 0}));
  CHECK(derive_seed(7, {3, 4}) == derive_seed(7, {3, 4}));
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK((u >= 0.0 && u < 1.0));
  }
  Rng g(9);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = g.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.01);
}

TEST_CASE("gaussian sampling around the relaxed point") {
  const auto model = build_model(reference_5x5(18.0));
  const auto rel = run_scp(model, SelectionMode::factored(3, 4));
  Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) CHECK(sample_candidate(rel, a) == sample_candidate(rel, b));

  RelaxedSolution tight = point_mass(RVector::Constant(25, 0.4));
  tight.sigma_diag = RVector::Constant(25, 1e-4);
  Rng r(1);
  int inside = 0, total = 0;
  for (int i = 0; i < 2000; ++i) {
    const RVector z = sample_candidate(tight, r);
    for (int j = 0; j < 25; ++j, ++total) inside += std::abs(z[j] - 0.4) <= 3.0 * 0.01;
  }
  CHECK(double(inside) / total > 0.995);

  Rng m(77);
  RVector mean = RVector::Zero(25);
  for (int i = 0; i < 100000; ++i) mean += sample_candidate(rel, m);
  mean /= 100000.0;
  CHECK((mean - rel.c_star).cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("projection leaves feasible points alone") {
  const ArrayGeometry g{5, 5, 2.5, 0.5};
  const RVector z = RVector::Constant(25, 0.3);
  for (const auto& mode : {SelectionMode::joint(12), SelectionMode::factored(3, 4), SelectionMode::mfc(3, 4),
                           SelectionMode::hybrid(4, 3, 4)})
    CHECK(project_to_relaxed_set(z, mode, g) == z);
}

TEST_CASE("projection clamps when only the box binds") {
  const ArrayGeometry g{5, 5, 2.5, 0.5};
  RVector z = RVector::Constant(25, 0.2);
  z[0] = -0.7;
  z[3] = 1.8;
  z[9] = 1.1;
  const RVector p = project_to_relaxed_set(z, SelectionMode::joint(12), g);
  CHECK((p - z.cwiseMax(0.0).cwiseMin(1.0)).norm() == 0.0);
}

TEST_CASE("joint projection matches the multiplier oracle") {
  const ArrayGeometry g{4, 4, 2.0, 0.5};
  const RVector twos = RVector::Constant(16, 2.0);
  const RVector p = project_to_relaxed_set(twos, SelectionMode::joint(8), g);
  for (int i = 0; i < 16; ++i) CHECK(p[i] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
  CHECK((p - joint_projection_oracle(twos, 8.0)).norm() < 1e-6);

  Rng rng(13);
  for (int t = 0; t < 30; ++t) {
    RVector z(16);
    for (int i = 0; i < 16; ++i) z[i] = 0.6 + 0.8 * rng.normal();
    const int k = uniform_int(rng, 1, 15);
    const RVector got = project_to_relaxed_set(z, SelectionMode::joint(k), g);
    CHECK((got - joint_projection_oracle(z, k)).norm() < 1e-5);
  }
}

TEST_CASE("structured projections are feasible and no farther than feasible points") {
  const ArrayGeometry g{5, 5, 2.5, 0.5};
  Rng rng(3);
  for (const auto& mode : {SelectionMode::factored(3, 4), SelectionMode::mfc(3, 4), SelectionMode::hybrid(4, 3, 4)}) {
    const auto cons = constraints_for(mode, g);
    for (int t = 0; t < 10; ++t) {
      RVector z(25);
      for (int i = 0; i < 25; ++i) z[i] = 0.5 + 0.6 * rng.normal();
      const RVector p = project_to_relaxed_set(z, mode, g);
      CHECK(((p.array() >= -1e-12).all() && (p.array() <= 1.0 + 1e-12).all()));
      for (const auto& con : cons)
        if (con.sense != Sense::ge) CHECK(con.form.value(p) <= con.bound + 1e-6);
      // Every binary feasible point lies in the relaxed set.
      const RVector b = structured_round(z.cwiseMax(0.0).cwiseMin(1.0), mode, g).to_real();
      CHECK((p - z).norm() <= (b - z).norm() + 1e-6);
    }
  }
}

TEST_CASE("single draw from a point mass") {
  const auto model = build_model(reference_5x5(18.0));
  const auto mode = SelectionMode::mfc(3, 4);
  Rng rng(2);
  const RVector c = random_box_point(rng, 25, 0.2, 0.9);
  RoundingConfig cfg;
  cfg.n_samples = 1;
  const auto r = randomized_rounding(model, mode, point_mass(c), cfg);
  const auto expected = structured_round(project_to_relaxed_set(c, mode, model.geometry()), mode, model.geometry());
  CHECK(r.best == expected);
  CHECK(r.final_rounding == expected);
  CHECK(r.sinr_db == doctest::Approx(sinr_direct(model, expected)).epsilon(1e-12));
}

TEST_CASE("randomized rounding contract") {
  const auto model = build_model(reference_5x5(34.0));
  for (const auto& mode : {SelectionMode::joint(12), SelectionMode::factored(3, 4), SelectionMode::mfc(3, 4),
                           SelectionMode::hybrid(4, 3, 4)}) {
    const auto rel = run_scp(model, mode);
    RoundingConfig cfg;
    cfg.n_samples = 200;
    cfg.seed = 11;
    const auto r = randomized_rounding(model, mode, rel, cfg);
    CHECK(is_feasible(r.best, mode));
    CHECK(is_feasible(r.final_rounding, mode));
    REQUIRE(r.best_so_far.size() == 200);
    for (std::size_t i = 1; i < r.best_so_far.size(); ++i) CHECK(r.best_so_far[i] >= r.best_so_far[i - 1]);
    CHECK(r.sinr_db == r.best_so_far.back());
    CHECK(r.sinr_db >= r.final_rounding_sinr_db);
    CHECK(r.sinr_db == doctest::Approx(sinr_direct(model, r.best)).epsilon(1e-12));
    CHECK(r.failed_samples == 0);
    CHECK(!r.fell_back);

    const auto again = randomized_rounding(model, mode, rel, cfg);
    CHECK(again.best == r.best);
    CHECK(again.best_so_far == r.best_so_far);
  }
}

TEST_CASE("noise-only joint rounding reaches the closed form") {
  Scenario s;
  s.geometry = {3, 3, 1.5, 0.5};
  s.target_theta = Angle::degrees(12.0);
  s.target_power_dbw = 5.0;
  const auto model = build_model(s);
  const auto rel = run_scp(model, SelectionMode::joint(4));
  RoundingConfig cfg;
  cfg.n_samples = 20;
  const auto r = randomized_rounding(model, SelectionMode::joint(4), rel, cfg);
  CHECK(r.sinr_db == doctest::Approx(5.0 + 10.0 * std::log10(4.0)).epsilon(1e-12));
}

TEST_CASE("config validation") {
  const auto model = build_model(reference_5x5(18.0));
  RoundingConfig cfg;
  cfg.n_samples = 0;
  CHECK_THROWS_AS(randomized_rounding(model, SelectionMode::joint(4), point_mass(RVector::Constant(25, 0.2)), cfg),
                  InvalidArgument);
}
