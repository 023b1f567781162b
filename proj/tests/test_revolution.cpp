#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "scatterlab/revolution.hpp"
#include "test_support.hpp"

using namespace scatterlab;
using testing::error_code_of;
using testing::revolution_vector;
using testing::vec;

TEST_CASE("clairaut exit closed forms") {
  const BumpProfile flat{0.0, 0.2, 0.0};
  const auto q = clairaut_exit(flat, kPi / 4, -1);
  CHECK(q.delta_alpha == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(q.travel_time == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(q.exit_angle == doctest::Approx(kPi / 4).epsilon(1e-14));

  for (const BumpProfile& p : {flat, BumpProfile{0.0, 0.2, 0.05}, BumpProfile{0.4, 0.1, 0.05}}) {
    const auto m = clairaut_exit(p, 0.0, 1);
    CHECK(m.delta_alpha == 0.0);
    CHECK(m.travel_time == doctest::Approx(2.0).epsilon(1e-13));
  }
  // flat cylinder: Delta alpha = 2 tan phi, TT = 2 / cos phi for every angle below the cap
  for (double phi : open_angle_grid(30)) {
    if (std::abs(std::sin(phi)) > kNearGrazingCap) continue;
    const auto r = clairaut_exit(flat, phi, -1);
    CHECK(r.delta_alpha == doctest::Approx(2.0 * std::tan(phi)).epsilon(1e-11));
    CHECK(r.travel_time == doctest::Approx(2.0 / std::cos(phi)).epsilon(1e-11));
  }
}

TEST_CASE("clairaut errors") {
  const BumpProfile p{0.0, 0.2, 0.05};
  CHECK(error_code_of([&] { clairaut_exit(p, std::asin(0.9995), -1); }) == ErrorCode::NearGrazing);
  CHECK(error_code_of([&] { clairaut_exit(p, 2.0, -1); }) == ErrorCode::Contract);
  CHECK(error_code_of([&] { clairaut_exit(p, 0.3, 0); }) == ErrorCode::InvalidArgument);
  // a dip below |c| has a turning point
  const BumpProfile dip{0.0, 0.2, -0.1};
  CHECK(error_code_of([&] { clairaut_exit(dip, std::asin(0.95), -1); }) == ErrorCode::TurningPoint);
  CHECK_NOTHROW(clairaut_exit(dip, std::asin(0.5), -1));
}

TEST_CASE("quadrature matches ODE traces") {
  for (double s : {0.0, -0.35}) {
    const BumpProfile p{s, 0.2, 0.05};
    const auto spec = ManifoldSpec::surface_of_revolution(p);
    for (double phi : {kPi / 3, -kPi / 5, 0.1, 1.2}) {
      for (int end : {-1, 1}) {
        const auto q = clairaut_exit(p, phi, end);
        const auto r = integrate_until_exit(spec, revolution_vector(end, 0.0, phi), 100.0);
        REQUIRE(r.verdict.status == ExitStatus::Exited);
        CHECK(std::abs(r.verdict.travel_time - q.travel_time) < 1e-6);
        CHECK(angle_distance(r.verdict.exit->point.theta, reduce_angle(q.delta_alpha, kTwoPi), kTwoPi) < 1e-6);
        CHECK(std::abs(entry_angle({r.verdict.exit->point, -r.verdict.exit->direction}) + phi) < 1e-9);
      }
    }
  }
}

TEST_CASE("clairaut constant is conserved along traces") {
  const BumpProfile p{0.1, 0.2, 0.05};
  const auto spec = ManifoldSpec::surface_of_revolution(p);
  std::mt19937_64 rng(8);
  IntegratorOptions opt;
  opt.record = true;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto b = testing::random_inward(rng, 1, kTwoPi);
    const auto r = integrate_until_exit(spec, b, 500.0, opt);
    const double c = clairaut_invariant(p, r.trajectory.front().coords, r.trajectory.front().velocity);
    for (const auto& s : r.trajectory) worst = std::max(worst, std::abs(clairaut_invariant(p, s.coords, s.velocity) - c));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("family invariance scan") {
  const BumpProfile base{0.0, 0.2, 0.05};
  const std::vector<double> shifts{-0.5, 0.0, 0.5};
  const std::vector<double> angles{kPi / 6, kPi / 4, kPi / 3};
  const auto scan = family_invariance_scan(base, shifts, angles);
  CHECK(scan.rows.size() == 9);
  CHECK(scan.max_deviation() < 1e-9);
  const std::vector<double> single{0.0};
  CHECK(family_invariance_scan(base, single, angles).max_deviation() == 0.0);
  const std::vector<double> bad{0.0, 0.65};
  CHECK(error_code_of([&] { family_invariance_scan(base, bad, angles); }) == ErrorCode::Config);

  // property: random admissible shift pairs agree at random angles
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> us(-0.59, 0.59), ua(-1.5, 1.5), ue(0.05, 0.24), uamp(0.0, 0.05);
  for (int i = 0; i < 50; ++i) {
    BumpProfile b{0.0, ue(rng), uamp(rng)};
    const double lim = 1.0 - 2.0 * b.epsilon - 1e-3;
    const std::vector<double> ss{us(rng) * lim / 0.59, us(rng) * lim / 0.59};
    const std::vector<double> as{ua(rng)};
    CHECK(family_invariance_scan(b, ss, as).max_deviation() < 1e-9);
  }
}

TEST_CASE("non-isometry witness") {
  const BumpProfile a{0.0, 0.2, 0.05}, b{0.3, 0.2, 0.05}, c{-0.3, 0.2, 0.05};
  CHECK(non_isometry_witness(a, a) == 0.0);
  CHECK(non_isometry_witness(a, b) > 0.1);
  // t -> -t maps shift s to -s
  CHECK(non_isometry_witness(b, c) < 1e-12);
  CHECK(gaussian_curvature(a, 0.9) == 0.0);
}
