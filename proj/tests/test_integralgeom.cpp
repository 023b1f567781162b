#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "scatterlab/integralgeom.hpp"
#include "scatterlab/oracles.hpp"
#include "test_support.hpp"

using namespace scatterlab;
using testing::error_code_of;
using testing::vec;

TEST_CASE("sphere areas and normalization") {
  CHECK(sphere_area(0) == doctest::Approx(2.0));
  CHECK(sphere_area(1) == doctest::Approx(kTwoPi));
  CHECK(sphere_area(2) == doctest::Approx(4.0 * kPi));
  CHECK(sphere_area(3) == doctest::Approx(2.0 * kPi * kPi));
  CHECK(boundary_area({2, 1.0, kTwoPi}) == doctest::Approx(4.0 * kPi * kPi));
  CHECK(santalo_normalization({2, 1.0, kTwoPi}) == doctest::Approx(2.0 * kPi * kPi));
  CHECK(oracles::flat_product_volume(2, 1.0, kTwoPi) == doctest::Approx(2.0 * kPi * kPi));
  CHECK(oracles::flat_product_volume(3, 1.0, kTwoPi) == doctest::Approx(8.0 * kPi * kPi / 3.0));
}

TEST_CASE("santalo volume on flat products") {
  for (int n : {1, 2, 3}) {
    const auto spec = ManifoldSpec::flat_product(n);
    SantaloOptions opt;
    opt.samples = 40000;
    opt.seed = 5;
    opt.budget = 1e4;
    const auto est = santalo_volume(spec, opt);
    const double truth = oracles::flat_product_volume(n, 1.0, kTwoPi);
    INFO("n = " << n);
    CHECK(std::abs(est.volume - truth) < 4.0 * est.standard_error + 1e-9 * truth);
    CHECK(std::abs(est.volume - truth) < 0.02 * truth);
  }
  CHECK(error_code_of([] { santalo_volume(ManifoldSpec::flat_product(2), SantaloOptions{1, 1, 0.0, 1, {}}); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("santalo standard error scales like N^-1/2") {
  const auto spec = ManifoldSpec::flat_product(2);
  double prev = 0.0;
  for (std::size_t n : {10000u, 40000u, 160000u}) {
    SantaloOptions opt;
    opt.samples = n;
    opt.seed = 3;
    opt.budget = 1e4;
    const auto est = santalo_volume(spec, opt);
    if (prev > 0.0) CHECK(prev / est.standard_error == doctest::Approx(2.0).epsilon(0.15));
    prev = est.standard_error;
  }
}

TEST_CASE("santalo on the flat cylinder and a bump member") {
  SantaloOptions opt;
  opt.samples = 20000;
  opt.seed = 9;
  const auto cyl = santalo_volume(ManifoldSpec::surface_of_revolution({0.0, 0.2, 0.0}), opt);
  // TT cos(phi) = 2 exactly on the flat cylinder; censored samples contribute less
  CHECK(cyl.volume <= 4.0 * kPi * (1.0 + 1e-12));
  CHECK(cyl.volume >= 4.0 * kPi * (1.0 - cyl.censored_fraction) - 1e-9);
  CHECK(cyl.censored > 0);
  const BumpProfile p{0.2, 0.2, 0.05};
  const auto bump = santalo_volume(ManifoldSpec::surface_of_revolution(p), opt);
  CHECK(std::abs(bump.volume - oracles::revolution_santalo_volume(p)) < 4.0 * bump.standard_error);
}

TEST_CASE("trapped ladder") {
  const auto spec = ManifoldSpec::flat_product(2);
  const std::vector<double> budgets{10.0, 30.0, 100.0};
  const auto ladder = trapped_ladder(spec, budgets, 200000, 4);
  REQUIRE(ladder.size() == 3);
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    const double exact = oracles::flat_trapped_tail(budgets[k]);
    CHECK(std::abs(ladder[k].fraction - exact) <= 3.0 * std::sqrt(exact * (1 - exact) / 200000.0) + 1e-12);
    CHECK(ladder[k].wilson_low <= ladder[k].fraction);
    CHECK(ladder[k].wilson_high >= ladder[k].fraction);
    if (k > 0) CHECK(ladder[k].fraction <= ladder[k - 1].fraction);
  }
  const auto single = trapped_fraction(spec, 30.0, 200000, 4);
  CHECK(single.trapped == ladder[1].trapped);

  // revolution: no trapped geodesics reach the boundary
  const auto bump = ManifoldSpec::surface_of_revolution({0.0, 0.2, 0.05});
  const auto rl = trapped_ladder(bump, budgets, 20000, 4);
  // one-dimensional direction space: P(TT > T) ~ 4 / (pi T) on the flat cylinder
  CHECK(rl.back().fraction < rl[1].fraction);
  CHECK(rl[1].fraction < rl.front().fraction);
  CHECK(rl.back().fraction < 4.0 / (kPi * 100.0));
}

TEST_CASE("trapped tail oracles agree") {
  for (double t : {3.0, 10.0, 100.0, 1e3, 1e4}) {
    const double a = oracles::flat_trapped_tail(t);
    CHECK(std::abs(oracles::flat_trapped_tail_bruteforce(t) - a) < 2e-3 * a);
  }
}

TEST_CASE("busemann examples on the flat cover") {
  const auto flat = ManifoldSpec::flat_product(2);
  const TangentVector v{ChartPoint{vec({0.0, 0.0, 0.0})}, vec({1.0, 0.0, 0.0})};
  const BusemannFunction f(flat, v, 50.0);
  CHECK(f(ChartPoint{vec({3.0, 0.0, 0.0})}) == doctest::Approx(-3.0).epsilon(1e-10));
  const double r = 2.0;
  const BusemannFunction g(flat, v, 10.0 * r);
  CHECK(g(ChartPoint{vec({0.0, r, 0.0})}) == doctest::Approx(std::sqrt(r * r + 400.0 * r * r / 4.0 * 4.0 / 4.0) - 20.0)
                                                 .epsilon(1e-9));
  CHECK(g(ChartPoint{vec({0.0, r, 0.0})}) == doctest::Approx(r / 20.0).epsilon(0.01));

  const TangentVector vertical{ChartPoint{vec({0.0, 0.0, 0.0})}, vec({0.0, 0.0, 1.0})};
  CHECK(error_code_of([&] { BusemannFunction(flat, vertical, 10.0); }) == ErrorCode::Contract);
  const TangentVector slow{ChartPoint{vec({0.0, 0.0, 0.0})}, vec({0.001, 0.0, 1.0}).normalized()};
  CHECK(error_code_of([&] { BusemannFunction(flat, slow, 10.0); }) == ErrorCode::Contract);
}

TEST_CASE("busemann properties") {
  const auto spec =
      ManifoldSpec::perturbed_product(FlatProduct{2, 1.0, kTwoPi}, ConformalBump{0.2, 0.6, vec({0.0, 0.0})});
  const TangentVector v{ChartPoint{vec({0.0, 0.0, 0.0})}, vec({0.8, 0.0, 0.6}) / std::sqrt(1.2)};
  const BusemannFunction f100(spec, v, 100.0), f200(spec, v, 200.0);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ChartPoint> probes;
  for (int i = 0; i < 10; ++i) {
    // exterior points on the side the ray leaves towards
    probes.push_back(ChartPoint{vec({1.3 + 0.5 * std::abs(u(rng)), 1.2 * u(rng), 2.0 * u(rng)})});
  }
  for (const auto& p : probes) {
    CHECK(f200(p) <= f100(p) + 1e-9);
    CHECK(std::abs(f100.gradient_norm(p) - 1.0) < 1e-3);
  }
  for (std::size_t i = 0; i + 1 < probes.size(); ++i) {
    const double d = distance(spec, probes[i], probes[i + 1], {}, Model::UniversalCover);
    CHECK(std::abs(f100(probes[i]) - f100(probes[i + 1])) <= d * (1.0 + 1e-9));
  }

  // exterior values are flat: compare with a flat product using the same ray
  const auto flat = ManifoldSpec::flat_product(2);
  const ChartPoint p{vec({1.6, 0.3, 1.0})};
  const ChartPoint q = f100.ray_point();
  const double flat_d = (p.coords - q.coords).norm();
  CHECK(std::abs(f100(p) - (flat_d - 100.0)) < 1e-6);
  (void)flat;
}

TEST_CASE("level-set extrema probe on the flat cover") {
  const auto flat = ManifoldSpec::flat_product(2);
  const TangentVector v{ChartPoint{vec({0.0, 0.0, 0.0})}, vec({0.6, 0.0, 0.8})};
  const TangentVector w{ChartPoint{vec({0.0, 0.0, 0.0})}, vec({0.0, 0.6, 0.8})};
  const BusemannFunction fv(flat, v, 1e4), fw(flat, w, 1e4);
  LevelSetGrid grid;
  grid.rings = 2;
  grid.ring_points = 8;
  grid.boundary_points = 16;
  const auto probe = level_set_extrema_probe(fv, fw, 0.0, grid);
  CHECK(probe.passed);
  CHECK(probe.interior_points == 17);
  CHECK(probe.boundary_points == 16);
}

TEST_CASE("trapped direction scan on the flat product") {
  const auto flat = ManifoldSpec::flat_product(2);
  const auto scan = trapped_direction_scan(flat, ChartPoint{vec({0.3, -0.2, 1.0})}, 13, 12, 1e3);
  CHECK(scan.directions == 2 + 11 * 12);
  REQUIRE(scan.trapped.size() == 2);
  CHECK(scan.trapped[0].head(2).norm() == 0.0);
  CHECK(scan.trapped[1].head(2).norm() == 0.0);
}
