#include <doctest.h>

#include <cmath>
#include <random>

#include "scatterlab/errors.hpp"
#include "scatterlab/manifold.hpp"

using namespace scatterlab;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

ManifoldSpec bump_spec(double shift = 0.0, double eps = 0.2, double amp = 0.05) {
  return ManifoldSpec::surface_of_revolution(BumpProfile{shift, eps, amp});
}

ManifoldSpec perturbed_spec() {
  return ManifoldSpec::perturbed_product(FlatProduct{2, 1.0, kTwoPi}, ConformalBump{0.2, 0.5, vec({0.1, -0.1})});
}

// Random interior chart point (disc coordinates within radius r).
Vec random_point(std::mt19937_64& rng, int n, double r, double period) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec x(n + 1);
  do {
    for (int i = 0; i < n; ++i) x[i] = r * u(rng);
  } while (x.head(n).norm() > r);
  x[n] = 0.5 * period * (1.0 + u(rng));
  return x;
}

}  // namespace

TEST_CASE("bump profile") {
  const BumpProfile p{0.0, 0.2, 0.05};
  CHECK(p.bump(0.0) == doctest::Approx(0.05));
  CHECK(p.bump(0.2) == 0.0);
  CHECK(p.bump(-0.25) == 0.0);
  CHECK(p.bump(0.19) > 0.0);
  CHECK(p.value(1.0) == 1.0);
  CHECK(p.value(-1.0) == 1.0);
  CHECK(p.d1(1.0) == 0.0);
  CHECK(p.d2(-1.0) == 0.0);
  // derivatives against finite differences
  for (double u : {-0.15, -0.05, 0.03, 0.12, 0.18}) {
    const double h = 1e-6;
    CHECK(p.bump_d1(u) == doctest::Approx((p.bump(u + h) - p.bump(u - h)) / (2 * h)).epsilon(1e-6));
    CHECK(p.bump_d2(u) == doctest::Approx((p.bump_d1(u + h) - p.bump_d1(u - h)) / (2 * h)).epsilon(1e-5));
  }
}

TEST_CASE("metric_at examples") {
  const auto flat = ManifoldSpec::flat_product(2);
  const Mat g = metric_at(flat, ChartPoint{vec({0.3, 0.1, 1.0})});
  CHECK((g - Mat::Identity(3, 3)).norm() == 0.0);

  const auto cyl = bump_spec(0.0, 0.2, 0.0);
  CHECK((metric_at(cyl, ChartPoint{vec({0.0, 0.0})}) - Mat::Identity(2, 2)).norm() == 0.0);

  const auto bump = bump_spec();
  const Mat gb = metric_at(bump, ChartPoint{vec({0.0, 0.0})});
  const double f0 = 1.0 + 0.05 * std::exp(1.0 - 1.0);
  CHECK(gb(0, 0) == 1.0);
  CHECK(gb(1, 1) == doctest::Approx(f0 * f0).epsilon(1e-15));
  CHECK(gb(0, 1) == 0.0);

  CHECK_THROWS_AS(metric_at(flat, ChartPoint{vec({1.2, 0.0, 0.0})}), Error);
  try {
    metric_at(flat, ChartPoint{vec({1.2, 0.0, 0.0})});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Domain);
  }
  CHECK_NOTHROW(metric_at(flat, ChartPoint{vec({1.2, 0.0, 0.0})}, Model::UniversalCover));
}

TEST_CASE("christoffel examples") {
  const auto flat = ManifoldSpec::flat_product(2);
  const Christoffel g = christoffel_at(flat, ChartPoint{vec({0.2, 0.3, 2.0})});
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(g(k, i, j) == 0.0);

  const auto bump = bump_spec();
  // Outside the support F = 1, F' = 0.
  const Christoffel outside = christoffel_at(bump, ChartPoint{vec({0.5, 1.0})});
  CHECK(outside(0, 1, 1) == 0.0);
  CHECK(outside(1, 0, 1) == 0.0);

  const BumpProfile p{0.0, 0.2, 0.05};
  const double t = 0.08;
  const Christoffel in = christoffel_at(bump, ChartPoint{vec({t, 0.4})});
  CHECK(in(0, 1, 1) == doctest::Approx(-p.value(t) * p.d1(t)));
  CHECK(in(1, 0, 1) == doctest::Approx(p.d1(t) / p.value(t)));
  CHECK(in(1, 1, 0) == in(1, 0, 1));
}

TEST_CASE("christoffel matches finite differences at random points") {
  std::mt19937_64 rng(7);
  const ManifoldSpec specs[] = {ManifoldSpec::flat_product(2), ManifoldSpec::flat_product(3), bump_spec(),
                                bump_spec(0.4, 0.15, 0.05), perturbed_spec()};
  for (const auto& spec : specs) {
    const int n = spec.disc_dim();
    for (int trial = 0; trial < 100; ++trial) {
      Vec x = random_point(rng, n, spec.disc_radius(), spec.circle_length());
      if (n == 1 && trial % 2 == 0) {
        // concentrate on the bump support
        const auto [lo, hi] = std::get<SurfaceOfRevolution>(spec.kind()).profile.support();
        x[0] = lo + (hi - lo) * (trial + 0.5) / 100.0;
      }
      const Christoffel a = christoffel_at(spec, ChartPoint{x});
      const Christoffel fd = christoffel_finite_difference(spec, x);
      const int d = spec.dim();
      double worst = 0.0;
      for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            worst = std::max(worst, std::abs(a(k, i, j) - fd(k, i, j)));
            CHECK(a(k, i, j) == a(k, j, i));
          }
      CHECK(worst < 1e-6);
    }
  }
}

TEST_CASE("metric is positive definite") {
  std::mt19937_64 rng(11);
  const ManifoldSpec specs[] = {bump_spec(), perturbed_spec()};
  for (const auto& spec : specs) {
    for (int trial = 0; trial < 200; ++trial) {
      const Vec x = random_point(rng, spec.disc_dim(), spec.disc_radius(), spec.circle_length());
      const Mat g = metric_at(spec, ChartPoint{x});
      const Eigen::MatrixXd gd = g;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gd);
      CHECK(es.eigenvalues().minCoeff() > 0.4);
      CHECK(es.eigenvalues().maxCoeff() < 1.6);
    }
  }
}

TEST_CASE("boundary_embed examples") {
  const auto flat = ManifoldSpec::flat_product(2);
  BoundaryVector b{BoundaryPoint{vec({1.0, 0.0}), 0.0}, vec({-1.0, 0.0, 0.0})};
  const auto e = boundary_embed(flat, b);
  CHECK((e.vector.components - vec({-1.0, 0.0, 0.0})).norm() == 0.0);
  CHECK((e.vector.base.coords - vec({1.0, 0.0, 0.0})).norm() == 0.0);
  CHECK((e.inward_normal - vec({-1.0, 0.0, 0.0})).norm() == 0.0);
  CHECK(e.orientation == Orientation::Inward);

  BoundaryVector vertical{BoundaryPoint{vec({0.6, 0.8}), 2.5}, vec({0.0, 0.0, 1.0})};
  CHECK(boundary_embed(flat, vertical).orientation == Orientation::Tangential);

  BoundaryVector out{BoundaryPoint{vec({1.0, 0.0}), 0.0}, vec({1.0, 0.0, 0.0})};
  CHECK(boundary_embed(flat, out).orientation == Orientation::Outward);

  const auto bump = bump_spec();
  const double phi = 0.7;
  BoundaryVector rb{BoundaryPoint{vec({-1.0}), 0.3}, vec({std::cos(phi), std::sin(phi)})};
  const auto re = boundary_embed(bump, rb);
  CHECK(re.vector.components[0] == doctest::Approx(std::cos(phi)));
  CHECK(re.vector.components[1] == doctest::Approx(std::sin(phi)));
  CHECK(re.orientation == Orientation::Inward);

  // mismatched boundary type
  BoundaryVector wrong{BoundaryPoint{vec({1.0, 0.0, 0.0}), 0.0}, vec({-1.0, 0.0, 0.0, 0.0})};
  try {
    boundary_embed(flat, wrong);
    FAIL("expected identification error");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::Identification);
  }
}

TEST_CASE("boundary embedding preserves unit norm and boundary metric is shared") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  const ManifoldSpec specs[] = {ManifoldSpec::flat_product(2), perturbed_spec()};
  for (int trial = 0; trial < 200; ++trial) {
    Vec u(2);
    u << nd(rng), nd(rng);
    u.normalize();
    Vec w(3);
    w << nd(rng), nd(rng), nd(rng);
    w.normalize();
    if (u.dot(w.head(2)) > 0) w = -w;
    const BoundaryVector b{BoundaryPoint{u, 1.0}, w};
    Vec first;
    for (const auto& spec : specs) {
      const auto e = boundary_embed(spec, b);
      const Vec& x = e.vector.base.coords;
      CHECK(std::abs(spec.norm_squared(x, e.vector.components) - 1.0) < 1e-12);
      if (first.size() == 0) {
        first = e.vector.components;
      } else {
        CHECK((first - e.vector.components).norm() == 0.0);
      }
      const BoundaryVector back = boundary_from_chart(spec, x, e.vector.components);
      CHECK((back.point.u - u).norm() < 1e-14);
      CHECK((back.direction - w).norm() < 1e-14);
    }
  }
}

TEST_CASE("spec validation") {
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of([] { bump_spec(0.7, 0.2, 0.05); }) == ErrorCode::Config);
  CHECK(code_of([] { bump_spec(0.0, 0.3, 0.05); }) == ErrorCode::Config);
  CHECK(code_of([] { bump_spec(0.0, 0.2, -0.1); }) == ErrorCode::Config);
  CHECK(code_of([] { ManifoldSpec::flat_product(0); }) == ErrorCode::Config);
  CHECK(code_of([] {
          ManifoldSpec::perturbed_product(FlatProduct{}, ConformalBump{0.2, 0.5, vec({0.5, 0.0})});
        }) == ErrorCode::Config);
  CHECK(code_of([] { ManifoldSpec::perturbed_product(FlatProduct{}, ConformalBump{0.8, 0.5, vec({0.0, 0.0})}); }) ==
        ErrorCode::Config);
  CHECK_NOTHROW(bump_spec(0.59, 0.2, 0.05));
}

TEST_CASE("angles and defaults") {
  CHECK(reduce_angle(-0.5, kTwoPi) == doctest::Approx(kTwoPi - 0.5));
  CHECK(reduce_angle(7.0, kTwoPi) == doctest::Approx(7.0 - kTwoPi));
  CHECK(angle_distance(0.1, kTwoPi - 0.1, kTwoPi) == doctest::Approx(0.2));
  const auto flat = ManifoldSpec::flat_product(2);
  CHECK(flat.diameter() == doctest::Approx(std::sqrt(4.0 + kPi * kPi)));
  CHECK(flat.trapped_budget() == doctest::Approx(1000.0 * flat.diameter()));
  CHECK(flat.fingerprint() == ManifoldSpec::flat_product(2).fingerprint());
  CHECK(flat.fingerprint() != ManifoldSpec::flat_product(3).fingerprint());
  CHECK(bump_spec(0.1).fingerprint() != bump_spec(0.2).fingerprint());
}
