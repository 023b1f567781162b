#include <doctest.h>

#include <cmath>
#include <random>

#include "scatterlab/revolution.hpp"
#include "scatterlab/scattering.hpp"
#include "test_support.hpp"

using namespace scatterlab;
using testing::error_code_of;
using testing::random_inward;
using testing::revolution_vector;
using testing::vec;

namespace {

const BoundaryType kD2{2, 1.0, kTwoPi};

ManifoldSpec bump(double shift, double amp = 0.05) {
  return ManifoldSpec::surface_of_revolution(BumpProfile{shift, 0.2, amp});
}

double record_distance(const BoundaryType& bt, const LensRecord& a, const LensRecord& b) {
  return boundary_distance(bt, a.exit->point, b.exit->point) + vector_angle(a.exit->direction, b.exit->direction) +
         std::abs(a.travel_time - b.travel_time);
}

}  // namespace

TEST_CASE("flat oracle examples") {
  const LensRecord d = flat_oracle_scatter(kD2, {BoundaryPoint{vec({1.0, 0.0}), 0.0}, vec({-1.0, 0.0, 0.0})});
  REQUIRE(d.status == ExitStatus::Exited);
  CHECK(d.travel_time == doctest::Approx(2.0));
  CHECK((d.exit->point.u - vec({-1.0, 0.0})).norm() < 1e-15);
  CHECK(d.exit->point.theta == 0.0);

  const double s = std::sqrt(0.5);
  const LensRecord o = flat_oracle_scatter(kD2, {BoundaryPoint{vec({1.0, 0.0}), 0.0}, vec({-s, 0.0, s})});
  CHECK(o.travel_time == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(o.exit->point.theta == doctest::Approx(2.0));

  const LensRecord g = flat_oracle_scatter(kD2, {BoundaryPoint{vec({1.0, 0.0}), 0.0}, vec({0.0, 0.6, 0.8})});
  CHECK(g.status == ExitStatus::Grazing);
  CHECK(g.travel_time == 0.0);
  CHECK((g.exit->direction - vec({0.0, 0.6, 0.8})).norm() == 0.0);

  const LensRecord t = flat_oracle_scatter(kD2, {BoundaryPoint{vec({1.0, 0.0}), 0.0}, vec({-1e-4, 0.0, 1.0}).normalized()}, 100.0);
  CHECK(t.status == ExitStatus::Trapped);
  CHECK(t.travel_time == 100.0);
  CHECK(error_code_of([] { flat_oracle_scatter(kD2, {BoundaryPoint{vec({1.0, 0.0}), 0.0}, vec({1.0, 0.0, 0.0})}); }) ==
        ErrorCode::Contract);
}

TEST_CASE("scattering_map agrees with the flat oracle") {
  std::mt19937_64 rng(17);
  for (int n : {1, 2, 3}) {
    const auto spec = ManifoldSpec::flat_product(n, n == 3 ? 1.5 : 1.0, n == 1 ? 3.0 : kTwoPi);
    const BoundaryType bt = spec.boundary_type();
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const BoundaryVector b = random_inward(rng, n, spec.circle_length());
      const LensRecord ode = scattering_map(spec, b);
      const LensRecord oracle = flat_oracle_scatter(bt, b, spec.trapped_budget());
      REQUIRE(ode.status == oracle.status);
      if (ode.status != ExitStatus::Exited) continue;
      CHECK(normal_component(*ode.exit) <= 1e-9);
      worst = std::max(worst, record_distance(bt, ode, oracle));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("revolution scattering examples") {
  const auto cyl = bump(0.0, 0.0);
  const LensRecord r = scattering_map(cyl, revolution_vector(-1, 0.0, kPi / 4));
  CHECK(r.travel_time == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-10));
  CHECK(r.exit->point.theta == doctest::Approx(2.0).epsilon(1e-10));

  const auto b = bump(0.0);
  const BoundaryVector v = revolution_vector(-1, 0.3, kPi / 4);
  const LensRecord ode = scattering_map(b, v);
  const LensRecord quad = scattering_map(b, v, 0.0, LensMethod::Quadrature);
  CHECK(record_distance(b.boundary_type(), ode, quad) < 1e-6);
  CHECK(entry_angle({quad.exit->point, -quad.exit->direction}) == doctest::Approx(-kPi / 4).epsilon(1e-12));
  CHECK(quad.exit->direction[1] == doctest::Approx(std::sin(kPi / 4)));
  CHECK(error_code_of([&] { scattering_map(ManifoldSpec::flat_product(2), random_inward(*new std::mt19937_64(1), 2, kTwoPi), 0.0, LensMethod::Quadrature); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("lens tables") {
  const auto flat = ManifoldSpec::flat_product(2);
  const LensTable t = lens_table(flat, GridSampling{10, 10, 10, 0});
  CHECK(t.records.size() == 1000);
  for (const auto& r : t.records) {
    CHECK(r.status == ExitStatus::Exited);
    CHECK(normal_component(r.entry) > 0.0);
  }
  const LensTable tg = lens_table(flat, GridSampling{4, 3, 5, 4});
  CHECK(tg.records.size() == 4 * 3 * 9);
  std::size_t grazing = 0;
  for (const auto& r : tg.records) {
    if (r.status == ExitStatus::Grazing) {
      ++grazing;
      CHECK(r.travel_time == 0.0);
    }
  }
  CHECK(grazing == 4 * 3 * 4);

  // bump members share statuses with the flat cylinder
  const GridSampling grid{2, 10, 10, 2};
  const LensTable cyl = lens_table(bump(0.0, 0.0), grid);
  for (double s : {-0.5, 0.0, 0.25, 0.5}) {
    const LensTable tb = lens_table(bump(s), grid);
    for (std::size_t i = 0; i < cyl.records.size(); ++i) CHECK(cyl.records[i].status == tb.records[i].status);
  }
  CHECK(error_code_of([] { lens_table(ManifoldSpec::flat_product(3), GridSampling{}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("lens tables are deterministic across worker counts") {
  const auto spec =
      ManifoldSpec::perturbed_product(FlatProduct{2, 1.0, kTwoPi}, ConformalBump{0.2, 0.6, vec({0.0, 0.0})});
  const MonteCarloSampling mc{3 * kSampleBatch / 2 + 7, 99};
  LensTableOptions one, four;
  four.workers = 4;
  const LensTable a = lens_table(spec, mc, one);
  const LensTable b = lens_table(spec, mc, four);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].entry.direction == b.records[i].entry.direction);
    CHECK(a.records[i].travel_time == b.records[i].travel_time);
  }
  const auto rep = compare(a, b);
  CHECK(rep.max_deviation() == 0.0);
}

TEST_CASE("compare") {
  const GridSampling grid{2, 10, 10, 0};
  const LensTable base = lens_table(bump(0.0), grid);
  const auto self = compare(base, base);
  CHECK(self.max_deviation() == 0.0);
  CHECK(self.status_disagreements == 0);

  for (double s : {-0.5, 0.25, 0.5}) {
    const auto ode = compare(base, lens_table(bump(s), grid));
    CHECK(ode.max_deviation() < 1e-4);
    LensTableOptions q;
    q.method = LensMethod::Quadrature;
    const auto quad = compare(lens_table(bump(0.0), grid, q), lens_table(bump(s), grid, q));
    CHECK(quad.max_deviation() < 1e-6);
  }

  const auto flat = ManifoldSpec::flat_product(2);
  const auto pert =
      ManifoldSpec::perturbed_product(FlatProduct{2, 1.0, kTwoPi}, ConformalBump{0.3, 0.6, vec({0.1, 0.0})});
  const GridSampling g2{6, 4, 8, 0};
  const auto diff = compare(lens_table(flat, g2), lens_table(pert, g2));
  CHECK(diff.max_deviation() > 1e-3);
  for (const auto& r : diff.records) {
    CHECK(r.position >= 0.0);
    CHECK(r.direction >= 0.0);
    CHECK(r.direction <= kPi);
  }

  CHECK(error_code_of([&] { compare(base, lens_table(bump(0.0), GridSampling{2, 10, 9, 0})); }) ==
        ErrorCode::SamplingMismatch);
  CHECK(error_code_of([&] { compare(lens_table(flat, g2), lens_table(ManifoldSpec::flat_product(2, 2.0), g2)); }) ==
        ErrorCode::Identification);

  // censored agreements and trapped-vs-exited
  LensTable x = lens_table(flat, g2);
  LensTable y = x;
  x.records[0].status = y.records[0].status = ExitStatus::Trapped;
  y.records[1].status = ExitStatus::Trapped;
  const auto c = compare(x, y);
  CHECK(c.censored_agreements == 1);
  CHECK(c.trapped_vs_exited == 1);
  CHECK(c.status_disagreements == 1);
}

TEST_CASE("time reversal and equivariance") {
  std::mt19937_64 rng(31);
  for (const auto& spec : {ManifoldSpec::flat_product(2), bump(0.3)}) {
    const int n = spec.disc_dim();
    const BoundaryType bt = spec.boundary_type();
    for (int i = 0; i < 300; ++i) {
      const BoundaryVector b = random_inward(rng, n, spec.circle_length());
      const LensRecord r = scattering_map(spec, b);
      if (r.status != ExitStatus::Exited) continue;
      const LensRecord back = scattering_map(spec, {r.exit->point, -r.exit->direction});
      CHECK(boundary_distance(bt, back.exit->point, b.point) < 1e-6);
      CHECK(vector_angle(back.exit->direction, -b.direction) < 1e-6);
      CHECK(std::abs(back.travel_time - r.travel_time) < 1e-6);

      // rotation of the boundary (alpha shift for revolution, S^1 rotation + theta shift for flat)
      const double shift = 1.234;
      BoundaryVector rot = b;
      rot.point.theta = reduce_angle(b.point.theta + shift, spec.circle_length());
      if (n == 2) {
        const double ca = std::cos(0.7), sa = std::sin(0.7);
        Eigen::Matrix2d m;
        m << ca, -sa, sa, ca;
        rot.point.u = m * b.point.u;
        rot.direction.head(2) = m * b.direction.head(2);
      }
      const LensRecord rr = scattering_map(spec, rot);
      BoundaryPoint expected = r.exit->point;
      expected.theta = reduce_angle(expected.theta + shift, spec.circle_length());
      Vec dir = r.exit->direction;
      if (n == 2) {
        const double ca = std::cos(0.7), sa = std::sin(0.7);
        Eigen::Matrix2d m;
        m << ca, -sa, sa, ca;
        expected.u = m * expected.u;
        dir.head(2) = m * dir.head(2);
      }
      CHECK(boundary_distance(bt, rr.exit->point, expected) < 1e-9 * std::max(1.0, r.travel_time));
      CHECK(vector_angle(rr.exit->direction, dir) < 1e-9 * std::max(1.0, r.travel_time));
    }
  }
  // exact vertical translation on the flat oracle
  const BoundaryVector b{BoundaryPoint{vec({0.6, 0.8}), 1.0}, vec({-0.6, 0.0, 0.8})};
  BoundaryVector b2 = b;
  b2.point.theta = 3.0;
  const auto r1 = flat_oracle_scatter(kD2, b), r2 = flat_oracle_scatter(kD2, b2);
  CHECK(angle_distance(r2.exit->point.theta, r1.exit->point.theta + 2.0, kTwoPi) < 1e-14);
}

TEST_CASE("first variation") {
  const auto flat = ManifoldSpec::flat_product(2);
  const auto rotating = [](double s) {
    const Vec d = vec({-std::cos(s) * 0.8, std::sin(s) * 0.8, 0.6});
    return BoundaryVector{BoundaryPoint{vec({1.0, 0.0}), 0.5}, d};
  };
  CHECK(first_variation(flat, rotating, 0.4).residual < 1e-6);

  // curve moving the base point too
  const auto moving = [](double s) {
    const Vec u = vec({std::cos(s), std::sin(s)});
    Vec d(3);
    d.head(2) = -0.7 * u + 0.5 * vec({-std::sin(s), std::cos(s)});
    d[2] = std::sqrt(1.0 - 0.49 - 0.25);
    return BoundaryVector{BoundaryPoint{u, s}, d};
  };
  CHECK(first_variation(flat, moving, 0.2).residual < 1e-6);

  const auto b = bump(0.1);
  const auto angle = [](double s) { return revolution_vector(-1, 0.2, s); };
  const auto ode = first_variation(b, angle, 0.6);
  CHECK(ode.residual < 1e-5);
  CHECK(first_variation(b, angle, 0.6, 1e-4, LensMethod::Quadrature).residual < 1e-5);

  const auto constant = [](double) { return revolution_vector(1, 0.0, 0.3); };
  const auto c = first_variation(b, constant, 0.0);
  CHECK(c.length_derivative == 0.0);
  CHECK(std::abs(c.boundary_term) < 1e-10);
  CHECK(c.residual < 1e-10);

  // vertical direction at the boundary is Grazing: not differentiable there
  const auto to_vertical = [](double s) {
    return BoundaryVector{BoundaryPoint{vec({1.0, 0.0}), 0.0}, vec({-std::sin(s), 0.0, std::cos(s)})};
  };
  CHECK(error_code_of([&] { first_variation(flat, to_vertical, 1e-4); }) == ErrorCode::NotDifferentiable);
}
