#include "scatterlab/integralgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "scatterlab/errors.hpp"

namespace scatterlab {

double sphere_area(int k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "sphere dimension must be >= 0");
  const double m = 0.5 * (k + 1);
  return 2.0 * std::pow(kPi, m) / std::tgamma(m);
}

double boundary_area(const BoundaryType& boundary) {
  return sphere_area(boundary.n - 1) * std::pow(boundary.radius, boundary.n - 1) * boundary.circle_length;
}

double santalo_normalization(const BoundaryType& boundary) {
  // Hemisphere of S^n over the whole S^n.
  const double sphere = sphere_area(boundary.n);
  return boundary_area(boundary) * (0.5 * sphere) / sphere;
}

SantaloEstimate santalo_volume(const ManifoldSpec& spec, const SantaloOptions& options) {
  if (options.samples < 2) throw Error(ErrorCode::InvalidArgument, "Santalo estimate needs at least 2 samples");
  const BoundaryType boundary = spec.boundary_type();
  const double budget = options.budget > 0.0 ? options.budget : spec.trapped_budget();
  std::vector<double> weight(options.samples);
  std::vector<char> censored(options.samples, 0);
  for_each_sample(MonteCarloSampling{options.samples, options.seed}, boundary, options.workers,
                  [&](std::size_t i, const BoundaryVector& b) {
                    const TraceResult r = integrate_until_exit(spec, b, budget, options.integrator);
                    const double c = normal_component(b);
                    switch (r.verdict.status) {
                      case ExitStatus::Exited: weight[i] = r.verdict.travel_time * c; break;
                      case ExitStatus::Trapped:
                        weight[i] = budget * c;
                        censored[i] = 1;
                        break;
                      case ExitStatus::Grazing: weight[i] = 0.0; break;
                    }
                  });
  // Fixed-order two-pass reduction keeps the estimate independent of the worker count.
  const double n = static_cast<double>(options.samples);
  double sum = 0.0;
  for (double w : weight) sum += w;
  const double mean = sum / n;
  double sq = 0.0;
  for (double w : weight) sq += (w - mean) * (w - mean);
  const double variance = sq / (n - 1.0);

  SantaloEstimate out;
  out.normalization = santalo_normalization(boundary);
  out.volume = out.normalization * mean;
  out.standard_error = out.normalization * std::sqrt(variance / n);
  out.samples = options.samples;
  out.budget = budget;
  out.censored = static_cast<std::size_t>(std::count(censored.begin(), censored.end(), 1));
  out.censored_fraction = static_cast<double>(out.censored) / n;
  out.seed = options.seed;
  return out;
}

std::vector<TrappedRung> trapped_ladder(const ManifoldSpec& spec, std::span<const double> budgets,
                                        std::size_t samples, std::uint64_t seed, int workers,
                                        const IntegratorOptions& integrator) {
  if (budgets.empty()) throw Error(ErrorCode::InvalidArgument, "budget ladder is empty");
  for (double b : budgets) {
    if (!(b > 0.0) || !std::isfinite(b)) throw Error(ErrorCode::InvalidArgument, "budgets must be positive");
  }
  const double top = *std::max_element(budgets.begin(), budgets.end());
  constexpr double kGrazing = -1.0;
  std::vector<double> exit_time(samples);
  for_each_sample(MonteCarloSampling{samples, seed}, spec.boundary_type(), workers,
                  [&](std::size_t i, const BoundaryVector& b) {
                    const TraceResult r = integrate_until_exit(spec, b, top, integrator);
                    switch (r.verdict.status) {
                      case ExitStatus::Exited: exit_time[i] = r.verdict.travel_time; break;
                      case ExitStatus::Trapped: exit_time[i] = std::numeric_limits<double>::infinity(); break;
                      case ExitStatus::Grazing: exit_time[i] = kGrazing; break;
                    }
                  });
  std::vector<TrappedRung> out;
  for (double budget : budgets) {
    TrappedRung rung;
    rung.budget = budget;
    for (double t : exit_time) {
      if (t == kGrazing) {
        ++rung.grazing;
        continue;
      }
      ++rung.samples;
      if (t > budget) ++rung.trapped;
    }
    const double n = static_cast<double>(rung.samples);
    if (rung.samples > 0) {
      const double p = static_cast<double>(rung.trapped) / n;
      rung.fraction = p;
      rung.standard_error = std::sqrt(p * (1.0 - p) / n);
      const double z = 1.959963984540054;
      const double denom = 1.0 + z * z / n;
      const double center = (p + z * z / (2.0 * n)) / denom;
      const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
      rung.wilson_low = std::max(0.0, center - half);
      rung.wilson_high = std::min(1.0, center + half);
    }
    out.push_back(rung);
  }
  return out;
}

TrappedRung trapped_fraction(const ManifoldSpec& spec, double budget, std::size_t samples, std::uint64_t seed,
                             int workers, const IntegratorOptions& integrator) {
  const double budgets[] = {budget};
  return trapped_ladder(spec, budgets, samples, seed, workers, integrator).front();
}

// ---------------------------------------------------------------------------------------------
// Busemann functions

BusemannFunction::BusemannFunction(const ManifoldSpec& spec, const TangentVector& defining, double truncation,
                                   const ConnectOptions& options)
    : spec_(spec), t_(truncation), options_(options) {
  const int n = spec.disc_dim();
  if (!(truncation > 0.0)) throw Error(ErrorCode::InvalidArgument, "truncation time must be positive");
  if (defining.components.size() != spec.dim()) {
    throw Error(ErrorCode::Contract, "defining vector has the wrong dimension");
  }
  if (defining.components.head(n).norm() < 1e-9) {
    throw Error(ErrorCode::Contract, "defining geodesic is vertical (trapped); its Busemann function is undefined");
  }
  const GeodesicState end = integrate_for(spec, defining, truncation, Model::UniversalCover, options.integrator);
  const double r = spec.disc_radius();
  if (end.position.coords.head(n).squaredNorm() <= r * r) {
    throw Error(ErrorCode::Contract, "defining geodesic is still inside the disc at the truncation time");
  }
  target_ = end.position;
  direction_ = end.velocity;
}

double BusemannFunction::operator()(const ChartPoint& p) const {
  return distance(spec_, p, target_, {}, Model::UniversalCover, options_) - t_;
}

Vec BusemannFunction::gradient(const ChartPoint& p, double h) const {
  const int d = spec_.dim();
  Vec g(d);
  for (int j = 0; j < d; ++j) {
    ChartPoint lo = p, hi = p;
    lo.coords[j] -= h;
    hi.coords[j] += h;
    g[j] = ((*this)(hi) - (*this)(lo)) / (2.0 * h);
  }
  return g;
}

double BusemannFunction::gradient_norm(const ChartPoint& p, double h) const {
  const Vec g = gradient(p, h);
  return std::sqrt(g.cwiseProduct(g).cwiseQuotient(spec_.metric_diagonal(p.coords)).sum());
}

double busemann_value(const ManifoldSpec& spec, const TangentVector& defining, const ChartPoint& p, double t,
                      const ConnectOptions& options) {
  return BusemannFunction(spec, defining, t, options)(p);
}

namespace {

// Angle theta with w(x_h, theta) = level.
double solve_level(const BusemannFunction& w, int n, const Vec& xh, double level) {
  auto f = [&](double theta) {
    Vec x(n + 1);
    x.head(n) = xh;
    x[n] = theta;
    return w(ChartPoint{x}) - level;
  };
  const double f0 = f(0.0);
  const double slope = (f(1e-3) - f0) / 1e-3;
  if (!(std::abs(slope) > 1e-6)) {
    throw Error(ErrorCode::InvalidArgument, "level sets of the second Busemann function are not graphs over the disc");
  }
  const double guess = -f0 / slope;
  double width = 0.05;
  double lo = guess - width, hi = guess + width;
  double flo = f(lo), fhi = f(hi);
  for (int k = 0; k < 40 && flo * fhi > 0.0; ++k) {
    width *= 2.0;
    lo = guess - width, hi = guess + width;
    flo = f(lo), fhi = f(hi);
  }
  if (flo * fhi > 0.0) throw Error(ErrorCode::NoConnection, "could not bracket the level set");
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  std::uintmax_t iters = 100;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(44),
                                                   iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

LevelSetProbe level_set_extrema_probe(const BusemannFunction& v, const BusemannFunction& w, double level,
                                      const LevelSetGrid& grid, double tolerance) {
  const ManifoldSpec& spec = v.spec();
  const int n = spec.disc_dim();
  if (n != 2) throw Error(ErrorCode::InvalidArgument, "level-set probe is implemented for n = 2");
  const double r = spec.disc_radius();
  LevelSetProbe out;
  out.level = level;
  out.tolerance = tolerance;
  out.interior_max = out.boundary_max = -std::numeric_limits<double>::infinity();
  out.interior_min = out.boundary_min = std::numeric_limits<double>::infinity();
  auto visit = [&](double radius, double angle, bool boundary) {
    Vec xh(2);
    xh << radius * std::cos(angle), radius * std::sin(angle);
    Vec x(3);
    x.head(2) = xh;
    x[2] = solve_level(w, n, xh, level);
    const double value = v(ChartPoint{x});
    if (boundary) {
      ++out.boundary_points;
      out.boundary_max = std::max(out.boundary_max, value);
      out.boundary_min = std::min(out.boundary_min, value);
    } else {
      ++out.interior_points;
      out.interior_max = std::max(out.interior_max, value);
      out.interior_min = std::min(out.interior_min, value);
    }
  };
  visit(0.0, 0.0, false);
  for (int k = 1; k <= grid.rings; ++k) {
    for (int j = 0; j < grid.ring_points; ++j) visit(r * k / (grid.rings + 1), kTwoPi * j / grid.ring_points, false);
  }
  for (int j = 0; j < grid.boundary_points; ++j) visit(r, kTwoPi * j / grid.boundary_points, true);
  out.passed = out.interior_max <= out.boundary_max + tolerance && out.interior_min >= out.boundary_min - tolerance;
  return out;
}

TrappedDirectionScan trapped_direction_scan(const ManifoldSpec& spec, const ChartPoint& p, int polar_count,
                                            int azimuth_count, double budget, const IntegratorOptions& integrator) {
  const int n = spec.disc_dim();
  if (n != 2) throw Error(ErrorCode::InvalidArgument, "direction scan is implemented for n = 2");
  if (polar_count < 2 || azimuth_count < 1) throw Error(ErrorCode::InvalidArgument, "scan grid too small");
  const Vec scale = spec.metric_diagonal(p.coords).cwiseSqrt();
  TrappedDirectionScan out;
  for (int j = 0; j < polar_count; ++j) {
    const double beta = kPi * j / (polar_count - 1);
    const bool pole = j == 0 || j == polar_count - 1;
    const int azimuths = pole ? 1 : azimuth_count;
    for (int k = 0; k < azimuths; ++k) {
      const double a = kTwoPi * k / azimuth_count;
      Vec w(3);
      if (pole) {
        w << 0.0, 0.0, j == 0 ? 1.0 : -1.0;
      } else {
        w << std::sin(beta) * std::cos(a), std::sin(beta) * std::sin(a), std::cos(beta);
      }
      const Vec chart = w.cwiseQuotient(scale);
      ++out.directions;
      const TraceResult r = integrate_until_exit(spec, TangentVector{p, chart}, budget, integrator);
      if (r.verdict.status == ExitStatus::Trapped) out.trapped.push_back(chart);
    }
  }
  return out;
}

}  // namespace scatterlab
