#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "scatterlab/geodesic.hpp"
#include "scatterlab/scattering.hpp"

namespace scatterlab {

// |S^k|, the area of the unit k-sphere in R^{k+1} (|S^0| = 2).
double sphere_area(int k);
// Area of S^{n-1}(R) x S^1(L).
double boundary_area(const BoundaryType& boundary);
// Vol(M) = normalization * E[TT <V, eta+>] under uniform sampling of boundary x inward
// hemisphere: boundary area times hemisphere solid angle over the full sphere solid angle.
double santalo_normalization(const BoundaryType& boundary);

struct SantaloOptions {
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  double budget = 0.0;  // <= 0: spec default
  int workers = 1;
  IntegratorOptions integrator;
};

struct SantaloEstimate {
  double volume = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
  double budget = 0.0;
  std::size_t censored = 0;
  double censored_fraction = 0.0;
  std::uint64_t seed = 0;
  double normalization = 0.0;
};

// Trapped samples contribute budget * <V, eta+>, a lower bound.
SantaloEstimate santalo_volume(const ManifoldSpec& spec, const SantaloOptions& options);

struct TrappedRung {
  double budget = 0.0;
  std::size_t samples = 0;   // open hemisphere samples (Grazing excluded)
  std::size_t trapped = 0;
  std::size_t grazing = 0;
  double fraction = 0.0;
  double standard_error = 0.0;  // sqrt(p (1 - p) / N)
  double wilson_low = 0.0;      // 95% Wilson interval
  double wilson_high = 0.0;
};

// One trace per sample at the largest budget; a sample is trapped at rung T iff it has not
// exited by time T, so the fractions are non-increasing in the budget by construction.
std::vector<TrappedRung> trapped_ladder(const ManifoldSpec& spec, std::span<const double> budgets,
                                        std::size_t samples, std::uint64_t seed, int workers = 1,
                                        const IntegratorOptions& integrator = {});
TrappedRung trapped_fraction(const ManifoldSpec& spec, double budget, std::size_t samples, std::uint64_t seed,
                             int workers = 1, const IntegratorOptions& integrator = {});

// f_t(p) = d(p, gamma_V(t)) - t on the universal cover. The defining geodesic must not be
// vertical and must have left the disc by time t (Contract otherwise).
class BusemannFunction {
 public:
  BusemannFunction(const ManifoldSpec& spec, const TangentVector& defining, double truncation,
                   const ConnectOptions& options = {});

  double operator()(const ChartPoint& p) const;
  // Central differences in chart coordinates.
  Vec gradient(const ChartPoint& p, double h = 1e-4) const;
  // Norm of the gradient measured with the inverse metric.
  double gradient_norm(const ChartPoint& p, double h = 1e-4) const;

  const ChartPoint& ray_point() const { return target_; }
  // Unit direction of gamma_V at time t (the exterior line direction).
  const Vec& ray_direction() const { return direction_; }
  double truncation() const { return t_; }
  const ManifoldSpec& spec() const { return spec_; }

 private:
  ManifoldSpec spec_;
  double t_;
  ChartPoint target_;
  Vec direction_;
  ConnectOptions options_;
};

double busemann_value(const ManifoldSpec& spec, const TangentVector& defining, const ChartPoint& p, double t,
                      const ConnectOptions& options = {});

struct LevelSetProbe {
  double level = 0.0;
  std::size_t interior_points = 0;
  std::size_t boundary_points = 0;
  double interior_max = 0.0, interior_min = 0.0;
  double boundary_max = 0.0, boundary_min = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct LevelSetGrid {
  int rings = 3;           // interior radii R k / (rings + 1)
  int ring_points = 12;
  int boundary_points = 36;
};

// Samples the slab {f^W = level} over the disc: for each horizontal point the angle solving
// f^W = level is found by bracketing root finding; f^V is then compared between interior and
// boundary points.
LevelSetProbe level_set_extrema_probe(const BusemannFunction& v, const BusemannFunction& w, double level,
                                      const LevelSetGrid& grid = {}, double tolerance = 1e-3);

struct TrappedDirectionScan {
  std::size_t directions = 0;
  std::vector<Vec> trapped;  // chart components
};

// Polar angle from +theta on a closed grid (both poles included) times azimuths.
TrappedDirectionScan trapped_direction_scan(const ManifoldSpec& spec, const ChartPoint& p, int polar_count,
                                            int azimuth_count, double budget,
                                            const IntegratorOptions& integrator = {});

}  // namespace scatterlab
