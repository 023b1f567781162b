#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "scatterlab/geodesic.hpp"
#include "scatterlab/sampling.hpp"

namespace scatterlab {

struct LensRecord {
  BoundaryVector entry;
  std::optional<BoundaryVector> exit;  // outward; equal to entry when Grazing
  double travel_time = 0.0;            // censored at the budget when Trapped
  ExitStatus status = ExitStatus::Trapped;
};

// Closed-form chord on the flat product with boundary `boundary` (n = 1 is the flat cylinder).
LensRecord flat_oracle_scatter(const BoundaryType& boundary, const BoundaryVector& b,
                               double budget = std::numeric_limits<double>::infinity(),
                               double grazing_tol = 1e-9);

enum class LensMethod { Ode, Quadrature };

const char* lens_method_name(LensMethod method);

// budget <= 0 uses spec.trapped_budget(). Quadrature is available for surfaces of revolution only.
LensRecord scattering_map(const ManifoldSpec& spec, const BoundaryVector& b, double budget = 0.0,
                          LensMethod method = LensMethod::Ode, const IntegratorOptions& options = {});

struct LensTableOptions {
  LensMethod method = LensMethod::Ode;
  double budget = 0.0;  // <= 0: spec default
  int workers = 1;
  IntegratorOptions integrator;
};

struct LensTable {
  Sampling sampling;
  BoundaryType boundary;
  std::string spec_fingerprint;
  std::string spec_description;
  LensMethod method = LensMethod::Ode;
  double budget = 0.0;
  std::vector<LensRecord> records;
};

LensTable lens_table(const ManifoldSpec& spec, const Sampling& sampling, const LensTableOptions& options = {});

struct RecordDeviation {
  std::size_t index = 0;
  ExitStatus status_a = ExitStatus::Exited;
  ExitStatus status_b = ExitStatus::Exited;
  double position = 0.0;     // geodesic distance on S^{n-1}(R) x S^1 between exit points
  double direction = 0.0;    // angle between exit vectors, in [0, pi]
  double travel_time = 0.0;  // |TT_a - TT_b|
};

struct ComparisonReport {
  std::string sampling;
  std::string fingerprint_a;
  std::string fingerprint_b;
  std::vector<RecordDeviation> records;
  std::size_t compared = 0;             // both Exited or both Grazing
  std::size_t status_disagreements = 0;
  std::size_t trapped_vs_exited = 0;     // subset of the disagreements
  std::size_t censored_agreements = 0;   // both Trapped
  double max_position = 0.0, max_direction = 0.0, max_travel_time = 0.0;
  double mean_position = 0.0, mean_direction = 0.0, mean_travel_time = 0.0;

  double max_deviation() const;
  double trapped_vs_exited_fraction() const;
};

// Records are paired by index. Different sampling specs or record counts: SamplingMismatch;
// different boundary types: Identification.
ComparisonReport compare(const LensTable& a, const LensTable& b);

double boundary_distance(const BoundaryType& boundary, const BoundaryPoint& a, const BoundaryPoint& b);
// Angle between two vectors, robust near 0 and pi.
double vector_angle(const Vec& a, const Vec& b);

using BoundaryCurve = std::function<BoundaryVector(double)>;

struct FirstVariation {
  double length_derivative = 0.0;  // d/ds L(gamma_{V(s)}), central difference
  double boundary_term = 0.0;      // <gamma'(L), c_exit'> - <gamma'(0), c_entry'>
  double residual = 0.0;
};

// Central differences with step h on both sides of the identity. A status other than Exited
// anywhere on the stencil raises NotDifferentiable.
FirstVariation first_variation(const ManifoldSpec& spec, const BoundaryCurve& curve, double s, double h = 1e-4,
                               LensMethod method = LensMethod::Ode, const IntegratorOptions& options = {});

}  // namespace scatterlab
