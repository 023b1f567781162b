#pragma once

#include <numbers>
#include <string>
#include <utility>
#include <variant>

#include "scatterlab/linalg.hpp"

namespace scatterlab {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Generating function F(t) = 1 + h(shift + t) of a surface of revolution, where
/// h(u) = amplitude * exp(1 - eps^2 / (eps^2 - u^2)) for |u| < eps and 0 otherwise.
/// h is C-infinity, compactly supported in (-eps, eps) and normalized so h(0) = amplitude.
struct BumpProfile {
  double shift = 0.0;
  double epsilon = 0.2;
  double amplitude = 0.05;

  double bump(double u) const;
  double bump_d1(double u) const;
  double bump_d2(double u) const;

  double value(double t) const { return 1.0 + bump(shift + t); }
  double d1(double t) const { return bump_d1(shift + t); }
  double d2(double t) const { return bump_d2(shift + t); }

  // Support of t -> h(shift + t); empty in effect when amplitude == 0.
  std::pair<double, double> support() const { return {-shift - epsilon, -shift + epsilon}; }
};

struct FlatProduct {
  int n = 2;
  double disc_radius = 1.0;
  double circle_length = kTwoPi;
};

// Chart (t, alpha) on [-1, 1] x S^1 with metric dt^2 + F(t)^2 dalpha^2. Treated as the n = 1
// member of the D^n x S^1 family: the disc is [-1, 1] and its boundary sphere is {-1, +1}.
struct SurfaceOfRevolution {
  BumpProfile profile;
};

/// Interior conformal perturbation g = (1 + psi(x)) g_flat with
/// psi(x) = amplitude * exp(1 - r^2 / (r^2 - |x_h - center|^2)) inside the ball of radius r.
struct ConformalBump {
  double amplitude = 0.2;
  double radius = 0.5;
  Vec center;

  double value(const Vec& xh) const;
  Vec gradient(const Vec& xh) const;
};

struct PerturbedProduct {
  FlatProduct base;
  ConformalBump perturbation;
};

/// Everything two manifolds must share for their boundaries to be identified.
struct BoundaryType {
  int n = 0;
  double radius = 1.0;
  double circle_length = kTwoPi;

  bool operator==(const BoundaryType&) const = default;
};

// Compact: the angle is periodic and stored reduced. UniversalCover: the angle is unwrapped
// to the real line and the disc factor extends flat to all of R^n.
enum class Model { Compact, UniversalCover };

struct ChartPoint {
  Vec coords;  // (x_1..x_n, theta)
};

struct TangentVector {
  ChartPoint base;
  Vec components;  // chart basis
};

struct BoundaryPoint {
  Vec u;  // unit vector of R^n (u = +-1 for revolution surfaces)
  double theta = 0.0;
};

enum class Orientation { Inward, Outward, Tangential };

// Directions are given in the orthonormal boundary frame (e_1..e_n, e_theta), which is the
// same for every manifold sharing a BoundaryType.
struct BoundaryVector {
  BoundaryPoint point;
  Vec direction;
};

struct EmbeddedBoundaryVector {
  TangentVector vector;
  Vec inward_normal;  // chart components
  Orientation orientation = Orientation::Inward;
};

class ManifoldSpec {
 public:
  using Kind = std::variant<FlatProduct, SurfaceOfRevolution, PerturbedProduct>;

  // trapped_budget <= 0 selects the default of 1000 diameters.
  explicit ManifoldSpec(Kind kind, double trapped_budget = 0.0);

  static ManifoldSpec flat_product(int n, double disc_radius = 1.0, double circle_length = kTwoPi);
  static ManifoldSpec surface_of_revolution(const BumpProfile& profile);
  static ManifoldSpec perturbed_product(const FlatProduct& base, const ConformalBump& perturbation);

  const Kind& kind() const { return kind_; }
  std::string kind_name() const;
  bool is_flat() const;

  int disc_dim() const;
  int dim() const { return disc_dim() + 1; }
  double disc_radius() const;
  double circle_length() const;
  BoundaryType boundary_type() const;
  // Diameter of the flat product with the same boundary; used for default budgets.
  double diameter() const;
  double trapped_budget() const { return trapped_budget_; }

  std::string description() const;
  std::string fingerprint() const;

  // Evaluations on the extended chart R^n x R; no domain checks.
  Vec metric_diagonal(const Vec& x) const;
  Mat metric(const Vec& x) const;
  Christoffel christoffel(const Vec& x) const;
  Vec acceleration(const Vec& x, const Vec& v) const;
  double norm_squared(const Vec& x, const Vec& v) const;
  double boundary_function(const Vec& x) const;
  // Largest step that cannot jump over the curved part of the metric.
  double step_cap(const Vec& x) const;
  bool in_domain(const Vec& x, Model model) const;

 private:
  Kind kind_;
  double trapped_budget_;
};

double reduce_angle(double angle, double period);
// min(|a - b|, period - |a - b|) after reduction.
double angle_distance(double a, double b, double period);

Mat metric_at(const ManifoldSpec& spec, const ChartPoint& p, Model model = Model::Compact);
Christoffel christoffel_at(const ManifoldSpec& spec, const ChartPoint& p, Model model = Model::Compact);
// Centered finite differences of metric_at; cross-check for christoffel_at.
Christoffel christoffel_finite_difference(const ManifoldSpec& spec, const Vec& x, double h = 1e-5);

// <V, eta+> in the boundary frame.
double normal_component(const BoundaryVector& b);
Orientation orientation_of(const BoundaryVector& b, double grazing_tol = 1e-9);
ChartPoint boundary_chart_point(const ManifoldSpec& spec, const BoundaryPoint& p);

EmbeddedBoundaryVector boundary_embed(const ManifoldSpec& spec, const BoundaryVector& b,
                                      double grazing_tol = 1e-9);

// Inverse of boundary_embed: canonical coordinates of a chart vector at a boundary point.
// The direction is renormalized to unit length in the boundary frame.
BoundaryVector boundary_from_chart(const ManifoldSpec& spec, const Vec& x, const Vec& v);

}  // namespace scatterlab
