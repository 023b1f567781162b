#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "scatterlab/manifold.hpp"

namespace scatterlab {

// Step control for the Dormand-Prince 5(4) integrator. The defaults are the ones every
// tolerance in the test suites is calibrated against.
struct IntegratorOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  double max_step = 0.0;      // 0: use ManifoldSpec::step_cap
  double min_step = 1e-13;    // underflow is an error, never clamped
  double event_tol = 1e-12;   // time resolution of the boundary crossing
  double grazing_tol = 1e-9;  // <V, eta+> below this starts as Grazing
  double unit_tol = 1e-9;     // accepted deviation of the start from unit speed
  bool record = false;        // keep the step history
  std::size_t max_steps = 50'000'000;
};

struct GeodesicState {
  ChartPoint position;
  Vec velocity;
  double elapsed = 0.0;
};

struct TrajectorySample {
  double elapsed = 0.0;
  Vec coords;
  Vec velocity;
};

using Trajectory = std::vector<TrajectorySample>;

enum class ExitStatus { Exited, Trapped, Grazing };

const char* exit_status_name(ExitStatus status);

// Trapped is always censored at a finite budget: travel_time then holds the budget reached.
struct ExitVerdict {
  ExitStatus status = ExitStatus::Trapped;
  std::optional<BoundaryVector> exit;  // outward exit vector, or the start itself when Grazing
  double travel_time = 0.0;
};

struct TraceResult {
  ExitVerdict verdict;
  GeodesicState final_state;
  Trajectory trajectory;
  double max_energy_drift = 0.0;  // largest per-step |g(v,v) - 1| before the velocity is restored
  std::size_t steps = 0;
};

TraceResult integrate_until_exit(const ManifoldSpec& spec, const BoundaryVector& start, double budget,
                                 const IntegratorOptions& options = {});
// Interior starts; a start on the boundary is routed through the boundary overload.
TraceResult integrate_until_exit(const ManifoldSpec& spec, const TangentVector& start, double budget,
                                 const IntegratorOptions& options = {});

// Follows the unit-speed geodesic for exactly `time`, ignoring the boundary (the metric is
// extended flat beyond it). In the Compact model the final angle is reduced.
GeodesicState integrate_for(const ManifoldSpec& spec, const TangentVector& start, double time,
                            Model model, const IntegratorOptions& options = {},
                            Trajectory* trajectory = nullptr);

struct ConnectOptions {
  double tolerance = 1e-10;  // endpoint residual, relative to max(1, chart distance)
  int max_iterations = 40;
  int starts = 8;
  double fd_step = 1e-7;
  IntegratorOptions integrator;
};

struct Connection {
  Vec initial_direction;  // unit, chart basis at p
  double length = 0.0;
  int winding = 0;
  int start_index = 0;
  int iterations = 0;
  double residual = 0.0;
};

// Shooting solver for the two-point problem. The target is q with its angle shifted by
// winding * circle_length. Starts are tried in order (the chart straight line first, then
// directions spread over the sphere) and the first converged geodesic is returned.
Connection connect(const ManifoldSpec& spec, const ChartPoint& p, const ChartPoint& q, int winding,
                   Model model, const ConnectOptions& options = {});

// Compact: minimum length of connect over the given windings. UniversalCover: points are
// distinct lifts already, so the windings are ignored and only winding 0 is used.
double distance(const ManifoldSpec& spec, const ChartPoint& p, const ChartPoint& q,
                std::span<const int> windings, Model model, const ConnectOptions& options = {});

}  // namespace scatterlab
