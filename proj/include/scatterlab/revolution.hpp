#pragma once

#include <span>
#include <string>
#include <vector>

#include "scatterlab/scattering.hpp"

namespace scatterlab {

// |sin phi| above this is refused by the quadrature (NearGrazing).
inline constexpr double kNearGrazingCap = 0.999;

// phi is measured from the inward meridian, positive towards +alpha, so that the entry
// vector at end e is cos(phi) (-e) d/dt + sin(phi) (1/F) d/dalpha.
struct ClairautData {
  double constant = 0.0;      // c = F(entry) sin(phi)
  double one_minus_abs = 1.0;  // F(entry) - |c|, computed without cancellation
  int entry_end = -1;
  int t_direction = 1;        // sign of t' along the geodesic
};

ClairautData clairaut_data(const BumpProfile& profile, double phi, int entry_end);

struct ClairautExit {
  double delta_alpha = 0.0;
  double travel_time = 0.0;
  double exit_angle = 0.0;  // from the outward meridian at the exit end, positive towards +alpha
};

ClairautExit clairaut_exit(const BumpProfile& profile, double phi, int entry_end, double tolerance = 1e-10);

// Entry angle of a canonical boundary vector on a revolution surface.
double entry_angle(const BoundaryVector& b);

// Scattering by quadrature. Grazing starts give TT = 0; beyond the cap NearGrazing is raised.
LensRecord clairaut_scatter(const BumpProfile& profile, const BoundaryVector& b, double grazing_tol = 1e-9);

// F(t)^2 alpha' along a chart state (t, alpha, t', alpha').
double clairaut_invariant(const BumpProfile& profile, const Vec& x, const Vec& v);

double gaussian_curvature(const BumpProfile& profile, double t);

// min over {identity, t -> -t} of the sup-distance between curvature profiles; zero iff the
// profiles are related by one of the obvious isometries.
double non_isometry_witness(const BumpProfile& a, const BumpProfile& b, int samples = 4001);

// Open nodes phi_j = -pi/2 + pi (j + 1/2) / count.
std::vector<double> open_angle_grid(int count);

struct FamilyScanRow {
  double shift = 0.0;
  double phi = 0.0;
  double delta_alpha = 0.0;
  double travel_time = 0.0;
  double exit_angle = 0.0;
};

struct FamilyScan {
  BumpProfile base;  // shift ignored
  int entry_end = -1;
  std::vector<FamilyScanRow> rows;  // shift-major
  double max_delta_alpha = 0.0;     // max over phi of the spread across shifts
  double max_travel_time = 0.0;
  double max_exit_angle = 0.0;

  double max_deviation() const;
};

// Every shift is validated against the admissible range before any quadrature runs.
FamilyScan family_invariance_scan(const BumpProfile& base, std::span<const double> shifts,
                                  std::span<const double> angles, int entry_end = -1, int workers = 1);

}  // namespace scatterlab
