#pragma once

#include "scatterlab/manifold.hpp"

// Closed-form and brute-force reference values, written independently of the integrators.
namespace scatterlab::oracles {

// Vol(D^n(R) x S^1(L)).
double flat_product_volume(int n, double radius, double circle_length);

// P(TT > T) on D^2(R) x S^1 for uniform (boundary point, inward direction): with c the normal
// component and psi the tangent azimuth, TT = 2 R c / (c^2 + (1 - c^2) cos^2 psi), giving
// (2 / pi) int_0^{min(1, 2R/T)} asin(sqrt(q(c))) dc, q = (2 R c / T - c^2) / (1 - c^2).
double flat_trapped_tail(double budget, double radius = 1.0);
// Midpoint grid count of {TT > T} over c in (0, min(1, 2R/T)) and the psi bands where it can hold.
double flat_trapped_tail_bruteforce(double budget, double radius = 1.0, int grid = 2000);

// Area of the part of a revolution surface swept by geodesics from the boundary, which is what
// Santalo's formula returns: 4 int F asin(1/F) dt. It equals the full area 2 pi int F dt only
// when no geodesic is trapped (F == 1).
double revolution_santalo_volume(const BumpProfile& profile);
double revolution_area(const BumpProfile& profile);

}  // namespace scatterlab::oracles
