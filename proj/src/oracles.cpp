#include "scatterlab/oracles.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace scatterlab::oracles {

double flat_product_volume(int n, double radius, double circle_length) {
  const double ball = std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
  return ball * std::pow(radius, n) * circle_length;
}

double flat_trapped_tail(double budget, double radius) {
  const double top = std::min(1.0, 2.0 * radius / budget);
  auto integrand = [&](double c) {
    const double q = (2.0 * radius * c / budget - c * c) / ((1.0 - c) * (1.0 + c));
    return std::asin(std::sqrt(std::clamp(q, 0.0, 1.0)));
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  return 2.0 / kPi * ts.integrate(integrand, 0.0, top);
}

double flat_trapped_tail_bruteforce(double budget, double radius, int grid) {
  const double top = std::min(1.0, 2.0 * radius / budget);
  // TT > T forces |cos psi| < sqrt(q_max); the grid only covers the two psi bands around
  // +-pi/2 where that can happen, which keeps large budgets resolvable.
  const double rt = std::min(radius / budget, 0.5);
  const double q_max = rt * rt / (1.0 - rt * rt);
  const double band = budget <= 4.0 * radius ? 0.5 * kPi : std::asin(std::min(1.0, 1.5 * std::sqrt(q_max)));
  long long count = 0;
  for (int i = 0; i < grid; ++i) {
    const double c = top * (i + 0.5) / grid;
    for (int j = 0; j < grid; ++j) {
      const double psi = 0.5 * kPi + band * (2.0 * (j + 0.5) / grid - 1.0);
      const double cp = std::cos(psi);
      const double vh2 = c * c + (1.0 - c * c) * cp * cp;
      if (2.0 * radius * c > budget * vh2) ++count;
    }
  }
  // Two bands of width 2 band out of 2 pi.
  return top * (2.0 * band / kPi) * static_cast<double>(count) / (static_cast<double>(grid) * grid);
}

namespace {

template <class F>
double integrate_profile(const BumpProfile& profile, F f) {
  using boost::math::quadrature::gauss_kronrod;
  const auto [lo, hi] = profile.support();
  const double a = std::clamp(lo, -1.0, 1.0), b = std::clamp(hi, -1.0, 1.0);
  double sum = 0.0;
  const double pts[] = {-1.0, a, b, 1.0};
  for (int i = 0; i < 3; ++i) {
    if (pts[i + 1] > pts[i]) sum += gauss_kronrod<double, 61>::integrate(f, pts[i], pts[i + 1], 15, 1e-14);
  }
  return sum;
}

}  // namespace

double revolution_santalo_volume(const BumpProfile& profile) {
  return 4.0 * integrate_profile(profile, [&](double t) {
           const double f = profile.value(t);
           return f * std::asin(1.0 / f);
         });
}

double revolution_area(const BumpProfile& profile) {
  return kTwoPi * integrate_profile(profile, [&](double t) { return profile.value(t); });
}

}  // namespace scatterlab::oracles
