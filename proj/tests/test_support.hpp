#pragma once

#include <cmath>
#include <initializer_list>
#include <random>

#include "scatterlab/errors.hpp"
#include "scatterlab/manifold.hpp"

namespace testing {

inline scatterlab::Vec vec(std::initializer_list<double> xs) {
  scatterlab::Vec v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

template <class F>
scatterlab::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const scatterlab::Error& e) {
    return e.code();
  }
  return static_cast<scatterlab::ErrorCode>(0);
}

// Seeded generator of inward unit boundary vectors (uniform point, Gaussian direction).
inline scatterlab::BoundaryVector random_inward(std::mt19937_64& rng, int n, double period) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  scatterlab::BoundaryVector b;
  b.point.u.resize(n);
  if (n == 1) {
    b.point.u[0] = ud(rng) < 0.5 ? -1.0 : 1.0;
  } else {
    for (int i = 0; i < n; ++i) b.point.u[i] = nd(rng);
    b.point.u.normalize();
  }
  b.point.theta = period * ud(rng);
  b.direction.resize(n + 1);
  for (int i = 0; i <= n; ++i) b.direction[i] = nd(rng);
  b.direction.normalize();
  if (b.point.u.dot(b.direction.head(n)) > 0) b.direction = -b.direction;
  return b;
}

// Revolution-surface boundary vector at end e with angle phi from the inward meridian.
inline scatterlab::BoundaryVector revolution_vector(int end, double alpha, double phi) {
  return {scatterlab::BoundaryPoint{vec({static_cast<double>(end)}), alpha},
          vec({-end * std::cos(phi), std::sin(phi)})};
}

}  // namespace testing
