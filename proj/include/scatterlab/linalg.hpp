#pragma once

#include <array>
#include <cstddef>

#include <Eigen/Dense>

namespace scatterlab {

// Chart dimension never exceeds this; fixed max size keeps hot loops off the heap.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// Christoffel symbols of the second kind, Γ^k_ij, stored densely.
class Christoffel {
 public:
  explicit Christoffel(int dim) : dim_(dim) { data_.fill(0.0); }

  int dim() const { return dim_; }
  double& operator()(int k, int i, int j) { return data_[index(k, i, j)]; }
  double operator()(int k, int i, int j) const { return data_[index(k, i, j)]; }

 private:
  std::size_t index(int k, int i, int j) const {
    return static_cast<std::size_t>((k * kMaxDim + i) * kMaxDim + j);
  }

  int dim_;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> data_{};
};

}  // namespace scatterlab
