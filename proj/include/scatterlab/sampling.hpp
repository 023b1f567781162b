#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "scatterlab/manifold.hpp"

namespace scatterlab {

// Deterministic grid over boundary points x inward directions. Directions are open-interval
// nodes (never exactly tangential); tangential_count adds that many exact tangential
// directions per boundary node as an explicit opt-in. Supported for n <= 2.
struct GridSampling {
  int u_count = 10;
  int theta_count = 10;
  int direction_count = 10;
  int tangential_count = 0;
};

// Uniform w.r.t. boundary area x solid angle on the open inward hemisphere.
struct MonteCarloSampling {
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

using Sampling = std::variant<GridSampling, MonteCarloSampling>;

// Monte Carlo samples are drawn in fixed-size batches, each from its own generator seeded by
// (seed, batch index), so sample i never depends on the worker count.
inline constexpr std::size_t kSampleBatch = 4096;

std::string describe(const Sampling& sampling);
std::size_t sample_count(const Sampling& sampling, const BoundaryType& boundary);

BoundaryVector grid_vector(const GridSampling& grid, const BoundaryType& boundary, std::size_t index);
std::vector<BoundaryVector> monte_carlo_batch(const BoundaryType& boundary, std::uint64_t seed,
                                              std::size_t batch_index, std::size_t count);

// Calls fn(index, vector) for every sample; batches are spread over `workers` threads.
// fn must only write to per-index storage. The first exception (by batch index) is rethrown.
void for_each_sample(const Sampling& sampling, const BoundaryType& boundary, int workers,
                     const std::function<void(std::size_t, const BoundaryVector&)>& fn);

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace scatterlab
