#include "scatterlab/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "scatterlab/errors.hpp"

namespace scatterlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kGoldenAngle = 2.399963229728653;  // pi (3 - sqrt 5)

Vec grid_u(int n, int index, int count) {
  Vec u(n);
  if (n == 1) {
    u[0] = index % 2 == 0 ? -1.0 : 1.0;
  } else if (n == 2) {
    const double a = kTwoPi * index / count;
    u << std::cos(a), std::sin(a);
  } else {
    const double z = 1.0 - 2.0 * (index + 0.5) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = kGoldenAngle * index;
    u << r * std::cos(phi), r * std::sin(phi), z;
  }
  return u;
}

}  // namespace

std::string describe(const Sampling& sampling) {
  return std::visit(overloaded{
                        [](const GridSampling& g) {
                          std::ostringstream out;
                          out << "grid:u=" << g.u_count << ",theta=" << g.theta_count
                              << ",directions=" << g.direction_count << ",tangential=" << g.tangential_count;
                          return out.str();
                        },
                        [](const MonteCarloSampling& m) {
                          std::ostringstream out;
                          out << "montecarlo:samples=" << m.samples << ",seed=" << m.seed;
                          return out.str();
                        },
                    },
                    sampling);
}

std::size_t sample_count(const Sampling& sampling, const BoundaryType& boundary) {
  return std::visit(overloaded{
                        [&](const GridSampling& g) -> std::size_t {
                          if (boundary.n > 2) {
                            throw Error(ErrorCode::InvalidArgument,
                                        "grid sampling supports n <= 2; use Monte Carlo sampling");
                          }
                          if (g.u_count < 1 || g.theta_count < 1 || g.direction_count < 0 ||
                              g.tangential_count < 0 || g.direction_count + g.tangential_count < 1) {
                            throw Error(ErrorCode::InvalidArgument, "grid counts must be positive");
                          }
                          return static_cast<std::size_t>(g.u_count) * g.theta_count *
                                 (g.direction_count + g.tangential_count);
                        },
                        [](const MonteCarloSampling& m) {
                          if (m.samples == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
                          return m.samples;
                        },
                    },
                    sampling);
}

BoundaryVector grid_vector(const GridSampling& grid, const BoundaryType& boundary, std::size_t index) {
  const int n = boundary.n;
  const int per_point = grid.direction_count + grid.tangential_count;
  const int dir = static_cast<int>(index % per_point);
  const int it = static_cast<int>((index / per_point) % grid.theta_count);
  const int iu = static_cast<int>(index / (static_cast<std::size_t>(per_point) * grid.theta_count));

  BoundaryVector b;
  b.point.u = grid_u(n, iu, grid.u_count);
  b.point.theta = boundary.circle_length * it / grid.theta_count;

  const bool tangential = dir >= grid.direction_count;
  const int j = tangential ? dir - grid.direction_count : dir;
  const int m = tangential ? grid.tangential_count : grid.direction_count;
  Vec normal = Vec::Zero(n + 1);
  normal.head(n) = -b.point.u;
  Vec e_theta = Vec::Zero(n + 1);
  e_theta[n] = 1.0;
  if (n == 1) {
    const double phi = tangential ? (j % 2 == 0 ? 0.5 * kPi : -0.5 * kPi) : -0.5 * kPi + kPi * (j + 0.5) / m;
    b.direction = std::cos(phi) * normal + std::sin(phi) * e_theta;
    if (tangential) b.direction.head(1).setZero();
  } else {
    Vec e_tan = Vec::Zero(n + 1);
    e_tan[0] = -b.point.u[1];
    e_tan[1] = b.point.u[0];
    // Fibonacci lattice on the open hemisphere: cos of the polar angle uniform in (0, 1).
    const double cz = tangential ? 0.0 : 1.0 - (j + 0.5) / m;
    const double sz = std::sqrt(1.0 - cz * cz);
    const double az = tangential ? kTwoPi * j / m : kGoldenAngle * j;
    b.direction = cz * normal + sz * (std::cos(az) * e_tan + std::sin(az) * e_theta);
    if (tangential) b.direction.head(n) = sz * std::cos(az) * e_tan.head(n);
  }
  return b;
}

std::vector<BoundaryVector> monte_carlo_batch(const BoundaryType& boundary, std::uint64_t seed,
                                              std::size_t batch_index, std::size_t count) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(batch_index), static_cast<std::uint32_t>(batch_index >> 32),
                    0x5ca77e12u};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const int n = boundary.n;
  std::vector<BoundaryVector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    BoundaryVector b;
    b.point.u.resize(n);
    if (n == 1) {
      b.point.u[0] = uniform(rng) < 0.5 ? -1.0 : 1.0;
    } else {
      do {
        for (int k = 0; k < n; ++k) b.point.u[k] = normal(rng);
      } while (b.point.u.norm() == 0.0);
      b.point.u.normalize();
    }
    b.point.theta = boundary.circle_length * uniform(rng);
    b.direction.resize(n + 1);
    double c = 0.0;
    do {
      for (int k = 0; k <= n; ++k) b.direction[k] = normal(rng);
      c = -b.point.u.dot(b.direction.head(n));
    } while (c == 0.0 || b.direction.norm() == 0.0);
    b.direction.normalize();
    if (c < 0.0) b.direction = -b.direction;
    out.push_back(std::move(b));
  }
  return out;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const int threads = static_cast<int>(std::min<std::size_t>(std::max(1, workers), std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_index = count;
  std::exception_ptr failure;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

void for_each_sample(const Sampling& sampling, const BoundaryType& boundary, int workers,
                     const std::function<void(std::size_t, const BoundaryVector&)>& fn) {
  const std::size_t total = sample_count(sampling, boundary);
  const std::size_t batches = (total + kSampleBatch - 1) / kSampleBatch;
  parallel_for(batches, workers, [&](std::size_t batch) {
    const std::size_t begin = batch * kSampleBatch;
    const std::size_t end = std::min(total, begin + kSampleBatch);
    if (const auto* mc = std::get_if<MonteCarloSampling>(&sampling)) {
      const auto vectors = monte_carlo_batch(boundary, mc->seed, batch, end - begin);
      for (std::size_t i = begin; i < end; ++i) fn(i, vectors[i - begin]);
    } else {
      const auto& grid = std::get<GridSampling>(sampling);
      for (std::size_t i = begin; i < end; ++i) fn(i, grid_vector(grid, boundary, i));
    }
  });
}

}  // namespace scatterlab
