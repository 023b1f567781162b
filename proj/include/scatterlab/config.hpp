#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scatterlab/manifold.hpp"

namespace scatterlab {

// Key = value text format shared by every subcommand. One assignment per line; '#' starts a
// comment; blank lines are ignored; keys may appear at most once.
//
//   kind                    flat | revolution | perturbed
//   n                       disc dimension (flat, perturbed)
//   disc_radius             default 1
//   circle_length           default 2*pi
//   trapped_budget          default 1000 * diameter
//   bump.amplitude          revolution only, >= 0
//   bump.epsilon            revolution only, 0 < epsilon < 1/4
//   bump.shift              revolution only, |shift| < 1 - 2 epsilon
//   perturbation.amplitude  perturbed only, |amplitude| <= 0.5
//   perturbation.radius     perturbed only
//   perturbation.center     perturbed only, comma separated, n values
//   seed, samples, budget, workers, grid (u,theta,directions), out
struct ExperimentConfig {
  std::optional<ManifoldSpec> manifold;
  std::optional<std::uint64_t> seed;
  std::optional<long long> samples;
  std::optional<double> budget;
  std::optional<int> workers;
  std::optional<std::array<int, 3>> grid;
  std::optional<std::string> out;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

ManifoldSpec manifold_preset(std::string_view name);
std::vector<std::string> manifold_preset_names();

// Comma separated list of reals, e.g. "-0.5,0,0.5".
std::vector<double> parse_real_list(std::string_view text);

}  // namespace scatterlab
