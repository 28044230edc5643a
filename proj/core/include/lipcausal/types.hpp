#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace lipcausal {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// A point of the chart, a tangent vector, or an acceleration. The first
// coordinate is the time component.
using LorentzVector = Vec;

/// Default null tolerance used for causal classification of segments and speeds.
inline constexpr double kNullTol = 1e-10;

/// Engine used for every Monte Carlo routine. Seeds are always explicit.
using Rng = std::mt19937_64;

/// Derives an independent seed for a named sub-stream of `seed`.
std::uint64_t substream_seed(std::uint64_t seed, std::string_view name);
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

/// Uniform point in the closed Euclidean ball of radius `radius` in R^dim.
Vec uniform_in_ball(Rng& rng, Eigen::Index dim, double radius);
/// Uniform direction on the unit sphere S^{dim-1}.
Vec uniform_on_sphere(Rng& rng, Eigen::Index dim);

}  // namespace lipcausal
