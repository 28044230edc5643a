#pragma once

// Chord-deviation profiles and Hoelder-exponent estimates for the derivative
// of a sampled curve.

#include <optional>
#include <utility>
#include <vector>

#include "lipcausal/curve.hpp"
#include "lipcausal/filippov.hpp"
#include "lipcausal/maximality.hpp"
#include "lipcausal/metric_field.hpp"

namespace lipcausal {

/// Max Euclidean distance from curve samples in [t, t+h] to the chord
/// [gamma(t), gamma(t+h)]. Throws InsufficientSampling below 8 samples.
double chord_deviation(const SampledCurve& curve, double t, double h);

struct DeviationProfile {
  std::vector<double> h_values;
  std::vector<double> dev;
};

/// dev(h) = sup over window starts on a stride of h/4.
DeviationProfile deviation_profile(const SampledCurve& curve, const std::vector<double>& h_grid);

struct RegularityReport {
  double alpha_hat = 0.0;
  double C_hat = 0.0;
  double fit_r2 = 0.0;
  std::pair<double, double> h_range{0.0, 0.0};
  std::vector<double> h_grid;
  std::vector<double> dev;
  bool line_exact = false;
  /// Lower bounds from the theory, attached by regularity_of_maximizer.
  std::optional<double> floor_quarter;
  std::optional<double> floor_alpha;
};

/// Dyadic windows 2^-3 .. 2^-9 of the parameter range, keeping h >= 8 spacing.
std::vector<double> default_h_grid(const SampledCurve& curve);

/// Least-squares slope of log dev(h) against log h; alpha_hat = slope - 1.
RegularityReport estimate_holder_exponent(const SampledCurve& curve,
                                          std::optional<std::vector<double>> h_grid = std::nullopt);

/// Euclidean arclength parametrization on [0, S]: cumulative chord length and
/// monotone cubic (PCHIP) interpolation of each coordinate.
SampledCurve arclength_resample(const SampledCurve& curve, std::size_t intervals = 4096);

RegularityReport regularity_of_maximizer(const SampledCurve& curve, const MetricField& g);
RegularityReport regularity_of_maximizer(const MaximizationResult& result, const MetricField& g);
RegularityReport regularity_of_maximizer(const GeodesicTrajectory& traj, const MetricField& g);

/// True when dev(h) <= C h^{1+alpha} on every h of the grid.
bool tube_containment(const SampledCurve& curve, double alpha, double C, const std::vector<double>& h_grid);

/// Arclength-parametrized planar curve on [-1, 1] with gamma'(s) =
/// (cos theta, sin theta), theta(s) = |s|^beta, so gamma' is exactly
/// beta-Hoelder at s = 0.
SampledCurve holder_angle_curve(double beta, std::size_t samples);

}  // namespace lipcausal
