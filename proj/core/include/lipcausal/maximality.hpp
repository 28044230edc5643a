#pragma once

// Lorentzian length of sampled curves and direct search for maximal causal
// curves between fixed endpoints.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lipcausal/curve.hpp"
#include "lipcausal/filippov.hpp"
#include "lipcausal/metric_field.hpp"

namespace lipcausal {

/// g(Delta, Delta) at the segment midpoint.
double segment_quadratic(const MetricField& g, const Vec& a, const Vec& b);
/// sqrt(max(0, g_mid(Delta, Delta))).
double segment_length(const MetricField& g, const Vec& a, const Vec& b);

/// A segment is causal when g_mid(Delta, Delta) >= -null_tol |Delta|^2 and it is
/// future directed (Delta_0 >= 0).
bool segment_is_causal(const MetricField& g, const Vec& a, const Vec& b, double null_tol = kNullTol);

struct CausalityReport {
  bool causal = true;
  std::size_t first_violation = 0;
  double worst_ratio = 0.0;  // min g_mid(D,D) / |D|^2
};

CausalityReport check_causal(const MetricField& g, const SampledCurve& curve, double null_tol = kNullTol);

/// Polygonal Lorentzian length with midpoint metric evaluation. Throws NotCausal.
double lorentzian_length(const SampledCurve& curve, const MetricField& g, double null_tol = kNullTol);

/// Gauss-Legendre length of the cubic Hermite interpolant (curves with
/// velocities). Throws NotCausal if the integrand goes spacelike.
double smooth_lorentzian_length(const SampledCurve& curve, const MetricField& g, double null_tol = kNullTol);

enum class LengthRegime { Length, Surrogate };
const char* to_string(LengthRegime regime);

struct MaximizeOptions {
  int max_iterations = 10000;
  /// Stop when the gradient-mapping norm falls below this value.
  double tolerance = 1e-6;
  double null_tol = kNullTol;
  /// Number of starting polygons (the first is always the connector itself).
  int multistart = 1;
  int threads = 1;
  std::uint64_t seed = 0;
  /// Optional starting polygon with segments + 1 points from x to y.
  std::optional<std::vector<Vec>> initial;
};

struct MaximizationResult {
  SampledCurve curve;
  double length = 0.0;
  int iterations = 0;
  bool converged = false;
  double first_order_residual = 0.0;
  LengthRegime regime = LengthRegime::Length;
  int start_index = 0;
};

/// Causal polygon from x to y with the given number of segments: the chord if
/// it is causal, otherwise a random two-piece search. Throws NotCausallyRelated.
std::vector<Vec> find_causal_connector(const MetricField& g, const Vec& x, const Vec& y, int segments,
                                       std::uint64_t seed = 0, double null_tol = kNullTol);

/// Projected gradient ascent of the polygonal length over the interior nodes of
/// an m-segment curve on the fixed parameter grid t_i = i / m.
MaximizationResult maximize_causal_curve(const MetricField& g, const Vec& x, const Vec& y, int segments,
                                         const MaximizeOptions& options = {});

struct ShootOptions {
  double step = 1.0 / 256.0;
  double tolerance = 1e-8;
  int max_iterations = 100;
  IntegrationOptions integration{};
};

struct ShootResult {
  GeodesicTrajectory trajectory;
  Vec v0;
  int iterations = 0;  // iterates evaluated, the initial guess included
  std::vector<double> residuals;
};

/// Newton iteration on v0 -> gamma_{v0}(1) - y with a finite-difference
/// Jacobian. Throws NoConvergence with the residual history.
ShootResult shoot_geodesic(const MetricField& g, const Vec& x, const Vec& y, const Vec& v0_guess,
                           const ShootOptions& options = {});

struct ProbeReport {
  int trials = 0;
  int improving = 0;
  int rejected_noncausal = 0;
  double max_increase = 0.0;  // largest L_new - L, may be negative
  double base_length = 0.0;
};

/// Random bump perturbations of the interior (endpoints fixed, sup norm equal to
/// `amplitude`) that keep the curve causal; counts strict length increases.
ProbeReport local_maximality_probe(const SampledCurve& curve, const MetricField& g, int trials, double amplitude,
                                   std::uint64_t seed = 0);

struct LimitExperimentOptions {
  std::vector<int> indices{2, 4, 8, 16, 32, 64};
  int pieces = 4;
  int samples = 257;
  int hull_checks = 100;
  std::uint64_t seed = 0;
};

struct LimitExperiment {
  std::vector<SampledCurve> sequence;
  SampledCurve limit;
  LimitReport report;
  std::vector<double> lengths;
};

/// Concatenations of timelike geodesics from x to y_n = y - (0, e/n) that
/// approach the lightlike segment from x to y (y - x null). Each member is made
/// of `pieces` shot geodesic pieces through intermediate points on the chord
/// to y_n and is sampled on the common parameter interval [0, 1].
LimitExperiment lightlike_limit_experiment(const MetricField& g, const Vec& x, const Vec& y,
                                           const LimitExperimentOptions& options = {});

}  // namespace lipcausal
