#pragma once

// Checkers and samplers for the quantitative estimates: reverse triangle
// inequality with a distance term, its curve version, length comparison of
// nearby metrics and the velocity lower bound along maximal curves.

#include <cstdint>
#include <optional>
#include <vector>

#include "lipcausal/curve.hpp"
#include "lipcausal/lorentz.hpp"
#include "lipcausal/metric_field.hpp"

namespace lipcausal {

inline constexpr double kTriangleConstant = 0.1;

struct TriangleSlack {
  double slack = 0.0;
  double D = 0.0;
};

/// slack = |u+v|^2 - |u+v|(|u|+|v|) - D^2/10 with Minkowski norms and D the
/// Euclidean distance from u to the line spanned by u+v. Throws NotCausal for
/// non-causal or past-directed input.
TriangleSlack quantitative_triangle_slack(const Vec& u, const Vec& v);

/// Future causal vector: v_t uniform in (0, 1], spatial direction uniform on
/// the sphere, spatial radius uniform in [0, v_t].
Vec sample_future_causal(Rng& rng, Eigen::Index n);

struct InequalitySweepReport {
  long trials = 0;
  long violations = 0;
  double min_slack = 0.0;
  std::vector<Vec> argmin_witness;
  /// Min of (|w|^2 - |w|(|u|+|v|)) / D^2 over pairs with D > 1e-6.
  std::optional<double> empirical_best_constant;
  long constant_samples = 0;
};

/// Chunked sweep; results do not depend on the thread count.
InequalitySweepReport triangle_sweep(Eigen::Index n, long trials, std::uint64_t seed, int threads = 1);

/// Constant in the curve estimate for a constant form: A = 0.1 * min |eigenvalue|.
double form_constant(const BilinearForm& lambda);

struct ChordGap {
  double gap = 0.0;
  double bound = 0.0;
  double D = 0.0;
  double chord = 0.0;
  double A = 0.0;
  bool holds = true;
};

/// gap = |w|_lambda - L_lambda(curve), bound = A D^2 / |w|_lambda. Throws
/// NotCausal if a segment is not lambda-timelike.
ChordGap chord_length_gap(const SampledCurve& curve, const BilinearForm& lambda);

struct LengthComparison {
  double length1 = 0.0;
  double length2 = 0.0;
  double difference = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double bound = 0.0;
  bool holds = true;
};

/// |L1 - L2| <= delta sqrt(eps) + 1e-9 for a curve parametrized by Euclidean
/// arclength on an interval of length delta; eps is the sampled sup of
/// |g1(v,v) - g2(v,v)| over unit v, inflated by 5%.
LengthComparison length_comparison_check(const SampledCurve& curve, const MetricField& g1, const MetricField& g2,
                                         int samples = 10000, std::uint64_t seed = 0x71ULL);

struct VelocityLowerBound {
  double C = 0.0;
  double r_max = 0.0;
  double K = 0.0;
  double length = 0.0;
  double euclidean_length = 0.0;
  double min_speed = 0.0;
  double max_speed = 0.0;
  double required = 0.0;
  double margin = 0.0;
  bool lightlike = false;
  bool holds = true;
};

/// K = C r_max / (e^{C r_max} - 1); r_max = 4R bounds the Euclidean length of
/// causal curves in a normalized chart. Speeds are |D|_g / |D| per segment.
/// With zero length the check is |gamma'|_g <= null_speed_tol instead.
VelocityLowerBound velocity_lower_bound_check(const SampledCurve& curve, const MetricField& g,
                                              std::optional<double> C = std::nullopt, double tolerance = 1e-9,
                                              double null_speed_tol = 1e-8);

}  // namespace lipcausal
