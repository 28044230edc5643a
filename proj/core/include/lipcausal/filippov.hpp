#pragma once

// Event-driven integration of the geodesic differential inclusion
//   x'' + Gamma_x(x', x') = 0  (in the sense of Filippov)
// for piecewise smooth Lipschitz metrics.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lipcausal/connection.hpp"
#include "lipcausal/curve.hpp"
#include "lipcausal/metric_field.hpp"

namespace lipcausal {

enum class EventMode { Crossing, Sliding, SlidingExit };

const char* to_string(EventMode mode);

struct TrajectoryEvent {
  double tau = 0.0;
  std::size_t interface_id = 0;
  EventMode mode = EventMode::Crossing;
  std::size_t from_branch = 0;
  std::size_t to_branch = 0;
  /// Convex weight of the plus-side acceleration while sliding.
  double theta = 0.0;
};

struct GeodesicTrajectory {
  std::vector<FilippovState> states;
  std::vector<std::size_t> branch_ids;
  std::vector<TrajectoryEvent> events;
  std::string metric_ref;
  /// The trajectory left the chart before tau_end.
  bool truncated = false;

  /// Post-hoc check that -x'' (finite differences of the output) lies in the
  /// sampled essential hull. Empty when no checks were requested.
  int hull_checks = 0;
  int hull_violations = 0;
  double hull_max_margin = 0.0;

  double tau_begin() const { return states.front().tau; }
  double tau_end() const { return states.back().tau; }
  /// Curve with the integrator's velocities.
  SampledCurve as_curve() const;
};

struct IntegrationOptions {
  int hull_checks = 100;
  int hull_count = 64;
  std::uint64_t seed = 1;
  int bisection_iterations = 40;
  double event_tol = 1e-12;
};

/// Scale-aware hull tolerance 1e-6 (1 + |v|^2).
double default_hull_tol(const Vec& v);

/// Classical RK4 inside smooth branches, interface events by bisection,
/// Filippov selection at each event. Stops at tau_end or on chart exit.
/// Throws SlidingAmbiguity / InterfaceIntersection when the inclusion has no
/// unambiguous continuation.
GeodesicTrajectory integrate_geodesic(const MetricField& g, const FilippovState& init, double tau_end, double step,
                                      const IntegrationOptions& options = {});

struct FilippovSelection {
  enum class Kind { Crossing, Sliding } kind = Kind::Crossing;
  /// Downstream branch (crossing) or the minus-side branch (sliding).
  std::size_t branch = 0;
  std::size_t minus_branch = 0;
  std::size_t plus_branch = 0;
  double theta = 0.0;
  Vec a_minus;
  Vec a_plus;
  Vec acceleration;
  /// Distance of -acceleration to the sampled essential hull, when computed.
  std::optional<double> hull_margin;
};

/// Event rule at a point on interface j: transversal velocity crosses into the
/// downstream branch; tangential velocity with both sides pushing towards the
/// interface slides with the convex weight theta that keeps phi'' = 0.
FilippovSelection filippov_select(const MetricField& g, const FilippovState& state, std::size_t interface_id,
                                  bool compute_hull_margin = false, std::uint64_t seed = 7);

struct Reparametrization {
  SampledCurve curve;
  double ell = 0.0;
  double length = 0.0;
  /// f(b) - b0; zero up to integration error when ell is consistent with the length.
  double endpoint_residual = 0.0;
  std::vector<double> f;
};

/// Solves f' = ell / |gamma'(f)|_g, f(a) = a0, on the output interval [a, b].
/// With `ell` empty, ell = L(gamma) / (b - a). With an explicit ell the output
/// interval is [a, a + L / ell]. Throws NotUniformlyTimelike if the speed
/// drops to the null tolerance.
Reparametrization reparametrize_constant_speed(const SampledCurve& curve, const MetricField& g,
                                               std::optional<double> ell = std::nullopt,
                                               std::optional<std::pair<double, double>> interval = std::nullopt,
                                               std::optional<std::size_t> samples = std::nullopt);

/// Lorentzian speed |gamma'|_g at each sample.
std::vector<double> lorentzian_speeds(const SampledCurve& curve, const MetricField& g);

struct VelocityUpperBoundReport {
  double euclidean_length = 0.0;
  double interval = 0.0;
  double bound = 0.0;
  double max_speed = 0.0;
  double min_slack = 0.0;
  bool holds = true;
};

/// |gamma'(t)| <= (e^{C r} - 1) / C / (b - a) at every sample, r the Euclidean length.
VelocityUpperBoundReport velocity_upper_bound_check(const SampledCurve& curve, double C);

struct LimitReport {
  std::vector<double> sup_distance;
  bool converged = false;
  int check_points = 0;
  double max_hull_margin = 0.0;
  double max_hull_ratio = 0.0;  // margin / hull_tol
  bool geodesic = false;
};

/// Uniform convergence of the sequence to `limit` and hull membership of the
/// limit's numerical acceleration at `checks` random interior points.
LimitReport pointwise_limit_is_geodesic(const std::vector<SampledCurve>& sequence, const SampledCurve& limit,
                                        const MetricField& g, int checks = 100, std::uint64_t seed = 11);

/// Trajectory CSV: tau,x_0..x_{n-1},v_0..v_{n-1},branch_id
void write_trajectory_csv(std::ostream& os, const GeodesicTrajectory& traj);
void write_trajectory_csv(const std::string& path, const GeodesicTrajectory& traj);

}  // namespace lipcausal
