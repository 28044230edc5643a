#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lipcausal/types.hpp"

namespace lipcausal {

/// Curve as ordered (parameter, point) samples. Velocities are either stored
/// (e.g. from an integrator) or derived by second-order finite differences.
class SampledCurve {
 public:
  SampledCurve(std::vector<double> params, std::vector<Vec> points,
               std::optional<std::vector<Vec>> velocities = std::nullopt);

  const std::vector<double>& params() const noexcept { return params_; }
  const std::vector<Vec>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  Eigen::Index dim() const noexcept { return points_.front().size(); }
  double front_param() const noexcept { return params_.front(); }
  double back_param() const noexcept { return params_.back(); }
  bool has_velocities() const noexcept { return velocities_.has_value(); }

  /// Stored velocities, or derived ones.
  std::vector<Vec> velocities() const;

  /// Cubic Hermite interpolation on the samples and velocities.
  Vec point_at(double t) const;
  Vec velocity_at(double t) const;

  /// Length of the polygon through the samples.
  double euclidean_length() const;

 private:
  std::size_t interval_of(double t) const;

  std::vector<double> params_;
  std::vector<Vec> points_;
  std::optional<std::vector<Vec>> velocities_;
  std::vector<Vec> cached_velocities_;
};

/// Writes `tau,x_0..x_{n-1}` (plus `v_0..v_{n-1}` when `with_velocities`)
/// with 17 significant digits.
void write_curve_csv(std::ostream& os, const SampledCurve& curve, bool with_velocities = false);
void write_curve_csv(const std::string& path, const SampledCurve& curve, bool with_velocities = false);

/// Reads a curve or trajectory CSV; `v_*` columns become stored velocities,
/// other extra columns are ignored.
SampledCurve read_curve_csv(std::istream& is);
SampledCurve read_curve_csv(const std::string& path);

}  // namespace lipcausal
