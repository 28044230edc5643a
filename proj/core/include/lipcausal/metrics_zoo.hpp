#pragma once

// Test metric fields: Minkowski, conformal perturbation, impulsive plane wave
// in Rosen form, Hoelder kink and a thin-shell gluing.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lipcausal/metric_field.hpp"

namespace lipcausal {

/// Parameters per kind (defaults in brackets):
///   minkowski                             (any n >= 2, R [2])
///   conformal    epsilon [0.1]            g = (1 + eps x_1) eta, R [min(2, 0.49/|eps|)]
///   rosen_wave   (n = 4)                  R [0.4]
///   holder_kink  a [0.3], alpha [1]       R [1]
///   thin_shell   kappa_minus [-2], kappa_plus [2], sigma_minus [0], sigma_plus [0]
///                                         R [min(1, 1 / (2 max|slope|))]
struct MetricSpec {
  std::string kind = "minkowski";
  Eigen::Index dimension = 2;
  std::map<std::string, double> params;
  std::optional<double> radius;

  double param(const std::string& key, double fallback) const;
};

const std::vector<std::string>& metric_kinds();

/// Builds the field with analytic branch derivatives and its Lipschitz
/// constant (estimated and flagged for holder_kink with alpha < 1). Throws
/// SignatureViolation with the offending point when the chart loses the
/// signature, InvalidArgument for parameters outside their documented range.
MetricField make_metric(const MetricSpec& spec);

/// Rosen-wave null coordinate u = (T + Z) / sqrt(2) of a chart point.
double rosen_u(const Vec& x);

}  // namespace lipcausal
