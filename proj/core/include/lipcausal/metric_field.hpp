#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lipcausal/lorentz.hpp"
#include "lipcausal/types.hpp"

namespace lipcausal {

/// One smooth piece of a metric. `metric` must be smooth on the whole chart,
/// the field decides where it is active. `derivatives`, when provided, returns
/// the n matrices d_k g (k = 0..n-1); otherwise central differences are used.
struct MetricBranch {
  std::string name;
  std::function<Mat(const Vec&)> metric;
  std::function<std::vector<Mat>(const Vec&)> derivatives;
};

/// Level-set hypersurface {s(x) = 0} across which branches are glued.
/// Gradient and Hessian fall back to central differences when absent.
struct Interface {
  std::string name;
  std::function<double(const Vec&)> level;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;
};

/// Maps the sign pattern (+1 / -1 per interface) to a branch index.
using BranchSelector = std::function<std::size_t(std::span<const int>)>;

/// Lorentzian metric on the chart ball B_R(0) in R^n, piecewise smooth across
/// finitely many interfaces. Immutable after construction.
class MetricField {
 public:
  struct Options {
    std::string name = "field";
    double domain_radius = 1.0;
    /// Lipschitz constant of g on the chart. When empty it is estimated by sampling.
    std::optional<double> lipschitz_L;
    /// Hoelder exponent of g (1 for Lipschitz fields).
    double holder_exponent = 1.0;
    /// Step for finite-difference derivatives of branches without analytic ones.
    double fd_step = 1e-5;
    std::uint64_t estimation_seed = 0x5eedULL;
  };

  MetricField(Eigen::Index dim, std::vector<MetricBranch> branches, std::vector<Interface> interfaces,
              BranchSelector selector, Options options);

  /// A single generic Lipschitz callable, Christoffels from finite differences.
  static MetricField from_callable(Eigen::Index dim, std::function<Mat(const Vec&)> metric, Options options);

  Eigen::Index dim() const noexcept { return dim_; }
  const std::string& name() const noexcept { return name_; }
  double domain_radius() const noexcept { return domain_radius_; }
  double lipschitz_L() const noexcept { return lipschitz_L_; }
  bool lipschitz_is_estimate() const noexcept { return lipschitz_estimated_; }
  double holder_exponent() const noexcept { return holder_exponent_; }
  double fd_step() const noexcept { return fd_step_; }

  std::size_t branch_count() const noexcept { return branches_.size(); }
  std::size_t interface_count() const noexcept { return interfaces_.size(); }
  const MetricBranch& branch(std::size_t i) const { return branches_.at(i); }
  const Interface& interface(std::size_t j) const { return interfaces_.at(j); }

  bool in_domain(const Vec& x) const;

  /// +1 where s_j(x) >= 0, -1 otherwise.
  std::vector<int> interface_signs(const Vec& x) const;
  std::size_t branch_for_signs(std::span<const int> signs) const;
  std::size_t branch_at(const Vec& x) const;
  /// Branches on the negative and positive side of interface j near x.
  std::pair<std::size_t, std::size_t> adjacent_branches(std::size_t j, const Vec& x) const;

  /// Matrix of the active branch at x (unchecked, for inner loops).
  Mat metric(const Vec& x) const;
  Mat branch_metric(std::size_t branch, const Vec& x) const;
  /// d_k g of a branch, analytic when available.
  std::vector<Mat> branch_derivatives(std::size_t branch, const Vec& x) const;
  /// Signature-checked form at x.
  BilinearForm form(const Vec& x) const;

  double interface_value(std::size_t j, const Vec& x) const;
  Vec interface_gradient(std::size_t j, const Vec& x) const;
  Mat interface_hessian(std::size_t j, const Vec& x) const;
  /// First-order Euclidean distance |s| / |grad s| to interface j.
  double interface_distance(std::size_t j, const Vec& x) const;
  /// Newton projection of x onto interface j.
  Vec project_to_interface(std::size_t j, const Vec& x) const;

 private:
  Eigen::Index dim_;
  std::vector<MetricBranch> branches_;
  std::vector<Interface> interfaces_;
  BranchSelector selector_;
  std::string name_;
  double domain_radius_;
  double lipschitz_L_ = 0.0;
  bool lipschitz_estimated_ = false;
  double holder_exponent_;
  double fd_step_;
};

/// |g_x - g_y|_op / |x - y|, the local Lipschitz ratio of the field.
double lipschitz_ratio(const MetricField& g, const Vec& x, const Vec& y);

/// Max Lipschitz ratio over random nearby pairs in the chart (approximate).
double estimate_lipschitz(const MetricField& g, int pairs, std::uint64_t seed);

struct FieldValidationReport {
  int samples = 0;
  int signature_failures = 0;
  std::optional<Vec> signature_witness;
  int interface_samples = 0;
  double max_interface_residual = 0.0;
  int lipschitz_pairs = 0;
  int lipschitz_violations = 0;
  double max_lipschitz_excess = 0.0;
  /// Minimal time-coordinate growth along unit future causal vectors (should be >= 1/2).
  double min_time_growth = 1.0;

  bool ok(double continuity_tol = 1e-9) const {
    return signature_failures == 0 && max_interface_residual <= continuity_tol && lipschitz_violations == 0;
  }
};

/// Checks signature, interface continuity and the Lipschitz bound by sampling.
FieldValidationReport validate_field(const MetricField& g, int samples, std::uint64_t seed);

/// Minimal d t / d s over Euclidean-unit future causal vectors of g_x.
double time_growth(const Mat& gx);

struct ConeInclusionReport {
  int samples = 0;
  int deviation_violations = 0;  // |g_x(v,v) - g^h(v,v)| > 5 L h
  int timelike_violations = 0;   // g_x(v,v) > 0 but g^h(v,v) <= 0
  double min_deviation_slack = 0.0;
  double min_widened_value = 0.0;  // min g^h(v,v) over g-timelike samples
  std::optional<std::pair<Vec, Vec>> worst_witness;

  int violations() const { return deviation_violations + timelike_violations; }
};

/// Samples x in B_h(0), unit v with g_x(v,v) >= 0 and verifies the two
/// comparison properties of the widened metric built from the supplied L.
/// Throws NotOriginNormalized unless g_0 is the Minkowski product.
ConeInclusionReport cone_inclusion_check(const MetricField& g, double lipschitz_L, double h, int samples,
                                         std::uint64_t seed);

}  // namespace lipcausal
