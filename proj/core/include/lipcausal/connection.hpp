#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lipcausal/metric_field.hpp"
#include "lipcausal/types.hpp"

namespace lipcausal {

/// Phase-space point of the geodesic inclusion.
struct FilippovState {
  Vec x;
  Vec v;
  double tau = 0.0;
};

/// Christoffel symbols Gamma^k_{ij} stored as gamma[k](i, j).
struct ChristoffelValue {
  std::vector<Mat> gamma;
  Vec at;
  std::size_t branch = 0;

  /// Gamma(v, w)^k = Gamma^k_{ij} v^i w^j
  Vec contract(const Vec& v, const Vec& w) const;
  double max_asymmetry() const;
};

double default_interface_margin(const MetricField& g);

/// Koszul formula on the branch active at x. Throws OnSingularSet within
/// `interface_margin` of an interface, SingularMetric if g_x is not invertible.
ChristoffelValue christoffel_at(const MetricField& g, const Vec& x,
                                std::optional<double> interface_margin = std::nullopt);

/// Christoffels of one branch's smooth formula, no interface check.
ChristoffelValue branch_christoffel(const MetricField& g, std::size_t branch, const Vec& x);

/// Gamma_x(v, v) of one branch via the contracted Koszul formula.
Vec branch_gamma_vv(const MetricField& g, std::size_t branch, const Vec& x, const Vec& v);

/// Bound C2 with |Gamma_x(v,v)| <= C2 |v|^2 on the chart: 3/2 L sup|g^{-1}|,
/// the supremum estimated over `samples` points.
double christoffel_bound(const MetricField& g, int samples = 2000, std::uint64_t seed = 0xc2ULL);

/// Finite sample of Gamma_x(w,w) over phase points (x, w) in the delta-ball
/// around a state, off the interfaces.
struct HullSample {
  FilippovState center;
  double delta = 0.0;
  std::vector<Vec> values;
  int count = 0;
  int rejected = 0;
};

HullSample sample_essential_hull(const MetricField& g, const FilippovState& state, double delta, int count,
                                 std::uint64_t seed, std::optional<double> interface_margin = std::nullopt);

/// Euclidean distance from `a` to conv(points); Wolfe's minimum-norm-point
/// active-set method, exact up to the stated tolerance.
double convex_hull_distance(std::span<const Vec> points, const Vec& a, double tol = 1e-12);

/// Distance from `a` to the convex hull of the sample values (0 when inside).
double hull_membership_margin(const HullSample& sample, const Vec& a);

struct HullRefinement {
  std::vector<double> deltas;
  std::vector<double> margins;
  /// Margin at the finest level.
  double finest() const { return margins.empty() ? 0.0 : margins.back(); }
};

inline const std::vector<double>& default_hull_deltas() {
  static const std::vector<double> d{1e-2, 1e-3, 1e-4};
  return d;
}

/// Membership margins of `a` over a decreasing sequence of delta levels.
HullRefinement hull_margin_refinement(const MetricField& g, const FilippovState& state, const Vec& a,
                                      std::span<const double> deltas, int count, std::uint64_t seed);

}  // namespace lipcausal
