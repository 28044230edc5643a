#include "lipcausal/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "lipcausal/connection.hpp"
#include "lipcausal/errors.hpp"
#include "lipcausal/maximality.hpp"

namespace lipcausal {

namespace {

void require_future_causal(const Vec& u, const char* name) {
  const double q = minkowski_product(u, u);
  if (!(u[0] > 0.0) || q < -1e-12 * u.squaredNorm()) {
    std::ostringstream os;
    os << name << " = (" << u.transpose() << ") is not future causal";
    throw Error(ErrorKind::NotCausal, os.str());
  }
}

double slack_core(const Vec& u, const Vec& v, double& D, double& lhs) {
  const Vec w = u + v;
  const double nw = minkowski_norm(w);
  const Vec what = w / w.norm();
  D = (u - u.dot(what) * what).norm();
  lhs = nw * nw - nw * (minkowski_norm(u) + minkowski_norm(v));
  return lhs - kTriangleConstant * D * D;
}

}  // namespace

TriangleSlack quantitative_triangle_slack(const Vec& u, const Vec& v) {
  if (u.size() != v.size() || u.size() < 2) throw Error(ErrorKind::DimensionMismatch, "vector dimensions");
  require_future_causal(u, "u");
  require_future_causal(v, "v");
  TriangleSlack out;
  double lhs = 0.0;
  out.slack = slack_core(u, v, out.D, lhs);
  return out;
}

Vec sample_future_causal(Rng& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec u(n);
  u[0] = 1.0 - unit(rng);  // (0, 1]
  u.tail(n - 1) = unit(rng) * u[0] * uniform_on_sphere(rng, n - 1);
  return u;
}

InequalitySweepReport triangle_sweep(Eigen::Index n, long trials, std::uint64_t seed, int threads) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "dimension must be at least 2");
  constexpr long kChunk = 1 << 14;
  const long chunks = (trials + kChunk - 1) / kChunk;
  std::vector<InequalitySweepReport> part(static_cast<std::size_t>(chunks));

  auto run_chunk = [&](long c) {
    InequalitySweepReport& r = part[static_cast<std::size_t>(c)];
    r.min_slack = std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    Rng rng(substream_seed(substream_seed(seed, "triangle"), static_cast<std::uint64_t>(c)));
    const long count = std::min(kChunk, trials - c * kChunk);
    for (long i = 0; i < count; ++i) {
      const Vec u = sample_future_causal(rng, n);
      const Vec v = sample_future_causal(rng, n);
      double D = 0.0;
      double lhs = 0.0;
      const double s = slack_core(u, v, D, lhs);
      ++r.trials;
      if (s < -1e-12 * (u + v).squaredNorm()) ++r.violations;
      if (s < r.min_slack) {
        r.min_slack = s;
        r.argmin_witness = {u, v};
      }
      if (D > 1e-6) {
        best = std::min(best, lhs / (D * D));
        ++r.constant_samples;
      }
    }
    if (r.constant_samples > 0) r.empirical_best_constant = best;
  };

  const int k = std::clamp<long>(threads, 1, std::max<long>(1, chunks));
  if (k == 1) {
    for (long c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < k; ++t) {
      pool.emplace_back([&, t] {
        for (long c = t; c < chunks; c += k) run_chunk(c);
      });
    }
    for (auto& th : pool) th.join();
  }

  InequalitySweepReport out;
  out.min_slack = std::numeric_limits<double>::infinity();
  for (const auto& r : part) {
    out.trials += r.trials;
    out.violations += r.violations;
    out.constant_samples += r.constant_samples;
    if (r.min_slack < out.min_slack) {
      out.min_slack = r.min_slack;
      out.argmin_witness = r.argmin_witness;
    }
    if (r.empirical_best_constant &&
        (!out.empirical_best_constant || *r.empirical_best_constant < *out.empirical_best_constant)) {
      out.empirical_best_constant = r.empirical_best_constant;
    }
  }
  if (trials <= 0) out.min_slack = 0.0;
  return out;
}

double form_constant(const BilinearForm& lambda) {
  Eigen::SelfAdjointEigenSolver<Mat> es(lambda.matrix(), Eigen::EigenvaluesOnly);
  return kTriangleConstant * es.eigenvalues().cwiseAbs().minCoeff();
}

ChordGap chord_length_gap(const SampledCurve& curve, const BilinearForm& lambda) {
  const auto& p = curve.points();
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const Vec d = p[i + 1] - p[i];
    const double q = lambda(d, d);
    // Orientation is fixed by the first coordinate of the chord.
    if (!(q > 0.0) || d.dot(p.back() - p.front()) <= 0.0) {
      std::ostringstream os;
      os << "segment " << i << " is not timelike for the form";
      throw Error(ErrorKind::NotCausal, os.str());
    }
    len += std::sqrt(q);
  }
  ChordGap out;
  const Vec w = p.back() - p.front();
  out.chord = std::sqrt(std::max(0.0, lambda(w, w)));
  const Vec what = w / w.norm();
  for (const auto& x : p) {
    const Vec r = x - p.front();
    out.D = std::max(out.D, (r - r.dot(what) * what).norm());
  }
  out.A = form_constant(lambda);
  out.gap = out.chord - len;
  out.bound = out.A * out.D * out.D / out.chord;
  out.holds = out.gap >= out.bound - 1e-9 * (1.0 + out.chord);
  return out;
}

LengthComparison length_comparison_check(const SampledCurve& curve, const MetricField& g1, const MetricField& g2,
                                         int samples, std::uint64_t seed) {
  if (g1.dim() != g2.dim() || g1.dim() != curve.dim()) throw Error(ErrorKind::DimensionMismatch, "metric dimensions");
  LengthComparison out;
  out.length1 = lorentzian_length(curve, g1);
  out.length2 = lorentzian_length(curve, g2);
  out.delta = curve.back_param() - curve.front_param();
  const double euclid = curve.euclidean_length();
  if (euclid > out.delta * (1.0 + 1e-6) + 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "curve is not parametrized by Euclidean arclength");
  }
  // The polygonal lengths evaluate the metrics at segment midpoints, so those
  // enter the sup together with random points along the curve.
  double eps = 0.0;
  const auto& p = curve.points();
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const Vec m = 0.5 * (p[i] + p[i + 1]);
    eps = std::max(eps, operator_norm_sym(g1.metric(m) - g2.metric(m)));
  }
  Rng rng(substream_seed(seed, "length-comparison"));
  std::uniform_real_distribution<double> pick(curve.front_param(), curve.back_param());
  for (int i = 0; i < samples; ++i) {
    const Vec x = curve.point_at(pick(rng));
    eps = std::max(eps, operator_norm_sym(g1.metric(x) - g2.metric(x)));
  }
  out.epsilon = 1.05 * eps;
  out.difference = std::abs(out.length1 - out.length2);
  out.bound = out.delta * std::sqrt(out.epsilon);
  out.holds = out.difference <= out.bound + 1e-9;
  return out;
}

VelocityLowerBound velocity_lower_bound_check(const SampledCurve& curve, const MetricField& g, std::optional<double> C,
                                              double tolerance, double null_speed_tol) {
  VelocityLowerBound out;
  out.C = C ? *C : christoffel_bound(g);
  out.r_max = 4.0 * g.domain_radius();
  const double x = out.C * out.r_max;
  out.K = x > 0.0 ? x / std::expm1(x) : 1.0;
  out.length = lorentzian_length(curve, g);
  const auto& p = curve.points();
  out.min_speed = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double e = (p[i + 1] - p[i]).norm();
    if (e == 0.0) continue;
    out.euclidean_length += e;
    const double s = segment_length(g, p[i], p[i + 1]) / e;
    out.min_speed = std::min(out.min_speed, s);
    out.max_speed = std::max(out.max_speed, s);
  }
  if (out.euclidean_length == 0.0) throw Error(ErrorKind::InvalidArgument, "curve has zero Euclidean length");
  out.lightlike = out.length <= null_speed_tol * out.euclidean_length;
  if (out.lightlike) {
    out.required = 0.0;
    out.margin = null_speed_tol - out.max_speed;
    out.holds = out.max_speed <= null_speed_tol;
  } else {
    out.required = out.K * out.length / out.euclidean_length;
    out.margin = out.min_speed - out.required;
    out.holds = out.margin >= -tolerance;
  }
  return out;
}

}  // namespace lipcausal
