#include "lipcausal/regularity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "lipcausal/errors.hpp"

namespace lipcausal {

namespace {

double point_segment_distance(const Vec& p, const Vec& a, const Vec& b) {
  const Vec ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - a - s * ab).norm();
}

}  // namespace

double chord_deviation(const SampledCurve& curve, double t, double h) {
  const auto& params = curve.params();
  const double a = curve.front_param();
  const double b = curve.back_param();
  const double slack = 1e-12 * (b - a);
  if (!(h > 0.0) || t < a - slack || t + h > b + slack) {
    throw Error(ErrorKind::InvalidArgument, "window outside the parameter range");
  }
  const double t1 = std::min(t + h, b);
  const auto lo = std::lower_bound(params.begin(), params.end(), t - slack);
  const auto hi = std::upper_bound(params.begin(), params.end(), t1 + slack);
  if (hi - lo < 8) {
    std::ostringstream os;
    os << "window [" << t << ", " << t1 << "] holds " << (hi - lo) << " samples, need 8";
    throw Error(ErrorKind::InsufficientSampling, os.str());
  }
  const Vec p0 = curve.point_at(std::max(t, a));
  const Vec p1 = curve.point_at(t1);
  double dev = 0.0;
  for (auto it = lo; it != hi; ++it) {
    dev = std::max(dev, point_segment_distance(curve.points()[static_cast<std::size_t>(it - params.begin())], p0, p1));
  }
  return dev;
}

DeviationProfile deviation_profile(const SampledCurve& curve, const std::vector<double>& h_grid) {
  DeviationProfile prof;
  const double a = curve.front_param();
  const double b = curve.back_param();
  for (double h : h_grid) {
    if (!(h > 0.0) || h > b - a) throw Error(ErrorKind::InvalidArgument, "window width outside (0, range]");
    const double stride = h / 4.0;
    const auto count = static_cast<long>(std::floor((b - a - h) / stride + 1e-9));
    double sup = 0.0;
    for (long k = 0; k <= count; ++k) sup = std::max(sup, chord_deviation(curve, a + k * stride, h));
    sup = std::max(sup, chord_deviation(curve, b - h, h));
    prof.h_values.push_back(h);
    prof.dev.push_back(sup);
  }
  return prof;
}

std::vector<double> default_h_grid(const SampledCurve& curve) {
  const auto& t = curve.params();
  double spacing = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) spacing = std::max(spacing, t[i + 1] - t[i]);
  const double range = curve.back_param() - curve.front_param();
  std::vector<double> grid;
  for (int k = 3; k <= 9; ++k) {
    const double h = std::ldexp(range, -k);
    if (h >= 8.0 * spacing) grid.push_back(h);
  }
  return grid;
}

RegularityReport estimate_holder_exponent(const SampledCurve& curve, std::optional<std::vector<double>> h_grid) {
  RegularityReport rep;
  rep.h_grid = h_grid ? *h_grid : default_h_grid(curve);
  if (rep.h_grid.size() < 2) {
    throw Error(ErrorKind::InsufficientSampling, "need at least two window widths for a fit");
  }
  const auto prof = deviation_profile(curve, rep.h_grid);
  rep.dev = prof.dev;
  rep.h_range = {*std::min_element(rep.h_grid.begin(), rep.h_grid.end()),
                 *std::max_element(rep.h_grid.begin(), rep.h_grid.end())};

  const double range = curve.back_param() - curve.front_param();
  const double max_dev = *std::max_element(rep.dev.begin(), rep.dev.end());
  if (max_dev <= 1e-12 * range || std::any_of(rep.dev.begin(), rep.dev.end(), [](double d) { return d <= 0.0; })) {
    rep.line_exact = true;
    rep.alpha_hat = 1.0;
    rep.C_hat = 0.0;
    rep.fit_r2 = 1.0;
    return rep;
  }

  const std::size_t m = rep.h_grid.size();
  Eigen::MatrixXd A(static_cast<Eigen::Index>(m), 2);
  Eigen::VectorXd y(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    A(static_cast<Eigen::Index>(i), 0) = std::log(rep.h_grid[i]);
    A(static_cast<Eigen::Index>(i), 1) = 1.0;
    y[static_cast<Eigen::Index>(i)] = std::log(rep.dev[i]);
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd fit = A * coef;
  const double mean = y.mean();
  const double ss_tot = (y.array() - mean).square().sum();
  const double ss_res = (y - fit).squaredNorm();
  rep.alpha_hat = coef[0] - 1.0;
  rep.C_hat = std::exp(coef[1]);
  rep.fit_r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return rep;
}

namespace {

// Fritsch-Carlson slopes for monotone cubic interpolation.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1);
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  std::vector<double> d(n, 0.0);
  if (n == 2) {
    d[0] = d[1] = delta[0];
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] > 0.0) {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0) {
      s = 0.0;
    } else if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0)) {
      s = 3.0 * d0;
    }
    return s;
  };
  d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

}  // namespace

SampledCurve arclength_resample(const SampledCurve& curve, std::size_t intervals) {
  if (intervals < 1) throw Error(ErrorKind::InvalidArgument, "need at least one interval");
  const auto& p = curve.points();
  std::vector<double> s{0.0};
  std::vector<Vec> pts{p.front()};
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double step = (p[i] - p[i - 1]).norm();
    if (step <= 1e-15 * (1.0 + s.back())) continue;  // drop repeated points
    s.push_back(s.back() + step);
    pts.push_back(p[i]);
  }
  if (pts.size() < 2) throw Error(ErrorKind::InvalidArgument, "curve has zero Euclidean length");
  const double total = s.back();
  const Eigen::Index n = curve.dim();
  std::vector<std::vector<double>> slopes(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    std::vector<double> yk(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) yk[i] = pts[i][k];
    slopes[static_cast<std::size_t>(k)] = pchip_slopes(s, yk);
  }
  std::vector<double> out_t(intervals + 1);
  std::vector<Vec> out_p(intervals + 1, Vec(n));
  std::vector<Vec> out_v(intervals + 1, Vec(n));
  for (std::size_t j = 0; j <= intervals; ++j) {
    const double q = j == intervals ? total : total * static_cast<double>(j) / static_cast<double>(intervals);
    out_t[j] = q;
    std::size_t i = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), q) - s.begin());
    i = std::clamp<std::size_t>(i, 1, s.size() - 1) - 1;
    const double h = s[i + 1] - s[i];
    const double u = (q - s[i]) / h;
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    const double h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u);
    const double h11 = u * u * (u - 1);
    const double d00 = 6 * u * u - 6 * u;
    const double d10 = 3 * u * u - 4 * u + 1;
    const double d01 = -6 * u * u + 6 * u;
    const double d11 = 3 * u * u - 2 * u;
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto& d = slopes[static_cast<std::size_t>(k)];
      out_p[j][k] = h00 * pts[i][k] + h10 * h * d[i] + h01 * pts[i + 1][k] + h11 * h * d[i + 1];
      out_v[j][k] = (d00 * pts[i][k] + d01 * pts[i + 1][k]) / h + d10 * d[i] + d11 * d[i + 1];
    }
  }
  return SampledCurve(std::move(out_t), std::move(out_p), std::move(out_v));
}

RegularityReport regularity_of_maximizer(const SampledCurve& curve, const MetricField& g) {
  auto rep = estimate_holder_exponent(arclength_resample(curve));
  rep.floor_quarter = 0.25;
  rep.floor_alpha = g.holder_exponent() / 4.0;
  return rep;
}

RegularityReport regularity_of_maximizer(const MaximizationResult& result, const MetricField& g) {
  return regularity_of_maximizer(result.curve, g);
}

RegularityReport regularity_of_maximizer(const GeodesicTrajectory& traj, const MetricField& g) {
  return regularity_of_maximizer(traj.as_curve(), g);
}

bool tube_containment(const SampledCurve& curve, double alpha, double C, const std::vector<double>& h_grid) {
  const auto prof = deviation_profile(curve, h_grid);
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    if (prof.dev[i] > C * std::pow(h_grid[i], 1.0 + alpha)) return false;
  }
  return true;
}

SampledCurve holder_angle_curve(double beta, std::size_t samples) {
  if (!(beta > 0.0 && beta <= 1.0)) throw Error(ErrorKind::InvalidArgument, "beta must lie in (0, 1]");
  if (samples < 3) throw Error(ErrorKind::InvalidArgument, "need at least three samples");
  static constexpr std::array<double, 5> nodes{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                               0.9061798459386640};
  static constexpr std::array<double, 5> weights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                 0.4786286704993665, 0.2369268850561891};
  auto tangent = [beta](double s) {
    const double th = std::pow(std::abs(s), beta);
    Vec v(2);
    v << std::cos(th), std::sin(th);
    return v;
  };
  std::vector<double> t(samples);
  std::vector<Vec> p(samples);
  std::vector<Vec> v(samples);
  Vec pos = Vec::Zero(2);
  for (std::size_t i = 0; i < samples; ++i) {
    t[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(samples - 1);
    if (i > 0) {
      // Split at s = 0 so the quadrature never straddles the singular point.
      const double a = t[i - 1];
      const double b = t[i];
      const std::vector<std::pair<double, double>> parts =
          a < 0.0 && b > 0.0 ? std::vector<std::pair<double, double>>{{a, 0.0}, {0.0, b}}
                             : std::vector<std::pair<double, double>>{{a, b}};
      for (const auto& [lo, hi] : parts) {
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        for (std::size_t q = 0; q < nodes.size(); ++q) pos += weights[q] * half * tangent(mid + half * nodes[q]);
      }
    }
    p[i] = pos;
    v[i] = tangent(t[i]);
  }
  return SampledCurve(std::move(t), std::move(p), std::move(v));
}

}  // namespace lipcausal
