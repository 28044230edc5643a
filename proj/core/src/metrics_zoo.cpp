#include "lipcausal/metrics_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lipcausal/errors.hpp"

namespace lipcausal {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Mat eta(Eigen::Index n) { return BilinearForm::minkowski(n).matrix(); }

std::vector<Mat> zeros(Eigen::Index n) { return std::vector<Mat>(static_cast<std::size_t>(n), Mat::Zero(n, n)); }

Interface coordinate_plane(Eigen::Index n, Eigen::Index axis, std::string name) {
  Vec grad = Vec::Zero(n);
  grad[axis] = 1.0;
  return {std::move(name), [axis](const Vec& x) { return x[axis]; }, [grad](const Vec&) { return grad; },
          [n](const Vec&) { return Mat(Mat::Zero(n, n)); }};
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, what);
}

MetricField minkowski(const MetricSpec& spec) {
  const Eigen::Index n = spec.dimension;
  MetricField::Options opt;
  opt.name = "minkowski";
  opt.domain_radius = spec.radius.value_or(2.0);
  opt.lipschitz_L = 0.0;
  const Mat m = eta(n);
  return MetricField(n, {{"eta", [m](const Vec&) { return m; }, [n](const Vec&) { return zeros(n); }}}, {}, {}, opt);
}

MetricField conformal(const MetricSpec& spec) {
  const Eigen::Index n = spec.dimension;
  const double eps = spec.param("epsilon", 0.1);
  require(std::isfinite(eps), "conformal: epsilon must be finite");
  const double r_default = eps == 0.0 ? 2.0 : std::min(2.0, 0.49 / std::abs(eps));
  MetricField::Options opt;
  opt.name = "conformal";
  opt.domain_radius = spec.radius.value_or(r_default);
  opt.lipschitz_L = std::abs(eps);
  const Mat m = eta(n);
  MetricBranch b{"conformal", [m, eps](const Vec& x) { return Mat((1.0 + eps * x[1]) * m); },
                 [m, eps, n](const Vec&) {
                   auto d = zeros(n);
                   d[1] = eps * m;
                   return d;
                 }};
  return MetricField(n, {b}, {}, {}, opt);
}

MetricField rosen_wave(const MetricSpec& spec) {
  require(spec.dimension == 4, "rosen_wave: dimension must be 4");
  MetricField::Options opt;
  opt.name = "rosen_wave";
  // Time growth along causal vectors stays >= 1/2 while 1 - u >= 1/sqrt(3).
  opt.domain_radius = spec.radius.value_or(0.4);
  opt.lipschitz_L = 2.0 * (1.0 + opt.domain_radius);
  MetricBranch flat{"u<0", [](const Vec&) { return eta(4); }, [](const Vec&) { return zeros(4); }};
  MetricBranch wave{"u>0",
                    [](const Vec& x) {
                      const double u = rosen_u(x);
                      Mat m = Mat::Zero(4, 4);
                      m(0, 0) = 1.0;
                      m(1, 1) = -1.0;
                      m(2, 2) = -(1.0 + u) * (1.0 + u);
                      m(3, 3) = -(1.0 - u) * (1.0 - u);
                      return m;
                    },
                    [](const Vec& x) {
                      const double u = rosen_u(x);
                      auto d = zeros(4);
                      for (int k = 0; k < 2; ++k) {
                        d[static_cast<std::size_t>(k)](2, 2) = -2.0 * (1.0 + u) * kInvSqrt2;
                        d[static_cast<std::size_t>(k)](3, 3) = 2.0 * (1.0 - u) * kInvSqrt2;
                      }
                      return d;
                    }};
  Vec grad = Vec::Zero(4);
  grad << kInvSqrt2, kInvSqrt2, 0.0, 0.0;
  Interface wavefront{"u=0", [](const Vec& x) { return rosen_u(x); }, [grad](const Vec&) { return grad; },
                      [](const Vec&) { return Mat(Mat::Zero(4, 4)); }};
  return MetricField(4, {flat, wave}, {wavefront}, {}, opt);
}

MetricField holder_kink(const MetricSpec& spec) {
  const Eigen::Index n = spec.dimension;
  const double a = spec.param("a", 0.3);
  const double alpha = spec.param("alpha", 1.0);
  require(a >= 0.0, "holder_kink: a must be >= 0");
  require(alpha > 0.0 && alpha <= 1.0, "holder_kink: alpha must lie in (0, 1]");
  MetricField::Options opt;
  opt.name = "holder_kink";
  opt.domain_radius = spec.radius.value_or(1.0);
  opt.holder_exponent = alpha;
  if (alpha == 1.0) opt.lipschitz_L = a;
  // Branch sigma uses the coefficient 1 + a |x_1|^alpha, written as the affine
  // extension 1 + a sigma x_1 when alpha = 1.
  auto branch = [n, a, alpha](double sigma) {
    return MetricBranch{sigma > 0 ? "x1>0" : "x1<0",
                        [n, a, alpha, sigma](const Vec& x) {
                          Mat m = eta(n);
                          const double c = alpha == 1.0 ? sigma * x[1] : std::pow(std::abs(x[1]), alpha);
                          m(1, 1) = -(1.0 + a * c);
                          return m;
                        },
                        [n, a, alpha, sigma](const Vec& x) {
                          auto d = zeros(n);
                          if (alpha == 1.0) {
                            d[1](1, 1) = -a * sigma;
                          } else {
                            const double r = std::max(std::abs(x[1]), 1e-300);
                            const double sgn = x[1] == 0.0 ? sigma : (x[1] > 0.0 ? 1.0 : -1.0);
                            d[1](1, 1) = -a * alpha * std::pow(r, alpha - 1.0) * sgn;
                          }
                          return d;
                        }};
  };
  const MetricBranch minus = branch(-1.0);
  const MetricBranch plus = branch(1.0);
  return MetricField(n, {minus, plus}, {coordinate_plane(n, 1, "x1=0")}, {}, opt);
}

MetricField thin_shell(const MetricSpec& spec) {
  const Eigen::Index n = spec.dimension;
  const double km = spec.param("kappa_minus", -2.0);
  const double kp = spec.param("kappa_plus", 2.0);
  const double sm = spec.param("sigma_minus", 0.0);
  const double sp = spec.param("sigma_plus", 0.0);
  const double slope = std::max({std::abs(km), std::abs(kp), std::abs(sm), std::abs(sp)});
  MetricField::Options opt;
  opt.name = "thin_shell";
  opt.domain_radius = spec.radius.value_or(slope > 0.0 ? std::min(1.0, 1.0 / (2.0 * slope)) : 1.0);
  opt.lipschitz_L = slope;
  auto branch = [n](std::string name, double kappa, double sigma) {
    return MetricBranch{std::move(name),
                        [n, kappa, sigma](const Vec& x) {
                          Mat m = eta(n);
                          m(0, 0) = 1.0 + kappa * x[1];
                          for (Eigen::Index i = 2; i < n; ++i) m(i, i) = -(1.0 - sigma * x[1]);
                          return m;
                        },
                        [n, kappa, sigma](const Vec&) {
                          auto d = zeros(n);
                          d[1](0, 0) = kappa;
                          for (Eigen::Index i = 2; i < n; ++i) d[1](i, i) = sigma;
                          return d;
                        }};
  };
  return MetricField(n, {branch("x1<0", km, sm), branch("x1>0", kp, sp)}, {coordinate_plane(n, 1, "x1=0")}, {}, opt);
}

}  // namespace

double MetricSpec::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

const std::vector<std::string>& metric_kinds() {
  static const std::vector<std::string> kinds{"minkowski", "conformal", "rosen_wave", "holder_kink", "thin_shell"};
  return kinds;
}

double rosen_u(const Vec& x) { return (x[0] + x[1]) * kInvSqrt2; }

MetricField make_metric(const MetricSpec& spec) {
  require(spec.dimension >= 2, "dimension must be at least 2");
  if (spec.radius) require(*spec.radius > 0.0, "radius must be positive");
  static const std::map<std::string, std::vector<std::string>> known{
      {"minkowski", {}},
      {"conformal", {"epsilon"}},
      {"rosen_wave", {}},
      {"holder_kink", {"a", "alpha"}},
      {"thin_shell", {"kappa_minus", "kappa_plus", "sigma_minus", "sigma_plus"}}};
  const auto kit = known.find(spec.kind);
  if (kit == known.end()) throw Error(ErrorKind::InvalidArgument, "unknown metric kind '" + spec.kind + "'");
  for (const auto& [key, value] : spec.params) {
    if (std::find(kit->second.begin(), kit->second.end(), key) == kit->second.end()) {
      throw Error(ErrorKind::InvalidArgument, "unknown parameter '" + key + "' for metric kind '" + spec.kind + "'");
    }
    require(std::isfinite(value), "parameter '" + key + "' must be finite");
  }

  auto build = [&]() {
    if (spec.kind == "minkowski") return minkowski(spec);
    if (spec.kind == "conformal") return conformal(spec);
    if (spec.kind == "rosen_wave") return rosen_wave(spec);
    if (spec.kind == "holder_kink") return holder_kink(spec);
    return thin_shell(spec);
  };
  MetricField g = build();
  const double R = g.domain_radius();

  // Deterministic chart sample: random interior points plus points near the
  // boundary on every coordinate axis.
  std::vector<Vec> probe;
  Rng rng(substream_seed(0x200ULL, spec.kind));
  for (int i = 0; i < 512; ++i) probe.push_back(uniform_in_ball(rng, g.dim(), R));
  for (Eigen::Index k = 0; k < g.dim(); ++k) {
    for (double sgn : {-1.0, 1.0}) {
      Vec x = Vec::Zero(g.dim());
      x[k] = sgn * (1.0 - 1e-9) * R;
      probe.push_back(x);
    }
  }
  for (const auto& x : probe) {
    if (!has_lorentzian_signature(g.metric(x))) {
      std::ostringstream os;
      os << spec.kind << ": metric loses Lorentzian signature at x = (" << x.transpose() << ")";
      throw Error(ErrorKind::SignatureViolation, os.str());
    }
  }
  if (spec.kind == "conformal") {
    require(std::abs(spec.param("epsilon", 0.1)) * R < 0.5, "conformal: need 1 + epsilon x_1 > 1/2 on the chart");
  }
  for (const auto& x : probe) {
    if (time_growth(g.metric(x)) < 0.5 - 1e-12) {
      std::ostringstream os;
      os << spec.kind << ": chart radius " << R << " violates the time-growth normalization at x = ("
         << x.transpose() << ")";
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
  }
  return g;
}

}  // namespace lipcausal
