#include "lipcausal/connection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "lipcausal/errors.hpp"

namespace lipcausal {

namespace {

Mat checked_inverse(const MetricField& g, const Mat& gx, const Vec& x) {
  Eigen::FullPivLU<Mat> lu(gx);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-300) {
    std::ostringstream os;
    os << "metric of '" << g.name() << "' is singular at x = " << x.transpose();
    throw Error(ErrorKind::SingularMetric, os.str());
  }
  return lu.inverse();
}

}  // namespace

Vec ChristoffelValue::contract(const Vec& v, const Vec& w) const {
  Vec out(static_cast<Eigen::Index>(gamma.size()));
  for (std::size_t k = 0; k < gamma.size(); ++k) out[static_cast<Eigen::Index>(k)] = v.dot(gamma[k] * w);
  return out;
}

double ChristoffelValue::max_asymmetry() const {
  double worst = 0.0;
  for (const auto& gk : gamma) worst = std::max(worst, (gk - gk.transpose()).cwiseAbs().maxCoeff());
  return worst;
}

double default_interface_margin(const MetricField& g) { return 1e-8 * g.domain_radius(); }

ChristoffelValue branch_christoffel(const MetricField& g, std::size_t branch, const Vec& x) {
  const Eigen::Index n = g.dim();
  const Mat gx = g.branch_metric(branch, x);
  const Mat ginv = checked_inverse(g, gx, x);
  const auto d = g.branch_derivatives(branch, x);

  // T_l(i,j) = d_i g_{jl} + d_j g_{il} - d_l g_{ij}
  std::vector<Mat> t(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (Eigen::Index l = 0; l < n; ++l) {
    Mat& tl = t[static_cast<std::size_t>(l)];
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        tl(i, j) = d[static_cast<std::size_t>(i)](j, l) + d[static_cast<std::size_t>(j)](i, l) -
                   d[static_cast<std::size_t>(l)](i, j);
      }
    }
  }
  ChristoffelValue out;
  out.at = x;
  out.branch = branch;
  out.gamma.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (Eigen::Index k = 0; k < n; ++k) {
    Mat& gk = out.gamma[static_cast<std::size_t>(k)];
    for (Eigen::Index l = 0; l < n; ++l) gk += 0.5 * ginv(k, l) * t[static_cast<std::size_t>(l)];
  }
  return out;
}

ChristoffelValue christoffel_at(const MetricField& g, const Vec& x, std::optional<double> interface_margin) {
  if (x.size() != g.dim()) throw Error(ErrorKind::DimensionMismatch, "christoffel_at: point has wrong dimension");
  const double margin = interface_margin.value_or(default_interface_margin(g));
  for (std::size_t j = 0; j < g.interface_count(); ++j) {
    const double dist = g.interface_distance(j, x);
    if (dist <= margin) {
      std::ostringstream os;
      os << "x = " << x.transpose() << " lies within " << dist << " of interface '" << g.interface(j).name
         << "'; use the essential-hull machinery";
      throw Error(ErrorKind::OnSingularSet, os.str());
    }
  }
  return branch_christoffel(g, g.branch_at(x), x);
}

Vec branch_gamma_vv(const MetricField& g, std::size_t branch, const Vec& x, const Vec& v) {
  const Eigen::Index n = g.dim();
  const Mat gx = g.branch_metric(branch, x);
  const auto d = g.branch_derivatives(branch, x);
  // b_l = 2 ((sum_i v^i d_i g) v)_l - v^T (d_l g) v
  Mat dv = Mat::Zero(n, n);
  Vec quad(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Mat& di = d[static_cast<std::size_t>(i)];
    dv += v[i] * di;
    quad[i] = v.dot(di * v);
  }
  const Vec b = 2.0 * (dv * v) - quad;
  Eigen::PartialPivLU<Mat> lu(gx);
  return 0.5 * lu.solve(b);
}

double christoffel_bound(const MetricField& g, int samples, std::uint64_t seed) {
  Rng rng(substream_seed(seed, "christoffel-bound"));
  double inv_norm = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vec x = uniform_in_ball(rng, g.dim(), g.domain_radius());
    const Mat gx = g.metric(x);
    Eigen::SelfAdjointEigenSolver<Mat> es(gx, Eigen::EigenvaluesOnly);
    inv_norm = std::max(inv_norm, 1.0 / es.eigenvalues().cwiseAbs().minCoeff());
  }
  return 1.5 * g.lipschitz_L() * inv_norm;
}

HullSample sample_essential_hull(const MetricField& g, const FilippovState& state, double delta, int count,
                                 std::uint64_t seed, std::optional<double> interface_margin) {
  const Eigen::Index n = g.dim();
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "hull sampling needs delta > 0");
  if (count < n + 2) throw Error(ErrorKind::InvalidArgument, "hull sampling needs count >= n + 2");
  const double margin = interface_margin.value_or(default_interface_margin(g));

  HullSample out;
  out.center = state;
  out.delta = delta;
  out.values.reserve(static_cast<std::size_t>(count));
  Rng rng(seed);

  auto admissible = [&](const Vec& x) {
    if (!g.in_domain(x)) return false;
    for (std::size_t j = 0; j < g.interface_count(); ++j) {
      if (g.interface_distance(j, x) <= margin) return false;
    }
    return true;
  };

  const long max_attempts = 100L * count;
  long attempts = 0;
  while (out.count < count) {
    if (attempts >= max_attempts) {
      std::ostringstream os;
      os << "rejected " << out.rejected << " of " << attempts << " phase points around x = "
         << state.x.transpose() << " at delta = " << delta;
      throw Error(ErrorKind::DegenerateNeighborhood, os.str());
    }
    // Antithetic pairs keep the sample centred on the phase point.
    const Vec offset = uniform_in_ball(rng, 2 * n, delta);
    for (int sign : {1, -1}) {
      if (out.count >= count) break;
      ++attempts;
      const Vec x = state.x + sign * offset.head(n);
      const Vec w = state.v + sign * offset.tail(n);
      if (!admissible(x)) {
        ++out.rejected;
        continue;
      }
      out.values.push_back(branch_gamma_vv(g, g.branch_at(x), x, w));
      ++out.count;
    }
  }
  return out;
}

double convex_hull_distance(std::span<const Vec> points, const Vec& a, double tol) {
  if (points.empty()) throw Error(ErrorKind::InvalidArgument, "convex hull of an empty set");
  const std::size_t m = points.size();
  std::vector<Vec> p(m);
  double max_norm2 = 0.0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (points[i].size() != a.size()) throw Error(ErrorKind::DimensionMismatch, "hull point dimension");
    p[i] = points[i] - a;
    const double n2 = p[i].squaredNorm();
    max_norm2 = std::max(max_norm2, n2);
    if (n2 < p[start].squaredNorm()) start = i;
  }
  if (max_norm2 == 0.0) return 0.0;

  std::vector<std::size_t> corral{start};
  std::vector<double> lambda{1.0};
  Vec x = p[start];
  const double eps = 1e-14;

  for (int major = 0; major < 1000; ++major) {
    std::size_t j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double d = x.dot(p[i]);
      if (d < best) {
        best = d;
        j = i;
      }
    }
    if (x.squaredNorm() - best <= tol * max_norm2) break;
    if (std::find(corral.begin(), corral.end(), j) != corral.end()) break;
    corral.push_back(j);
    lambda.push_back(0.0);

    for (int minor = 0; minor < 1000; ++minor) {
      // Affine minimizer over aff(corral): y = p0 + D c, mu = (1 - sum c, c).
      const std::size_t k = corral.size();
      std::vector<double> mu(k, 1.0);
      if (k > 1) {
        Mat dmat(a.size(), static_cast<Eigen::Index>(k - 1));
        for (std::size_t i = 1; i < k; ++i) dmat.col(static_cast<Eigen::Index>(i - 1)) = p[corral[i]] - p[corral[0]];
        const Vec c = dmat.completeOrthogonalDecomposition().solve(-p[corral[0]]);
        mu[0] = 1.0 - c.sum();
        for (std::size_t i = 1; i < k; ++i) mu[i] = c[static_cast<Eigen::Index>(i - 1)];
      }
      if (std::all_of(mu.begin(), mu.end(), [&](double v) { return v > eps; })) {
        lambda = mu;
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < k; ++i) {
        if (mu[i] <= eps && lambda[i] - mu[i] > 0.0) theta = std::min(theta, lambda[i] / (lambda[i] - mu[i]));
      }
      for (std::size_t i = 0; i < k; ++i) lambda[i] += theta * (mu[i] - lambda[i]);
      std::vector<std::size_t> keep_idx;
      std::vector<double> keep_lambda;
      for (std::size_t i = 0; i < k; ++i) {
        if (lambda[i] > eps) {
          keep_idx.push_back(corral[i]);
          keep_lambda.push_back(lambda[i]);
        }
      }
      if (keep_idx.empty()) {
        keep_idx.push_back(corral.back());
        keep_lambda.push_back(1.0);
      }
      const double total = std::accumulate(keep_lambda.begin(), keep_lambda.end(), 0.0);
      for (auto& l : keep_lambda) l /= total;
      corral = std::move(keep_idx);
      lambda = std::move(keep_lambda);
    }
    x.setZero();
    for (std::size_t i = 0; i < corral.size(); ++i) x += lambda[i] * p[corral[i]];
  }
  return x.norm();
}

double hull_membership_margin(const HullSample& sample, const Vec& a) {
  if (sample.values.empty()) throw Error(ErrorKind::InvalidArgument, "empty hull sample");
  return convex_hull_distance(sample.values, a);
}

HullRefinement hull_margin_refinement(const MetricField& g, const FilippovState& state, const Vec& a,
                                      std::span<const double> deltas, int count, std::uint64_t seed) {
  HullRefinement out;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const auto sample = sample_essential_hull(g, state, deltas[i], count, substream_seed(seed, i));
    out.deltas.push_back(deltas[i]);
    out.margins.push_back(hull_membership_margin(sample, a));
  }
  return out;
}

}  // namespace lipcausal
