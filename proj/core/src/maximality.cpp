#include "lipcausal/maximality.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "lipcausal/errors.hpp"

namespace lipcausal {

double segment_quadratic(const MetricField& g, const Vec& a, const Vec& b) {
  const Vec d = b - a;
  return lorentz_product(g.metric(0.5 * (a + b)), d, d);
}

double segment_length(const MetricField& g, const Vec& a, const Vec& b) {
  return std::sqrt(std::max(0.0, segment_quadratic(g, a, b)));
}

bool segment_is_causal(const MetricField& g, const Vec& a, const Vec& b, double null_tol) {
  const Vec d = b - a;
  if (d[0] < 0.0) return false;
  return segment_quadratic(g, a, b) >= -null_tol * d.squaredNorm();
}

CausalityReport check_causal(const MetricField& g, const SampledCurve& curve, double null_tol) {
  CausalityReport rep;
  rep.worst_ratio = std::numeric_limits<double>::infinity();
  const auto& p = curve.points();
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const Vec d = p[i + 1] - p[i];
    const double n2 = d.squaredNorm();
    if (n2 == 0.0) continue;
    const double ratio = segment_quadratic(g, p[i], p[i + 1]) / n2;
    rep.worst_ratio = std::min(rep.worst_ratio, ratio);
    if (rep.causal && (ratio < -null_tol || d[0] < 0.0)) {
      rep.causal = false;
      rep.first_violation = i;
    }
  }
  return rep;
}

double lorentzian_length(const SampledCurve& curve, const MetricField& g, double null_tol) {
  const auto rep = check_causal(g, curve, null_tol);
  if (!rep.causal) {
    std::ostringstream os;
    os << "segment " << rep.first_violation << " is spacelike or past directed (g/|D|^2 = " << rep.worst_ratio << ")";
    throw Error(ErrorKind::NotCausal, os.str());
  }
  double len = 0.0;
  const auto& p = curve.points();
  for (std::size_t i = 0; i + 1 < p.size(); ++i) len += segment_length(g, p[i], p[i + 1]);
  return len;
}

namespace {

constexpr std::array<double, 5> kNodes{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                       0.9061798459386640};
constexpr std::array<double, 5> kWeights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                         0.4786286704993665, 0.2369268850561891};

}  // namespace

double smooth_lorentzian_length(const SampledCurve& curve, const MetricField& g, double null_tol) {
  const auto& t = curve.params();
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double mid = 0.5 * (t[i] + t[i + 1]);
    const double half = 0.5 * (t[i + 1] - t[i]);
    for (std::size_t q = 0; q < kNodes.size(); ++q) {
      const double s = mid + half * kNodes[q];
      const Vec v = curve.velocity_at(s);
      const double val = lorentz_product(g.metric(curve.point_at(s)), v, v);
      if (val < -null_tol * v.squaredNorm() || v[0] < 0.0) {
        std::ostringstream os;
        os << "curve is not causal near parameter " << s;
        throw Error(ErrorKind::NotCausal, os.str());
      }
      len += kWeights[q] * half * std::sqrt(std::max(0.0, val));
    }
  }
  return len;
}

const char* to_string(LengthRegime regime) {
  return regime == LengthRegime::Length ? "length" : "squared_integrand";
}

namespace {

bool all_causal(const MetricField& g, const std::vector<Vec>& z, double null_tol) {
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    if (!segment_is_causal(g, z[i], z[i + 1], null_tol)) return false;
  }
  return true;
}

std::vector<Vec> polyline(const std::vector<Vec>& corners, int segments) {
  // Distributes `segments` nodes over the corner path proportionally to the
  // Euclidean length of each piece, keeping every corner as a node.
  const std::size_t pieces = corners.size() - 1;
  std::vector<double> len(pieces);
  double total = 0.0;
  for (std::size_t k = 0; k < pieces; ++k) total += len[k] = (corners[k + 1] - corners[k]).norm();
  std::vector<int> count(pieces, 1);
  int left = segments - static_cast<int>(pieces);
  for (std::size_t k = 0; k < pieces && left > 0; ++k) {
    const int extra = static_cast<int>(std::floor(left * len[k] / std::max(total, 1e-300)));
    count[k] += extra;
  }
  int used = 0;
  for (int c : count) used += c;
  count.back() += segments - used;
  std::vector<Vec> z;
  z.push_back(corners.front());
  for (std::size_t k = 0; k < pieces; ++k) {
    for (int i = 1; i <= count[k]; ++i) {
      z.push_back(corners[k] + (static_cast<double>(i) / count[k]) * (corners[k + 1] - corners[k]));
    }
  }
  return z;
}

struct Objective {
  const MetricField& g;
  LengthRegime regime;
  double inv_dt;

  double segment(const Vec& a, const Vec& b) const {
    return regime == LengthRegime::Length ? segment_length(g, a, b) : segment_quadratic(g, a, b) * inv_dt;
  }
  double total(const std::vector<Vec>& z) const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) s += segment(z[i], z[i + 1]);
    return s;
  }
};

double polygon_length(const MetricField& g, const std::vector<Vec>& z) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) s += segment_length(g, z[i], z[i + 1]);
  return s;
}

// Central differences; node i only touches segments i-1 and i.
std::vector<Vec> gradient(const Objective& f, const std::vector<Vec>& z, double eps) {
  const std::size_t m = z.size() - 1;
  std::vector<Vec> grad(m + 1, Vec::Zero(z.front().size()));
  Vec zp;
  Vec zm;
  for (std::size_t i = 1; i < m; ++i) {
    for (Eigen::Index k = 0; k < z[i].size(); ++k) {
      zp = z[i];
      zm = z[i];
      zp[k] += eps;
      zm[k] -= eps;
      const double up = f.segment(z[i - 1], zp) + f.segment(zp, z[i + 1]);
      const double dn = f.segment(z[i - 1], zm) + f.segment(zm, z[i + 1]);
      grad[i][k] = (up - dn) / (2.0 * eps);
    }
  }
  return grad;
}

// H^1 (Sobolev) preconditioning: solve tridiag(-1, 2, -1) d = grad per coordinate.
std::vector<Vec> precondition(const std::vector<Vec>& grad) {
  const std::size_t m = grad.size() - 1;
  std::vector<Vec> d(m + 1, Vec::Zero(grad.front().size()));
  if (m < 2) return d;
  const std::size_t n = m - 1;
  std::vector<double> c(n);
  std::vector<Vec> r(n);
  double denom = 2.0;
  c[0] = -1.0 / denom;
  r[0] = grad[1] / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = 2.0 + c[i - 1];
    c[i] = -1.0 / denom;
    r[i] = (grad[i + 1] + r[i - 1]) / denom;
  }
  d[n] = r[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) d[i + 1] = r[i] - c[i] * d[i + 2];
  return d;
}

// Shrinks the spatial part of z[i] - z[i-1] until the segment is causal,
// sweeping forward. False if the final fixed segment or a time step fails.
bool project(const MetricField& g, std::vector<Vec>& z, double null_tol) {
  const std::size_t m = z.size() - 1;
  for (std::size_t i = 1; i < m; ++i) {
    Vec d = z[i] - z[i - 1];
    if (!(d[0] > 0.0)) return false;
    for (int pass = 0; pass < 6 && !segment_is_causal(g, z[i - 1], z[i - 1] + d, null_tol); ++pass) {
      const Mat G = g.metric(z[i - 1] + 0.5 * d);
      const Eigen::Index n = d.size();
      const double a = G(0, 0) * d[0] * d[0];
      const Vec dx = d.tail(n - 1);
      const double b = d[0] * G.row(0).tail(n - 1).dot(dx);
      const double c = dx.dot(G.bottomRightCorner(n - 1, n - 1) * dx);
      double s = 0.0;
      if (c < 0.0) {
        const double disc = std::max(0.0, b * b - a * c);
        s = std::clamp((-b - std::sqrt(disc)) / c, 0.0, 1.0) * (1.0 - 1e-12);
      }
      d.tail(n - 1) *= s;
    }
    if (!segment_is_causal(g, z[i - 1], z[i - 1] + d, null_tol)) return false;
    z[i] = z[i - 1] + d;
  }
  return segment_is_causal(g, z[m - 1], z[m], null_tol);
}

double dot(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].dot(b[i]);
  return s;
}

double max_norm(const std::vector<Vec>& a) {
  double s = 0.0;
  for (const auto& v : a) s = std::max(s, v.norm());
  return s;
}

double gradient_mapping(const MetricField& g, const std::vector<Vec>& z, const std::vector<Vec>& grad, double radius,
                        double null_tol) {
  const double gmax = max_norm(grad);
  if (gmax == 0.0) return 0.0;
  const double tau = 1e-6 * radius / std::max(1.0, gmax);
  std::vector<Vec> trial = z;
  for (std::size_t i = 1; i + 1 < z.size(); ++i) trial[i] += tau * grad[i];
  // A blocked projection means no feasible ascent at this scale.
  if (!project(g, trial, null_tol)) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += (trial[i] - z[i]).squaredNorm();
  return std::sqrt(s) / tau;
}

MaximizationResult ascend(const MetricField& g, std::vector<Vec> z, const MaximizeOptions& opt) {
  const std::size_t m = z.size() - 1;
  const double radius = g.domain_radius();
  const double eps = 1e-6 * radius;
  const double min_step = 1e-15 * radius;
  double step = 1e-2 * radius;

  MaximizationResult res{SampledCurve({0.0, 1.0}, {z.front(), z.back()}), 0.0, 0, false, 0.0, LengthRegime::Length, 0};
  double residual = 0.0;
  double checkpoint = -std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    const LengthRegime regime = polygon_length(g, z) < 1e-6 ? LengthRegime::Surrogate : LengthRegime::Length;
    const Objective f{g, regime, static_cast<double>(m)};
    const auto grad = gradient(f, z, eps);
    residual = gradient_mapping(g, z, grad, radius, opt.null_tol);
    res.regime = regime;
    if (residual <= opt.tolerance) break;
    auto dir = precondition(grad);
    const double dmax = max_norm(dir);
    if (dmax == 0.0) break;
    for (auto& d : dir) d /= dmax;

    const double f0 = f.total(z);
    // Stagnation: less than 1e-12 relative progress over 200 iterations.
    if (it % 200 == 0) {
      if (it > 0 && f0 - checkpoint <= 1e-12 * (1.0 + std::abs(f0))) break;
      checkpoint = f0;
    }
    bool accepted = false;
    while (step >= min_step) {
      std::vector<Vec> trial = z;
      for (std::size_t i = 1; i < m; ++i) trial[i] += step * dir[i];
      if (project(g, trial, opt.null_tol)) {
        std::vector<Vec> delta(m + 1);
        for (std::size_t i = 0; i <= m; ++i) delta[i] = trial[i] - z[i];
        const double pred = dot(grad, delta);
        if (pred > 0.0 && f.total(trial) >= f0 + 1e-4 * pred) {
          z = std::move(trial);
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;
    step = std::min(2.0 * step, 0.1 * radius);
  }
  res.iterations = it;
  res.first_order_residual = residual;
  res.converged = residual <= opt.tolerance;
  std::vector<double> params(m + 1);
  for (std::size_t i = 0; i <= m; ++i) params[i] = static_cast<double>(i) / static_cast<double>(m);
  res.curve = SampledCurve(std::move(params), z);
  res.length = lorentzian_length(res.curve, g, opt.null_tol);
  return res;
}

}  // namespace

std::vector<Vec> find_causal_connector(const MetricField& g, const Vec& x, const Vec& y, int segments,
                                       std::uint64_t seed, double null_tol) {
  if (segments < 1) throw Error(ErrorKind::InvalidArgument, "need at least one segment");
  if (x.size() != g.dim() || y.size() != g.dim()) throw Error(ErrorKind::DimensionMismatch, "endpoint dimension");
  if (!g.in_domain(x) || !g.in_domain(y)) throw Error(ErrorKind::InvalidArgument, "endpoint outside the chart");
  if (!(y[0] > x[0])) throw Error(ErrorKind::NotCausallyRelated, "y is not to the future of x");

  auto z = polyline({x, y}, segments);
  if (all_causal(g, z, null_tol)) return z;

  Rng rng(substream_seed(seed, "connector"));
  std::uniform_real_distribution<double> split(0.1, 0.9);
  const double scale = (y - x).norm();
  for (int attempt = 0; attempt < 20000; ++attempt) {
    const double s = split(rng);
    Vec w = x + s * (y - x);
    w.tail(w.size() - 1) += uniform_in_ball(rng, w.size() - 1, scale);
    if (!g.in_domain(w) || segments < 2) continue;
    z = polyline({x, w, y}, segments);
    if (all_causal(g, z, null_tol)) return z;
  }
  throw Error(ErrorKind::NotCausallyRelated, "no causal polygonal connector found between the endpoints");
}

MaximizationResult maximize_causal_curve(const MetricField& g, const Vec& x, const Vec& y, int segments,
                                         const MaximizeOptions& options) {
  if (segments < 1) throw Error(ErrorKind::InvalidArgument, "need at least one segment");
  std::vector<Vec> start;
  if (options.initial) {
    start = *options.initial;
    if (start.size() != static_cast<std::size_t>(segments) + 1) {
      throw Error(ErrorKind::InvalidArgument, "initial polygon must have segments + 1 points");
    }
    if ((start.front() - x).norm() > 0.0 || (start.back() - y).norm() > 0.0) {
      throw Error(ErrorKind::InvalidArgument, "initial polygon must join x and y");
    }
    if (!all_causal(g, start, options.null_tol)) throw Error(ErrorKind::NotCausal, "initial polygon is not causal");
  } else {
    start = find_causal_connector(g, x, y, segments, options.seed, options.null_tol);
  }

  const int starts = std::max(1, options.multistart);
  std::vector<std::vector<Vec>> inits(static_cast<std::size_t>(starts), start);
  for (int k = 1; k < starts; ++k) {
    Rng rng(substream_seed(options.seed, static_cast<std::uint64_t>(k)));
    auto& z = inits[static_cast<std::size_t>(k)];
    const Vec e = uniform_on_sphere(rng, g.dim());
    const double amp = 0.05 * (y - x).norm();
    for (int i = 1; i < segments; ++i) {
      const double t = static_cast<double>(i) / segments;
      z[static_cast<std::size_t>(i)] += amp * 4.0 * t * (1.0 - t) * e;
    }
    if (!project(g, z, options.null_tol)) z = start;
  }

  std::vector<std::optional<MaximizationResult>> results(static_cast<std::size_t>(starts));
  const int threads = std::clamp(options.threads, 1, starts);
  auto worker = [&](int tid) {
    for (int k = tid; k < starts; k += threads) {
      results[static_cast<std::size_t>(k)] = ascend(g, inits[static_cast<std::size_t>(k)], options);
      results[static_cast<std::size_t>(k)]->start_index = k;
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < results.size(); ++k) {
    if (results[k]->length > results[best]->length) best = k;
  }
  return *results[best];
}

ShootResult shoot_geodesic(const MetricField& g, const Vec& x, const Vec& y, const Vec& v0_guess,
                           const ShootOptions& options) {
  if (x.size() != g.dim() || y.size() != g.dim() || v0_guess.size() != g.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "shooting data dimension");
  }
  if (lorentz_product(g.metric(x), v0_guess, v0_guess) < -kNullTol * v0_guess.squaredNorm()) {
    throw Error(ErrorKind::InvalidArgument, "initial guess must be timelike or null");
  }
  IntegrationOptions inner = options.integration;
  inner.hull_checks = 0;

  struct Eval {
    Vec residual;
    bool ok = false;
  };
  auto endpoint = [&](const Vec& v0) {
    Eval e;
    try {
      const auto traj = integrate_geodesic(g, {x, v0, 0.0}, 1.0, options.step, inner);
      if (traj.truncated) return e;
      e.residual = traj.states.back().x - y;
      e.ok = true;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::InvalidArgument) throw;
    }
    return e;
  };

  ShootResult out;
  Vec v0 = v0_guess;
  Eval cur = endpoint(v0);
  if (!cur.ok) throw Error(ErrorKind::NoConvergence, "initial guess leaves the chart");
  out.residuals.push_back(cur.residual.norm());
  out.iterations = 1;
  const Eigen::Index n = g.dim();
  while (cur.residual.norm() > options.tolerance) {
    if (out.iterations >= options.max_iterations) {
      std::ostringstream os;
      os << "shooting did not converge; residuals:";
      for (double r : out.residuals) os << ' ' << r;
      throw Error(ErrorKind::NoConvergence, os.str());
    }
    Mat J(n, n);
    const double h = 1e-7 * (1.0 + v0.norm());
    for (Eigen::Index k = 0; k < n; ++k) {
      Vec vp = v0;
      Vec vm = v0;
      vp[k] += h;
      vm[k] -= h;
      const Eval ep = endpoint(vp);
      const Eval em = endpoint(vm);
      if (!ep.ok || !em.ok) throw Error(ErrorKind::NoConvergence, "shooting Jacobian stencil leaves the chart");
      J.col(k) = (ep.residual - em.residual) / (2.0 * h);
    }
    const Vec delta = J.fullPivLu().solve(-cur.residual);
    if (!delta.allFinite()) throw Error(ErrorKind::NoConvergence, "singular shooting Jacobian");
    double lambda = 1.0;
    bool improved = false;
    for (int k = 0; k < 30; ++k, lambda *= 0.5) {
      const Eval trial = endpoint(v0 + lambda * delta);
      if (trial.ok && trial.residual.norm() < cur.residual.norm()) {
        v0 += lambda * delta;
        cur = trial;
        improved = true;
        break;
      }
    }
    ++out.iterations;
    out.residuals.push_back(cur.residual.norm());
    if (!improved) {
      std::ostringstream os;
      os << "shooting line search failed; residuals:";
      for (double r : out.residuals) os << ' ' << r;
      throw Error(ErrorKind::NoConvergence, os.str());
    }
  }
  out.v0 = v0;
  out.trajectory = integrate_geodesic(g, {x, v0, 0.0}, 1.0, options.step, options.integration);
  return out;
}

ProbeReport local_maximality_probe(const SampledCurve& curve, const MetricField& g, int trials, double amplitude,
                                   std::uint64_t seed) {
  ProbeReport rep;
  const bool smooth = curve.has_velocities();
  auto length_of = [&](const SampledCurve& c) {
    return smooth ? smooth_lorentzian_length(c, g) : lorentzian_length(c, g);
  };
  rep.base_length = length_of(curve);
  rep.max_increase = -std::numeric_limits<double>::infinity();
  const double a = curve.front_param();
  const double b = curve.back_param();
  const auto& t = curve.params();
  const auto vel = smooth ? curve.velocities() : std::vector<Vec>{};
  Rng rng(substream_seed(seed, "probe"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int trial = 0; trial < trials; ++trial) {
    bool done = false;
    for (int attempt = 0; attempt < 20 && !done; ++attempt) {
      const double center = a + (b - a) * (0.05 + 0.9 * unit(rng));
      const double room = std::min(center - a, b - center);
      const double width = room * (0.2 + 0.8 * unit(rng));
      const Vec e = uniform_on_sphere(rng, g.dim());
      std::vector<Vec> pts = curve.points();
      std::vector<Vec> vs = vel;
      for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = (t[i] - center) / width;
        if (std::abs(r) >= 1.0) continue;
        const double bump = std::exp(1.0 - 1.0 / (1.0 - r * r));
        pts[i] += amplitude * bump * e;
        if (smooth) vs[i] += amplitude * bump * (-2.0 * r / std::pow(1.0 - r * r, 2)) / width * e;
      }
      try {
        const SampledCurve pert = smooth ? SampledCurve(t, std::move(pts), std::move(vs)) : SampledCurve(t, std::move(pts));
        const double len = length_of(pert);
        const double inc = len - rep.base_length;
        rep.max_increase = std::max(rep.max_increase, inc);
        if (len > rep.base_length + 1e-12 * (1.0 + rep.base_length)) ++rep.improving;
        ++rep.trials;
        done = true;
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::NotCausal) throw;
        ++rep.rejected_noncausal;
      }
    }
  }
  return rep;
}

LimitExperiment lightlike_limit_experiment(const MetricField& g, const Vec& x, const Vec& y,
                                           const LimitExperimentOptions& options) {
  const Vec w = y - x;
  if (std::abs(lorentz_product(g.metric(0.5 * (x + y)), w, w)) > 1e-10 * w.squaredNorm() || !(w[0] > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "limit experiment needs a future lightlike chord");
  }
  if (options.pieces < 1 || options.samples < 5) throw Error(ErrorKind::InvalidArgument, "bad limit experiment sizes");
  Vec shrink = Vec::Zero(w.size());
  shrink.tail(w.size() - 1) = w.tail(w.size() - 1);

  std::vector<SampledCurve> sequence;
  std::vector<double> lengths;
  std::vector<double> params(static_cast<std::size_t>(options.samples));
  for (int i = 0; i < options.samples; ++i) params[static_cast<std::size_t>(i)] = static_cast<double>(i) / (options.samples - 1);

  ShootOptions shoot;
  shoot.integration.hull_checks = 0;
  for (int n : options.indices) {
    const Vec yn = y - shrink / static_cast<double>(n);
    std::vector<SampledCurve> pieces;
    for (int k = 0; k < options.pieces; ++k) {
      const Vec a = x + (static_cast<double>(k) / options.pieces) * (yn - x);
      const Vec b = x + (static_cast<double>(k + 1) / options.pieces) * (yn - x);
      pieces.push_back(shoot_geodesic(g, a, b, b - a, shoot).trajectory.as_curve());
    }
    // Piece k occupies [k/p, (k+1)/p]; velocities rescale by p.
    std::vector<Vec> pts;
    std::vector<Vec> vel;
    const double p = options.pieces;
    for (double s : params) {
      const int k = std::min(options.pieces - 1, static_cast<int>(std::floor(s * p)));
      const double local = s * p - k;
      pts.push_back(pieces[static_cast<std::size_t>(k)].point_at(local));
      vel.push_back(p * pieces[static_cast<std::size_t>(k)].velocity_at(local));
    }
    SampledCurve member(params, std::move(pts), std::move(vel));
    lengths.push_back(lorentzian_length(member, g));
    sequence.push_back(std::move(member));
  }
  std::vector<Vec> lp;
  std::vector<Vec> lv;
  for (double s : params) {
    lp.push_back(x + s * w);
    lv.push_back(w);
  }
  SampledCurve limit(params, std::move(lp), std::move(lv));
  auto report = pointwise_limit_is_geodesic(sequence, limit, g, options.hull_checks, options.seed);
  return {std::move(sequence), std::move(limit), std::move(report), std::move(lengths)};
}

}  // namespace lipcausal
