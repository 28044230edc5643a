#include "lipcausal/filippov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "lipcausal/errors.hpp"

namespace lipcausal {

namespace {

struct Phase {
  Vec x;
  Vec v;
};

template <class Accel>
Phase rk4_step(const Phase& y, double h, const Accel& acc) {
  const Vec k1x = y.v;
  const Vec k1v = acc(y.x, y.v);
  const Vec x2 = y.x + 0.5 * h * k1x;
  const Vec v2 = y.v + 0.5 * h * k1v;
  const Vec k2v = acc(x2, v2);
  const Vec x3 = y.x + 0.5 * h * v2;
  const Vec v3 = y.v + 0.5 * h * k2v;
  const Vec k3v = acc(x3, v3);
  const Vec x4 = y.x + h * v3;
  const Vec v4 = y.v + h * k3v;
  const Vec k4v = acc(x4, v4);
  return {y.x + (h / 6.0) * (k1x + 2.0 * v2 + 2.0 * v3 + v4), y.v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
}

Vec branch_acceleration(const MetricField& g, std::size_t branch, const Vec& x, const Vec& v) {
  return -branch_gamma_vv(g, branch, x, v);
}

struct SideData {
  std::size_t minus = 0;
  std::size_t plus = 0;
  Vec a_minus;
  Vec a_plus;
  double c_minus = 0.0;  // phi'' if the minus branch were active
  double c_plus = 0.0;
  double phi_dot = 0.0;
  double grad_norm = 0.0;
};

SideData side_data(const MetricField& g, std::size_t j, std::vector<int> side, const Vec& x, const Vec& v) {
  SideData d;
  side[j] = -1;
  d.minus = g.branch_for_signs(side);
  side[j] = 1;
  d.plus = g.branch_for_signs(side);
  d.a_minus = branch_acceleration(g, d.minus, x, v);
  d.a_plus = d.plus == d.minus ? d.a_minus : branch_acceleration(g, d.plus, x, v);
  const Vec grad = g.interface_gradient(j, x);
  const double curvature = v.dot(g.interface_hessian(j, x) * v);
  d.c_minus = grad.dot(d.a_minus) + curvature;
  d.c_plus = grad.dot(d.a_plus) + curvature;
  d.phi_dot = grad.dot(v);
  d.grad_norm = grad.norm();
  return d;
}

double sliding_theta(double c_minus, double c_plus) {
  const double denom = c_minus - c_plus;
  if (denom == 0.0) return 0.5;
  return std::clamp(c_minus / denom, 0.0, 1.0);
}

FilippovSelection select_impl(const MetricField& g, const Vec& x, const Vec& v, std::size_t j,
                              const std::vector<int>& side) {
  const SideData d = side_data(g, j, side, x, v);
  FilippovSelection sel;
  sel.minus_branch = d.minus;
  sel.plus_branch = d.plus;
  sel.a_minus = d.a_minus;
  sel.a_plus = d.a_plus;

  const double scale_a = 1.0 + std::max(std::abs(d.c_minus), std::abs(d.c_plus));
  const double tangency_tol = 1e-9 * d.grad_norm * (1.0 + v.norm());
  auto crossing = [&](int to_side) {
    sel.kind = FilippovSelection::Kind::Crossing;
    sel.branch = to_side > 0 ? d.plus : d.minus;
    sel.theta = to_side > 0 ? 1.0 : 0.0;
    sel.acceleration = to_side > 0 ? d.a_plus : d.a_minus;
    return sel;
  };

  if (std::abs(d.phi_dot) > tangency_tol) return crossing(d.phi_dot > 0.0 ? 1 : -1);
  if (std::abs(d.c_minus - d.c_plus) <= 1e-12 * scale_a) {
    const double c = d.c_minus;
    const int to = c > 1e-12 * scale_a ? 1 : (c < -1e-12 * scale_a ? -1 : side[j]);
    return crossing(to);
  }
  if (!std::isfinite(d.c_minus) || !std::isfinite(d.c_plus)) {
    throw Error(ErrorKind::InconsistentSliding, "non-finite one-sided accelerations");
  }
  if (d.c_minus > 0.0 && d.c_plus < 0.0) {
    const double theta = d.c_minus / (d.c_minus - d.c_plus);
    if (!(theta >= 0.0 && theta <= 1.0)) {
      throw Error(ErrorKind::InconsistentSliding, "tangency weight outside [0,1]");
    }
    sel.kind = FilippovSelection::Kind::Sliding;
    sel.branch = d.minus;
    sel.theta = theta;
    sel.acceleration = theta * d.a_plus + (1.0 - theta) * d.a_minus;
    return sel;
  }
  if (d.c_minus >= 0.0 && d.c_plus >= 0.0) return crossing(1);
  if (d.c_minus <= 0.0 && d.c_plus <= 0.0) return crossing(-1);
  std::ostringstream os;
  os << "both sides of interface '" << g.interface(j).name << "' repel a tangential velocity at x = "
     << x.transpose() << " (phi''- = " << d.c_minus << ", phi''+ = " << d.c_plus << ")";
  throw Error(ErrorKind::SlidingAmbiguity, os.str());
}

int sign_of(double s) { return s >= 0.0 ? 1 : -1; }

}  // namespace

const char* to_string(EventMode mode) {
  switch (mode) {
    case EventMode::Crossing: return "crossing";
    case EventMode::Sliding: return "sliding";
    case EventMode::SlidingExit: return "sliding_exit";
  }
  return "unknown";
}

double default_hull_tol(const Vec& v) { return 1e-6 * (1.0 + v.squaredNorm()); }

SampledCurve GeodesicTrajectory::as_curve() const {
  std::vector<double> t;
  std::vector<Vec> x;
  std::vector<Vec> v;
  t.reserve(states.size());
  for (const auto& s : states) {
    t.push_back(s.tau);
    x.push_back(s.x);
    v.push_back(s.v);
  }
  return SampledCurve(std::move(t), std::move(x), std::move(v));
}

FilippovSelection filippov_select(const MetricField& g, const FilippovState& state, std::size_t interface_id,
                                  bool compute_hull_margin, std::uint64_t seed) {
  if (interface_id >= g.interface_count()) throw Error(ErrorKind::InvalidArgument, "unknown interface id");
  const double s = g.interface_value(interface_id, state.x);
  if (std::abs(s) > 1e-12) {
    std::ostringstream os;
    os << "state is not on interface '" << g.interface(interface_id).name << "' (s = " << s << ")";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  auto sel = select_impl(g, state.x, state.v, interface_id, g.interface_signs(state.x));
  if (compute_hull_margin) {
    const auto sample = sample_essential_hull(g, state, 1e-4 * std::max(1.0, state.v.norm()), 64, seed);
    sel.hull_margin = hull_membership_margin(sample, -sel.acceleration);
  }
  return sel;
}

GeodesicTrajectory integrate_geodesic(const MetricField& g, const FilippovState& init, double tau_end, double step,
                                      const IntegrationOptions& options) {
  const Eigen::Index n = g.dim();
  if (init.x.size() != n || init.v.size() != n) throw Error(ErrorKind::DimensionMismatch, "initial state dimension");
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "step must be positive");
  if (!(tau_end > init.tau)) throw Error(ErrorKind::InvalidArgument, "tau_end must exceed the initial parameter");
  if (!g.in_domain(init.x)) throw Error(ErrorKind::InvalidArgument, "initial point is outside the chart");

  GeodesicTrajectory traj;
  traj.metric_ref = g.name();

  std::vector<int> side = g.interface_signs(init.x);
  bool sliding = false;
  std::size_t slide_iface = 0;
  for (std::size_t j = 0; j < g.interface_count(); ++j) {
    if (std::abs(g.interface_value(j, init.x)) <= options.event_tol) {
      // Starting on an interface: resolve the continuation right away.
      const auto sel = select_impl(g, init.x, init.v, j, side);
      if (sel.kind == FilippovSelection::Kind::Sliding) {
        sliding = true;
        slide_iface = j;
        traj.events.push_back({init.tau, j, EventMode::Sliding, sel.minus_branch, sel.minus_branch, sel.theta});
      } else {
        side[j] = sel.branch == sel.plus_branch ? 1 : -1;
      }
    }
  }

  Phase y{init.x, init.v};
  double tau = init.tau;
  auto current_branch = [&]() { return g.branch_for_signs(side); };
  traj.states.push_back({y.x, y.v, tau});
  traj.branch_ids.push_back(current_branch());

  auto smooth_acc = [&](std::size_t b) {
    return [&g, b](const Vec& x, const Vec& v) { return branch_acceleration(g, b, x, v); };
  };
  auto slide_acc = [&](const Vec& x, const Vec& v) {
    const SideData d = side_data(g, slide_iface, side, x, v);
    const double theta = sliding_theta(d.c_minus, d.c_plus);
    return Vec(theta * d.a_plus + (1.0 - theta) * d.a_minus);
  };

  const auto steps = static_cast<long>(std::ceil((tau_end - init.tau) / step - 1e-9));
  for (long k = 1; k <= steps && !traj.truncated; ++k) {
    const double target = k == steps ? tau_end : init.tau + static_cast<double>(k) * step;
    int guard = 0;
    while (tau < target) {
      if (++guard > 64) throw Error(ErrorKind::NoConvergence, "too many events within one step");
      const double h = target - tau;
      if (sliding) {
        Phase next = rk4_step(y, h, slide_acc);
        next.x = g.project_to_interface(slide_iface, next.x);
        const Vec grad = g.interface_gradient(slide_iface, next.x);
        next.v -= (grad.dot(next.v) / grad.squaredNorm()) * grad;
        if (!g.in_domain(next.x)) {
          traj.truncated = true;
          break;
        }
        y = next;
        tau = target;
        const SideData d = side_data(g, slide_iface, side, y.x, y.v);
        int exit_side = 0;
        if (d.c_minus <= 0.0) {
          exit_side = -1;
        } else if (d.c_plus >= 0.0) {
          exit_side = 1;
        }
        std::size_t branch_now = d.minus;
        if (exit_side != 0) {
          sliding = false;
          side[slide_iface] = exit_side;
          branch_now = current_branch();
          traj.events.push_back({tau, slide_iface, EventMode::SlidingExit, d.minus, branch_now,
                                 exit_side > 0 ? 1.0 : 0.0});
        }
        traj.states.push_back({y.x, y.v, tau});
        traj.branch_ids.push_back(branch_now);
        continue;
      }

      const std::size_t b = current_branch();
      const auto acc = smooth_acc(b);
      const Phase next = rk4_step(y, h, acc);
      if (!next.x.allFinite() || !next.v.allFinite()) {
        throw Error(ErrorKind::NoConvergence, "integration produced non-finite state");
      }
      if (!g.in_domain(next.x)) {
        traj.truncated = true;
        break;
      }

      // Earliest interface whose side changed during the step.
      double best_theta = 2.0;
      std::size_t best_j = 0;
      int hits = 0;
      std::vector<double> thetas;
      for (std::size_t j = 0; j < g.interface_count(); ++j) {
        if (sign_of(g.interface_value(j, next.x)) == side[j]) continue;
        ++hits;
        double lo = 0.0;
        double hi = 1.0;
        double theta = 1.0;
        for (int it = 0; it < options.bisection_iterations; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double s = g.interface_value(j, rk4_step(y, mid * h, acc).x);
          if (std::abs(s) <= options.event_tol) {
            hi = mid;
            break;
          }
          if (sign_of(s) == side[j]) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        theta = hi;
        thetas.push_back(theta);
        if (theta < best_theta) {
          best_theta = theta;
          best_j = j;
        }
      }
      if (hits == 0) {
        y = next;
        tau = target;
        traj.states.push_back({y.x, y.v, tau});
        traj.branch_ids.push_back(b);
        continue;
      }
      for (double t : thetas) {
        if (t != best_theta && std::abs(t - best_theta) * h < 1e-12) {
          throw Error(ErrorKind::InterfaceIntersection, "trajectory reaches an intersection of two interfaces");
        }
      }
      if (hits > 1 && std::count(thetas.begin(), thetas.end(), best_theta) > 1) {
        throw Error(ErrorKind::InterfaceIntersection, "trajectory reaches an intersection of two interfaces");
      }

      const Phase at = rk4_step(y, best_theta * h, acc);
      const double tau_event = tau + best_theta * h;
      const auto sel = select_impl(g, at.x, at.v, best_j, side);
      y = at;
      if (tau_event > traj.states.back().tau + 1e-14 * (1.0 + std::abs(tau_event))) {
        tau = tau_event;
        traj.states.push_back({y.x, y.v, tau});
        traj.branch_ids.push_back(b);
      } else {
        tau = traj.states.back().tau;
        traj.states.back() = {y.x, y.v, tau};
      }
      if (sel.kind == FilippovSelection::Kind::Sliding) {
        sliding = true;
        slide_iface = best_j;
        y.x = g.project_to_interface(best_j, y.x);
        traj.events.push_back({tau, best_j, EventMode::Sliding, b, sel.minus_branch, sel.theta});
      } else {
        side[best_j] = sel.branch == sel.plus_branch && sel.plus_branch != sel.minus_branch
                           ? 1
                           : (sel.branch == sel.minus_branch && sel.plus_branch != sel.minus_branch
                                  ? -1
                                  : -side[best_j]);
        traj.events.push_back({tau, best_j, EventMode::Crossing, b, sel.branch, sel.theta});
      }
      if (target - tau <= 1e-15 * (1.0 + std::abs(target))) {
        // Event at the end of the step.
        tau = target;
        traj.states.back().tau = target;
      }
    }
  }

  // Post-hoc Filippov check on the output itself.
  if (options.hull_checks > 0 && traj.states.size() >= 5) {
    std::vector<std::size_t> eligible;
    const auto& st = traj.states;
    for (std::size_t i = 2; i + 2 < st.size(); ++i) {
      bool ok = true;
      for (std::size_t k = i - 2; k < i + 2 && ok; ++k) {
        if (std::abs((st[k + 1].tau - st[k].tau) - step) > 1e-9 * step) ok = false;
        if (traj.branch_ids[k] != traj.branch_ids[i]) ok = false;
      }
      if (traj.branch_ids[i + 2] != traj.branch_ids[i]) ok = false;
      for (const auto& e : traj.events) {
        if (e.tau >= st[i - 2].tau - 1e-12 && e.tau <= st[i + 2].tau + 1e-12) ok = false;
      }
      if (ok) eligible.push_back(i);
    }
    Rng rng(substream_seed(options.seed, "hull-check"));
    if (static_cast<int>(eligible.size()) > options.hull_checks) {
      std::shuffle(eligible.begin(), eligible.end(), rng);
      eligible.resize(static_cast<std::size_t>(options.hull_checks));
      std::sort(eligible.begin(), eligible.end());
    }
    for (std::size_t i : eligible) {
      const Vec accel = (-st[i + 2].v + 8.0 * st[i + 1].v - 8.0 * st[i - 1].v + st[i - 2].v) / (12.0 * step);
      const auto ref = hull_margin_refinement(g, st[i], -accel, default_hull_deltas(), options.hull_count,
                                              substream_seed(options.seed, i));
      const double margin = ref.finest();
      ++traj.hull_checks;
      traj.hull_max_margin = std::max(traj.hull_max_margin, margin);
      if (margin > default_hull_tol(st[i].v)) ++traj.hull_violations;
    }
  }
  return traj;
}

std::vector<double> lorentzian_speeds(const SampledCurve& curve, const MetricField& g) {
  const auto vel = curve.velocities();
  std::vector<double> out(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) out[i] = lorentz_norm(g.metric(curve.points()[i]), vel[i]);
  return out;
}

namespace {

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> kGaussNodes{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                            0.9061798459386640};
constexpr std::array<double, 5> kGaussWeights{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                              0.4786286704993665, 0.2369268850561891};

}  // namespace

Reparametrization reparametrize_constant_speed(const SampledCurve& curve, const MetricField& g,
                                               std::optional<double> ell,
                                               std::optional<std::pair<double, double>> interval,
                                               std::optional<std::size_t> samples) {
  const double a0 = curve.front_param();
  const double b0 = curve.back_param();
  const auto& t = curve.params();

  auto speed = [&](double s) {
    const Vec x = curve.point_at(s);
    const double q = lorentz_product(g.metric(x), curve.velocity_at(s), curve.velocity_at(s));
    if (!(q > kNullTol)) {
      std::ostringstream os;
      os << "Lorentzian speed squared " << q << " at parameter " << s;
      throw Error(ErrorKind::NotUniformlyTimelike, os.str());
    }
    return std::sqrt(q);
  };

  double length = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double mid = 0.5 * (t[i] + t[i + 1]);
    const double half = 0.5 * (t[i + 1] - t[i]);
    speed(t[i]);
    for (std::size_t q = 0; q < kGaussNodes.size(); ++q) length += kGaussWeights[q] * half * speed(mid + half * kGaussNodes[q]);
  }
  speed(b0);

  const double a = interval ? interval->first : a0;
  double b = interval ? interval->second : b0;
  double ell_value = 0.0;
  if (ell) {
    if (!(*ell > 0.0)) throw Error(ErrorKind::InvalidArgument, "ell must be positive");
    ell_value = *ell;
    b = a + length / ell_value;
  } else {
    if (!(b > a)) throw Error(ErrorKind::InvalidArgument, "reparametrization interval must be non-empty");
    ell_value = length / (b - a);
  }

  const std::size_t m = samples.value_or(curve.size() - 1);
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "need at least one output interval");
  const int substeps = 8;
  const double dt = (b - a) / static_cast<double>(m);
  const double hs = dt / substeps;
  auto rhs = [&](double f) { return ell_value / speed(std::clamp(f, a0, b0)); };

  Reparametrization out{curve, ell_value, length, 0.0, {}};
  std::vector<double> params(m + 1);
  std::vector<Vec> pts(m + 1);
  std::vector<Vec> vel(m + 1);
  std::vector<double> f(m + 1);
  double fv = a0;
  for (std::size_t k = 0; k <= m; ++k) {
    params[k] = k == m ? b : a + static_cast<double>(k) * dt;
    f[k] = fv;
    const double fc = std::clamp(fv, a0, b0);
    pts[k] = curve.point_at(fc);
    const Vec gv = curve.velocity_at(fc);
    vel[k] = gv * rhs(fc);
    if (k == m) break;
    for (int s = 0; s < substeps; ++s) {
      const double k1 = rhs(fv);
      const double k2 = rhs(fv + 0.5 * hs * k1);
      const double k3 = rhs(fv + 0.5 * hs * k2);
      const double k4 = rhs(fv + hs * k3);
      fv += hs / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
  }
  out.endpoint_residual = f[m] - b0;
  out.f = std::move(f);
  out.curve = SampledCurve(std::move(params), std::move(pts), std::move(vel));
  return out;
}

VelocityUpperBoundReport velocity_upper_bound_check(const SampledCurve& curve, double C) {
  if (!(C >= 0.0)) throw Error(ErrorKind::InvalidArgument, "velocity bound constant must be >= 0");
  VelocityUpperBoundReport rep;
  const auto vel = curve.velocities();
  const auto& t = curve.params();
  double r = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double trap = 0.5 * (vel[i].norm() + vel[i + 1].norm()) * (t[i + 1] - t[i]);
    r += std::max(trap, (curve.points()[i + 1] - curve.points()[i]).norm());
  }
  rep.euclidean_length = r;
  rep.interval = curve.back_param() - curve.front_param();
  rep.bound = (C > 0.0 ? std::expm1(C * r) / C : r) / rep.interval;
  for (const auto& v : vel) rep.max_speed = std::max(rep.max_speed, v.norm());
  rep.min_slack = rep.bound - rep.max_speed;
  rep.holds = rep.min_slack >= -1e-12 * (1.0 + rep.bound);
  return rep;
}

LimitReport pointwise_limit_is_geodesic(const std::vector<SampledCurve>& sequence, const SampledCurve& limit,
                                        const MetricField& g, int checks, std::uint64_t seed) {
  LimitReport rep;
  const double a = limit.front_param();
  const double b = limit.back_param();
  for (const auto& c : sequence) {
    if (std::abs(c.front_param() - a) > 1e-9 * (1 + std::abs(a)) || std::abs(c.back_param() - b) > 1e-9 * (1 + std::abs(b))) {
      throw Error(ErrorKind::InvalidArgument, "sequence curves must share the limit's parameter interval");
    }
    double sup = 0.0;
    for (double t : limit.params()) sup = std::max(sup, (c.point_at(t) - limit.point_at(t)).norm());
    for (double t : c.params()) sup = std::max(sup, (c.point_at(t) - limit.point_at(t)).norm());
    rep.sup_distance.push_back(sup);
  }
  if (rep.sup_distance.size() >= 2) {
    bool monotone = true;
    for (std::size_t i = 1; i < rep.sup_distance.size(); ++i) {
      if (rep.sup_distance[i] > rep.sup_distance[i - 1] + 1e-12) monotone = false;
    }
    rep.converged = monotone && rep.sup_distance.back() <= 0.1 * rep.sup_distance.front() + 1e-12;
  } else {
    rep.converged = !rep.sup_distance.empty() && rep.sup_distance.front() <= 1e-12;
  }

  // Check points are interior sample nodes; the acceleration is the central
  // difference of the velocities there (stored ones when the curve has them).
  const auto& t = limit.params();
  const auto& x = limit.points();
  const auto v = limit.velocities();
  const std::size_t m = limit.size();
  if (m < 3) throw Error(ErrorKind::InvalidArgument, "limit curve needs at least three samples");
  Rng rng(substream_seed(seed, "limit-checks"));
  std::uniform_int_distribution<std::size_t> pick(1, m - 2);
  for (int i = 0; i < checks; ++i) {
    const std::size_t k = pick(rng);
    Vec accel;
    if (limit.has_velocities()) {
      accel = (v[k + 1] - v[k - 1]) / (t[k + 1] - t[k - 1]);
    } else {
      const double h0 = t[k] - t[k - 1];
      const double h1 = t[k + 1] - t[k];
      accel = 2.0 * ((x[k + 1] - x[k]) / h1 - (x[k] - x[k - 1]) / h0) / (h0 + h1);
    }
    FilippovState st{x[k], v[k], t[k]};
    const auto ref = hull_margin_refinement(g, st, -accel, default_hull_deltas(), 64,
                                            substream_seed(seed, static_cast<std::uint64_t>(i)));
    ++rep.check_points;
    rep.max_hull_margin = std::max(rep.max_hull_margin, ref.finest());
    rep.max_hull_ratio = std::max(rep.max_hull_ratio, ref.finest() / default_hull_tol(st.v));
  }
  rep.geodesic = rep.max_hull_ratio <= 1.0;
  return rep;
}

void write_trajectory_csv(std::ostream& os, const GeodesicTrajectory& traj) {
  if (traj.states.empty()) return;
  const Eigen::Index n = traj.states.front().x.size();
  os << "tau";
  for (Eigen::Index k = 0; k < n; ++k) os << ",x_" << k;
  for (Eigen::Index k = 0; k < n; ++k) os << ",v_" << k;
  os << ",branch_id\n";
  char buf[64];
  auto put = [&](double value) {
    std::snprintf(buf, sizeof buf, "%.17g", value);
    os << buf;
  };
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const auto& s = traj.states[i];
    put(s.tau);
    for (Eigen::Index k = 0; k < n; ++k) {
      os << ',';
      put(s.x[k]);
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      os << ',';
      put(s.v[k]);
    }
    os << ',' << traj.branch_ids[i] << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const GeodesicTrajectory& traj) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot open '" + path + "' for writing");
  write_trajectory_csv(out, traj);
}

}  // namespace lipcausal
