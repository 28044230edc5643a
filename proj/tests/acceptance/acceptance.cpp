// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "oracles.hpp"

using namespace lipcausal;
using testing::vec;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;  // 0 for no runtime limit
  std::function<void(Outcome&)> body;
};

SampledCurve polygon(const std::vector<Vec>& pts) {
  std::vector<double> t;
  for (std::size_t i = 0; i < pts.size(); ++i) t.push_back(static_cast<double>(i) / (pts.size() - 1));
  return SampledCurve(t, pts);
}

MetricField constant_field(const Mat& m, double radius) {
  MetricField::Options opt;
  opt.lipschitz_L = 0.0;
  opt.domain_radius = radius;
  opt.name = "constant";
  return MetricField::from_callable(m.rows(), [m](const Vec&) { return m; }, opt);
}

struct ZooCase {
  MetricSpec spec;
  FilippovState init;
  Vec x;
  Vec y;
};

const std::vector<ZooCase>& zoo_cases() {
  static const std::vector<ZooCase> cases{
      {{"minkowski", 3, {}, {}}, {vec({-0.5, 0.2, 0.1}), vec({1.0, 0.3, -0.2}), 0}, vec({-0.6, 0.2, 0.1}),
       vec({0.6, -0.1, 0.3})},
      {{"conformal", 3, {{"epsilon", 0.3}}, {}}, {vec({-0.5, 0.2, 0.1}), vec({1.0, 0.3, -0.2}), 0},
       vec({-0.6, 0.2, 0.1}), vec({0.6, -0.1, 0.3})},
      {{"rosen_wave", 4, {}, {}}, {vec({-0.2, 0, -0.05, 0.05}), vec({0.4, 0.05, 0.1, -0.08}), 0},
       vec({-0.2, 0.0, -0.05, 0.05}), vec({0.2, 0.05, 0.05, -0.03})},
      {{"holder_kink", 3, {}, {}}, {vec({-0.3, -0.2, 0.1}), vec({1.0, 0.5, 0.1}), 0}, vec({-0.6, -0.2, 0.0}),
       vec({0.6, 0.25, 0.1})},
      {{"thin_shell", 3, {}, {}}, {vec({-0.1, -0.05, 0.0}), vec({1.0, 0.4, 0.1}), 0}, vec({-0.2, -0.05, 0.0}),
       vec({0.2, 0.05, 0.02})},
  };
  return cases;
}

double order_estimate(const MetricField& g, const FilippovState& init, double tau_end, double h) {
  return std::log2(testing::halving_error(g, init, tau_end, h) / testing::halving_error(g, init, tau_end, h / 2.0));
}

// Observed orders at h and h/2 drift linearly in h toward the asymptotic order;
// one Richardson step removes that drift.
struct OrderPair {
  double coarse;
  double fine;
  double extrapolated() const { return 2.0 * fine - coarse; }
};

OrderPair order_pair(const MetricField& g, const FilippovState& init, double tau_end, double h) {
  return {order_estimate(g, init, tau_end, h), order_estimate(g, init, tau_end, h / 2.0)};
}

void triangle_sweeps(Outcome& o) {
  for (Eigen::Index n = 2; n <= 5; ++n) {
    const auto rep = triangle_sweep(n, 1000000, 7, 4);
    o.detail << " n=" << n << ": violations " << rep.violations << ", best A "
             << (rep.empirical_best_constant ? *rep.empirical_best_constant : -1.0) << ";";
    o.require(rep.violations == 0, "violations in n=" + std::to_string(n));
    o.require(rep.empirical_best_constant && *rep.empirical_best_constant >= 0.1, "best constant in n=" + std::to_string(n));
  }
}

void chord_gaps(Outcome& o) {
  Rng rng(substream_seed(2, "acceptance-polygons"));
  std::uniform_int_distribution<int> pieces(2, 16);
  std::uniform_int_distribution<int> dims(2, 4);
  long violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 10000; ++trial) {
    const Eigen::Index n = dims(rng);
    const auto eta = BilinearForm::minkowski(n);
    std::vector<Vec> pts{Vec::Zero(n)};
    const int m = pieces(rng);
    while (static_cast<int>(pts.size()) <= m) {
      const Vec step = sample_future_causal(rng, n);
      if (eta(step, step) > 1e-6 * step.squaredNorm()) pts.push_back(pts.back() + step);
    }
    const auto gap = chord_length_gap(polygon(pts), eta);
    if (!gap.holds) ++violations;
    worst = std::min(worst, gap.gap - gap.bound);
  }
  o.detail << " 10^4 polygons, violations " << violations << ", min(gap - bound) " << worst;
  o.require(violations == 0, "chord gap violations");
}

void integrator(Outcome& o) {
  const auto mink = make_metric({"minkowski", 3, {}, {}});
  const Vec v = vec({1.0, 0.3, -0.2});
  const auto line = integrate_geodesic(mink, {Vec::Zero(3), v, 0}, 1.0, 1e-3);
  double straight = 0.0;
  for (const auto& s : line.states) straight = std::max(straight, (s.x - s.tau * v).norm() + (s.v - v).norm());
  o.require(straight <= 1e-10, "Minkowski straightness");

  const auto rosen = make_metric({"rosen_wave", 4, {}, {}});
  const FilippovState init{vec({-0.2, 0, -0.05, 0.05}), vec({0.4, 0.05, 0.1, -0.08}), 0};
  const auto traj = integrate_geodesic(rosen, init, 1.0, 1e-3);
  const auto oracle = testing::rosen_closed_form(init.x, init.v, 1.0);
  const double ex = (traj.states.back().x - oracle.x).norm();
  const double ev = (traj.states.back().v - oracle.v).norm();
  o.require(!traj.truncated && ex <= 1e-6 && ev <= 1e-6, "Rosen closed form");

  const double through = order_estimate(rosen, init, 1.0, 0.1);
  // Smooth side of the wave: u > 0 for the whole run.
  const FilippovState smooth{vec({0.05, 0.05, -0.05, 0.05}), vec({0.4, 0.05, 0.1, -0.08}), 0};
  const auto away = order_pair(rosen, smooth, 0.5, 0.1);
  const auto conformal = make_metric({"conformal", 3, {{"epsilon", 0.3}}, {}});
  const auto away_conformal = order_pair(conformal, {vec({-0.5, 0.2, 0.1}), v, 0}, 1.0, 0.1);
  o.require(through >= 2.0, "order through the impulse");
  o.require(away.extrapolated() >= 4.0 && away_conformal.extrapolated() >= 4.0, "order away from the impulse");
  o.detail << " Minkowski " << straight << ", Rosen |dx| " << ex << " |dv| " << ev << ", order through " << through
           << ", away: Rosen u>0 " << away.coarse << ", " << away.fine << " -> " << away.extrapolated()
           << ", conformal " << away_conformal.coarse << ", " << away_conformal.fine << " -> "
           << away_conformal.extrapolated();
}

void c11_regularity(Outcome& o) {
  for (const auto& c : zoo_cases()) {
    const auto g = make_metric(c.spec);
    const auto traj = integrate_geodesic(g, c.init, 0.3, 1e-3);
    const double C1 = testing::max_speed(traj);
    const double C2 = christoffel_bound(g);
    const double lip = testing::velocity_lipschitz(traj);
    o.detail << " " << c.spec.kind << " " << lip << "/" << C2 * C1 * C1 << ";";
    o.require(lip <= 1.1 * C2 * C1 * C1, c.spec.kind + " velocity Lipschitz");
  }
  const auto rosen = make_metric({"rosen_wave", 4, {}, {}});
  const auto traj = integrate_geodesic(rosen, zoo_cases()[2].init, 1.0, 1e-3);
  const double alpha = regularity_of_maximizer(traj, rosen).alpha_hat;
  o.detail << " Rosen alpha_hat " << alpha;
  o.require(alpha >= 0.9, "Rosen alpha_hat");
}

void calibration(Outcome& o) {
  for (double beta : {0.25, 0.5, 0.75, 1.0}) {
    const double a = estimate_holder_exponent(holder_angle_curve(beta, 10000)).alpha_hat;
    o.detail << " beta " << beta << " -> " << a << ";";
    o.require(std::abs(a - beta) <= 0.05, "beta " + std::to_string(beta));
  }
}

void maximality(Outcome& o) {
  for (std::size_t k : {0u, 1u}) {
    const auto& c = zoo_cases()[k];
    const auto g = make_metric(c.spec);
    const auto shot = shoot_geodesic(g, c.x, c.y, c.y - c.x);
    const double ls = smooth_lorentzian_length(shot.trajectory.as_curve(), g);
    const auto res = maximize_causal_curve(g, c.x, c.y, 64);
    const auto probe = local_maximality_probe(shot.trajectory.as_curve(), g, 1000, 1e-3, 17);
    o.detail << " " << c.spec.kind << ": |L_max - L_shoot| " << std::abs(res.length - ls) << ", improving "
             << probe.improving << "/" << probe.trials << ";";
    o.require(std::abs(res.length - ls) <= 2e-4, c.spec.kind + " length match");
    o.require(probe.trials == 1000 && probe.improving == 0, c.spec.kind + " probe");
  }
}

void velocity_bounds(Outcome& o) {
  for (const auto& c : zoo_cases()) {
    const auto g = make_metric(c.spec);
    const double C = christoffel_bound(g);
    const auto traj = integrate_geodesic(g, c.init, 0.3, 1e-3);
    const auto res = maximize_causal_curve(g, c.x, c.y, 64);
    for (const auto& [label, curve] : {std::pair<std::string, SampledCurve>{"integrated", traj.as_curve()},
                                       std::pair<std::string, SampledCurve>{"maximized", res.curve}}) {
      const auto up = velocity_upper_bound_check(curve, C);
      const auto lo = velocity_lower_bound_check(curve, g, C);
      o.require(up.holds, c.spec.kind + " " + label + " upper");
      o.require(lo.holds && !lo.lightlike, c.spec.kind + " " + label + " lower");
      o.detail << " " << c.spec.kind << "/" << label << " slack " << up.min_slack << " margin " << lo.margin << ";";
    }
  }
  const auto mink = make_metric({"minkowski", 2, {}, {}});
  for (const auto& y : {vec({1, 1}), vec({0.8, -0.8})}) {
    const auto res = maximize_causal_curve(mink, vec({0, 0}), y, 32);
    const auto lo = velocity_lower_bound_check(res.curve, mink);
    o.require(lo.lightlike && lo.max_speed <= 1e-8 && lo.holds, "lightlike maximizer speeds");
    o.detail << " lightlike max speed " << lo.max_speed << ";";
  }
}

void reparametrization(Outcome& o) {
  for (std::size_t k : {1u, 2u, 3u}) {
    const auto& c = zoo_cases()[k];
    const auto g = make_metric(c.spec);
    const auto traj = integrate_geodesic(g, c.init, 0.3, 1e-3);
    const auto rep = reparametrize_constant_speed(traj.as_curve(), g);
    double spread = 0.0;
    for (double s : lorentzian_speeds(rep.curve, g)) spread = std::max(spread, std::abs(s - rep.ell));
    const auto again = reparametrize_constant_speed(rep.curve, g);
    double drift = 0.0;
    for (std::size_t i = 0; i < rep.curve.size(); ++i) {
      drift = std::max(drift, (rep.curve.points()[i] - again.curve.points()[i]).norm());
    }
    o.detail << " " << c.spec.kind << " speed spread " << spread << ", idempotence " << drift << ";";
    o.require(spread <= 1e-8, c.spec.kind + " constant speed");
    o.require(drift <= 1e-9, c.spec.kind + " idempotence");
  }
}

void limit_experiment(Outcome& o) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  const auto exp = lightlike_limit_experiment(g, vec({0, 0}), vec({1, 1}));
  o.detail << " check points " << exp.report.check_points << ", max margin " << exp.report.max_hull_margin
           << ", converged " << exp.report.converged;
  o.require(exp.report.converged, "convergence");
  o.require(exp.report.check_points == 100, "check points");
  o.require(exp.report.max_hull_margin <= 1e-6, "hull margins");
}

void cone_widening(Outcome& o) {
  const auto g = make_metric({"holder_kink", 3, {}, {}});
  const auto cone = cone_inclusion_check(g, g.lipschitz_L(), 0.05, 100000, 23);
  o.detail << " cone samples " << cone.samples << ", violations " << cone.violations() << ";";
  o.require(cone.samples == 100000 && cone.violations() == 0, "cone inclusion");

  Rng rng(substream_seed(10, "acceptance-curves"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int failures = 0;
  int curves = 0;
  double worst = std::numeric_limits<double>::infinity();
  while (curves < 1000) {
    const Vec start = uniform_in_ball(rng, 3, 0.5);
    const double delta = 0.01 + 0.09 * unit(rng);
    // Two Euclidean-unit future timelike directions of the metric at the start.
    Vec d1 = sample_future_causal(rng, 3).normalized();
    Vec d2 = sample_future_causal(rng, 3).normalized();
    d1[0] += 0.3;
    d2[0] += 0.3;
    d1.normalize();
    d2.normalize();
    const double split = delta * (0.2 + 0.6 * unit(rng));
    std::vector<double> t;
    std::vector<Vec> p;
    for (int i = 0; i <= 64; ++i) {
      const double s = delta * i / 64.0;
      t.push_back(s);
      p.push_back(s <= split ? Vec(start + s * d1) : Vec(start + split * d1 + (s - split) * d2));
    }
    const SampledCurve curve(t, p);
    if (!check_causal(g, curve).causal) continue;
    ++curves;
    const auto frozen = constant_field(g.metric(start), g.domain_radius());
    const auto rep = length_comparison_check(curve, g, frozen, 2000, static_cast<std::uint64_t>(curves));
    if (!rep.holds) ++failures;
    worst = std::min(worst, rep.bound - rep.difference);
  }
  o.detail << " length comparison on " << curves << " curves, failures " << failures << ", min slack " << worst;
  o.require(failures == 0, "length comparison");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "quantitative triangle inequality, n = 2..5", 60.0, triangle_sweeps},
      {2, "chord gap on random timelike Minkowski polygons", 30.0, chord_gaps},
      {3, "Filippov integrator correctness", 10.0, integrator},
      {4, "C^{1,1} regularity of zoo geodesics", 0.0, c11_regularity},
      {5, "Hoelder estimator calibration", 20.0, calibration},
      {6, "maximizer and shooting agree, probe finds no improvement", 120.0, maximality},
      {7, "velocity upper and lower bounds", 0.0, velocity_bounds},
      {8, "constant-speed reparametrization", 0.0, reparametrization},
      {9, "limit of timelike geodesics toward a lightlike segment", 0.0, limit_experiment},
      {10, "cone widening and length comparison", 0.0, cone_widening},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0.0 && seconds > c.budget_seconds) {
      o.pass = false;
      o.detail << " [over budget " << c.budget_seconds << " s]";
    }
    if (!o.pass) ++failed;
    std::printf("%s C%d %s (%.2f s):%s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, seconds, o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
