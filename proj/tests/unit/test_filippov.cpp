#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"

namespace lipcausal {
namespace {

using testing::vec;

double energy(const MetricField& g, const FilippovState& s) { return s.v.dot(g.metric(s.x) * s.v); }

double max_energy_drift(const MetricField& g, const GeodesicTrajectory& traj) {
  const double e0 = energy(g, traj.states.front());
  const double scale = std::abs(e0) + traj.states.front().v.squaredNorm();
  double drift = 0.0;
  for (const auto& s : traj.states) drift = std::max(drift, std::abs(energy(g, s) - e0) / scale);
  return drift;
}

// Flat field split by the planes x_1 = 0 and x_2 = 0 into four identical branches.
MetricField two_plane_field() {
  auto plane = [](Eigen::Index k, std::string name) {
    return Interface{std::move(name), [k](const Vec& x) { return x[k]; },
                     [k](const Vec& x) {
                       Vec gr = Vec::Zero(x.size());
                       gr[k] = 1.0;
                       return gr;
                     },
                     [](const Vec& x) { return Mat(Mat::Zero(x.size(), x.size())); }};
  };
  auto flat = [](std::string name) {
    return MetricBranch{std::move(name), [](const Vec&) { return BilinearForm::minkowski(3).matrix(); },
                        [](const Vec&) { return std::vector<Mat>(3, Mat::Zero(3, 3)); }};
  };
  MetricField::Options opt;
  opt.name = "two_planes";
  opt.lipschitz_L = 0.0;
  return MetricField(3, {flat("--"), flat("+-"), flat("-+"), flat("++")}, {plane(1, "x1=0"), plane(2, "x2=0")},
                     [](std::span<const int> s) {
                       return static_cast<std::size_t>((s[0] > 0 ? 1 : 0) + (s[1] > 0 ? 2 : 0));
                     },
                     opt);
}

// Minkowski on both sides of x_1 = 0; the plus branch reports non-finite derivatives.
MetricField broken_plus_field() {
  Interface plane{"x1=0", [](const Vec& x) { return x[1]; }, [](const Vec&) { return vec({0, 1, 0}); },
                  [](const Vec&) { return Mat(Mat::Zero(3, 3)); }};
  MetricBranch good{"x1<0", [](const Vec&) { return BilinearForm::minkowski(3).matrix(); },
                    [](const Vec&) { return std::vector<Mat>(3, Mat::Zero(3, 3)); }};
  MetricBranch bad{"x1>0", [](const Vec&) { return BilinearForm::minkowski(3).matrix(); },
                   [](const Vec&) {
                     return std::vector<Mat>(3, Mat::Constant(3, 3, std::numeric_limits<double>::quiet_NaN()));
                   }};
  MetricField::Options opt;
  opt.lipschitz_L = 0.0;
  return MetricField(3, {good, bad}, {plane}, {}, opt);
}

TEST(Integrate, MinkowskiStraightLine) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  const auto traj = integrate_geodesic(g, {vec({0, 0}), vec({1, 0.5}), 0}, 1.0, 1.0 / 64.0);
  ASSERT_FALSE(traj.truncated);
  EXPECT_DOUBLE_EQ(traj.tau_end(), 1.0);
  for (const auto& s : traj.states) {
    EXPECT_LE((s.x - s.tau * vec({1, 0.5})).norm(), 1e-10);
    EXPECT_LE((s.v - vec({1, 0.5})).norm(), 1e-10);
  }
  EXPECT_EQ(traj.hull_violations, 0);
}

TEST(Integrate, RosenMatchesClosedForm) {
  const auto g = make_metric({"rosen_wave", 4, {}, {}});
  const Vec x0 = vec({-0.2, 0, -0.05, 0.05});
  const Vec v0 = vec({0.4, 0.05, 0.1, -0.08});
  const auto traj = integrate_geodesic(g, {x0, v0, 0}, 1.0, 1e-2);
  ASSERT_FALSE(traj.truncated);
  ASSERT_EQ(traj.events.size(), 1u);
  EXPECT_EQ(traj.events[0].mode, EventMode::Crossing);
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(traj.events[0].tau, -((x0[0] + x0[1]) * s) / ((v0[0] + v0[1]) * s), 1e-12);
  for (double tau : {0.25, 0.5, 0.75, 1.0}) {
    std::size_t i = 0;
    while (i + 1 < traj.states.size() && traj.states[i].tau < tau - 1e-14) ++i;
    ASSERT_NEAR(traj.states[i].tau, tau, 1e-14);
    const auto o = testing::rosen_closed_form(x0, v0, tau);
    EXPECT_LE((traj.states[i].x - o.x).norm(), 1e-6) << tau;
    EXPECT_LE((traj.states[i].v - o.v).norm(), 1e-6) << tau;
  }
  EXPECT_EQ(traj.hull_violations, 0);
  EXPECT_GT(traj.hull_checks, 0);
}

TEST(Integrate, RosenNullCoordinateIsAffine) {
  const auto g = make_metric({"rosen_wave", 4, {}, {}});
  const Vec x0 = vec({-0.2, 0, -0.05, 0.05});
  const Vec v0 = vec({0.4, 0.05, 0.1, -0.08});
  const auto traj = integrate_geodesic(g, {x0, v0, 0}, 1.0, 1e-2);
  const double up = rosen_u(v0);
  for (const auto& st : traj.states) EXPECT_NEAR(rosen_u(st.x), rosen_u(x0) + up * st.tau, 1e-12);
}

TEST(Integrate, ConformalFourthOrderSelfConvergence) {
  const auto g = make_metric({"conformal", 3, {{"epsilon", 0.3}}, {}});
  const FilippovState init{vec({-0.5, 0.2, 0.1}), vec({1.0, 0.3, -0.2}), 0};
  const double e1 = testing::halving_error(g, init, 1.0, 0.1);
  const double e2 = testing::halving_error(g, init, 1.0, 0.05);
  const double e3 = testing::halving_error(g, init, 1.0, 0.025);
  EXPECT_GE(std::log2(e1 / e2), 3.8);
  EXPECT_GE(std::log2(e2 / e3), 3.8);
}

TEST(Integrate, RosenSelfConvergenceThroughImpulse) {
  const auto g = make_metric({"rosen_wave", 4, {}, {}});
  const FilippovState init{vec({-0.2, 0, -0.05, 0.05}), vec({0.4, 0.05, 0.1, -0.08}), 0};
  const double e1 = testing::halving_error(g, init, 1.0, 0.2);
  const double e2 = testing::halving_error(g, init, 1.0, 0.1);
  const double e3 = testing::halving_error(g, init, 1.0, 0.05);
  EXPECT_GE(std::log2(e1 / e2), 2.0);
  EXPECT_GE(std::log2(e2 / e3), 2.0);
}

TEST(Integrate, EnergyConservedOnZooFields) {
  struct Case {
    MetricSpec spec;
    FilippovState init;
  };
  const std::vector<Case> cases{
      {{"conformal", 3, {}, {}}, {vec({-0.5, 0.2, 0.1}), vec({1.0, 0.3, -0.2}), 0}},
      {{"rosen_wave", 4, {}, {}}, {vec({-0.2, 0, -0.05, 0.05}), vec({0.4, 0.05, 0.1, -0.08}), 0}},
      {{"holder_kink", 3, {}, {}}, {vec({-0.3, -0.2, 0.1}), vec({1.0, 0.5, 0.1}), 0}},
      {{"thin_shell", 3, {}, {}}, {vec({-0.1, -0.05, 0.0}), vec({1.0, 0.4, 0.1}), 0}},
  };
  for (const auto& c : cases) {
    const auto g = make_metric(c.spec);
    const auto traj = integrate_geodesic(g, c.init, 0.3, 1e-3);
    EXPECT_LE(max_energy_drift(g, traj), 1e-8) << c.spec.kind;
    EXPECT_EQ(traj.hull_violations, 0) << c.spec.kind;
  }
}

TEST(Integrate, VelocityLipschitzWithinChristoffelBound) {
  const std::vector<std::pair<MetricSpec, FilippovState>> cases{
      {{"conformal", 3, {}, {}}, {vec({-0.5, 0.2, 0.1}), vec({1.0, 0.3, -0.2}), 0}},
      {{"rosen_wave", 4, {}, {}}, {vec({-0.2, 0, -0.05, 0.05}), vec({0.4, 0.05, 0.1, -0.08}), 0}},
      {{"holder_kink", 3, {}, {}}, {vec({-0.3, -0.2, 0.1}), vec({1.0, 0.5, 0.1}), 0}},
      {{"thin_shell", 3, {}, {}}, {vec({-0.1, -0.05, 0.0}), vec({1.0, 0.4, 0.1}), 0}},
  };
  for (const auto& [spec, init] : cases) {
    const auto g = make_metric(spec);
    const auto traj = integrate_geodesic(g, init, 0.3, 1e-3);
    const double C1 = testing::max_speed(traj);
    EXPECT_LE(testing::velocity_lipschitz(traj), 1.1 * christoffel_bound(g) * C1 * C1) << spec.kind;
  }
}

TEST(Integrate, ChartExitTruncates) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  const auto traj = integrate_geodesic(g, {vec({0, 0}), vec({1, 0}), 0}, 5.0, 0.01);
  EXPECT_TRUE(traj.truncated);
  EXPECT_LT(traj.tau_end(), 5.0);
  EXPECT_LE(traj.states.back().x.norm(), g.domain_radius() + 1e-12);
}

TEST(Integrate, SlidingStaysOnShell) {
  const auto g = make_metric({"thin_shell", 3, {}, {}});
  const auto traj = integrate_geodesic(g, {vec({0, 0, 0}), vec({1, 0, 0.2}), 0}, 0.3, 1e-3);
  ASSERT_FALSE(traj.events.empty());
  EXPECT_EQ(traj.events.front().mode, EventMode::Sliding);
  EXPECT_NEAR(traj.events.front().theta, 0.5, 1e-12);
  for (const auto& s : traj.states) EXPECT_LE(std::abs(s.x[1]), 1e-12);
  EXPECT_EQ(traj.hull_violations, 0);
}

TEST(Integrate, SimultaneousInterfacesHalt) {
  const auto g = two_plane_field();
  try {
    integrate_geodesic(g, {vec({0, -0.1, -0.1}), vec({1.5, 1, 1}), 0}, 0.3, 0.01);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InterfaceIntersection);
  }
}

TEST(Integrate, RejectsBadArguments) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  EXPECT_THROW(integrate_geodesic(g, {vec({0, 0}), vec({1, 0}), 0}, 1.0, 0.0), Error);
  EXPECT_THROW(integrate_geodesic(g, {vec({3, 0}), vec({1, 0}), 0}, 1.0, 0.1), Error);
  EXPECT_THROW(integrate_geodesic(g, {vec({0, 0, 0}), vec({1, 0}), 0}, 1.0, 0.1), Error);
}

TEST(FilippovSelect, RosenCrossingIncreasesU) {
  const auto g = make_metric({"rosen_wave", 4, {}, {}});
  const Vec v = vec({0.4, 0.05, 0.1, -0.08});
  const auto sel = filippov_select(g, {vec({0.05, -0.05, 0.01, 0.0}), v, 0}, 0, true);
  EXPECT_EQ(sel.kind, FilippovSelection::Kind::Crossing);
  EXPECT_EQ(g.branch(sel.branch).name, "u>0");
  ASSERT_TRUE(sel.hull_margin.has_value());
  EXPECT_LE(*sel.hull_margin, default_hull_tol(v));
}

TEST(FilippovSelect, SymmetricShellSlidesAtHalf) {
  const auto g = make_metric({"thin_shell", 3, {}, {}});
  const Vec v = vec({1, 0, 0.2});
  const auto sel = filippov_select(g, {Vec::Zero(3), v, 0}, 0, true);
  EXPECT_EQ(sel.kind, FilippovSelection::Kind::Sliding);
  EXPECT_DOUBLE_EQ(sel.theta, 0.5);
  EXPECT_NEAR(sel.a_minus[1], 1.0, 1e-14);
  EXPECT_NEAR(sel.a_plus[1], -1.0, 1e-14);
  EXPECT_NEAR(sel.acceleration[1], 0.0, 1e-14);
  ASSERT_TRUE(sel.hull_margin.has_value());
  EXPECT_LE(*sel.hull_margin, default_hull_tol(v));
}

TEST(FilippovSelect, FictitiousInterfaceCrossesWithZeroAcceleration) {
  const auto g = make_metric({"thin_shell", 3, {{"kappa_minus", 0.0}, {"kappa_plus", 0.0}}, {}});
  for (const Vec& v : {vec({1, 0.3, 0}), vec({1, 0, 0.4})}) {
    const auto sel = filippov_select(g, {Vec::Zero(3), v, 0}, 0);
    EXPECT_EQ(sel.kind, FilippovSelection::Kind::Crossing);
    EXPECT_EQ(sel.acceleration.norm(), 0.0);
  }
}

TEST(FilippovSelect, RepellingShellIsAmbiguous) {
  const auto g = make_metric({"thin_shell", 3, {{"kappa_minus", 2.0}, {"kappa_plus", -2.0}}, {}});
  try {
    filippov_select(g, {Vec::Zero(3), vec({1, 0, 0.2}), 0}, 0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SlidingAmbiguity);
  }
}

TEST(FilippovSelect, NonFiniteDataIsInconsistent) {
  const auto g = broken_plus_field();
  try {
    filippov_select(g, {Vec::Zero(3), vec({1, 0, 0.2}), 0}, 0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InconsistentSliding);
  }
}

TEST(FilippovSelect, RequiresStateOnInterface) {
  const auto g = make_metric({"thin_shell", 3, {}, {}});
  EXPECT_THROW(filippov_select(g, {vec({0, 1e-6, 0}), vec({1, 0, 0}), 0}, 0), Error);
}

TEST(Reparametrize, MinkowskiLineIsAffine) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  std::vector<double> t;
  std::vector<Vec> p;
  for (int i = 0; i <= 16; ++i) {
    const double s = i / 16.0;
    t.push_back(s);
    p.push_back(s * vec({1, 0.5}));
  }
  const auto rep = reparametrize_constant_speed(SampledCurve(t, p), g);
  EXPECT_NEAR(rep.ell, std::sqrt(0.75), 1e-14);
  for (std::size_t i = 0; i < rep.f.size(); ++i) {
    EXPECT_NEAR(rep.f[i], rep.curve.params()[i], 1e-14);
  }
  for (double s : lorentzian_speeds(rep.curve, g)) EXPECT_NEAR(s, std::sqrt(0.75), 1e-14);
}

TEST(Reparametrize, ParabolaSpeedEqualsLength) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  std::vector<double> t;
  std::vector<Vec> p;
  std::vector<Vec> v;
  for (int i = 0; i <= 256; ++i) {
    const double s = i / 256.0;
    t.push_back(s);
    p.push_back(vec({s, s * s / 4.0}));
    v.push_back(vec({1.0, s / 2.0}));
  }
  // Length of s -> (s, s^2/4) on [0,1]: integral of sqrt(1 - s^2/4) = pi/6 + sqrt(3)/4.
  const double length = M_PI / 6.0 + std::sqrt(3.0) / 4.0;
  const auto rep = reparametrize_constant_speed(SampledCurve(t, p, v), g, std::nullopt, std::make_pair(0.0, 1.0));
  EXPECT_NEAR(rep.length, length, 1e-10);
  EXPECT_NEAR(rep.ell, length, 1e-10);
  for (double s : lorentzian_speeds(rep.curve, g)) EXPECT_NEAR(s, length, 1e-8);
  EXPECT_LE(rep.endpoint_residual, 1e-10);
}

TEST(Reparametrize, RosenGeodesicKeepsConservedSpeed) {
  const auto g = make_metric({"rosen_wave", 4, {}, {}});
  const FilippovState init{vec({-0.2, 0, -0.05, 0.05}), vec({0.4, 0.05, 0.1, -0.08}), 0};
  const auto traj = integrate_geodesic(g, init, 1.0, 1e-3);
  const double speed = std::sqrt(init.v.dot(g.metric(init.x) * init.v));
  const auto rep = reparametrize_constant_speed(traj.as_curve(), g);
  EXPECT_NEAR(rep.ell, speed, 1e-8);
  for (double s : lorentzian_speeds(rep.curve, g)) EXPECT_NEAR(s, rep.ell, 1e-8);
  const auto again = reparametrize_constant_speed(rep.curve, g);
  double d = 0.0;
  for (std::size_t i = 0; i < rep.curve.size(); ++i) {
    d = std::max(d, (rep.curve.points()[i] - again.curve.points()[i]).norm());
  }
  EXPECT_LE(d, 1e-9);
}

TEST(Reparametrize, NullCurveIsRejected) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  const SampledCurve c({0.0, 0.5, 1.0}, {vec({0, 0}), vec({0.5, 0.5}), vec({1, 1})});
  try {
    reparametrize_constant_speed(c, g);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotUniformlyTimelike);
  }
}

TEST(VelocityUpperBound, MinkowskiLineSlack) {
  const SampledCurve c({0.0, 0.5, 1.0}, {vec({0, 0}), vec({0.5, 0.25}), vec({1, 0.5})});
  const double r = std::sqrt(1.25);
  for (double C : {0.5, 1.0, 3.0}) {
    const auto rep = velocity_upper_bound_check(c, C);
    EXPECT_NEAR(rep.euclidean_length, r, 1e-14);
    EXPECT_NEAR(rep.min_slack, std::expm1(C * r) / C - r, 1e-12);
    EXPECT_TRUE(rep.holds);
  }
}

TEST(VelocityUpperBound, ConstantCurve) {
  const SampledCurve c({0.0, 1.0}, {vec({0.1, 0.2}), vec({0.1, 0.2})});
  const auto rep = velocity_upper_bound_check(c, 2.0);
  EXPECT_EQ(rep.max_speed, 0.0);
  EXPECT_TRUE(rep.holds);
}

TEST(VelocityUpperBound, RosenGeodesic) {
  const auto g = make_metric({"rosen_wave", 4, {}, {}});
  const auto traj = integrate_geodesic(g, {vec({-0.2, 0, -0.05, 0.05}), vec({0.4, 0.05, 0.1, -0.08}), 0}, 1.0, 1e-3);
  const auto rep = velocity_upper_bound_check(traj.as_curve(), christoffel_bound(g));
  EXPECT_TRUE(rep.holds);
  EXPECT_GE(rep.min_slack, 0.0);
}

SampledCurve line(const Vec& a, const Vec& b, int samples) {
  std::vector<double> t;
  std::vector<Vec> p;
  std::vector<Vec> v;
  for (int i = 0; i < samples; ++i) {
    const double s = static_cast<double>(i) / (samples - 1);
    t.push_back(s);
    p.push_back(a + s * (b - a));
    v.push_back(b - a);
  }
  return SampledCurve(t, p, v);
}

TEST(PointwiseLimit, ConstantSequence) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  const auto c = line(vec({0, 0}), vec({1, 0.5}), 129);
  const auto rep = pointwise_limit_is_geodesic({c, c, c}, c, g);
  for (double d : rep.sup_distance) EXPECT_EQ(d, 0.0);
  EXPECT_EQ(rep.max_hull_margin, 0.0);
  EXPECT_TRUE(rep.geodesic);
}

TEST(PointwiseLimit, ConvergingMinkowskiLines) {
  const auto g = make_metric({"minkowski", 3, {}, {}});
  const Vec x = vec({0, 0, 0});
  const Vec y = vec({1, 0.3, -0.2});
  std::vector<SampledCurve> seq;
  for (int n : {1, 2, 4, 8, 16, 32}) seq.push_back(line(x, y + vec({0, 0.2, 0.1}) / n, 257));
  const auto rep = pointwise_limit_is_geodesic(seq, line(x, y, 257), g);
  EXPECT_TRUE(rep.converged);
  EXPECT_EQ(rep.check_points, 100);
  EXPECT_LE(rep.max_hull_margin, 1e-8);
  EXPECT_TRUE(rep.geodesic);
}

TEST(PointwiseLimit, DivergentSequenceIsFlagged) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  const Vec x = vec({0, 0});
  std::vector<SampledCurve> seq;
  for (int n = 0; n < 5; ++n) seq.push_back(line(x, vec({1, (n % 2 == 0) ? 0.4 : -0.4}), 65));
  const auto rep = pointwise_limit_is_geodesic(seq, line(x, vec({1, 0}), 65), g);
  EXPECT_FALSE(rep.converged);
}

TEST(TrajectoryCsv, RoundTripsThroughCurveReader) {
  const auto g = make_metric({"rosen_wave", 4, {}, {}});
  const auto traj = integrate_geodesic(g, {vec({-0.2, 0, -0.05, 0.05}), vec({0.4, 0.05, 0.1, -0.08}), 0}, 1.0, 0.05);
  std::stringstream ss;
  write_trajectory_csv(ss, traj);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "tau,x_0,x_1,x_2,x_3,v_0,v_1,v_2,v_3,branch_id");
  ss.seekg(0);
  const auto c = read_curve_csv(ss);
  ASSERT_EQ(c.size(), traj.states.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(c.params()[i], traj.states[i].tau);
    EXPECT_EQ(c.points()[i], traj.states[i].x);
  }
}

}  // namespace
}  // namespace lipcausal
