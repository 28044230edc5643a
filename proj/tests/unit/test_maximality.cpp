#include <gtest/gtest.h>

#include "oracles.hpp"

namespace lipcausal {
namespace {

using testing::vec;

SampledCurve polygon(const std::vector<Vec>& pts) {
  std::vector<double> t;
  for (std::size_t i = 0; i < pts.size(); ++i) t.push_back(static_cast<double>(i) / (pts.size() - 1));
  return SampledCurve(t, pts);
}

SampledCurve sampled_line(const Vec& a, const Vec& b, int segments) {
  std::vector<Vec> pts;
  for (int i = 0; i <= segments; ++i) pts.push_back(a + (static_cast<double>(i) / segments) * (b - a));
  return polygon(pts);
}

double distance_to_line(const Vec& p, const Vec& a, const Vec& b) {
  const Vec d = (b - a).normalized();
  const Vec r = p - a;
  return (r - r.dot(d) * d).norm();
}

TEST(LorentzianLength, StraightTimelikeSegment) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  EXPECT_NEAR(lorentzian_length(polygon({vec({0, 0}), vec({1, 0.5})}), g), std::sqrt(0.75), 1e-15);
  EXPECT_NEAR(lorentzian_length(sampled_line(vec({0, 0}), vec({1, 0.5}), 10), g), std::sqrt(0.75), 1e-14);
}

TEST(LorentzianLength, NullLineIsZero) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  EXPECT_EQ(lorentzian_length(sampled_line(vec({0, 0}), vec({1, 1}), 4), g), 0.0);
}

TEST(LorentzianLength, TwoSegmentPath) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  const double l = lorentzian_length(polygon({vec({0, 0}), vec({0.5, 0.4}), vec({1, 0})}), g);
  EXPECT_NEAR(l, 0.6, 1e-15);
  EXPECT_LT(l, std::sqrt(0.75));
}

TEST(LorentzianLength, SpacelikeSegmentIsRejected) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  try {
    lorentzian_length(polygon({vec({0, 0}), vec({0.5, 0.1}), vec({0.6, 0.9})}), g);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotCausal);
  }
}

TEST(LorentzianLength, ReverseTriangleForChords) {
  const auto g = make_metric({"minkowski", 3, {}, {}});
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec a = vec({-0.9, 0.0, 0.0});
    const Vec b = a + 0.8 * sample_future_causal(rng, 3);
    const Vec c = b + 0.8 * sample_future_causal(rng, 3);
    const double bent = lorentzian_length(polygon({a, b, c}), g);
    const double chord = lorentzian_length(polygon({a, c}), g);
    EXPECT_LE(bent, chord + 1e-12);
  }
}

TEST(Maximize, MinkowskiStraightLine) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  const Vec x = vec({0, 0});
  const Vec y = vec({1, 0.5});
  const auto res = maximize_causal_curve(g, x, y, 16);
  EXPECT_NEAR(res.length, std::sqrt(0.75), 1e-6);
  EXPECT_EQ(res.regime, LengthRegime::Length);
  for (const auto& p : res.curve.points()) EXPECT_LE(distance_to_line(p, x, y), 1e-6);
}

TEST(Maximize, LightlikeEndpoints) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  const Vec x = vec({0, 0});
  const Vec y = vec({1, 1});
  const auto res = maximize_causal_curve(g, x, y, 16);
  EXPECT_LE(res.length, 1e-6);
  EXPECT_EQ(res.regime, LengthRegime::Surrogate);
  for (const auto& p : res.curve.points()) EXPECT_LE(distance_to_line(p, x, y), 1e-4);
}

TEST(Maximize, NotCausallyRelated) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  try {
    maximize_causal_curve(g, vec({0, 0}), vec({0.1, 0.5}), 8);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotCausallyRelated);
  }
}

TEST(Maximize, ConformalMatchesShootingWithSecondOrderConvergence) {
  const auto g = make_metric({"conformal", 3, {{"epsilon", 0.3}}, {}});
  const Vec x = vec({-0.6, 0.2, 0.1});
  const Vec y = vec({0.6, -0.1, 0.3});
  const auto shot = shoot_geodesic(g, x, y, y - x);
  const double reference = smooth_lorentzian_length(shot.trajectory.as_curve(), g);
  std::vector<double> logm;
  std::vector<double> logerr;
  double previous = 0.0;
  for (int m : {8, 16, 32, 64}) {
    const auto res = maximize_causal_curve(g, x, y, m);
    EXPECT_TRUE(res.converged) << m;
    if (m > 8) EXPECT_GE(res.length, previous - 1e-9) << m;
    previous = res.length;
    logm.push_back(std::log(m));
    logerr.push_back(std::log(std::abs(res.length - reference)));
    if (m == 64) {
      EXPECT_NEAR(res.length, reference, 2e-4);
      EXPECT_GE(regularity_of_maximizer(res, g).alpha_hat, 0.9);
    }
  }
  const double slope = (logerr.back() - logerr.front()) / (logm.back() - logm.front());
  EXPECT_LE(slope, -1.8);
}

TEST(Maximize, MinkowskiIsExactAtEveryResolution) {
  const auto g = make_metric({"minkowski", 3, {}, {}});
  const Vec x = vec({-0.6, 0.2, 0.1});
  const Vec y = vec({0.6, -0.1, 0.3});
  const double exact = minkowski_norm(y - x);
  for (int m : {8, 16, 32, 64}) {
    EXPECT_NEAR(maximize_causal_curve(g, x, y, m).length, exact, 1e-9) << m;
  }
}

TEST(Maximize, RosenMatchesShootingAcrossImpulse) {
  const auto g = make_metric({"rosen_wave", 4, {}, {}});
  const Vec x = vec({-0.2, 0.0, -0.05, 0.05});
  const Vec y = vec({0.2, 0.05, 0.05, -0.03});
  const auto shot = shoot_geodesic(g, x, y, y - x);
  const auto res = maximize_causal_curve(g, x, y, 64);
  EXPECT_NEAR(res.length, smooth_lorentzian_length(shot.trajectory.as_curve(), g), 2e-4);
}

TEST(Maximize, MultistartIsThreadIndependent) {
  const auto g = make_metric({"conformal", 2, {{"epsilon", 0.2}}, {}});
  MaximizeOptions a;
  a.multistart = 3;
  a.seed = 9;
  a.threads = 1;
  MaximizeOptions b = a;
  b.threads = 3;
  const auto ra = maximize_causal_curve(g, vec({-0.8, 0.0}), vec({0.8, 0.3}), 16, a);
  const auto rb = maximize_causal_curve(g, vec({-0.8, 0.0}), vec({0.8, 0.3}), 16, b);
  EXPECT_EQ(ra.length, rb.length);
  EXPECT_EQ(ra.start_index, rb.start_index);
}

TEST(Shoot, MinkowskiChordIsExact) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  const Vec x = vec({-0.5, 0.1});
  const Vec y = vec({0.5, 0.4});
  const auto exact = shoot_geodesic(g, x, y, y - x);
  EXPECT_EQ(exact.iterations, 1);
  EXPECT_EQ(exact.v0, y - x);
  // From another guess the endpoint map is affine, so one Newton step lands.
  const auto res = shoot_geodesic(g, x, y, vec({1, 0}));
  EXPECT_EQ(res.iterations, 2);
  EXPECT_LE((res.v0 - (y - x)).norm(), 1e-8);
}

TEST(Shoot, ConformalEndpointMatches) {
  const auto g = make_metric({"conformal", 3, {{"epsilon", 0.1}}, {}});
  const Vec x = vec({-0.6, 0.2, 0.1});
  const Vec y = vec({0.6, -0.1, 0.3});
  const auto res = shoot_geodesic(g, x, y, y - x);
  EXPECT_LE((res.trajectory.states.back().x - y).norm(), 1e-8);
  EXPECT_LE(res.residuals.back(), 1e-8);
}

TEST(Shoot, RosenRecoversClosedFormVelocity) {
  const auto g = make_metric({"rosen_wave", 4, {}, {}});
  const Vec x = vec({-0.2, 0, -0.05, 0.05});
  const Vec v0 = vec({0.4, 0.05, 0.1, -0.08});
  const Vec y = testing::rosen_closed_form(x, v0, 1.0).x;
  const auto res = shoot_geodesic(g, x, y, y - x);
  EXPECT_LE((res.v0 - v0).norm(), 1e-6);
}

TEST(Shoot, IterationCapReportsHistory) {
  const auto g = make_metric({"conformal", 3, {{"epsilon", 0.3}}, {}});
  ShootOptions opt;
  opt.max_iterations = 1;
  try {
    shoot_geodesic(g, vec({-0.6, 0.2, 0.1}), vec({0.6, -0.1, 0.3}), vec({1, 0, 0}), opt);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoConvergence);
    EXPECT_NE(std::string(e.what()).find("residual"), std::string::npos);
  }
}

TEST(Probe, StraightLineHasNoImprovement) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  const auto rep = local_maximality_probe(sampled_line(vec({0, 0}), vec({1, 0.5}), 64), g, 1000, 1e-2, 1);
  EXPECT_EQ(rep.improving, 0);
  EXPECT_EQ(rep.trials, 1000);
}

TEST(Probe, BentPathImproves) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  std::vector<Vec> pts;
  for (int i = 0; i <= 64; ++i) {
    const double s = i / 64.0;
    pts.push_back(vec({s, s <= 0.5 ? 0.8 * s : 0.8 * (1.0 - s)}));
  }
  const auto rep = local_maximality_probe(polygon(pts), g, 1000, 1e-2, 2);
  EXPECT_GT(rep.improving, 0);
  EXPECT_GT(rep.max_increase, 0.0);
}

TEST(Probe, RosenShotGeodesic) {
  const auto g = make_metric({"rosen_wave", 4, {}, {}});
  const Vec x = vec({-0.2, 0.0, -0.05, 0.05});
  const Vec y = vec({0.2, 0.05, 0.05, -0.03});
  const auto shot = shoot_geodesic(g, x, y, y - x);
  const auto rep = local_maximality_probe(shot.trajectory.as_curve(), g, 1000, 1e-3, 3);
  EXPECT_EQ(rep.improving, 0);
}

TEST(LimitExperiment, LightlikeMinkowskiSegment) {
  const auto g = make_metric({"minkowski", 2, {}, {}});
  const auto exp = lightlike_limit_experiment(g, vec({0, 0}), vec({1, 1}));
  EXPECT_TRUE(exp.report.converged);
  EXPECT_EQ(exp.report.check_points, 100);
  EXPECT_LE(exp.report.max_hull_margin, 1e-6);
  for (std::size_t i = 1; i < exp.lengths.size(); ++i) EXPECT_LT(exp.lengths[i], exp.lengths[i - 1]);
  for (const auto& p : exp.limit.points()) EXPECT_LE(distance_to_line(p, vec({0, 0}), vec({1, 1})), 1e-12);
}

}  // namespace
}  // namespace lipcausal
