#include "lipcausal_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "lipcausal/lipcausal.hpp"

namespace lipcausal::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void bad_field(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

const json& require_key(const json& obj, const std::string& prefix, const std::string& key) {
  if (!obj.is_object()) bad_field(prefix, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) bad_field(prefix.empty() ? key : prefix + "." + key, "missing");
  return *it;
}

std::string join(const std::string& prefix, const std::string& key) { return prefix.empty() ? key : prefix + "." + key; }

double get_number(const json& obj, const std::string& prefix, const std::string& key, std::optional<double> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    bad_field(join(prefix, key), "missing");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) bad_field(join(prefix, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad_field(join(prefix, key), "must be finite");
  return d;
}

long get_int(const json& obj, const std::string& prefix, const std::string& key, std::optional<long> fallback = {}) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    bad_field(join(prefix, key), "missing");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) bad_field(join(prefix, key), "expected an integer");
  return v.get<long>();
}

bool get_bool(const json& obj, const std::string& prefix, const std::string& key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) bad_field(join(prefix, key), "expected true or false");
  return obj.at(key).get<bool>();
}

Vec get_vec(const json& obj, const std::string& prefix, const std::string& key, Eigen::Index n) {
  const json& v = require_key(obj, prefix, key);
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != n) {
    bad_field(join(prefix, key), "expected an array of " + std::to_string(n) + " numbers");
  }
  Vec out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number()) bad_field(join(prefix, key), "expected numbers");
    out[i] = v[static_cast<std::size_t>(i)].get<double>();
  }
  return out;
}

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

struct Context {
  std::string command;
  json config;
  fs::path config_dir;
  fs::path out_dir;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<std::string> warnings;
  std::vector<std::string> outputs;
  bool ok = true;
  std::optional<MetricField> metric_field;

  const json& section() const { return require_key(config, "", command); }
  bool has_metric() const { return config.contains("metric"); }

  const MetricField& metric() {
    if (!metric_field) {
      const json& m = require_key(config, "", "metric");
      MetricSpec spec;
      const json& kind = require_key(m, "metric", "kind");
      if (!kind.is_string()) bad_field("metric.kind", "expected a string");
      spec.kind = kind.get<std::string>();
      spec.dimension = get_int(m, "metric", "dimension", spec.kind == "rosen_wave" ? 4 : 2);
      if (m.contains("params")) {
        const json& p = m.at("params");
        if (!p.is_object()) bad_field("metric.params", "expected an object");
        for (const auto& [key, value] : p.items()) spec.params[key] = get_number(p, "metric.params", key);
      }
      if (m.contains("radius")) spec.radius = get_number(m, "metric", "radius");
      for (const auto& [key, value] : m.items()) {
        if (key != "kind" && key != "dimension" && key != "params" && key != "radius") {
          bad_field("metric." + key, "unknown key");
        }
      }
      metric_field.emplace(make_metric(spec));
      if (metric_field->lipschitz_is_estimate()) {
        warnings.push_back("Lipschitz constant of '" + spec.kind + "' is a sampled estimate");
      }
    }
    return *metric_field;
  }

  fs::path output(const std::string& name) {
    outputs.push_back(name);
    return out_dir / name;
  }
};

double max_energy_drift(const GeodesicTrajectory& traj, const MetricField& g) {
  double drift = 0.0;
  double ref = 0.0;
  double scale = 1.0;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const auto& s = traj.states[i];
    const double e = lorentz_product(g.metric(s.x), s.v, s.v);
    if (i == 0 || traj.branch_ids[i] != traj.branch_ids[i - 1]) {
      ref = e;
      scale = std::abs(e) + s.v.squaredNorm();
    }
    drift = std::max(drift, std::abs(e - ref) / scale);
  }
  return drift;
}

void write_events(const fs::path& path, const GeodesicTrajectory& traj, const MetricField& g) {
  json ev = json::array();
  for (const auto& e : traj.events) {
    ev.push_back({{"tau", e.tau},
                  {"interface_id", e.interface_id},
                  {"interface", g.interface(e.interface_id).name},
                  {"mode", to_string(e.mode)},
                  {"from_branch", e.from_branch},
                  {"to_branch", e.to_branch},
                  {"theta", e.theta}});
  }
  write_text(path, json{{"metric", traj.metric_ref}, {"events", ev}}.dump(2) + "\n");
}

GeodesicTrajectory integrate_block(Context& ctx, const json& blk, const std::string& prefix) {
  const MetricField& g = ctx.metric();
  const Vec x0 = get_vec(blk, prefix, "x0", g.dim());
  const Vec v0 = get_vec(blk, prefix, "v0", g.dim());
  const double tau0 = get_number(blk, prefix, "tau0", 0.0);
  const double tau_end = get_number(blk, prefix, "tau_end", 1.0);
  const double step = get_number(blk, prefix, "step", 1e-3);
  if (!(step > 0.0)) bad_field(join(prefix, "step"), "must be positive");
  if (!(tau_end > tau0)) bad_field(join(prefix, "tau_end"), "must exceed tau0");
  IntegrationOptions opt;
  opt.hull_checks = static_cast<int>(get_int(blk, prefix, "hull_checks", 100));
  opt.hull_count = static_cast<int>(get_int(blk, prefix, "hull_count", 64));
  opt.seed = substream_seed(ctx.seed, "integrate");
  return integrate_geodesic(g, {x0, v0, tau0}, tau_end, step, opt);
}

json hull_json(const GeodesicTrajectory& traj) {
  return {{"checks", traj.hull_checks}, {"violations", traj.hull_violations}, {"max_margin", traj.hull_max_margin}};
}

// Curve source: {"curve_csv": path} | {"integrate": {...}} | {"synthetic": {"beta", "samples"}}.
SampledCurve curve_source(Context& ctx, const json& sec, const std::string& prefix,
                          std::optional<GeodesicTrajectory>* traj_out = nullptr) {
  int given = 0;
  for (const char* k : {"curve_csv", "integrate", "synthetic"}) given += sec.contains(k) ? 1 : 0;
  if (given != 1) bad_field(prefix, "exactly one of curve_csv, integrate, synthetic is required");
  if (sec.contains("curve_csv")) {
    const json& p = sec.at("curve_csv");
    if (!p.is_string()) bad_field(join(prefix, "curve_csv"), "expected a path");
    fs::path path = p.get<std::string>();
    if (path.is_relative()) path = ctx.config_dir / path;
    return read_curve_csv(path.string());
  }
  if (sec.contains("integrate")) {
    auto traj = integrate_block(ctx, sec.at("integrate"), join(prefix, "integrate"));
    if (traj.truncated) ctx.warnings.push_back("trajectory left the chart before tau_end");
    SampledCurve c = traj.as_curve();
    if (traj_out) *traj_out = std::move(traj);
    return c;
  }
  const json& syn = sec.at("synthetic");
  const std::string sp = join(prefix, "synthetic");
  const double beta = get_number(syn, sp, "beta");
  const long samples = get_int(syn, sp, "samples", 10000);
  if (!(beta > 0.0 && beta <= 1.0)) bad_field(join(sp, "beta"), "must lie in (0, 1]");
  if (samples < 16) bad_field(join(sp, "samples"), "must be at least 16");
  return holder_angle_curve(beta, static_cast<std::size_t>(samples));
}

json regularity_json(const RegularityReport& r) {
  json j{{"alpha_hat", r.alpha_hat}, {"C_hat", r.C_hat},         {"fit_r2", r.fit_r2},
         {"h_grid", r.h_grid},       {"dev", r.dev},             {"h_range", {r.h_range.first, r.h_range.second}},
         {"line_exact", r.line_exact}};
  if (r.floor_quarter) {
    j["floor_quarter"] = *r.floor_quarter;
    j["exceeds_floor_quarter"] = r.alpha_hat >= *r.floor_quarter;
  }
  if (r.floor_alpha) {
    j["floor_alpha"] = *r.floor_alpha;
    j["exceeds_floor_alpha"] = r.alpha_hat >= *r.floor_alpha;
  }
  return j;
}

json upper_json(const VelocityUpperBoundReport& r, double C) {
  return {{"C", C},
          {"euclidean_length", r.euclidean_length},
          {"bound", r.bound},
          {"max_speed", r.max_speed},
          {"min_slack", r.min_slack},
          {"holds", r.holds}};
}

json lower_json(const VelocityLowerBound& r) {
  return {{"C", r.C},
          {"r_max", r.r_max},
          {"K", r.K},
          {"length", r.length},
          {"min_speed", r.min_speed},
          {"max_speed", r.max_speed},
          {"required", r.required},
          {"margin", r.margin},
          {"lightlike", r.lightlike},
          {"holds", r.holds}};
}

json cmd_integrate(Context& ctx) {
  const MetricField& g = ctx.metric();
  auto traj = integrate_block(ctx, ctx.section(), ctx.command);
  write_trajectory_csv(ctx.output("trajectory.csv").string(), traj);
  write_events(ctx.output("events.json"), traj, g);
  if (traj.truncated) ctx.warnings.push_back("trajectory left the chart before tau_end");
  const auto& last = traj.states.back();
  const bool hull_ok = traj.hull_violations == 0;
  ctx.ok = ctx.ok && hull_ok;
  return {{"samples", traj.states.size()},
          {"events", traj.events.size()},
          {"truncated", traj.truncated},
          {"final", {{"tau", last.tau}, {"x", to_json(last.x)}, {"v", to_json(last.v)}}},
          {"energy_drift", max_energy_drift(traj, g)},
          {"hull", hull_json(traj)},
          {"ok", hull_ok}};
}

json cmd_maximize(Context& ctx) {
  const MetricField& g = ctx.metric();
  const json& sec = ctx.section();
  const std::string p = ctx.command;
  const Vec x = get_vec(sec, p, "x", g.dim());
  const Vec y = get_vec(sec, p, "y", g.dim());
  const long segments = get_int(sec, p, "segments", 64);
  if (segments < 2) bad_field(join(p, "segments"), "must be at least 2");
  MaximizeOptions opt;
  opt.max_iterations = static_cast<int>(get_int(sec, p, "max_iterations", opt.max_iterations));
  opt.tolerance = get_number(sec, p, "tolerance", opt.tolerance);
  opt.multistart = static_cast<int>(get_int(sec, p, "multistart", 1));
  opt.threads = ctx.threads;
  opt.seed = substream_seed(ctx.seed, "maximize");
  const auto res = maximize_causal_curve(g, x, y, static_cast<int>(segments), opt);
  write_curve_csv(ctx.output("maximizer.csv").string(), res.curve);
  if (!res.converged) ctx.warnings.push_back("maximizer stopped before the first-order tolerance was reached");

  json out{{"length", res.length},
           {"iterations", res.iterations},
           {"converged", res.converged},
           {"first_order_residual", res.first_order_residual},
           {"regime", to_string(res.regime)},
           {"start_index", res.start_index}};
  try {
    const auto reg = regularity_of_maximizer(res, g);
    out["alpha_hat"] = reg.alpha_hat;
    out["regularity"] = regularity_json(reg);
  } catch (const Error& e) {
    ctx.warnings.push_back(std::string("regularity skipped: ") + e.what());
  }
  const double C = christoffel_bound(g);
  const auto up = velocity_upper_bound_check(res.curve, C);
  const auto lo = velocity_lower_bound_check(res.curve, g, C);
  out["velocity_bounds"] = {{"upper", upper_json(up, C)}, {"lower", lower_json(lo)}};
  ctx.ok = ctx.ok && up.holds && lo.holds;

  if (get_bool(sec, p, "shoot", false)) {
    ShootOptions so;
    so.integration.hull_checks = 0;
    const auto shot = shoot_geodesic(g, x, y, y - x, so);
    const double ls = smooth_lorentzian_length(shot.trajectory.as_curve(), g);
    out["shoot"] = {{"length", ls}, {"iterations", shot.iterations}, {"difference", res.length - ls}};
  }
  const long trials = get_int(sec, p, "probe_trials", 0);
  if (trials > 0) {
    const double amp = get_number(sec, p, "probe_amplitude", 1e-3);
    const auto pr = local_maximality_probe(res.curve, g, static_cast<int>(trials), amp, substream_seed(ctx.seed, "probe"));
    out["probe"] = {{"trials", pr.trials},
                    {"improving", pr.improving},
                    {"rejected_noncausal", pr.rejected_noncausal},
                    {"max_increase", pr.max_increase}};
  }
  out["ok"] = up.holds && lo.holds;
  return out;
}

json cmd_shoot(Context& ctx) {
  const MetricField& g = ctx.metric();
  const json& sec = ctx.section();
  const std::string p = ctx.command;
  const Vec x = get_vec(sec, p, "x", g.dim());
  const Vec y = get_vec(sec, p, "y", g.dim());
  const Vec guess = sec.contains("v0_guess") ? get_vec(sec, p, "v0_guess", g.dim()) : Vec(y - x);
  ShootOptions so;
  so.step = get_number(sec, p, "step", so.step);
  so.tolerance = get_number(sec, p, "tolerance", so.tolerance);
  so.max_iterations = static_cast<int>(get_int(sec, p, "max_iterations", so.max_iterations));
  so.integration.hull_checks = static_cast<int>(get_int(sec, p, "hull_checks", 100));
  so.integration.seed = substream_seed(ctx.seed, "shoot");
  const auto shot = shoot_geodesic(g, x, y, guess, so);
  write_trajectory_csv(ctx.output("trajectory.csv").string(), shot.trajectory);
  write_events(ctx.output("events.json"), shot.trajectory, g);
  const bool hull_ok = shot.trajectory.hull_violations == 0;
  ctx.ok = ctx.ok && hull_ok;
  return {{"v0", to_json(shot.v0)},
          {"iterations", shot.iterations},
          {"residuals", shot.residuals},
          {"endpoint_error", (shot.trajectory.states.back().x - y).norm()},
          {"length", smooth_lorentzian_length(shot.trajectory.as_curve(), g)},
          {"events", shot.trajectory.events.size()},
          {"hull", hull_json(shot.trajectory)},
          {"ok", hull_ok}};
}

json cmd_regularity(Context& ctx) {
  const json& sec = ctx.section();
  const std::string p = ctx.command;
  SampledCurve curve = curve_source(ctx, sec, p);
  std::optional<std::vector<double>> grid;
  if (sec.contains("h_grid")) {
    const json& h = sec.at("h_grid");
    if (!h.is_array()) bad_field(join(p, "h_grid"), "expected an array");
    grid.emplace();
    for (const auto& v : h) {
      if (!v.is_number() || !(v.get<double>() > 0.0)) bad_field(join(p, "h_grid"), "expected positive numbers");
      grid->push_back(v.get<double>());
    }
  }
  const bool arclength = get_bool(sec, p, "arclength", !sec.contains("synthetic"));
  if (arclength) curve = arclength_resample(curve, static_cast<std::size_t>(get_int(sec, p, "resample", 4096)));
  auto rep = estimate_holder_exponent(curve, grid);
  if (ctx.has_metric()) {
    rep.floor_quarter = 0.25;
    rep.floor_alpha = ctx.metric().holder_exponent() / 4.0;
  }
  write_text(ctx.output("regularity.json"), regularity_json(rep).dump(2) + "\n");
  return regularity_json(rep);
}

json cmd_repar(Context& ctx) {
  const MetricField& g = ctx.metric();
  const json& sec = ctx.section();
  const std::string p = ctx.command;
  const SampledCurve curve = curve_source(ctx, sec, p);
  std::optional<double> ell;
  if (sec.contains("ell")) ell = get_number(sec, p, "ell");
  std::optional<std::pair<double, double>> interval;
  if (sec.contains("interval")) {
    const json& iv = sec.at("interval");
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
      bad_field(join(p, "interval"), "expected [a, b]");
    }
    interval = std::make_pair(iv[0].get<double>(), iv[1].get<double>());
  }
  std::optional<std::size_t> samples;
  if (sec.contains("samples")) samples = static_cast<std::size_t>(get_int(sec, p, "samples"));
  const auto rp = reparametrize_constant_speed(curve, g, ell, interval, samples);
  write_curve_csv(ctx.output("repar.csv").string(), rp.curve, true);
  const auto speeds = lorentzian_speeds(rp.curve, g);
  const auto [mn, mx] = std::minmax_element(speeds.begin(), speeds.end());
  const bool constant = (*mx - *mn) <= 1e-8 * (1.0 + rp.ell);
  ctx.ok = ctx.ok && constant;
  return {{"ell", rp.ell},
          {"length", rp.length},
          {"interval", {rp.curve.front_param(), rp.curve.back_param()}},
          {"endpoint_residual", rp.endpoint_residual},
          {"speed_min", *mn},
          {"speed_max", *mx},
          {"ok", constant}};
}

json cmd_sweep(Context& ctx) {
  const json& sec = ctx.section();
  const std::string p = ctx.command;
  const long n = get_int(sec, p, "dimension", 3);
  const long trials = get_int(sec, p, "trials", 1000000);
  if (n < 2) bad_field(join(p, "dimension"), "must be at least 2");
  if (trials < 1) bad_field(join(p, "trials"), "must be positive");
  const auto rep = triangle_sweep(n, trials, ctx.seed, ctx.threads);
  json witness = json::object();
  if (rep.argmin_witness.size() == 2) witness = {{"u", to_json(rep.argmin_witness[0])}, {"v", to_json(rep.argmin_witness[1])}};
  const bool ok = rep.violations == 0;
  ctx.ok = ctx.ok && ok;
  json out{{"dimension", n},
           {"trials", rep.trials},
           {"violations", rep.violations},
           {"min_slack", rep.min_slack},
           {"argmin_witness", witness},
           {"constant_samples", rep.constant_samples}};
  out["empirical_best_constant"] = rep.empirical_best_constant ? json(*rep.empirical_best_constant) : json(nullptr);
  out["ok"] = ok;
  return out;
}

json cmd_check_bounds(Context& ctx) {
  const MetricField& g = ctx.metric();
  const json& sec = ctx.section();
  const std::string p = ctx.command;
  std::optional<GeodesicTrajectory> traj;
  const SampledCurve curve = curve_source(ctx, sec, p, &traj);
  const double C = sec.contains("C") ? get_number(sec, p, "C") : christoffel_bound(g);
  const auto up = velocity_upper_bound_check(curve, C);
  const auto lo = velocity_lower_bound_check(curve, g, C);
  json out{{"upper", upper_json(up, C)}, {"lower", lower_json(lo)}};
  bool ok = up.holds && lo.holds;
  if (traj) {
    double c1 = 0.0;
    double lip = 0.0;
    const auto& st = traj->states;
    for (std::size_t i = 0; i + 1 < st.size(); ++i) {
      c1 = std::max({c1, st[i].v.norm(), st[i + 1].v.norm()});
      lip = std::max(lip, (st[i + 1].v - st[i].v).norm() / (st[i + 1].tau - st[i].tau));
    }
    const double bound = C * c1 * c1;
    const bool holds = lip <= 1.1 * bound;
    out["c11"] = {{"C1", c1}, {"C2", C}, {"velocity_lipschitz", lip}, {"bound", bound}, {"holds", holds}};
    out["hull"] = hull_json(*traj);
    ok = ok && holds && traj->hull_violations == 0;
  }
  if (sec.contains("cone")) {
    const json& cone = sec.at("cone");
    const std::string cp = join(p, "cone");
    const double h = get_number(cone, cp, "h", 0.05);
    const long samples = get_int(cone, cp, "samples", 100000);
    const auto ci = cone_inclusion_check(g, g.lipschitz_L(), h, static_cast<int>(samples), substream_seed(ctx.seed, "cone"));
    out["cone"] = {{"h", h},
                   {"L", g.lipschitz_L()},
                   {"samples", ci.samples},
                   {"deviation_violations", ci.deviation_violations},
                   {"timelike_violations", ci.timelike_violations},
                   {"min_deviation_slack", ci.min_deviation_slack},
                   {"min_widened_value", ci.min_widened_value}};
    ok = ok && ci.violations() == 0;
  }
  ctx.ok = ctx.ok && ok;
  out["ok"] = ok;
  return out;
}

json cmd_limit(Context& ctx) {
  const MetricField& g = ctx.metric();
  const json& sec = ctx.section();
  const std::string p = ctx.command;
  LimitExperimentOptions opt;
  const Vec x = get_vec(sec, p, "x", g.dim());
  const Vec y = get_vec(sec, p, "y", g.dim());
  if (sec.contains("indices")) {
    const json& idx = sec.at("indices");
    if (!idx.is_array() || idx.empty()) bad_field(join(p, "indices"), "expected a non-empty array");
    opt.indices.clear();
    for (const auto& v : idx) {
      if (!v.is_number_integer() || v.get<int>() < 1) bad_field(join(p, "indices"), "expected positive integers");
      opt.indices.push_back(v.get<int>());
    }
  }
  opt.pieces = static_cast<int>(get_int(sec, p, "pieces", opt.pieces));
  opt.samples = static_cast<int>(get_int(sec, p, "samples", opt.samples));
  opt.hull_checks = static_cast<int>(get_int(sec, p, "hull_checks", opt.hull_checks));
  opt.seed = substream_seed(ctx.seed, "limit");
  const auto le = lightlike_limit_experiment(g, x, y, opt);
  write_curve_csv(ctx.output("limit.csv").string(), le.limit, true);
  const double tol = default_hull_tol(y - x);
  const bool ok = le.report.converged && le.report.max_hull_margin <= tol;
  ctx.ok = ctx.ok && ok;
  return {{"indices", opt.indices},
          {"sup_distance", le.report.sup_distance},
          {"lengths", le.lengths},
          {"converged", le.report.converged},
          {"check_points", le.report.check_points},
          {"max_hull_margin", le.report.max_hull_margin},
          {"max_hull_ratio", le.report.max_hull_ratio},
          {"geodesic", le.report.geodesic},
          {"ok", ok}};
}

using Handler = json (*)(Context&);

const std::vector<std::pair<std::string, Handler>>& handlers() {
  static const std::vector<std::pair<std::string, Handler>> h{
      {"integrate", cmd_integrate},   {"maximize", cmd_maximize},         {"shoot", cmd_shoot},
      {"regularity", cmd_regularity}, {"repar", cmd_repar},               {"sweep-triangle", cmd_sweep},
      {"check-bounds", cmd_check_bounds}, {"limit-experiment", cmd_limit}};
  return h;
}

json load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos > 0 ? pos - 1 : 0), '\n');
    std::ostringstream os;
    os << path.string() << ":" << line << ": malformed JSON (" << e.what() << ")";
    throw ConfigError(os.str());
  }
}

int execute(const std::string& command, const std::string& config_path, const std::string& output_dir,
            std::optional<int> threads, std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Context ctx;
  ctx.command = command;
  try {
    ctx.config = load_config(config_path);
    ctx.config_dir = fs::path(config_path).parent_path();
    if (ctx.config.contains("command")) {
      const json& c = ctx.config.at("command");
      if (!c.is_string() || c.get<std::string>() != command) bad_field("command", "does not match the subcommand '" + command + "'");
    }
    ctx.config.erase("lipcausal_version");
    ctx.config.erase("command");
    if (seed) ctx.config["seed"] = *seed;
    if (threads) ctx.config["threads"] = *threads;
    if (ctx.config.contains("seed")) {
      const json& s = ctx.config.at("seed");
      if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) bad_field("seed", "expected an unsigned integer");
      ctx.seed = s.get<std::uint64_t>();
    }
    ctx.threads = static_cast<int>(get_int(ctx.config, "", "threads", 1));
    if (ctx.threads < 1) bad_field("threads", "must be at least 1");
    for (const auto& [key, value] : ctx.config.items()) {
      if (key != "seed" && key != "threads" && key != "metric" && key != command) {
        ctx.warnings.push_back("ignored config key '" + key + "'");
      }
    }
    ctx.out_dir = output_dir;
    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + output_dir + "'");

    Handler h = nullptr;
    for (const auto& [name, fn] : handlers()) {
      if (name == command) h = fn;
    }
    json results = h(ctx);

    json effective;
    effective["command"] = command;
    effective["lipcausal_version"] = kVersion;
    effective["seed"] = ctx.seed;
    effective["threads"] = ctx.threads;
    for (const auto& [key, value] : ctx.config.items()) {
      if (key != "seed" && key != "threads") effective[key] = value;
    }
    json manifest = effective;
    ctx.outputs.push_back("report.json");
    ctx.outputs.push_back("manifest.json");
    manifest["outputs"] = ctx.outputs;
    write_text(ctx.out_dir / "manifest.json", manifest.dump(2) + "\n");

    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json report{{"command", command}, {"config", effective}, {"results", results}, {"warnings", ctx.warnings},
                {"runtime_seconds", runtime}};
    write_text(ctx.out_dir / "report.json", report.dump(2) + "\n");
    out << command << ": " << (ctx.ok ? "ok" : "check failed") << " (" << (ctx.out_dir / "report.json").string() << ")\n";
    for (const auto& w : ctx.warnings) err << "warning: " << w << "\n";
    return ctx.ok ? kSuccess : kValidation;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return is_numerical(e.kind()) ? kNumerical : kValidation;
  } catch (const json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : handlers()) n.push_back(name);
    return n;
  }();
  return names;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maximal causal curves in Lipschitz Lorentzian metrics", "lipcausal"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  std::string config;
  std::string output = ".";
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  for (const auto& name : subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "experiment config (JSON)")->required();
    sub->add_option("--output", output, "output directory");
    sub->add_option("--threads", threads, "worker threads (overrides config)");
    sub->add_option("--seed", seed, "random seed (overrides config)");
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }
  const auto subs = app.get_subcommands();
  return execute(subs.front()->get_name(), config, output, threads, seed, out, err);
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace lipcausal::cli
