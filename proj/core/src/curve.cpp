#include "lipcausal/curve.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lipcausal/errors.hpp"

namespace lipcausal {

namespace {

std::vector<Vec> finite_difference_velocities(const std::vector<double>& t, const std::vector<Vec>& x) {
  const std::size_t m = x.size();
  std::vector<Vec> v(m);
  if (m == 2) {
    v[0] = v[1] = (x[1] - x[0]) / (t[1] - t[0]);
    return v;
  }
  for (std::size_t i = 1; i + 1 < m; ++i) {
    // Second-order central difference on a possibly non-uniform grid.
    const double h0 = t[i] - t[i - 1];
    const double h1 = t[i + 1] - t[i];
    v[i] = (h0 * h0 * (x[i + 1] - x[i]) + h1 * h1 * (x[i] - x[i - 1])) / (h0 * h1 * (h0 + h1));
  }
  auto one_sided = [&](std::size_t a, std::size_t b, std::size_t c) {
    // Quadratic through three samples, derivative at t[a].
    const double h1 = t[b] - t[a];
    const double h2 = t[c] - t[a];
    return Vec((h2 * h2 * (x[b] - x[a]) - h1 * h1 * (x[c] - x[a])) / (h1 * h2 * (h2 - h1)));
  };
  v[0] = one_sided(0, 1, 2);
  v[m - 1] = one_sided(m - 1, m - 2, m - 3);
  return v;
}

}  // namespace

SampledCurve::SampledCurve(std::vector<double> params, std::vector<Vec> points,
                           std::optional<std::vector<Vec>> velocities)
    : params_(std::move(params)), points_(std::move(points)), velocities_(std::move(velocities)) {
  if (points_.size() < 2) throw Error(ErrorKind::InvalidArgument, "a sampled curve needs at least two points");
  if (params_.size() != points_.size()) throw Error(ErrorKind::DimensionMismatch, "params and points differ in length");
  const Eigen::Index n = points_.front().size();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].size() != n) throw Error(ErrorKind::DimensionMismatch, "curve points differ in dimension");
    if (!points_[i].allFinite()) throw Error(ErrorKind::InvalidArgument, "curve point is not finite");
    if (i > 0 && !(params_[i] > params_[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "curve parameters must be strictly increasing");
    }
  }
  if (velocities_) {
    if (velocities_->size() != points_.size()) throw Error(ErrorKind::DimensionMismatch, "velocity count");
    cached_velocities_ = *velocities_;
  } else {
    cached_velocities_ = finite_difference_velocities(params_, points_);
  }
}

std::vector<Vec> SampledCurve::velocities() const { return cached_velocities_; }

std::size_t SampledCurve::interval_of(double t) const {
  if (t <= params_.front()) return 0;
  if (t >= params_.back()) return params_.size() - 2;
  const auto it = std::upper_bound(params_.begin(), params_.end(), t);
  return static_cast<std::size_t>(std::distance(params_.begin(), it)) - 1;
}

Vec SampledCurve::point_at(double t) const {
  const std::size_t i = interval_of(t);
  const double h = params_[i + 1] - params_[i];
  const double s = (t - params_[i]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * points_[i] + h10 * h * cached_velocities_[i] + h01 * points_[i + 1] +
         h11 * h * cached_velocities_[i + 1];
}

Vec SampledCurve::velocity_at(double t) const {
  const std::size_t i = interval_of(t);
  const double h = params_[i + 1] - params_[i];
  const double s = (t - params_[i]) / h;
  const double s2 = s * s;
  const double d00 = 6 * s2 - 6 * s;
  const double d10 = 3 * s2 - 4 * s + 1;
  const double d01 = -6 * s2 + 6 * s;
  const double d11 = 3 * s2 - 2 * s;
  return (d00 * points_[i] + d01 * points_[i + 1]) / h + d10 * cached_velocities_[i] +
         d11 * cached_velocities_[i + 1];
}

double SampledCurve::euclidean_length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) len += (points_[i] - points_[i - 1]).norm();
  return len;
}

void write_curve_csv(std::ostream& os, const SampledCurve& curve, bool with_velocities) {
  const Eigen::Index n = curve.dim();
  os << "tau";
  for (Eigen::Index k = 0; k < n; ++k) os << ",x_" << k;
  if (with_velocities) {
    for (Eigen::Index k = 0; k < n; ++k) os << ",v_" << k;
  }
  os << '\n';
  const auto vel = with_velocities ? curve.velocities() : std::vector<Vec>{};
  char buf[64];
  auto put = [&](double value) {
    std::snprintf(buf, sizeof buf, "%.17g", value);
    os << buf;
  };
  for (std::size_t i = 0; i < curve.size(); ++i) {
    put(curve.params()[i]);
    for (Eigen::Index k = 0; k < n; ++k) {
      os << ',';
      put(curve.points()[i][k]);
    }
    if (with_velocities) {
      for (Eigen::Index k = 0; k < n; ++k) {
        os << ',';
        put(vel[i][k]);
      }
    }
    os << '\n';
  }
}

void write_curve_csv(const std::string& path, const SampledCurve& curve, bool with_velocities) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot open '" + path + "' for writing");
  write_curve_csv(out, curve, with_velocities);
}

SampledCurve read_curve_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::InvalidArgument, "empty curve CSV");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header[0] != "tau") throw Error(ErrorKind::InvalidArgument, "curve CSV must start with 'tau'");
  std::vector<int> xcol;
  std::vector<int> vcol;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].rfind("x_", 0) == 0) xcol.push_back(static_cast<int>(c));
    if (header[c].rfind("v_", 0) == 0) vcol.push_back(static_cast<int>(c));
  }
  if (xcol.size() < 2) throw Error(ErrorKind::InvalidArgument, "curve CSV needs at least two x_ columns");
  const bool with_v = !vcol.empty();
  if (with_v && vcol.size() != xcol.size()) throw Error(ErrorKind::InvalidArgument, "x_/v_ column counts differ");

  std::vector<double> params;
  std::vector<Vec> points;
  std::vector<Vec> vels;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        cells.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidArgument, "curve CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::InvalidArgument, "curve CSV line " + std::to_string(lineno) + ": wrong column count");
    }
    params.push_back(cells[0]);
    Vec x(static_cast<Eigen::Index>(xcol.size()));
    for (std::size_t k = 0; k < xcol.size(); ++k) x[static_cast<Eigen::Index>(k)] = cells[static_cast<std::size_t>(xcol[k])];
    points.push_back(x);
    if (with_v) {
      Vec v(static_cast<Eigen::Index>(vcol.size()));
      for (std::size_t k = 0; k < vcol.size(); ++k) v[static_cast<Eigen::Index>(k)] = cells[static_cast<std::size_t>(vcol[k])];
      vels.push_back(v);
    }
  }
  if (with_v) return SampledCurve(std::move(params), std::move(points), std::move(vels));
  return SampledCurve(std::move(params), std::move(points));
}

SampledCurve read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open curve file '" + path + "'");
  return read_curve_csv(in);
}

}  // namespace lipcausal
