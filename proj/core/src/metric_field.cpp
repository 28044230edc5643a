#include "lipcausal/metric_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lipcausal/errors.hpp"

namespace lipcausal {

MetricField::MetricField(Eigen::Index dim, std::vector<MetricBranch> branches, std::vector<Interface> interfaces,
                         BranchSelector selector, Options options)
    : dim_(dim),
      branches_(std::move(branches)),
      interfaces_(std::move(interfaces)),
      selector_(std::move(selector)),
      name_(std::move(options.name)),
      domain_radius_(options.domain_radius),
      holder_exponent_(options.holder_exponent),
      fd_step_(options.fd_step) {
  if (dim_ < 2) throw Error(ErrorKind::InvalidArgument, "metric dimension must be at least 2");
  if (branches_.empty()) throw Error(ErrorKind::InvalidArgument, "metric field needs at least one branch");
  for (const auto& b : branches_) {
    if (!b.metric) throw Error(ErrorKind::InvalidArgument, "branch '" + b.name + "' has no metric function");
  }
  for (const auto& s : interfaces_) {
    if (!s.level) throw Error(ErrorKind::InvalidArgument, "interface '" + s.name + "' has no level function");
  }
  if (!(domain_radius_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "domain radius must be positive");
  if (!(holder_exponent_ > 0.0 && holder_exponent_ <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "Hoelder exponent must lie in (0,1]");
  }
  if (!selector_) {
    selector_ = [nb = branches_.size()](std::span<const int> signs) -> std::size_t {
      // Default: binary encoding of the sign pattern, clamped to the branch count.
      std::size_t idx = 0;
      for (std::size_t j = 0; j < signs.size(); ++j) {
        if (signs[j] > 0) idx |= (std::size_t{1} << j);
      }
      return std::min(idx, nb - 1);
    };
  }
  if (options.lipschitz_L) {
    if (!(*options.lipschitz_L >= 0.0)) throw Error(ErrorKind::InvalidArgument, "lipschitz_L must be >= 0");
    lipschitz_L_ = *options.lipschitz_L;
  } else {
    lipschitz_L_ = estimate_lipschitz(*this, 10000, options.estimation_seed);
    lipschitz_estimated_ = true;
  }
}

MetricField MetricField::from_callable(Eigen::Index dim, std::function<Mat(const Vec&)> metric, Options options) {
  std::vector<MetricBranch> branches{{"callable", std::move(metric), {}}};
  return MetricField(dim, std::move(branches), {}, {}, std::move(options));
}

bool MetricField::in_domain(const Vec& x) const { return x.size() == dim_ && x.norm() < domain_radius_; }

std::vector<int> MetricField::interface_signs(const Vec& x) const {
  std::vector<int> signs(interfaces_.size());
  for (std::size_t j = 0; j < interfaces_.size(); ++j) signs[j] = interfaces_[j].level(x) >= 0.0 ? 1 : -1;
  return signs;
}

std::size_t MetricField::branch_for_signs(std::span<const int> signs) const {
  const std::size_t b = selector_(signs);
  if (b >= branches_.size()) throw Error(ErrorKind::InvalidArgument, "branch selector returned invalid index");
  return b;
}

std::size_t MetricField::branch_at(const Vec& x) const {
  if (interfaces_.empty()) return 0;
  const auto signs = interface_signs(x);
  return branch_for_signs(signs);
}

std::pair<std::size_t, std::size_t> MetricField::adjacent_branches(std::size_t j, const Vec& x) const {
  auto signs = interface_signs(x);
  signs.at(j) = -1;
  const std::size_t minus = branch_for_signs(signs);
  signs[j] = 1;
  const std::size_t plus = branch_for_signs(signs);
  return {minus, plus};
}

Mat MetricField::metric(const Vec& x) const { return branches_[branch_at(x)].metric(x); }

Mat MetricField::branch_metric(std::size_t branch, const Vec& x) const { return branches_.at(branch).metric(x); }

std::vector<Mat> MetricField::branch_derivatives(std::size_t branch, const Vec& x) const {
  const auto& b = branches_.at(branch);
  if (b.derivatives) return b.derivatives(x);
  std::vector<Mat> d(static_cast<std::size_t>(dim_));
  Vec xp = x;
  Vec xm = x;
  for (Eigen::Index k = 0; k < dim_; ++k) {
    xp[k] = x[k] + fd_step_;
    xm[k] = x[k] - fd_step_;
    d[static_cast<std::size_t>(k)] = (b.metric(xp) - b.metric(xm)) / (2.0 * fd_step_);
    xp[k] = x[k];
    xm[k] = x[k];
  }
  return d;
}

BilinearForm MetricField::form(const Vec& x) const {
  try {
    return BilinearForm(metric(x));
  } catch (const Error&) {
    std::ostringstream os;
    os << "field '" << name_ << "' loses Lorentzian signature at x = " << x.transpose();
    throw Error(ErrorKind::SignatureViolation, os.str());
  }
}

double MetricField::interface_value(std::size_t j, const Vec& x) const { return interfaces_.at(j).level(x); }

Vec MetricField::interface_gradient(std::size_t j, const Vec& x) const {
  const auto& s = interfaces_.at(j);
  if (s.gradient) return s.gradient(x);
  Vec grad(dim_);
  const double h = 1e-6 * std::max(1.0, domain_radius_);
  Vec xp = x;
  Vec xm = x;
  for (Eigen::Index k = 0; k < dim_; ++k) {
    xp[k] = x[k] + h;
    xm[k] = x[k] - h;
    grad[k] = (s.level(xp) - s.level(xm)) / (2.0 * h);
    xp[k] = x[k];
    xm[k] = x[k];
  }
  return grad;
}

Mat MetricField::interface_hessian(std::size_t j, const Vec& x) const {
  const auto& s = interfaces_.at(j);
  if (s.hessian) return s.hessian(x);
  Mat hess(dim_, dim_);
  const double h = 1e-5 * std::max(1.0, domain_radius_);
  Vec xp = x;
  Vec xm = x;
  for (Eigen::Index k = 0; k < dim_; ++k) {
    xp[k] = x[k] + h;
    xm[k] = x[k] - h;
    hess.col(k) = (interface_gradient(j, xp) - interface_gradient(j, xm)) / (2.0 * h);
    xp[k] = x[k];
    xm[k] = x[k];
  }
  return 0.5 * (hess + hess.transpose());
}

double MetricField::interface_distance(std::size_t j, const Vec& x) const {
  const double gn = interface_gradient(j, x).norm();
  if (gn == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(interface_value(j, x)) / gn;
}

Vec MetricField::project_to_interface(std::size_t j, const Vec& x) const {
  Vec p = x;
  for (int it = 0; it < 50; ++it) {
    const double s = interface_value(j, p);
    if (std::abs(s) <= 1e-15) break;
    const Vec grad = interface_gradient(j, p);
    const double g2 = grad.squaredNorm();
    if (g2 == 0.0) break;
    p -= (s / g2) * grad;
  }
  return p;
}

double lipschitz_ratio(const MetricField& g, const Vec& x, const Vec& y) {
  const double d = (x - y).norm();
  if (d == 0.0) return 0.0;
  return operator_norm_sym(g.metric(x) - g.metric(y)) / d;
}

double estimate_lipschitz(const MetricField& g, int pairs, std::uint64_t seed) {
  Rng rng(substream_seed(seed, "lipschitz"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double radius = g.domain_radius();
  double best = 0.0;
  for (int i = 0; i < pairs; ++i) {
    const Vec x = uniform_in_ball(rng, g.dim(), 0.95 * radius);
    // log-uniform separations from 1e-4 R to 1e-1 R
    const double sep = radius * std::pow(10.0, -4.0 + 3.0 * unit(rng));
    Vec y = x + sep * uniform_on_sphere(rng, g.dim());
    if (!g.in_domain(y)) y = x - (y - x);
    if (!g.in_domain(y)) continue;
    best = std::max(best, lipschitz_ratio(g, x, y));
  }
  return best;
}

double time_growth(const Mat& gx) {
  const Eigen::Index n = gx.rows();
  const double g00 = gx(0, 0);
  const Vec cross = gx.row(0).tail(n - 1).transpose();
  const Mat spatial = gx.bottomRightCorner(n - 1, n - 1);
  if (g00 <= 0.0) return 0.0;
  if (cross.cwiseAbs().maxCoeff() < 1e-14) {
    // Diagonal time block: the widest causal direction follows the spatial
    // eigenvector closest to zero. v_t^2 g00 = -mu (1 - v_t^2).
    Eigen::SelfAdjointEigenSolver<Mat> es(spatial, Eigen::EigenvaluesOnly);
    const double mu = es.eigenvalues().maxCoeff();
    if (mu >= 0.0) return 0.0;
    return std::sqrt(-mu / (g00 - mu));
  }
  // General case: scan spatial directions and solve the cone boundary for each.
  Rng rng(0x7157ULL);
  double best = 1.0;
  for (int k = 0; k < 4000; ++k) {
    const Vec w = uniform_on_sphere(rng, n - 1);
    const double a = w.dot(spatial * w);
    const double b = cross.dot(w);
    // v = (c, s w), c^2 + s^2 = 1 on the boundary: g00 c^2 + 2 b c s + a s^2 = 0 -> ratio r = s / c
    // a r^2 + 2 b r + g00 = 0, take the largest positive root.
    if (a >= 0.0) return 0.0;
    const double disc = b * b - a * g00;
    const double r = (-b - std::sqrt(std::max(disc, 0.0))) / a;
    if (r > 0.0) best = std::min(best, 1.0 / std::sqrt(1.0 + r * r));
  }
  return best;
}

FieldValidationReport validate_field(const MetricField& g, int samples, std::uint64_t seed) {
  FieldValidationReport rep;
  Rng rng(substream_seed(seed, "validate"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double radius = g.domain_radius();
  for (int i = 0; i < samples; ++i) {
    const Vec x = uniform_in_ball(rng, g.dim(), 0.999 * radius);
    const Mat gx = g.metric(x);
    ++rep.samples;
    if (!has_lorentzian_signature(gx)) {
      ++rep.signature_failures;
      if (!rep.signature_witness) rep.signature_witness = x;
      continue;
    }
    rep.min_time_growth = std::min(rep.min_time_growth, time_growth(gx));

    const double sep = radius * std::pow(10.0, -4.0 + 3.0 * unit(rng));
    const Vec y = x + sep * uniform_on_sphere(rng, g.dim());
    if (g.in_domain(y)) {
      ++rep.lipschitz_pairs;
      const double excess = operator_norm_sym(gx - g.metric(y)) - g.lipschitz_L() * (x - y).norm();
      rep.max_lipschitz_excess = std::max(rep.max_lipschitz_excess, excess);
      if (excess > 1e-9) ++rep.lipschitz_violations;
    }

    for (std::size_t j = 0; j < g.interface_count(); ++j) {
      const Vec p = g.project_to_interface(j, x);
      if (!g.in_domain(p) || std::abs(g.interface_value(j, p)) > 1e-12) continue;
      const auto [minus, plus] = g.adjacent_branches(j, p);
      const double res = (g.branch_metric(minus, p) - g.branch_metric(plus, p)).cwiseAbs().maxCoeff();
      ++rep.interface_samples;
      rep.max_interface_residual = std::max(rep.max_interface_residual, res);
    }
  }
  return rep;
}

ConeInclusionReport cone_inclusion_check(const MetricField& g, double lipschitz_L, double h, int samples,
                                         std::uint64_t seed) {
  if (!(h > 0.0) || h > g.domain_radius()) {
    throw Error(ErrorKind::InvalidArgument, "cone_inclusion_check needs 0 < h <= domain radius");
  }
  const Eigen::Index n = g.dim();
  const Mat eta = BilinearForm::minkowski(n).matrix();
  const double origin_dev = (g.metric(Vec::Zero(n)) - eta).cwiseAbs().maxCoeff();
  if (origin_dev > 1e-12) {
    std::ostringstream os;
    os << "g at the chart origin differs from the Minkowski product by " << origin_dev;
    throw Error(ErrorKind::NotOriginNormalized, os.str());
  }
  const Mat gh = widened_metric(n, lipschitz_L, h).matrix();
  const double bound = 5.0 * lipschitz_L * h;

  ConeInclusionReport rep;
  rep.min_deviation_slack = std::numeric_limits<double>::infinity();
  rep.min_widened_value = std::numeric_limits<double>::infinity();
  Rng rng(substream_seed(seed, "cone-inclusion"));
  while (rep.samples < samples) {
    const Vec x = uniform_in_ball(rng, n, h);
    const Mat gx = g.metric(x);
    Vec v;
    double q = -1.0;
    for (int attempt = 0; attempt < 1000 && q < 0.0; ++attempt) {
      v = uniform_on_sphere(rng, n);
      q = v.dot(gx * v);
    }
    if (q < 0.0) continue;
    ++rep.samples;
    const double qh = v.dot(gh * v);
    const double slack = bound - std::abs(q - qh);
    if (slack < rep.min_deviation_slack) {
      rep.min_deviation_slack = slack;
      rep.worst_witness = std::make_pair(x, v);
    }
    if (slack < -1e-12) ++rep.deviation_violations;
    if (q > 0.0) {
      rep.min_widened_value = std::min(rep.min_widened_value, qh);
      if (qh <= 0.0) ++rep.timelike_violations;
    }
  }
  return rep;
}

}  // namespace lipcausal
