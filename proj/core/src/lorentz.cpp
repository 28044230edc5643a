#include "lipcausal/lorentz.hpp"

#include <cmath>
#include <sstream>

#include "lipcausal/errors.hpp"

namespace lipcausal {

namespace {

void require_same_dim(Eigen::Index n, const Vec& u, const Vec& v) {
  if (u.size() != n || v.size() != n) {
    std::ostringstream os;
    os << "form of dimension " << n << " applied to vectors of dimension " << u.size() << " and "
       << v.size();
    throw Error(ErrorKind::DimensionMismatch, os.str());
  }
}

}  // namespace

bool has_lorentzian_signature(const Mat& m, double threshold) {
  if (m.rows() != m.cols() || m.rows() < 2) return false;
  if (!m.allFinite()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff())) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return false;
  int positive = 0;
  int negative = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()[i];
    if (ev > threshold) {
      ++positive;
    } else if (ev < -threshold) {
      ++negative;
    }
  }
  return positive == 1 && negative == m.rows() - 1;
}

BilinearForm::BilinearForm(const Mat& matrix) {
  if (!has_lorentzian_signature(matrix)) {
    std::ostringstream os;
    os << "matrix is not a symmetric Lorentzian form:\n" << matrix;
    throw Error(ErrorKind::SignatureViolation, os.str());
  }
  matrix_ = 0.5 * (matrix + matrix.transpose());
}

BilinearForm BilinearForm::minkowski(Eigen::Index n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "dimension must be at least 2");
  Mat m = -Mat::Identity(n, n);
  m(0, 0) = 1.0;
  return BilinearForm(m);
}

double BilinearForm::operator()(const Vec& u, const Vec& v) const { return lorentz_product(matrix_, u, v); }

double lorentz_product(const Mat& g, const Vec& u, const Vec& v) {
  require_same_dim(g.rows(), u, v);
  // Averaging both orders makes the result symmetric in floating point too.
  return 0.5 * (u.dot(g * v) + v.dot(g * u));
}

double lorentz_product(const BilinearForm& g, const Vec& u, const Vec& v) {
  return lorentz_product(g.matrix(), u, v);
}

double minkowski_product(const Vec& u, const Vec& v) {
  if (u.size() != v.size() || u.size() < 2) {
    throw Error(ErrorKind::DimensionMismatch, "Minkowski product needs equal dimensions >= 2");
  }
  return u[0] * v[0] - u.tail(u.size() - 1).dot(v.tail(v.size() - 1));
}

const char* to_string(CausalCharacter c) {
  switch (c) {
    case CausalCharacter::Timelike: return "timelike";
    case CausalCharacter::Null: return "null";
    case CausalCharacter::Spacelike: return "spacelike";
    case CausalCharacter::Zero: return "zero";
  }
  return "unknown";
}

double default_classify_tol(const Vec& v) { return 1e-10 * (1.0 + v.squaredNorm()); }

CausalCharacter classify(const Mat& g, const Vec& v, std::optional<double> tol) {
  const double t = tol.value_or(default_classify_tol(v));
  if (v.norm() <= t) return CausalCharacter::Zero;
  const double q = lorentz_product(g, v, v);
  if (q > t) return CausalCharacter::Timelike;
  if (q < -t) return CausalCharacter::Spacelike;
  return CausalCharacter::Null;
}

CausalCharacter classify(const BilinearForm& g, const Vec& v, std::optional<double> tol) {
  return classify(g.matrix(), v, tol);
}

double lorentz_norm(const Mat& g, const Vec& v) { return std::sqrt(std::abs(lorentz_product(g, v, v))); }
double lorentz_norm(const BilinearForm& g, const Vec& v) { return lorentz_norm(g.matrix(), v); }
double minkowski_norm(const Vec& v) { return std::sqrt(std::abs(minkowski_product(v, v))); }

BilinearForm widened_metric(Eigen::Index n, double lipschitz_L, double h, double alpha) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "widened_metric needs h > 0");
  if (!(lipschitz_L >= 0.0)) throw Error(ErrorKind::InvalidArgument, "widened_metric needs L >= 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0,1]");
  Mat m = -Mat::Identity(n, n);
  m(0, 0) = 1.0 + 4.0 * lipschitz_L * std::pow(h, alpha);
  return BilinearForm(m);
}

double operator_norm_sym(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace lipcausal
