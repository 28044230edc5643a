#pragma once

// Lorentzian linear algebra on a single chart, signature (+ - ... -).

#include <optional>

#include "lipcausal/types.hpp"

namespace lipcausal {

/// Symmetric bilinear form with Lorentzian signature, validated on construction.
class BilinearForm {
 public:
  /// Eigenvalues with |lambda| below this threshold count as degenerate.
  static constexpr double kSignatureThreshold = 1e-10;

  /// Throws SignatureViolation unless `matrix` is symmetric with exactly one
  /// positive and n-1 negative eigenvalues. The stored matrix is exactly symmetric.
  explicit BilinearForm(const Mat& matrix);

  static BilinearForm minkowski(Eigen::Index n);

  const Mat& matrix() const noexcept { return matrix_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

  double operator()(const Vec& u, const Vec& v) const;

 private:
  Mat matrix_;
};

/// True when `m` is symmetric with signature (+ - ... -) at the given threshold.
bool has_lorentzian_signature(const Mat& m, double threshold = BilinearForm::kSignatureThreshold);

/// u^T M v. Throws DimensionMismatch if the dimensions disagree.
double lorentz_product(const BilinearForm& g, const Vec& u, const Vec& v);
double lorentz_product(const Mat& g, const Vec& u, const Vec& v);

/// The standard Minkowski product <u,v> = u_t v_t - u_x . v_x.
double minkowski_product(const Vec& u, const Vec& v);

enum class CausalCharacter { Timelike, Null, Spacelike, Zero };

const char* to_string(CausalCharacter c);

/// Default classification tolerance 1e-10 (1 + |v|^2).
double default_classify_tol(const Vec& v);

CausalCharacter classify(const BilinearForm& g, const Vec& v, std::optional<double> tol = std::nullopt);
CausalCharacter classify(const Mat& g, const Vec& v, std::optional<double> tol = std::nullopt);

/// sqrt(|g(v,v)|)
double lorentz_norm(const BilinearForm& g, const Vec& v);
double lorentz_norm(const Mat& g, const Vec& v);
double minkowski_norm(const Vec& v);

/// Cone-widened comparison product g^h(v,w) = <v,w> + 4 L h^alpha v_t w_t.
/// alpha = 1 is the Lipschitz case; alpha < 1 the Hoelder variant.
BilinearForm widened_metric(Eigen::Index n, double lipschitz_L, double h, double alpha = 1.0);

/// Symmetric-matrix operator norm, i.e. sup over unit u, v of |u^T M v|.
double operator_norm_sym(const Mat& m);

}  // namespace lipcausal
