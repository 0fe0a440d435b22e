#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "cpnorm/hermitian.hpp"

namespace cpnorm {

/// Exponent p in (1, inf) together with its conjugate p* = p / (p - 1).
class SchattenExponent {
 public:
  explicit SchattenExponent(double p) : p_(p) {
    if (!(p > 1.0) || !std::isfinite(p))
      throw Error(ErrorCode::InvalidExponent,
                  "Schatten exponent must lie in (1, inf), got " + std::to_string(p));
    p_star_ = p / (p - 1.0);
  }

  double value() const { return p_; }
  double conjugate_value() const { return p_star_; }
  SchattenExponent conjugate() const { return SchattenExponent(p_star_); }

  friend bool operator==(const SchattenExponent&, const SchattenExponent&) = default;

 private:
  double p_;
  double p_star_;
};

/// Validated exponent pair (p, p*) for p in (1, inf).
inline SchattenExponent dual_exponent(double p) { return SchattenExponent(p); }

/// l^p norm of a spectrum; p = inf gives max |lambda|.
inline double lp_norm(const Eigen::VectorXd& spectrum, double p) {
  const Eigen::VectorXd mags = spectrum.cwiseAbs();
  const double top = mags.size() ? mags.maxCoeff() : 0.0;
  if (top == 0.0) return 0.0;
  if (std::isinf(p)) return top;
  // Scale by the largest entry so large p does not overflow.
  double sum = 0.0;
  for (Index i = 0; i < mags.size(); ++i) sum += std::pow(mags(i) / top, p);
  return top * std::pow(sum, 1.0 / p);
}

/// (sum_i |lambda_i(A)|^p)^{1/p}; accepts p in [1, inf].
inline double schatten_norm(const HermitianMatrix& a, double p) {
  if (!(p >= 1.0))
    throw Error(ErrorCode::InvalidExponent, "Schatten norm needs p >= 1, got " + std::to_string(p));
  return lp_norm(eigenvalues(a), p);
}

inline double schatten_norm(const HermitianMatrix& a, const SchattenExponent& p) {
  return schatten_norm(a, p.value());
}

/// Duality map on the PSD cone: Q Lambda^{p-1} Q^H normalized to unit S_{p*} norm.
/// It is the gradient of the S_p norm at A.
inline HermitianMatrix duality_map(const HermitianMatrix& a, const SchattenExponent& p,
                                   double tol = kRankTol) {
  const EigDecomp eig = detail::psd_decompose(a, tol, "duality_map");
  if (eig.largest() <= 0.0) throw Error(ErrorCode::ZeroInput, "duality_map of the zero matrix");
  const double top = eig.largest();
  const double e = p.value() - 1.0;
  // Work with the spectrum scaled to max 1; the map is scale invariant.
  Eigen::VectorXd powered(eig.dim());
  for (Index i = 0; i < eig.dim(); ++i) {
    const double x = eig.values(i) / top;
    powered(i) = x > 0.0 ? std::pow(x, e) : 0.0;
  }
  const double norm = lp_norm(powered, p.conjugate_value());
  return HermitianMatrix::hermitian_part(eig.vectors * (powered / norm).cast<Complex>().asDiagonal() *
                                         eig.vectors.adjoint());
}

}  // namespace cpnorm
