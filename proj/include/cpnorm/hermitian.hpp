#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpnorm/error.hpp"
#include "cpnorm/random.hpp"

namespace cpnorm {

using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Relative rank / PSD threshold shared by every module.
inline constexpr double kRankTol = 1e-10;
/// Inputs whose anti-Hermitian part exceeds this fraction (Frobenius) are rejected.
inline constexpr double kHermitianTol = 1e-8;
/// Eigenvalues below this fraction of the spectral radius are rounding noise
/// of the eigensolver (a few ulps per dimension) and are treated as zero
/// before fractional powers amplify them.
inline constexpr double kSpectralFloor = 1e-14;

/// Square complex matrix that is Hermitian by construction.
class HermitianMatrix {
 public:
  HermitianMatrix() : HermitianMatrix(identity(1)) {}

  /// Validates and symmetrizes `m`. Throws InvalidInput for non-square,
  /// empty, non-finite or visibly non-Hermitian input.
  explicit HermitianMatrix(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols())
      throw Error(ErrorCode::InvalidInput, "matrix is not square (" + std::to_string(m.rows()) +
                                               "x" + std::to_string(m.cols()) + ")");
    if (m.rows() < 1) throw Error(ErrorCode::InvalidInput, "matrix dimension must be >= 1");
    if (!m.allFinite()) throw Error(ErrorCode::InvalidInput, "matrix has non-finite entries");
    const double deviation = (m - m.adjoint()).norm();
    if (deviation > kHermitianTol * m.norm())
      throw Error(ErrorCode::InvalidInput,
                  "matrix is not Hermitian (|M - M^H|_F = " + std::to_string(deviation) + ")");
    data_ = 0.5 * (m + m.adjoint());
  }

  explicit HermitianMatrix(const Eigen::MatrixXd& m) : HermitianMatrix(Eigen::MatrixXcd(m.cast<Complex>())) {}

  /// Hermitian part (M + M^H)/2 without validation. For results of
  /// operations that preserve Hermiticity up to rounding.
  static HermitianMatrix hermitian_part(const Eigen::MatrixXcd& m) {
    HermitianMatrix h{Unchecked{}};
    h.data_ = 0.5 * (m + m.adjoint());
    return h;
  }

  static HermitianMatrix identity(Index n) {
    return hermitian_part(Eigen::MatrixXcd::Identity(n, n));
  }
  static HermitianMatrix zero(Index n) { return hermitian_part(Eigen::MatrixXcd::Zero(n, n)); }
  static HermitianMatrix diagonal(const Eigen::VectorXd& d) {
    return hermitian_part(d.cast<Complex>().asDiagonal().toDenseMatrix());
  }
  static HermitianMatrix diagonal(std::initializer_list<double> d) {
    return diagonal(Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(d.begin(), static_cast<Index>(d.size()))));
  }
  /// Rank-one projector x x^H (x is not normalized).
  static HermitianMatrix outer(const Eigen::VectorXcd& x) { return hermitian_part(x * x.adjoint()); }

  Index dim() const { return data_.rows(); }
  const Eigen::MatrixXcd& matrix() const { return data_; }
  Complex operator()(Index i, Index j) const { return data_(i, j); }

  double frobenius_norm() const { return data_.norm(); }
  double trace() const { return data_.trace().real(); }
  bool is_zero() const { return data_.cwiseAbs().maxCoeff() == 0.0; }

  HermitianMatrix& operator+=(const HermitianMatrix& o) {
    check_same_dim(o);
    data_ += o.data_;
    return *this;
  }
  HermitianMatrix& operator-=(const HermitianMatrix& o) {
    check_same_dim(o);
    data_ -= o.data_;
    return *this;
  }
  HermitianMatrix& operator*=(double s) {
    data_ *= s;
    return *this;
  }

  friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
  friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
  friend HermitianMatrix operator-(HermitianMatrix a) { return a *= -1.0; }
  friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }
  friend HermitianMatrix operator*(HermitianMatrix a, double s) { return a *= s; }
  friend HermitianMatrix operator/(HermitianMatrix a, double s) { return a *= 1.0 / s; }

  bool operator==(const HermitianMatrix& o) const {
    return dim() == o.dim() && data_ == o.data_;
  }

 private:
  struct Unchecked {};
  explicit HermitianMatrix(Unchecked) {}

  void check_same_dim(const HermitianMatrix& o) const {
    if (o.dim() != dim())
      throw Error(ErrorCode::DimMismatch,
                  "dimensions " + std::to_string(dim()) + " and " + std::to_string(o.dim()));
  }

  Eigen::MatrixXcd data_;
};

/// Frobenius inner product Re tr(A^H B) (real for Hermitian pairs).
inline double inner(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimMismatch, "inner product of different dimensions");
  return (a.matrix().adjoint() * b.matrix()).trace().real();
}

inline double frobenius_distance(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimMismatch, "distance between different dimensions");
  return (a.matrix() - b.matrix()).norm();
}

/// Eigenvalues in descending order with orthonormal eigenvector columns.
struct EigDecomp {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;

  Index dim() const { return values.size(); }
  double largest() const { return values(0); }
  double smallest() const { return values(values.size() - 1); }
  double max_abs() const { return std::max(std::abs(largest()), std::abs(smallest())); }

  /// Q f(Lambda) Q^H.
  HermitianMatrix apply(const std::function<double(double)>& f) const {
    Eigen::VectorXd mapped = values.unaryExpr(f);
    return HermitianMatrix::hermitian_part(vectors * mapped.cast<Complex>().asDiagonal() *
                                           vectors.adjoint());
  }
  HermitianMatrix reconstruct() const {
    return apply([](double x) { return x; });
  }
};

/// Dense Hermitian eigendecomposition (Eigen's self-adjoint solver) with a
/// canonical form: descending eigenvalues, and each eigenvector's first
/// component above 1e-12 in modulus rotated to be real positive.
inline EigDecomp eig_decompose(const HermitianMatrix& a) {
  if (!a.matrix().allFinite()) throw Error(ErrorCode::InvalidInput, "matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::InvalidInput, "eigensolver did not converge");
  const Index n = a.dim();
  EigDecomp out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const Complex c = out.vectors(i, j);
      if (std::abs(c) > 1e-12) {
        out.vectors.col(j) *= std::conj(c) / std::abs(c);
        break;
      }
    }
  }
  return out;
}

inline Eigen::VectorXd eigenvalues(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().reverse();
}

inline double lambda_min(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

inline double lambda_max(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.matrix(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(a.dim() - 1);
}

/// Count of eigenvalues with |lambda_i| > tol * max(1, |lambda_1|).
inline int numerical_rank(const Eigen::VectorXd& values, double tol = kRankTol) {
  if (values.size() == 0) return 0;
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  int rank = 0;
  for (Index i = 0; i < values.size(); ++i)
    if (std::abs(values(i)) > tol * scale) ++rank;
  return rank;
}

inline int numerical_rank(const HermitianMatrix& a, double tol = kRankTol) {
  return numerical_rank(eigenvalues(a), tol);
}

/// Rank relative to the largest |eigenvalue| alone (scale invariant); used
/// for cone-geometry decisions where inputs may be arbitrarily scaled.
inline int relative_rank(const Eigen::VectorXd& values, double tol = kRankTol) {
  if (values.size() == 0) return 0;
  const double top = values.cwiseAbs().maxCoeff();
  if (top == 0.0) return 0;
  int rank = 0;
  for (Index i = 0; i < values.size(); ++i)
    if (std::abs(values(i)) > tol * top) ++rank;
  return rank;
}

inline int relative_rank(const HermitianMatrix& a, double tol = kRankTol) {
  return relative_rank(eigenvalues(a), tol);
}

struct PsdClass {
  enum class Kind { PositiveDefinite, PositiveSemidefiniteSingular, Indefinite };
  Kind kind;
  int rank;
};

inline std::string to_string(PsdClass::Kind k) {
  switch (k) {
    case PsdClass::Kind::PositiveDefinite: return "PositiveDefinite";
    case PsdClass::Kind::PositiveSemidefiniteSingular: return "PositiveSemidefiniteSingular";
    case PsdClass::Kind::Indefinite: return "Indefinite";
  }
  return "Unknown";
}

inline PsdClass classify_psd(const HermitianMatrix& a, double tol = kRankTol) {
  const Eigen::VectorXd values = eigenvalues(a);
  const double threshold = tol * std::max(1.0, values.cwiseAbs().maxCoeff());
  const int rank = numerical_rank(values, tol);
  const double smallest = values(values.size() - 1);
  if (smallest < -threshold) return {PsdClass::Kind::Indefinite, rank};
  if (rank == a.dim() && smallest > threshold) return {PsdClass::Kind::PositiveDefinite, rank};
  return {PsdClass::Kind::PositiveSemidefiniteSingular, rank};
}

namespace detail {

/// Eigendecomposition of a matrix required to be PSD: eigenvalues in
/// [-tol * max|lambda|, 0) are clamped to zero, anything lower is NotPsd.
/// Eigenvalues under kSpectralFloor * max|lambda| are zeroed as well.
inline EigDecomp psd_decompose(const HermitianMatrix& a, double tol, const char* what) {
  EigDecomp eig = eig_decompose(a);
  const double threshold = tol * eig.max_abs();
  if (eig.smallest() < -threshold)
    throw Error(ErrorCode::NotPsd, std::string(what) + ": smallest eigenvalue " +
                                       std::to_string(eig.smallest()) + " is negative");
  const double floor = kSpectralFloor * static_cast<double>(eig.dim()) * eig.max_abs();
  for (Index i = 0; i < eig.dim(); ++i)
    if (eig.values(i) < floor) eig.values(i) = 0.0;
  return eig;
}

}  // namespace detail

/// A^t for PSD A via Q Lambda^t Q^H, with 0^t = 0.
inline HermitianMatrix matrix_power(const HermitianMatrix& a, double t, double tol = kRankTol) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw Error(ErrorCode::InvalidInput, "matrix_power exponent must be positive and finite");
  const EigDecomp eig = detail::psd_decompose(a, tol, "matrix_power");
  return eig.apply([t](double x) { return x > 0.0 ? std::pow(x, t) : 0.0; });
}

/// |A| = (A^H A)^{1/2}; for Hermitian A this is Q |Lambda| Q^H.
inline HermitianMatrix abs_matrix(const HermitianMatrix& a) {
  return eig_decompose(a).apply([](double x) { return std::abs(x); });
}

/// A >= B in the Loewner order: lambda_min(A - B) >= -tol.
inline bool loewner_geq(const HermitianMatrix& a, const HermitianMatrix& b, double tol = 1e-9) {
  if (a.dim() != b.dim())
    throw Error(ErrorCode::DimMismatch, "loewner_geq of " + std::to_string(a.dim()) + " and " +
                                            std::to_string(b.dim()));
  return lambda_min(a - b) >= -tol;
}

inline HermitianMatrix random_hermitian(Index n, Rng& rng) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "dimension must be >= 1");
  return HermitianMatrix::hermitian_part(complex_gaussian(n, n, rng));
}

inline HermitianMatrix random_hermitian(Index n, std::uint64_t seed) {
  Rng rng(seed);
  return random_hermitian(n, rng);
}

/// G G^H with G an n x rank complex Gaussian matrix.
inline HermitianMatrix random_psd(Index n, Index rank, Rng& rng) {
  if (n < 1 || rank < 1 || rank > n)
    throw Error(ErrorCode::InvalidInput,
                "random_psd requires 1 <= rank <= n (n=" + std::to_string(n) + ", rank=" + std::to_string(rank) + ")");
  const Eigen::MatrixXcd g = complex_gaussian(n, rank, rng);
  return HermitianMatrix::hermitian_part(g * g.adjoint());
}

inline HermitianMatrix random_psd(Index n, Index rank, std::uint64_t seed) {
  Rng rng(seed);
  return random_psd(n, rank, rng);
}

}  // namespace cpnorm
