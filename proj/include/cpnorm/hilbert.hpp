#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

#include "cpnorm/cp_map.hpp"
#include "cpnorm/hermitian.hpp"

namespace cpnorm {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
/// Hilbert distances beyond this are treated as infinite.
inline constexpr double kDistanceOverflow = 1e6;

struct HilbertDistance {
  double value = 0.0;
  bool same_part = true;

  bool finite() const { return std::isfinite(value); }
};

namespace detail {

inline Eigen::MatrixXcd range_basis(const EigDecomp& eig, int rank) {
  return eig.vectors.leftCols(rank);
}

// Generalized eigenvalues of the PD pencil (a, b), ascending.
inline Eigen::VectorXd pencil_eigenvalues(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::LLT<Eigen::MatrixXcd> llt(b);
  const Eigen::MatrixXcd l_inv_a =
      llt.matrixL().solve(a);
  const Eigen::MatrixXcd c = llt.matrixL().solve(l_inv_a.adjoint()).adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (c + c.adjoint()), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

inline HermitianMatrix normalized(const HermitianMatrix& a) {
  const double top = a.matrix().cwiseAbs().maxCoeff();
  return top > 0.0 ? a / top : a;
}

}  // namespace detail

/// Equivalence A ~ B (cB <= A <= CB for some c, C > 0): for PSD matrices this
/// holds exactly when the ranges agree, checked via ranks of A, B and A + B.
inline bool same_part(const HermitianMatrix& a, const HermitianMatrix& b, double tol = kRankTol) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimMismatch, "same_part of different dimensions");
  const HermitianMatrix an = detail::normalized(a);
  const HermitianMatrix bn = detail::normalized(b);
  const int ra = relative_rank(an, tol);
  const int rb = relative_rank(bn, tol);
  if (ra != rb) return false;
  if (ra == 0) return true;
  return relative_rank(an + bn, tol) == ra;
}

/// M(A/B) = inf{lambda > 0 : A <= lambda B}; +inf when range(A) is not
/// contained in range(B).
inline double m_ratio(const HermitianMatrix& a, const HermitianMatrix& b, double tol = kRankTol) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimMismatch, "m_ratio of different dimensions");
  const EigDecomp eb = eig_decompose(b);
  const int rb = relative_rank(eb.values, tol);
  if (rb == 0) throw Error(ErrorCode::ZeroInput, "m_ratio with zero denominator");
  const double a_scale = a.matrix().cwiseAbs().maxCoeff();
  if (a_scale == 0.0) return 0.0;

  const Eigen::MatrixXcd q = detail::range_basis(eb, rb);
  if (rb < b.dim()) {
    const Eigen::MatrixXcd q_perp = eb.vectors.rightCols(b.dim() - rb);
    const HermitianMatrix outside = HermitianMatrix::hermitian_part(q_perp.adjoint() * a.matrix() * q_perp);
    if (lambda_max(outside) > tol * lambda_max(a)) return kInfinity;
  }
  // On range(B) the compressed B is diagonal with the positive eigenvalues.
  const Eigen::VectorXd inv_sqrt = eb.values.head(rb).cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXcd ac = q.adjoint() * a.matrix() * q;
  const Eigen::MatrixXcd scaled = inv_sqrt.cast<Complex>().asDiagonal() * ac * inv_sqrt.cast<Complex>().asDiagonal();
  return lambda_max(HermitianMatrix::hermitian_part(scaled));
}

/// Hilbert projective metric ln(M(A/B) M(B/A)) on the PSD cone. Singular
/// same-part pairs are handled by compressing to their common range.
inline HilbertDistance hilbert_distance(const HermitianMatrix& a, const HermitianMatrix& b,
                                        double tol = kRankTol) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimMismatch, "hilbert_distance of different dimensions");
  const bool a_zero = a.is_zero();
  const bool b_zero = b.is_zero();
  if (a_zero && b_zero) return {0.0, true};
  if (a_zero || b_zero) return {kInfinity, false};
  if (!same_part(a, b, tol)) return {kInfinity, false};

  const HermitianMatrix an = detail::normalized(a);
  const HermitianMatrix bn = detail::normalized(b);
  const EigDecomp sum = eig_decompose(an + bn);
  const int r = relative_rank(sum.values, tol);
  const Eigen::MatrixXcd q = detail::range_basis(sum, r);
  const Eigen::MatrixXcd ac = q.adjoint() * an.matrix() * q;
  const Eigen::MatrixXcd bc = q.adjoint() * bn.matrix() * q;
  const Eigen::VectorXd w = detail::pencil_eigenvalues(0.5 * (ac + ac.adjoint()), 0.5 * (bc + bc.adjoint()));
  const double lo = w(0);
  const double hi = w(w.size() - 1);
  if (!(lo > 0.0)) return {kInfinity, true};
  return {std::max(0.0, std::log(hi) - std::log(lo)), true};
}

/// Monte Carlo lower bound on the projective diameter of a CP map, and the
/// Birkhoff contraction ratios derived from it.
struct ContractionReport {
  double diameter_lower_bound = 0.0;
  double kappa_phi_lower = 0.0;
  /// Present only when the positively-improving check passed.
  std::optional<double> diameter_upper_bound;
  double kappa_phi_upper = 1.0;
  /// Filled by assess_contraction.
  std::optional<double> kappa_s_upper;
  bool kappa_s_certified = false;
  double kappa_s_heuristic = 0.0;
  double kappa_adjoint_lower = 0.0;
  double kappa_adjoint_upper = 1.0;
  int sample_count = 0;
};

inline constexpr int kDefaultDiameterSamples = 64;

namespace detail {

// PD matrix with log-spectrum spread s on a random eigenbasis of dimension r.
inline Eigen::MatrixXcd spread_block(Index r, double spread, Rng& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::VectorXd d(r);
  for (Index i = 0; i < r; ++i) d(i) = std::exp(spread * std::clamp(z(rng), -3.0, 3.0));
  const Eigen::MatrixXcd u = random_isometry(r, r, rng);
  return u * d.cast<Complex>().asDiagonal() * u.adjoint();
}

}  // namespace detail

/// Same-part sample pair i of the diameter search: even i are full rank,
/// odd i share a random range of rank < n. Log-spectrum spread grows with i.
inline std::pair<HermitianMatrix, HermitianMatrix> same_part_pair(Index n, int i, int samples, std::uint64_t seed,
                                                                   std::uint64_t stream_id) {
  Rng rng(derive_seed(seed, stream_id, static_cast<std::uint64_t>(i)));
  const double spread = 3.0 * static_cast<double>(i + 1) / static_cast<double>(std::max(samples, 1));
  Index r = n;
  if (i % 2 == 1 && n > 1) r = 1 + static_cast<Index>((i / 2) % (n - 1));
  const Eigen::MatrixXcd w = random_isometry(n, r, rng);
  const Eigen::MatrixXcd x = detail::spread_block(r, spread, rng);
  const Eigen::MatrixXcd y = detail::spread_block(r, spread, rng);
  return {HermitianMatrix::hermitian_part(w * x * w.adjoint()), HermitianMatrix::hermitian_part(w * y * w.adjoint())};
}

/// Lower bound on sup d(Phi(A), Phi(B)) over same-part pairs. When Phi passes
/// the positively-improving check, also an upper bound 2 ln(2 C / c) with
/// C = lambda_max(Phi(I)) and c the smallest sampled lambda_min(Phi(x x^H)),
/// where the factor 2 inside the log is a safety margin on the sampled c.
inline ContractionReport estimate_diameter(const CPMap& phi, int samples = kDefaultDiameterSamples,
                                           std::uint64_t seed = 0,
                                           int improving_trials = kDefaultImprovingTrials,
                                           std::uint64_t stream_id = stream::kDiameter) {
  if (samples < 1) throw Error(ErrorCode::InvalidInput, "estimate_diameter needs samples >= 1");
  ContractionReport report;
  const Index n = phi.input_dim();
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    const auto [a, b] = same_part_pair(n, i, samples, seed, stream_id);
    const HilbertDistance d = hilbert_distance(apply(phi, a), apply(phi, b));
    ++report.sample_count;
    if (!d.finite() || d.value > kDistanceOverflow) {
      best = kInfinity;
      break;
    }
    best = std::max(best, d.value);
  }
  report.diameter_lower_bound = best;
  report.kappa_phi_lower = std::isfinite(best) ? std::tanh(best / 4.0) : 1.0;

  const StructuralVerdict improving =
      check_positively_improving(phi, improving_trials, derive_seed(seed, stream_id, 0xffff));
  if (!improving.counterexample() && improving.margin > 0.0) {
    const double top = lambda_max(apply(phi, HermitianMatrix::identity(n)));
    const double upper = 2.0 * std::log(2.0 * top / improving.margin);
    if (std::isfinite(upper) && upper >= best) {
      report.diameter_upper_bound = upper;
      report.kappa_phi_upper = std::tanh(upper / 4.0);
    }
  }
  return report;
}

struct ContractionBound {
  double value = 1.0;
  /// value < 1 and it is a rigorous upper bound on kappa(S_Phi).
  bool certified = false;
  /// Both inner exponents q - 1 and 1/(p - 1) lie in (0, 1], where the matrix
  /// power X -> X^t is Lipschitz with constant t in the Hilbert metric.
  bool exponents_in_range = false;
};

/// kappa(S_Phi) <= kappa(Phi^*) kappa(Phi) (q - 1)/(p - 1).
inline ContractionBound contraction_bound_s_phi(double kappa_phi, double kappa_phi_star, const SchattenExponent& p,
                                              const SchattenExponent& q, bool kappas_are_upper_bounds = false) {
  if (!(kappa_phi >= 0.0 && kappa_phi <= 1.0) || !(kappa_phi_star >= 0.0 && kappa_phi_star <= 1.0))
    throw Error(ErrorCode::InvalidInput, "contraction ratios must lie in [0, 1]");
  ContractionBound out;
  out.value = kappa_phi * kappa_phi_star * (q.value() - 1.0) / (p.value() - 1.0);
  out.exponents_in_range = q.value() <= 2.0 && p.value() >= 2.0;
  // kappa <= 1 holds for every CP map, so unit ratios are always upper bounds.
  const bool upper = kappas_are_upper_bounds || (kappa_phi >= 1.0 && kappa_phi_star >= 1.0);
  out.certified = upper && out.exponents_in_range && out.value < 1.0;
  return out;
}

/// Diameter estimates for Phi and Phi^* combined into the S_Phi bound.
inline ContractionReport assess_contraction(const CPMap& phi, const SchattenExponent& p, const SchattenExponent& q,
                                            int samples = kDefaultDiameterSamples, std::uint64_t seed = 0) {
  ContractionReport report = estimate_diameter(phi, samples, seed, kDefaultImprovingTrials, stream::kDiameter);
  const ContractionReport adjoint =
      estimate_diameter(phi.adjoint(), samples, seed, kDefaultImprovingTrials, stream::kDiameterAdjoint);
  report.kappa_adjoint_lower = adjoint.kappa_phi_lower;
  report.kappa_adjoint_upper = adjoint.kappa_phi_upper;
  const ContractionBound certified =
      contraction_bound_s_phi(report.kappa_phi_upper, adjoint.kappa_phi_upper, p, q, true);
  report.kappa_s_upper = certified.value;
  report.kappa_s_certified = certified.certified;
  report.kappa_s_heuristic =
      contraction_bound_s_phi(report.kappa_phi_lower, adjoint.kappa_phi_lower, p, q).value;
  return report;
}

}  // namespace cpnorm
