#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cpnorm/hermitian.hpp"
#include "cpnorm/schatten.hpp"

namespace cpnorm {

/// Completely positive map in Kraus form, A -> sum_i V_i A V_i^H with V_i of shape m x n.
class CPMap {
 public:
  explicit CPMap(std::vector<Eigen::MatrixXcd> kraus) : kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw Error(ErrorCode::InvalidInput, "a CP map needs at least one Kraus operator");
    const Index m = kraus_.front().rows();
    const Index n = kraus_.front().cols();
    if (m < 1 || n < 1) throw Error(ErrorCode::InvalidInput, "Kraus operators must be non-empty");
    bool any_nonzero = false;
    for (std::size_t i = 0; i < kraus_.size(); ++i) {
      const auto& v = kraus_[i];
      if (v.rows() != m || v.cols() != n)
        throw Error(ErrorCode::InvalidInput, "Kraus operator " + std::to_string(i) + " has shape " +
                                                 std::to_string(v.rows()) + "x" + std::to_string(v.cols()) +
                                                 ", expected " + std::to_string(m) + "x" + std::to_string(n));
      if (!v.allFinite())
        throw Error(ErrorCode::InvalidInput, "Kraus operator " + std::to_string(i) + " has non-finite entries");
      any_nonzero = any_nonzero || v.cwiseAbs().maxCoeff() > 0.0;
    }
    if (!any_nonzero) throw Error(ErrorCode::InvalidInput, "all Kraus operators are zero");
    if (static_cast<Index>(kraus_.size()) > n * m)
      warnings_.push_back("Kraus list has " + std::to_string(kraus_.size()) + " operators, more than n*m = " +
                          std::to_string(n * m));
  }

  static CPMap identity(Index n) { return CPMap({Eigen::MatrixXcd::Identity(n, n)}); }

  /// Kraus operators e_i e_j^H / sqrt(n); maps A to tr(A) I / n.
  static CPMap depolarizing(Index n) {
    std::vector<Eigen::MatrixXcd> kraus;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(n, n);
        v(i, j) = 1.0 / std::sqrt(static_cast<double>(n));
        kraus.push_back(std::move(v));
      }
    return CPMap(std::move(kraus));
  }

  /// Embedding of a nonnegative m x n matrix: Kraus sqrt(a_ij) e_i e_j^H, so
  /// that the map sends diag(x) to diag(a x).
  static CPMap from_nonnegative_matrix(const Eigen::MatrixXd& a) {
    if (a.size() == 0) throw Error(ErrorCode::InvalidInput, "empty matrix");
    if (!a.allFinite() || (a.array() < 0.0).any())
      throw Error(ErrorCode::InvalidInput, "matrix entries must be finite and nonnegative");
    std::vector<Eigen::MatrixXcd> kraus;
    for (Index i = 0; i < a.rows(); ++i)
      for (Index j = 0; j < a.cols(); ++j)
        if (a(i, j) > 0.0) {
          Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(a.rows(), a.cols());
          v(i, j) = std::sqrt(a(i, j));
          kraus.push_back(std::move(v));
        }
    if (kraus.empty()) throw Error(ErrorCode::InvalidInput, "matrix is identically zero");
    return CPMap(std::move(kraus));
  }

  Index input_dim() const { return kraus_.front().cols(); }
  Index output_dim() const { return kraus_.front().rows(); }
  std::size_t kraus_count() const { return kraus_.size(); }
  const std::vector<Eigen::MatrixXcd>& kraus() const { return kraus_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// The adjoint map B -> sum_i V_i^H B V_i, itself CP with Kraus operators V_i^H.
  CPMap adjoint() const {
    std::vector<Eigen::MatrixXcd> adj;
    adj.reserve(kraus_.size());
    for (const auto& v : kraus_) adj.push_back(v.adjoint());
    return CPMap(std::move(adj));
  }

 private:
  std::vector<Eigen::MatrixXcd> kraus_;
  std::vector<std::string> warnings_;
};

inline HermitianMatrix apply(const CPMap& phi, const HermitianMatrix& a) {
  if (a.dim() != phi.input_dim())
    throw Error(ErrorCode::DimMismatch, "map input dimension " + std::to_string(phi.input_dim()) +
                                            ", argument dimension " + std::to_string(a.dim()));
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(phi.output_dim(), phi.output_dim());
  for (const auto& v : phi.kraus()) out.noalias() += v * a.matrix() * v.adjoint();
  return HermitianMatrix::hermitian_part(out);
}

inline HermitianMatrix adjoint_apply(const CPMap& phi, const HermitianMatrix& b) {
  if (b.dim() != phi.output_dim())
    throw Error(ErrorCode::DimMismatch, "map output dimension " + std::to_string(phi.output_dim()) +
                                            ", argument dimension " + std::to_string(b.dim()));
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(phi.input_dim(), phi.input_dim());
  for (const auto& v : phi.kraus()) out.noalias() += v.adjoint() * b.matrix() * v;
  return HermitianMatrix::hermitian_part(out);
}

/// f(A) = |Phi(A)|_{S_q} / |A|_{S_p}.
inline double objective(const CPMap& phi, const HermitianMatrix& a, const SchattenExponent& p,
                        const SchattenExponent& q) {
  const double denom = schatten_norm(a, p);
  if (denom == 0.0) throw Error(ErrorCode::ZeroInput, "objective of the zero matrix");
  return schatten_norm(apply(phi, a), q) / denom;
}

struct StructuralVerdict {
  enum class Property { FullyIndecomposable, PositivelyImproving };
  enum class Verdict { Certified, ProbablyTrue, CounterexampleFound };

  Property property;
  Verdict verdict;
  int trials = 0;
  std::optional<HermitianMatrix> witness;
  /// FullyIndecomposable: smallest observed rank gain. PositivelyImproving:
  /// smallest observed lambda_min(Phi(x x^H)) over unit x.
  double margin = 0.0;

  bool counterexample() const { return verdict == Verdict::CounterexampleFound; }
};

inline std::string to_string(StructuralVerdict::Property p) {
  return p == StructuralVerdict::Property::FullyIndecomposable ? "FullyIndecomposable" : "PositivelyImproving";
}

inline std::string to_string(StructuralVerdict::Verdict v) {
  switch (v) {
    case StructuralVerdict::Verdict::Certified: return "Certified";
    case StructuralVerdict::Verdict::ProbablyTrue: return "ProbablyTrue";
    case StructuralVerdict::Verdict::CounterexampleFound: return "CounterexampleFound";
  }
  return "Unknown";
}

inline constexpr int kDefaultRankTrials = 64;
inline constexpr int kDefaultImprovingTrials = 256;

namespace detail {

// All r-subsets of {0..n-1}, capped.
inline std::vector<std::vector<Index>> coordinate_subsets(Index n, Index r, std::size_t cap) {
  std::vector<std::vector<Index>> out;
  std::vector<bool> mask(static_cast<std::size_t>(n), false);
  std::fill(mask.begin(), mask.begin() + r, true);
  do {
    std::vector<Index> s;
    for (Index i = 0; i < n; ++i)
      if (mask[static_cast<std::size_t>(i)]) s.push_back(i);
    out.push_back(std::move(s));
    if (out.size() >= cap) break;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

}  // namespace detail

/// Sampled test that Phi^* Phi strictly raises the rank of every singular
/// nonzero PSD input. Probes coordinate projectors of each rank r < n plus
/// `trials` random rank-r PSD matrices per rank.
inline StructuralVerdict check_fully_indecomposable(const CPMap& phi, int trials = kDefaultRankTrials,
                                                    std::uint64_t seed = 0, double tol = kRankTol) {
  StructuralVerdict out{StructuralVerdict::Property::FullyIndecomposable,
                        StructuralVerdict::Verdict::ProbablyTrue, 0, std::nullopt, 0.0};
  const Index n = phi.input_dim();
  double min_gain = static_cast<double>(n);
  auto probe = [&](const HermitianMatrix& a, Index r) {
    ++out.trials;
    const int image_rank = relative_rank(adjoint_apply(phi, apply(phi, a)), tol);
    const double gain = static_cast<double>(image_rank - r);
    min_gain = std::min(min_gain, gain);
    if (image_rank <= r && !out.witness) {
      out.verdict = StructuralVerdict::Verdict::CounterexampleFound;
      out.witness = a;
    }
  };
  for (Index r = 1; r < n; ++r) {
    for (const auto& subset : detail::coordinate_subsets(n, r, static_cast<std::size_t>(std::max(trials, 1)))) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
      for (Index i : subset) d(i) = 1.0;
      probe(HermitianMatrix::diagonal(d), r);
    }
    for (int t = 0; t < trials; ++t) {
      Rng rng(derive_seed(seed, stream::kFullyIndecomposable, static_cast<std::uint64_t>(r * trials + t)));
      probe(random_psd(n, r, rng), r);
    }
  }
  out.margin = n > 1 ? min_gain : 0.0;
  return out;
}

/// Sampled test that Phi sends every nonzero PSD input to a positive definite
/// output. Rank-one inputs suffice since A >= lambda_1 x_1 x_1^H. The worst
/// sample is refined by alternating minimization of <x x^H, Phi^*(u u^H)>
/// over unit x and u, which equals min_x lambda_min(Phi(x x^H)) at its optimum.
inline StructuralVerdict check_positively_improving(const CPMap& phi, int trials = kDefaultImprovingTrials,
                                                    std::uint64_t seed = 0, double tol = kRankTol) {
  StructuralVerdict out{StructuralVerdict::Property::PositivelyImproving,
                        StructuralVerdict::Verdict::ProbablyTrue, 0, std::nullopt, 0.0};
  const Index n = phi.input_dim();
  const double scale = lambda_max(apply(phi, HermitianMatrix::identity(n)));
  const CPMap adj = phi.adjoint();

  Eigen::VectorXcd worst_x;
  double worst = std::numeric_limits<double>::infinity();
  auto probe = [&](const Eigen::VectorXcd& x) {
    ++out.trials;
    const double value = lambda_min(apply(phi, HermitianMatrix::outer(x)));
    if (value < worst) {
      worst = value;
      worst_x = x;
    }
  };
  for (Index i = 0; i < n; ++i) probe(Eigen::VectorXcd::Unit(n, i));
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, stream::kPositivelyImproving, static_cast<std::uint64_t>(t)));
    probe(random_unit_vector(n, rng));
  }

  // Local refinement.
  Eigen::VectorXcd x = worst_x;
  double value = worst;
  for (int it = 0; it < 2000 && value > tol * scale; ++it) {
    const EigDecomp out_eig = eig_decompose(apply(phi, HermitianMatrix::outer(x)));
    const Eigen::VectorXcd u = out_eig.vectors.col(out_eig.dim() - 1);
    const EigDecomp in_eig = eig_decompose(apply(adj, HermitianMatrix::outer(u)));
    x = in_eig.vectors.col(in_eig.dim() - 1);
    const double next = lambda_min(apply(phi, HermitianMatrix::outer(x)));
    ++out.trials;
    if (!(next < value * (1.0 - 1e-12))) {
      value = std::min(value, next);
      break;
    }
    value = next;
  }
  if (value < worst) {
    worst = value;
    worst_x = x;
  }

  out.margin = std::max(worst, 0.0);
  if (worst <= tol * scale) {
    out.verdict = StructuralVerdict::Verdict::CounterexampleFound;
    out.witness = HermitianMatrix::outer(worst_x);
  }
  return out;
}

}  // namespace cpnorm
