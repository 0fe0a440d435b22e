#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpnorm/cp_map.hpp"
#include "cpnorm/random.hpp"

namespace cpnorm {

enum class MapKind { Generic, PositivelyImproving, DiagonalFromMatrix, Identity, Depolarizing };

inline std::string to_string(MapKind k) {
  switch (k) {
    case MapKind::Generic: return "generic";
    case MapKind::PositivelyImproving: return "positively_improving";
    case MapKind::DiagonalFromMatrix: return "diagonal_from_matrix";
    case MapKind::Identity: return "identity";
    case MapKind::Depolarizing: return "depolarizing";
  }
  return "unknown";
}

inline MapKind parse_map_kind(const std::string& s) {
  for (MapKind k : {MapKind::Generic, MapKind::PositivelyImproving, MapKind::DiagonalFromMatrix, MapKind::Identity,
                    MapKind::Depolarizing})
    if (to_string(k) == s) return k;
  throw Error(ErrorCode::InvalidInput, "unknown map kind '" + s + "'");
}

/// Kraus operators of a minimal Kraus form, from the eigendecomposition of
/// the Choi-type Gram matrix sum_i vec(V_i) vec(V_i)^H. At most n*m operators.
inline std::vector<Eigen::MatrixXcd> canonical_kraus(const std::vector<Eigen::MatrixXcd>& kraus) {
  const Index m = kraus.front().rows();
  const Index n = kraus.front().cols();
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(n * m, n * m);
  for (const auto& v : kraus) {
    const Eigen::VectorXcd vec = Eigen::Map<const Eigen::VectorXcd>(v.data(), n * m);
    gram.noalias() += vec * vec.adjoint();
  }
  const EigDecomp eig = eig_decompose(HermitianMatrix::hermitian_part(gram));
  std::vector<Eigen::MatrixXcd> out;
  for (Index i = 0; i < eig.dim(); ++i) {
    if (!(eig.values(i) > 1e-12 * eig.largest())) break;
    Eigen::VectorXcd col = std::sqrt(eig.values(i)) * eig.vectors.col(i);
    out.emplace_back(Eigen::Map<const Eigen::MatrixXcd>(col.data(), m, n));
  }
  return out;
}

/// Seeded random map of shape m x n. Generic maps have k complex Gaussian
/// Kraus operators of variance 1/(k n); positively improving maps add
/// eps tr(A) I_m with eps = 1/(4n) and are reduced to canonical Kraus form.
inline CPMap generate_map(Index n, Index m, Index k, std::uint64_t seed, MapKind kind) {
  if (n < 1 || m < 1) throw Error(ErrorCode::InvalidInput, "dimensions must be >= 1");
  switch (kind) {
    case MapKind::Identity:
      if (n != m) throw Error(ErrorCode::InvalidInput, "identity map needs n == m");
      return CPMap::identity(n);
    case MapKind::Depolarizing:
      if (n != m) throw Error(ErrorCode::InvalidInput, "depolarizing map needs n == m");
      return CPMap::depolarizing(n);
    case MapKind::DiagonalFromMatrix:
      throw Error(ErrorCode::InvalidInput, "diagonal_from_matrix maps are built from a matrix file");
    case MapKind::Generic:
    case MapKind::PositivelyImproving:
      break;
  }
  if (k < 1 || k > n * m)
    throw Error(ErrorCode::InvalidInput, "need 1 <= k <= n*m (k=" + std::to_string(k) + ")");
  Rng rng(derive_seed(seed, stream::kGenerate));
  const double scale = 1.0 / std::sqrt(static_cast<double>(k * n));
  std::vector<Eigen::MatrixXcd> kraus;
  for (Index i = 0; i < k; ++i) kraus.push_back(scale * complex_gaussian(m, n, rng));
  if (kind == MapKind::PositivelyImproving) {
    const double eps = 0.25 / static_cast<double>(n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) {
        Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(m, n);
        v(i, j) = std::sqrt(eps);
        kraus.push_back(std::move(v));
      }
    kraus = canonical_kraus(kraus);
  }
  return CPMap(std::move(kraus));
}

}  // namespace cpnorm
