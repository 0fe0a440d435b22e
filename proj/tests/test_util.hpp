#pragma once

#include <cstdint>

#include <gtest/gtest.h>

#include "cpnorm/cpnorm.hpp"

namespace cpnorm::testing {

inline double max_abs_diff(const HermitianMatrix& a, const HermitianMatrix& b) {
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

inline ::testing::AssertionResult matrices_near(const HermitianMatrix& a, const HermitianMatrix& b, double tol) {
  if (a.dim() != b.dim()) return ::testing::AssertionFailure() << "dimension " << a.dim() << " vs " << b.dim();
  const double d = max_abs_diff(a, b);
  if (d <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "max entry difference " << d << " > " << tol << "\n"
                                       << a.matrix() << "\nvs\n"
                                       << b.matrix();
}

/// Random CP map with complex Gaussian Kraus operators.
inline CPMap random_map(Index n, Index m, Index k, std::uint64_t seed) {
  return generate_map(n, m, k, seed, MapKind::Generic);
}

}  // namespace cpnorm::testing
