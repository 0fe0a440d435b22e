#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace cpnorm {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Sub-seed for trial `index` of the sampling stream `stream` under a root seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return mix_seed(mix_seed(mix_seed(seed) ^ stream) ^ index);
}

// Named streams so that modules never share sub-seeds.
namespace stream {
inline constexpr std::uint64_t kFullyIndecomposable = 0x1001;
inline constexpr std::uint64_t kPositivelyImproving = 0x1002;
inline constexpr std::uint64_t kDiameter = 0x2001;
inline constexpr std::uint64_t kDiameterAdjoint = 0x2002;
inline constexpr std::uint64_t kPowerStart = 0x3001;
inline constexpr std::uint64_t kOracle = 0x4001;
inline constexpr std::uint64_t kGenerate = 0x5001;
}  // namespace stream

/// Complex standard normal: real and imaginary parts N(0, 1/2), so E|z|^2 = 1.
inline std::complex<double> complex_normal(Rng& rng) {
  std::normal_distribution<double> dist(0.0, std::sqrt(0.5));
  const double re = dist(rng);
  const double im = dist(rng);
  return {re, im};
}

inline Eigen::MatrixXcd complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXcd g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = complex_normal(rng);
  return g;
}

/// Haar-ish random isometry (n x r) from the QR factorization of a Gaussian matrix.
inline Eigen::MatrixXcd random_isometry(Eigen::Index n, Eigen::Index r, Rng& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(complex_gaussian(n, r, rng));
  return qr.householderQ() * Eigen::MatrixXcd::Identity(n, r);
}

inline Eigen::VectorXcd random_unit_vector(Eigen::Index n, Rng& rng) {
  Eigen::VectorXcd x = complex_gaussian(n, 1, rng);
  return x / x.norm();
}

}  // namespace cpnorm
