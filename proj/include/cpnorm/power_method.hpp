#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cpnorm/cp_map.hpp"
#include "cpnorm/hilbert.hpp"
#include "cpnorm/schatten.hpp"

namespace cpnorm {

struct PowerConfig {
  PowerConfig(SchattenExponent p_, SchattenExponent q_) : p(p_), q(q_) {}
  PowerConfig(double p_, double q_) : p(p_), q(q_) {}

  SchattenExponent p;
  SchattenExponent q;
  double tol_fixed_point = 1e-10;
  double tol_objective = 1e-12;
  int max_iter = 1000;
  /// PSD, nonzero; defaults to I / n^{1/p}.
  std::optional<HermitianMatrix> start;
  /// Budget and seed for the contraction report attached to the result.
  int diagnostic_samples = kDefaultDiameterSamples;
  std::uint64_t seed = 0;
};

struct PowerTrace {
  enum class Status { Converged, MaxIterReached, LeftCone };

  struct Record {
    int k = 0;
    double objective = 0.0;
    /// NaN for k = 0.
    double hilbert_step = std::numeric_limits<double>::quiet_NaN();
    double frobenius_step = std::numeric_limits<double>::quiet_NaN();
    double residual = 0.0;
  };

  std::vector<Record> records;
  Status status = Status::MaxIterReached;
};

inline std::string to_string(PowerTrace::Status s) {
  switch (s) {
    case PowerTrace::Status::Converged: return "Converged";
    case PowerTrace::Status::MaxIterReached: return "MaxIterReached";
    case PowerTrace::Status::LeftCone: return "LeftCone";
  }
  return "Unknown";
}

struct NormResult {
  double norm_estimate = 0.0;
  HermitianMatrix maximizer;
  int iterations = 0;
  PowerTrace trace;
  ContractionReport contraction;
  std::vector<std::string> warnings;

  bool converged() const { return trace.status == PowerTrace::Status::Converged; }
};

namespace detail {

inline void require_nondegenerate(const CPMap& phi, const HermitianMatrix& a, const HermitianMatrix& image) {
  const double bound = lambda_max(apply(phi, HermitianMatrix::identity(phi.input_dim()))) * lambda_max(a);
  if (!(lambda_max(image) > kRankTol * bound))
    throw Error(ErrorCode::DegenerateMap, "the map annihilates the current iterate");
}

}  // namespace detail

/// S_Phi(A) = J_{S_p*}(Phi^* J_{S_q}(Phi(A))); PSD with unit S_p norm.
inline HermitianMatrix s_phi_step(const CPMap& phi, const HermitianMatrix& a, const SchattenExponent& p,
                                  const SchattenExponent& q) {
  const HermitianMatrix image = apply(phi, a);
  detail::require_nondegenerate(phi, a, image);
  const HermitianMatrix pulled = adjoint_apply(phi, duality_map(image, q));
  return duality_map(pulled, p.conjugate());
}

/// |Phi^* J_q(Phi(A)) - f(A) J_p(A)|_F for A of unit S_p norm; zero exactly at
/// critical points of f.
inline double critical_point_residual(const CPMap& phi, const HermitianMatrix& a, const SchattenExponent& p,
                                      const SchattenExponent& q) {
  const double norm = schatten_norm(a, p);
  if (std::abs(norm - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidInput, "critical_point_residual expects unit S_p norm, got " + std::to_string(norm));
  const HermitianMatrix image = apply(phi, a);
  detail::require_nondegenerate(phi, a, image);
  const HermitianMatrix lhs = adjoint_apply(phi, duality_map(image, q));
  const double f = schatten_norm(image, q) / norm;
  return frobenius_distance(lhs, f * duality_map(a, p));
}

namespace detail {

// Re-symmetrize and clamp tiny negative eigenvalues; nullopt if the iterate
// has genuinely left the cone.
inline std::optional<HermitianMatrix> repair_drift(const HermitianMatrix& a) {
  const EigDecomp eig = eig_decompose(a);
  const double floor = -1e-12 * eig.max_abs();
  if (eig.smallest() < floor) return std::nullopt;
  if (eig.smallest() >= 0.0) return a;
  return eig.apply([](double x) { return std::max(x, 0.0); });
}

}  // namespace detail

/// Iterates A_{k+1} = S_Phi(A_k) until both the displacement
/// |A_{k+1} - A_k|_F <= tol_fixed_point and the objective change
/// <= tol_objective hold, or max_iter steps have been taken.
inline NormResult run_power_method(const CPMap& phi, const PowerConfig& config) {
  if (!(config.tol_fixed_point > 0.0) || !(config.tol_objective > 0.0))
    throw Error(ErrorCode::InvalidInput, "tolerances must be positive");
  if (config.max_iter < 1) throw Error(ErrorCode::InvalidInput, "max_iter must be >= 1");
  const Index n = phi.input_dim();
  const SchattenExponent& p = config.p;
  const SchattenExponent& q = config.q;

  HermitianMatrix current = HermitianMatrix::identity(n);
  if (config.start) {
    if (config.start->dim() != n)
      throw Error(ErrorCode::DimMismatch, "start has dimension " + std::to_string(config.start->dim()) +
                                              ", map input dimension is " + std::to_string(n));
    if (classify_psd(*config.start).kind == PsdClass::Kind::Indefinite)
      throw Error(ErrorCode::NotPsd, "start matrix is not positive semidefinite");
    if (config.start->is_zero()) throw Error(ErrorCode::InvalidInput, "start matrix is zero");
    current = *config.start;
  }
  current = current / schatten_norm(current, p);

  NormResult result;
  result.warnings = phi.warnings();
  auto residual_of = [&](const HermitianMatrix& a) { return critical_point_residual(phi, a, p, q); };

  double f_prev = objective(phi, current, p, q);
  result.trace.records.push_back({0, f_prev, std::numeric_limits<double>::quiet_NaN(),
                                  std::numeric_limits<double>::quiet_NaN(), residual_of(current)});
  result.trace.status = PowerTrace::Status::MaxIterReached;

  for (int k = 1; k <= config.max_iter; ++k) {
    const std::optional<HermitianMatrix> next = detail::repair_drift(s_phi_step(phi, current, p, q));
    if (!next) {
      result.trace.status = PowerTrace::Status::LeftCone;
      break;
    }
    const double f = objective(phi, *next, p, q);
    PowerTrace::Record rec;
    rec.k = k;
    rec.objective = f;
    rec.hilbert_step = hilbert_distance(*next, current).value;
    rec.frobenius_step = frobenius_distance(*next, current);
    rec.residual = residual_of(*next);
    result.trace.records.push_back(rec);
    result.iterations = k;
    current = *next;
    const bool displacement_met = rec.frobenius_step <= config.tol_fixed_point;
    const bool objective_met = std::abs(f - f_prev) <= config.tol_objective;
    f_prev = f;
    if (displacement_met && objective_met) {
      result.trace.status = PowerTrace::Status::Converged;
      break;
    }
  }

  result.maximizer = current;
  result.norm_estimate = objective(phi, current, p, q);
  result.contraction = assess_contraction(phi, p, q, config.diagnostic_samples, config.seed);
  if (!result.contraction.kappa_s_certified) {
    std::string why = p.value() <= q.value() ? "p <= q" : "exponents outside q <= 2 <= p";
    result.warnings.push_back("unproven regime: the contraction bound for S_Phi (" +
                              std::to_string(*result.contraction.kappa_s_upper) +
                              ") is not certified below 1 (" + why + "); convergence is not guaranteed");
  }
  if (result.trace.status == PowerTrace::Status::LeftCone)
    result.warnings.push_back("iterate left the PSD cone beyond rounding tolerance");
  return result;
}

}  // namespace cpnorm
