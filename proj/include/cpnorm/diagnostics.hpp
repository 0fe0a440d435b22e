#pragma once

#include <cstdint>

#include "cpnorm/cp_map.hpp"
#include "cpnorm/hilbert.hpp"

namespace cpnorm {

/// Structural verdicts and contraction bounds for one map at one (p, q).
struct DiagnosticsReport {
  StructuralVerdict fully_indecomposable;         // of Phi^* Phi
  StructuralVerdict positively_improving;         // of Phi
  StructuralVerdict positively_improving_adjoint; // of Phi^*
  ContractionReport contraction;
  ContractionBound bound;

  /// Hypotheses of the convergence theorem hold as far as the checks can tell.
  bool certified_contractive() const { return bound.certified && !fully_indecomposable.counterexample(); }
};

/// `trials` is the per-rank budget of the rank test; the positively-improving
/// test uses 4 * trials vectors and the diameter search `trials` pairs.
inline DiagnosticsReport diagnose(const CPMap& phi, const SchattenExponent& p, const SchattenExponent& q,
                                  int trials = kDefaultRankTrials, std::uint64_t seed = 0) {
  if (trials < 1) throw Error(ErrorCode::InvalidInput, "trials must be >= 1");
  DiagnosticsReport report{
      check_fully_indecomposable(phi, trials, seed),
      check_positively_improving(phi, 4 * trials, seed),
      check_positively_improving(phi.adjoint(), 4 * trials, seed),
      assess_contraction(phi, p, q, trials, seed),
      {},
  };
  report.bound = contraction_bound_s_phi(report.contraction.kappa_phi_upper, report.contraction.kappa_adjoint_upper,
                                         p, q, true);
  return report;
}

}  // namespace cpnorm
