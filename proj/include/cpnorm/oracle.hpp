#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cpnorm/cp_map.hpp"
#include "cpnorm/hilbert.hpp"
#include "cpnorm/power_method.hpp"
#include "cpnorm/schatten.hpp"

// Brute-force maximization of |Phi(A)|_q / |A|_p. Nothing here touches the
// duality map: ascent directions come from finite differences of the
// objective alone.

namespace cpnorm {

inline constexpr Index kDeskScaleMaxDim = 6;

struct OracleResult {
  enum class Method { RandomSearch, ProjectedAscent, SpectralGrid };

  double best_value = 0.0;
  HermitianMatrix best_point;
  int restarts = 0;
  long budget_used = 0;
  Method method = Method::ProjectedAscent;
  /// Best values reached from PSD starts and from general Hermitian starts.
  double best_from_psd_starts = 0.0;
  double best_from_hermitian_starts = 0.0;
};

inline std::string to_string(OracleResult::Method m) {
  switch (m) {
    case OracleResult::Method::RandomSearch: return "RandomSearch";
    case OracleResult::Method::ProjectedAscent: return "ProjectedAscent";
    case OracleResult::Method::SpectralGrid: return "SpectralGrid";
  }
  return "Unknown";
}

namespace detail {

// Real coordinates of an n x n Hermitian matrix: n diagonal entries followed
// by (re, im) of each strictly upper entry.
inline HermitianMatrix from_coordinates(const Eigen::VectorXd& x, Index n) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  Index c = 0;
  for (Index i = 0; i < n; ++i) m(i, i) = x(c++);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const Complex z(x(c), x(c + 1));
      c += 2;
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  return HermitianMatrix::hermitian_part(m);
}

inline Eigen::VectorXd to_coordinates(const HermitianMatrix& a) {
  const Index n = a.dim();
  Eigen::VectorXd x(n * n);
  Index c = 0;
  for (Index i = 0; i < n; ++i) x(c++) = a(i, i).real();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      x(c++) = a(i, j).real();
      x(c++) = a(i, j).imag();
    }
  return x;
}

class CountedObjective {
 public:
  CountedObjective(const CPMap& phi, const SchattenExponent& p, const SchattenExponent& q)
      : phi_(phi), p_(p), q_(q) {}

  double operator()(const HermitianMatrix& a) {
    ++evaluations_;
    const double denom = schatten_norm(a, p_);
    if (denom == 0.0) return -kInfinity;
    return schatten_norm(apply(phi_, a), q_) / denom;
  }

  long evaluations() const { return evaluations_; }

 private:
  const CPMap& phi_;
  SchattenExponent p_;
  SchattenExponent q_;
  long evaluations_ = 0;
};

}  // namespace detail

/// Multi-start finite-difference ascent on the n^2 real coordinates of
/// Hermitian matrices, each iterate rescaled to the unit S_p sphere. Restart 0
/// is I / n^{1/p}; later restarts alternate between random PSD and random
/// Hermitian points. `budget` counts objective evaluations.
inline OracleResult oracle_max(const CPMap& phi, const SchattenExponent& p, const SchattenExponent& q, long budget,
                               std::uint64_t seed = 0) {
  const Index n = phi.input_dim();
  if (n > kDeskScaleMaxDim)
    throw Error(ErrorCode::DeskScaleExceeded, "oracle is limited to n <= " + std::to_string(kDeskScaleMaxDim) +
                                                  ", got n = " + std::to_string(n));
  if (budget < 1) throw Error(ErrorCode::InvalidInput, "oracle budget must be >= 1");

  detail::CountedObjective f(phi, p, q);
  const int restarts = static_cast<int>(std::clamp<long>(budget / 1000, 2, 16));
  const Index dim = n * n;
  const double h = 1e-6;

  OracleResult out;
  out.method = OracleResult::Method::ProjectedAscent;
  out.restarts = restarts;
  out.best_value = -kInfinity;
  out.best_from_psd_starts = -kInfinity;
  out.best_from_hermitian_starts = -kInfinity;

  auto unit = [&](const HermitianMatrix& a) { return a / schatten_norm(a, p); };

  for (int r = 0; r < restarts && f.evaluations() < budget; ++r) {
    const long stop_at = std::min(budget, f.evaluations() + (budget - f.evaluations()) / (restarts - r));
    const bool psd_start = (r % 2 == 0);
    HermitianMatrix start = HermitianMatrix::identity(n);
    if (r > 0) {
      Rng rng(derive_seed(seed, stream::kOracle, static_cast<std::uint64_t>(r)));
      start = psd_start ? random_psd(n, n, rng) : random_hermitian(n, rng);
    }
    HermitianMatrix x = unit(start);
    double fx = f(x);
    double step = 0.1;
    while (f.evaluations() + 2 * dim + 1 <= stop_at && step > 1e-13) {
      const Eigen::VectorXd coords = detail::to_coordinates(x);
      Eigen::VectorXd grad(dim);
      for (Index i = 0; i < dim; ++i) {
        Eigen::VectorXd plus = coords, minus = coords;
        plus(i) += h;
        minus(i) -= h;
        grad(i) = (f(detail::from_coordinates(plus, n)) - f(detail::from_coordinates(minus, n))) / (2.0 * h);
      }
      const double gnorm = grad.norm();
      if (!(gnorm > 1e-14)) break;
      const Eigen::VectorXd dir = grad / gnorm;
      bool accepted = false;
      while (f.evaluations() < stop_at && step > 1e-13) {
        const HermitianMatrix trial = detail::from_coordinates(coords + step * dir, n);
        if (trial.is_zero()) {
          step *= 0.5;
          continue;
        }
        const HermitianMatrix trial_unit = unit(trial);
        const double ft = f(trial_unit);
        if (ft > fx) {
          x = trial_unit;
          fx = ft;
          step = std::min(2.0 * step, 1.0);
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
    double& class_best = psd_start ? out.best_from_psd_starts : out.best_from_hermitian_starts;
    class_best = std::max(class_best, fx);
    if (fx > out.best_value) {
      out.best_value = fx;
      out.best_point = x;
    }
  }
  // Recompute so that best_value is exactly objective(best_point).
  out.best_value = objective(phi, out.best_point, p, q);
  out.budget_used = f.evaluations();
  return out;
}

/// True when Phi maps diagonal matrices to diagonal matrices (tested on a few
/// random positive diagonals).
inline bool is_diagonal_covariant(const CPMap& phi, std::uint64_t seed = 0) {
  Rng rng(derive_seed(seed, stream::kOracle, 0xd1a9));
  std::uniform_real_distribution<double> u(0.1, 1.0);
  for (int t = 0; t < 4; ++t) {
    Eigen::VectorXd d(phi.input_dim());
    for (Index i = 0; i < d.size(); ++i) d(i) = u(rng);
    const Eigen::MatrixXcd image = apply(phi, HermitianMatrix::diagonal(d)).matrix();
    Eigen::MatrixXcd off = image;
    off.diagonal().setZero();
    if (off.norm() > 1e-12 * image.norm()) return false;
  }
  return true;
}

/// Exhaustive search over nonnegative diagonal arguments on the unit S_p
/// sphere for maps that send diagonals to diagonals, followed by pattern-search
/// refinement. Points are x_i = w_i^{1/p} with w on a simplex grid of
/// resolution `grid`.
inline OracleResult spectral_grid_max(const CPMap& phi, const SchattenExponent& p, const SchattenExponent& q,
                                      int grid = 64) {
  if (grid < 1) throw Error(ErrorCode::InvalidInput, "grid resolution must be >= 1");
  if (!is_diagonal_covariant(phi))
    throw Error(ErrorCode::NotApplicable, "map does not send diagonal matrices to diagonal matrices");
  const Index n = phi.input_dim();
  double count = 1.0;
  for (Index i = 1; i < n; ++i) count = count * static_cast<double>(grid + i) / static_cast<double>(i);
  if (count > 5e6) throw Error(ErrorCode::InvalidInput, "spectral grid too large; lower the resolution");

  detail::CountedObjective f(phi, p, q);
  auto eval = [&](const Eigen::VectorXd& w) {
    Eigen::VectorXd x(n);
    for (Index i = 0; i < n; ++i) x(i) = w(i) > 0.0 ? std::pow(w(i), 1.0 / p.value()) : 0.0;
    return f(HermitianMatrix::diagonal(x));
  };

  Eigen::VectorXd best_w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double best = eval(best_w);
  // Enumerate compositions of `grid` into n nonnegative parts.
  std::vector<int> parts(static_cast<std::size_t>(n), 0);
  std::function<void(Index, int)> recurse = [&](Index i, int remaining) {
    if (i == n - 1) {
      parts[static_cast<std::size_t>(i)] = remaining;
      Eigen::VectorXd w(n);
      for (Index j = 0; j < n; ++j) w(j) = parts[static_cast<std::size_t>(j)] / static_cast<double>(grid);
      const double v = eval(w);
      if (v > best) {
        best = v;
        best_w = w;
      }
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      parts[static_cast<std::size_t>(i)] = c;
      recurse(i + 1, remaining - c);
    }
  };
  recurse(0, grid);

  // Pattern search: move mass delta between coordinate pairs.
  for (double delta = 1.0 / grid; delta > 1e-14;) {
    bool improved = false;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double moved = std::min(delta, best_w(j));
        if (moved <= 0.0) continue;
        Eigen::VectorXd w = best_w;
        w(i) += moved;
        w(j) -= moved;
        const double v = eval(w);
        if (v > best) {
          best = v;
          best_w = w;
          improved = true;
        }
      }
    if (!improved) delta *= 0.5;
  }

  OracleResult out;
  out.method = OracleResult::Method::SpectralGrid;
  Eigen::VectorXd x(n);
  for (Index i = 0; i < n; ++i) x(i) = best_w(i) > 0.0 ? std::pow(best_w(i), 1.0 / p.value()) : 0.0;
  out.best_point = HermitianMatrix::diagonal(x);
  out.best_value = objective(phi, out.best_point, p, q);
  out.best_from_psd_starts = out.best_value;
  out.best_from_hermitian_starts = out.best_value;
  out.restarts = 1;
  out.budget_used = f.evaluations();
  return out;
}

struct CrossValidation {
  enum class Status { Pass, Warn, Fail };

  Status status = Status::Pass;
  double power_value = 0.0;
  double oracle_value = 0.0;
  /// oracle - power.
  double gap = 0.0;
  double tolerance = 0.0;
  bool certified = false;
  /// Hilbert distance between the two maximizers (|oracle point| is used), when in one part.
  std::optional<double> maximizer_distance;
  std::string message;
};

inline std::string to_string(CrossValidation::Status s) {
  switch (s) {
    case CrossValidation::Status::Pass: return "PASS";
    case CrossValidation::Status::Warn: return "WARN";
    case CrossValidation::Status::Fail: return "FAIL";
  }
  return "UNKNOWN";
}

/// Compares the power-method estimate with an oracle value. Disagreement is a
/// failure only when the instance is certified contractive; otherwise it is a
/// warning.
inline CrossValidation cross_validate(const NormResult& power, const OracleResult& oracle, double tol,
                                      bool certified) {
  CrossValidation out;
  out.power_value = power.norm_estimate;
  out.oracle_value = oracle.best_value;
  out.gap = oracle.best_value - power.norm_estimate;
  out.tolerance = tol;
  out.certified = certified;

  if (oracle.best_point.dim() == power.maximizer.dim()) {
    const HermitianMatrix oracle_abs = abs_matrix(oracle.best_point);
    if (same_part(power.maximizer, oracle_abs)) out.maximizer_distance = hilbert_distance(power.maximizer, oracle_abs).value;
  }

  if (std::abs(out.gap) <= tol) {
    out.status = CrossValidation::Status::Pass;
    out.message = "power estimate and oracle agree";
  } else if (certified) {
    out.status = CrossValidation::Status::Fail;
    out.message = out.gap > 0.0 ? "oracle exceeds the power estimate in a certified-contractive regime"
                                : "oracle falls short of the power estimate; oracle budget too small";
  } else {
    out.status = CrossValidation::Status::Warn;
    out.message = "mismatch in a regime without a contraction certificate";
  }
  return out;
}

// Classical p -> q norm of a nonnegative matrix by the vector power sequence
// x_{k+1} = J_{p*}(A^T J_q(A x_k)), with J_r(y) = y^{r-1} / |y^{r-1}|_{r*}.
struct ClassicalResult {
  double norm = 0.0;
  Eigen::VectorXd maximizer;
  int iterations = 0;
  bool converged = false;
};

inline ClassicalResult classical_power_iteration(const Eigen::MatrixXd& a, double p, double q, int max_iter = 100000,
                                                 double tol = 1e-14) {
  if ((a.array() < 0.0).any()) throw Error(ErrorCode::InvalidInput, "classical iteration needs a nonnegative matrix");
  const double p_star = SchattenExponent(p).conjugate_value();
  const double q_star = SchattenExponent(q).conjugate_value();
  auto lp = [](const Eigen::VectorXd& v, double r) { return std::pow(v.array().abs().pow(r).sum(), 1.0 / r); };
  auto dual = [&](const Eigen::VectorXd& v, double r, double r_star) {
    Eigen::VectorXd w = v.array().max(0.0).pow(r - 1.0).matrix();
    return Eigen::VectorXd(w / lp(w, r_star));
  };
  const Index n = a.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, std::pow(static_cast<double>(n), -1.0 / p));
  ClassicalResult out;
  for (int k = 1; k <= max_iter; ++k) {
    const Eigen::VectorXd y = dual(a * x, q, q_star);
    const Eigen::VectorXd next = dual(a.transpose() * y, p_star, p);
    const double step = (next - x).cwiseAbs().maxCoeff();
    x = next;
    out.iterations = k;
    if (step <= tol) {
      out.converged = true;
      break;
    }
  }
  out.maximizer = x;
  out.norm = lp(a * x, q) / lp(x, p);
  return out;
}

}  // namespace cpnorm
