// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//
//   acceptance CLI_PATH WORK_DIR

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "cpnorm/cpnorm.hpp"

using namespace cpnorm;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Criterion {
  int id;
  std::string title;
  std::function<bool(std::ostringstream&)> check;
};

// One power-method instance from the random family shared by criteria 2-5.
struct Instance {
  std::uint64_t seed;
  Index n;
  double p, q;
  CPMap phi;
  NormResult power;
  DiagnosticsReport diagnostics;
};

const std::vector<std::pair<double, double>> kExponentPairs = {{3.0, 2.0}, {4.0, 2.0}, {2.5, 1.5}};

std::vector<Instance>& instances() {
  static std::vector<Instance> all = [] {
    std::vector<Instance> out;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Index n = 2 + static_cast<Index>(seed % 2);
      const CPMap phi = generate_map(n, n, 3, seed, MapKind::Generic);
      for (const auto& [p, q] : kExponentPairs) {
        PowerConfig config(p, q);
        config.seed = seed;
        NormResult power = run_power_method(phi, config);
        DiagnosticsReport diag = diagnose(phi, SchattenExponent(p), SchattenExponent(q), kDefaultRankTrials, seed);
        out.push_back({seed, n, p, q, phi, std::move(power), std::move(diag)});
      }
    }
    return out;
  }();
  return all;
}

bool certified(const Instance& inst) { return inst.diagnostics.certified_contractive() && inst.power.converged(); }

std::string describe(const Instance& inst) {
  std::ostringstream s;
  s << "seed " << inst.seed << " n " << inst.n << " (p,q)=(" << inst.p << "," << inst.q << ")";
  return s.str();
}

bool ac1(std::ostringstream& log) {
  bool ok = true;
  struct Case {
    std::string name;
    CPMap phi;
    double p, q, exact;
  };
  const std::vector<Case> cases = {{"identity n=2 (4,2)", CPMap::identity(2), 4.0, 2.0, std::pow(2.0, 0.25)},
                                   {"depolarizing n=3 (3,2)", CPMap::depolarizing(3), 3.0, 2.0, std::pow(3.0, 1.0 / 6.0)}};
  for (const auto& c : cases) {
    const auto t0 = Clock::now();
    const NormResult r = run_power_method(c.phi, PowerConfig(c.p, c.q));
    const double dt = seconds_since(t0);
    const double err = std::abs(r.norm_estimate - c.exact);
    log << c.name << ": " << r.norm_estimate << " err " << err << " in " << dt << " s; ";
    ok = ok && err <= 1e-6 && dt < 1.0 && r.converged();
  }
  // The identity value also follows from the diagonal reduction.
  const OracleResult grid = spectral_grid_max(CPMap::identity(2), SchattenExponent(4.0), SchattenExponent(2.0));
  log << "grid " << grid.best_value;
  return ok && std::abs(grid.best_value - std::pow(2.0, 0.25)) <= 1e-6;
}

bool ac2(std::ostringstream& log) {
  const auto t0 = Clock::now();
  bool ok = true;
  int n_certified = 0, n_warn = 0;
  double worst_gap = 0.0;
  for (const Instance& inst : instances()) {
    const OracleResult o =
        oracle_max(inst.phi, SchattenExponent(inst.p), SchattenExponent(inst.q), 40000, inst.seed);
    const double gap = o.best_value - inst.power.norm_estimate;
    if (certified(inst)) {
      ++n_certified;
      worst_gap = std::max(worst_gap, std::abs(gap));
      if (std::abs(gap) > 1e-4) {
        ok = false;
        log << "certified mismatch " << describe(inst) << " gap " << gap << "; ";
      }
    } else {
      n_warn += std::abs(gap) > 1e-4;
      if (gap > 1e-4) {
        ok = false;
        log << "oracle above power " << describe(inst) << " gap " << gap << "; ";
      }
    }
  }
  const double dt = seconds_since(t0);
  log << instances().size() << " instances, " << n_certified << " certified, " << n_warn
      << " uncertified mismatches, max |gap| " << worst_gap << ", oracle time " << dt << " s";
  return ok && dt < 120.0;
}

bool ac3(std::ostringstream& log) {
  bool ok = true;
  int converged = 0;
  double worst = 0.0;
  for (const Instance& inst : instances()) {
    if (!inst.power.converged()) continue;
    ++converged;
    const double r = critical_point_residual(inst.phi, inst.power.maximizer, SchattenExponent(inst.p),
                                             SchattenExponent(inst.q));
    worst = std::max(worst, r);
    ok = ok && r <= 1e-8;
  }
  int large = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CPMap phi = generate_map(3, 3, 3, seed, MapKind::Generic);
    const SchattenExponent p(3.0), q(2.0);
    Rng rng(derive_seed(seed, stream::kPowerStart, 77));
    HermitianMatrix a = random_psd(3, 3, rng);
    a = a / schatten_norm(a, p);
    large += critical_point_residual(phi, a, p, q) > 1e-3;
  }
  log << converged << " converged runs, max residual " << worst << "; negative control " << large << "/20 above 1e-3";
  return ok && converged > 0 && large >= 18;
}

bool ac4(std::ostringstream& log) {
  bool ok = true;
  int checked = 0, steps = 0;
  double worst_excess = -kInfinity;
  for (const Instance& inst : instances()) {
    if (!certified(inst)) continue;
    ++checked;
    const double tau = inst.diagnostics.bound.value;
    const auto& rec = inst.power.trace.records;
    for (std::size_t k = 2; k < rec.size(); ++k) {
      ++steps;
      const double excess = rec[k].hilbert_step - tau * rec[k - 1].hilbert_step;
      worst_excess = std::max(worst_excess, excess);
      if (excess > 1e-9) {
        ok = false;
        log << "violation " << describe(inst) << " k " << k << "; ";
      }
    }
  }
  log << checked << " certified instances, " << steps << " step pairs, max d_k+1 - tau d_k = " << worst_excess;
  return ok && checked > 0;
}

bool ac5(std::ostringstream& log) {
  bool ok = true;
  int checked = 0;
  double worst_norm = 0.0, worst_point = 0.0;
  for (const Instance& inst : instances()) {
    if (!certified(inst)) continue;
    ++checked;
    for (std::uint64_t s = 0; s < 5; ++s) {
      PowerConfig config(inst.p, inst.q);
      config.diagnostic_samples = 4;
      Rng rng(derive_seed(inst.seed, stream::kPowerStart, 100 + s));
      config.start = random_psd(inst.n, inst.n, rng);
      const NormResult r = run_power_method(inst.phi, config);
      const double dn = std::abs(r.norm_estimate - inst.power.norm_estimate);
      const double dx = frobenius_distance(r.maximizer, inst.power.maximizer);
      worst_norm = std::max(worst_norm, dn);
      worst_point = std::max(worst_point, dx);
      ok = ok && dn <= 1e-8 && dx <= 1e-6;
    }
  }
  log << checked << " instances x 5 starts, max norm diff " << worst_norm << ", max maximizer diff " << worst_point;
  return ok && checked > 0;
}

bool ac6(std::ostringstream& log) {
  double pair = 0.0, unit = 0.0, invol = 0.0, grad = 0.0;
  int ill_conditioned = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(derive_seed(seed, stream::kGenerate, 6));
    const Index n = 1 + static_cast<Index>(seed % 5);
    const HermitianMatrix a = random_psd(n, 1 + static_cast<Index>(seed % n), rng);
    const HermitianMatrix pd = random_psd(n, n, rng);
    const HermitianMatrix h = random_hermitian(n, rng);
    const SchattenExponent p(1.2 + 0.04 * static_cast<double>(seed % 100));
    const HermitianMatrix j = duality_map(a, p);
    const double norm = schatten_norm(a, p);
    pair = std::max(pair, std::abs(inner(a, j) - norm) / std::max(1.0, norm));
    unit = std::max(unit, std::abs(schatten_norm(j, p.conjugate_value()) - 1.0));
    const double eps = 1e-6;
    const double fd = (schatten_norm(pd + eps * h, p) - schatten_norm(pd - eps * h, p)) / (2.0 * eps);
    grad = std::max(grad, std::abs(fd - inner(h, duality_map(pd, p))));
  }
  // The round trip reads the spectrum of J(A) back from a dense matrix, so it
  // only resolves instances whose J(A) has condition number well below 1/eps;
  // ill-conditioned draws are counted and replaced until 200 are checked.
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 200; ++seed) {
    Rng rng(derive_seed(seed, stream::kGenerate, 6));
    const Index n = 1 + static_cast<Index>(seed % 5);
    const Index r = 1 + static_cast<Index>(seed % n);
    const HermitianMatrix a = random_psd(n, r, rng);
    const SchattenExponent p(1.2 + 0.04 * static_cast<double>(seed % 100));
    const Eigen::VectorXd la = eigenvalues(a);
    if (std::pow(la(r - 1) / la(0), p.value() - 1.0) < 1e-12) {
      ++ill_conditioned;
      continue;
    }
    ++checked;
    const HermitianMatrix j = duality_map(a, p);
    invol = std::max(invol, frobenius_distance(duality_map(j, p.conjugate()), a / schatten_norm(a, p)));
  }
  log << "max errors: pairing " << pair << ", dual norm " << unit << ", involution " << invol << " (" << ill_conditioned
      << " draws with cond(J(A)) > 1e12 replaced), gradient " << grad;
  return pair <= 1e-9 && unit <= 1e-9 && invol <= 1e-9 && grad <= 1e-5 && ill_conditioned <= 20;
}

bool ac7(std::ostringstream& log) {
  double scale = 0.0, sym = 0.0, tri = -kInfinity, expand = -kInfinity;
  int part_failures = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(derive_seed(seed, stream::kGenerate, 7));
    const Index n = 2 + static_cast<Index>(seed % 3);
    const Index r = 1 + static_cast<Index>(seed % n);
    const Eigen::MatrixXcd w = random_isometry(n, r, rng);
    auto sample = [&] {
      const Eigen::MatrixXcd g = complex_gaussian(r, r, rng);
      return HermitianMatrix::hermitian_part(w * g * g.adjoint() * w.adjoint());
    };
    const HermitianMatrix a = sample(), b = sample(), c = sample();
    const double ab = hilbert_distance(a, b).value;
    for (double alpha : {1e-3, 1.0, 1e3})
      for (double beta : {1e-3, 1.0, 1e3})
        scale = std::max(scale, std::abs(hilbert_distance(alpha * a, beta * b).value - ab));
    sym = std::max(sym, std::abs(ab - hilbert_distance(b, a).value));
    tri = std::max(tri, hilbert_distance(a, c).value - ab - hilbert_distance(b, c).value);
    const CPMap phi = generate_map(n, n, 1 + static_cast<Index>(seed % 3), seed, MapKind::Generic);
    const HermitianMatrix fa = apply(phi, a), fb = apply(phi, b);
    part_failures += !same_part(fa, fb);
    expand = std::max(expand, hilbert_distance(fa, fb).value - ab);
  }
  log << "max errors: scale " << scale << ", symmetry " << sym << ", triangle excess " << tri
      << ", CP expansion " << expand << ", part failures " << part_failures;
  return scale <= 1e-9 && sym <= 1e-9 && tri <= 1e-9 && expand <= 1e-9 && part_failures == 0;
}

bool ac8(std::ostringstream& log) {
  double mono = -kInfinity, absgap = -kInfinity;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(derive_seed(seed, stream::kGenerate, 8));
    const Index n = 2 + static_cast<Index>(seed % 4);
    const HermitianMatrix b = random_psd(n, 1 + static_cast<Index>(seed % n), rng);
    const HermitianMatrix a = b + random_psd(n, 1 + static_cast<Index>((seed / 4) % n), rng);
    const Eigen::VectorXd la = eigenvalues(a), lb = eigenvalues(b);
    for (Index i = 0; i < n; ++i) mono = std::max(mono, lb(i) - la(i));

    const CPMap phi = generate_map(n, 1 + static_cast<Index>(seed % 3), 1 + static_cast<Index>(seed % 4), seed,
                                   MapKind::Generic);
    const HermitianMatrix x = random_hermitian(n, rng);
    const SchattenExponent p(1.3 + 0.03 * static_cast<double>(seed % 90)), q(1.2 + 0.05 * static_cast<double>(seed % 60));
    absgap = std::max(absgap, objective(phi, x, p, q) - objective(phi, abs_matrix(x), p, q));
  }
  log << "max lambda_i(B) - lambda_i(A) " << mono << ", max f(A) - f(|A|) " << absgap;
  return mono <= 1e-9 && absgap <= 1e-9;
}

bool ac9(std::ostringstream& log) {
  bool ok = true;
  double overall = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Index n = 2 + static_cast<Index>(seed % 3);
    const CPMap phi = generate_map(n, n, 2, seed, MapKind::PositivelyImproving);
    const StructuralVerdict v = check_positively_improving(phi, kDefaultImprovingTrials, seed);
    if (v.counterexample()) {
      ok = false;
      log << "map " << seed << " failed the positivity check; ";
    }
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
      const auto [a, b] = same_part_pair(n, i, 500, seed, stream::kGenerate);
      const double d = hilbert_distance(a, b).value;
      if (!(d > 1e-8)) continue;
      worst = std::max(worst, hilbert_distance(apply(phi, a), apply(phi, b)).value / d);
    }
    overall = std::max(overall, worst);
    ok = ok && worst <= 0.999;
  }
  log << "10 maps x 500 pairs, max observed contraction ratio " << overall;
  return ok;
}

bool ac10(std::ostringstream& log) {
  bool ok = true;
  double worst = 0.0, worst_grid = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(derive_seed(seed, stream::kGenerate, 10));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd a(3, 3);
    do {
      for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j) a(i, j) = u(rng) < 0.3 ? 0.0 : u(rng);
    } while (!((a.transpose() * a).array() > 0.0).all());
    const ClassicalResult classical = classical_power_iteration(a, 4.0, 2.0);
    const CPMap phi = CPMap::from_nonnegative_matrix(a);
    const NormResult r = run_power_method(phi, PowerConfig(4.0, 2.0));
    const OracleResult grid = spectral_grid_max(phi, SchattenExponent(4.0), SchattenExponent(2.0));
    worst = std::max(worst, std::abs(r.norm_estimate - classical.norm));
    worst_grid = std::max(worst_grid, std::abs(grid.best_value - classical.norm));
    ok = ok && classical.converged && std::abs(r.norm_estimate - classical.norm) <= 1e-6 &&
         std::abs(grid.best_value - classical.norm) <= 1e-6;
  }
  log << "10 matrices, max |CP power - vector power| " << worst << ", max |grid - vector power| " << worst_grid;
  return ok;
}

int run_cli(const std::string& cli, const std::string& args, const fs::path& out) {
  const std::string cmd = cli + " " + args + " > '" + out.string() + "' 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool ac11(const std::string& cli, const fs::path& work, std::ostringstream& log) {
  fs::create_directories(work);
  const std::string map = (work / "map.json").string();
  const std::string trace = (work / "trace.csv").string();
  const std::vector<std::string> commands = {
      "gen --n 3 --m 2 --k 3 --seed 21",
      "gen --n 3 --m 3 --k 2 --seed 22 --kind positively_improving",
      "compute --map " + map + " --p 3 --q 2 --seed 5 --start random --trace " + trace,
      "diagnose --map " + map + " --p 3 --q 2 --seed 5 --trials 32",
      "verify --map " + map + " --p 3 --q 2 --seed 5 --budget 5000",
  };
  if (run_cli(cli, "gen --n 3 --m 3 --k 3 --seed 20", map) != 0) {
    log << "could not generate the map file";
    return false;
  }
  bool ok = true;
  for (const auto& args : commands) {
    const int c1 = run_cli(cli, args, work / "run1.out");
    const std::string t1 = slurp(trace);
    const int c2 = run_cli(cli, args, work / "run2.out");
    const std::string t2 = slurp(trace);
    const bool same = c1 == c2 && slurp(work / "run1.out") == slurp(work / "run2.out") && t1 == t2 &&
                      !slurp(work / "run1.out").empty();
    if (!same) log << "differs: " << args << "; ";
    ok = ok && same && c1 == 0;
  }
  log << commands.size() << " commands run twice, outputs byte-identical: " << (ok ? "yes" : "no");
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance CLI_PATH WORK_DIR\n";
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path work = argv[2];

  const std::vector<Criterion> criteria = {
      {1, "closed-form norms", ac1},
      {2, "power method vs oracle", ac2},
      {3, "critical-point residuals", ac3},
      {4, "Hilbert-step contraction", ac4},
      {5, "start independence", ac5},
      {6, "duality-map identities", ac6},
      {7, "Hilbert metric properties", ac7},
      {8, "Loewner monotonicity and |A| dominance", ac8},
      {9, "positively improving maps contract", ac9},
      {10, "classical embedding", ac10},
      {11, "CLI reproducibility", [&](std::ostringstream& log) { return ac11(cli, work, log); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    std::ostringstream log;
    log.precision(6);
    bool ok = false;
    const auto t0 = Clock::now();
    try {
      ok = c.check(log);
    } catch (const std::exception& e) {
      log << "exception: " << e.what();
    }
    failures += !ok;
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << "AC" << c.id << " " << c.title << " (" << seconds_since(t0)
              << " s): " << log.str() << std::endl;
  }
  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
