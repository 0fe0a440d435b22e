// cpnorm: S_p -> S_q norms of completely positive maps from the command line.
//
//   cpnorm gen      --n --m --k --seed --kind --out FILE [--matrix FILE]
//   cpnorm compute  --map FILE --p --q [--tol --max-iter --trace FILE --seed --start]
//   cpnorm diagnose --map FILE --p --q [--trials --seed]
//   cpnorm verify   --map FILE --p --q [--budget --seed --tol]
//
// Exit codes: 0 success (compute: Converged; verify: PASS or WARN),
// 1 verify FAIL, 2 compute MaxIterReached, 3 any error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cpnorm/cpnorm.hpp"
#include "cpnorm/io.hpp"

namespace {

using cpnorm::io::Json;

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitMaxIter = 2;
constexpr int kExitError = 3;

struct CommonArgs {
  std::string map_path;
  double p = 0.0;
  double q = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

void emit(const Json& doc, const std::string& out) {
  const std::string text = doc.dump(2) + "\n";
  if (out.empty() || out == "-")
    std::cout << text;
  else
    cpnorm::io::write_file(out, text);
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

Json record_header(const std::string& command, const cpnorm::io::MapFile& file, const CommonArgs& args) {
  Json doc;
  doc["version"] = cpnorm::io::kFormatVersion;
  doc["tool"] = "cpnorm";
  doc["tool_version"] = cpnorm::io::kToolVersion;
  doc["command"] = command;
  Json input;
  input["map_file"] = args.map_path;
  input["map"] = cpnorm::io::map_to_json(file);
  input["p"] = args.p;
  input["q"] = args.q;
  input["seed"] = args.seed;
  doc["input"] = std::move(input);
  return doc;
}

int run_gen(long long n, long long m, long long k, std::uint64_t seed, const std::string& kind_name,
            const std::string& matrix_path, const std::string& name, const std::string& out) {
  const cpnorm::MapKind kind = cpnorm::parse_map_kind(kind_name);
  cpnorm::io::MapFile file{cpnorm::CPMap::identity(1), std::nullopt, seed, kind_name};
  if (kind == cpnorm::MapKind::DiagonalFromMatrix) {
    if (matrix_path.empty())
      throw cpnorm::Error(cpnorm::ErrorCode::InvalidInput, "--kind diagonal_from_matrix requires --matrix FILE");
    file.map = cpnorm::CPMap::from_nonnegative_matrix(
        cpnorm::io::parse_nonnegative_matrix(cpnorm::io::read_file(matrix_path), matrix_path));
    file.seed = std::nullopt;
  } else {
    file.map = cpnorm::generate_map(n, m, k, seed, kind);
  }
  if (!name.empty()) file.name = name;
  print_warnings(file.map.warnings());
  const std::string text = cpnorm::io::serialize_map(file);
  if (out.empty() || out == "-")
    std::cout << text;
  else
    cpnorm::io::write_file(out, text);
  return kExitOk;
}

int run_compute(const CommonArgs& args, double tol, double tol_objective, int max_iter, const std::string& start,
                const std::string& trace_path) {
  const cpnorm::io::MapFile file = cpnorm::io::load_map(args.map_path);
  cpnorm::PowerConfig config(args.p, args.q);
  config.tol_fixed_point = tol;
  config.tol_objective = tol_objective;
  config.max_iter = max_iter;
  config.seed = args.seed;
  if (start == "random") {
    cpnorm::Rng rng(cpnorm::derive_seed(args.seed, cpnorm::stream::kPowerStart));
    config.start = cpnorm::random_psd(file.map.input_dim(), file.map.input_dim(), rng);
  } else if (start != "default") {
    throw cpnorm::Error(cpnorm::ErrorCode::InvalidInput, "--start must be 'default' or 'random'");
  }

  const cpnorm::NormResult result = cpnorm::run_power_method(file.map, config);
  const cpnorm::DiagnosticsReport diagnostics =
      cpnorm::diagnose(file.map, config.p, config.q, cpnorm::kDefaultRankTrials, args.seed);

  Json doc = record_header("compute", file, args);
  Json cfg;
  cfg["tol_fixed_point"] = tol;
  cfg["tol_objective"] = tol_objective;
  cfg["max_iter"] = max_iter;
  cfg["start"] = start;
  cfg["diagnostic_samples"] = config.diagnostic_samples;
  doc["input"]["config"] = std::move(cfg);
  doc["result"] = cpnorm::io::to_json(result);
  doc["diagnostics"] = cpnorm::io::to_json(diagnostics);
  emit(doc, args.out);

  if (!trace_path.empty()) {
    std::ofstream trace(trace_path, std::ios::binary);
    if (!trace) throw cpnorm::Error(cpnorm::ErrorCode::InvalidInput, "cannot write '" + trace_path + "'");
    cpnorm::io::write_trace_csv(trace, result.trace);
  }
  print_warnings(result.warnings);
  switch (result.trace.status) {
    case cpnorm::PowerTrace::Status::Converged: return kExitOk;
    case cpnorm::PowerTrace::Status::MaxIterReached: return kExitMaxIter;
    case cpnorm::PowerTrace::Status::LeftCone: return kExitError;
  }
  return kExitError;
}

int run_diagnose(const CommonArgs& args, int trials) {
  const cpnorm::io::MapFile file = cpnorm::io::load_map(args.map_path);
  const cpnorm::SchattenExponent p(args.p), q(args.q);
  const cpnorm::DiagnosticsReport report = cpnorm::diagnose(file.map, p, q, trials, args.seed);
  Json doc = record_header("diagnose", file, args);
  doc["input"]["trials"] = trials;
  doc["diagnostics"] = cpnorm::io::to_json(report);
  emit(doc, args.out);
  return kExitOk;
}

int run_verify(const CommonArgs& args, long budget, double tol) {
  const cpnorm::io::MapFile file = cpnorm::io::load_map(args.map_path);
  const cpnorm::SchattenExponent p(args.p), q(args.q);
  // Oracle first: it owns the desk-scale guard.
  const cpnorm::OracleResult oracle = cpnorm::oracle_max(file.map, p, q, budget, args.seed);
  cpnorm::PowerConfig config(p, q);
  config.seed = args.seed;
  const cpnorm::NormResult power = cpnorm::run_power_method(file.map, config);
  const cpnorm::DiagnosticsReport diagnostics =
      cpnorm::diagnose(file.map, p, q, cpnorm::kDefaultRankTrials, args.seed);
  const bool certified = diagnostics.certified_contractive() && power.converged();

  cpnorm::CrossValidation check = cpnorm::cross_validate(power, oracle, tol, certified);
  Json doc = record_header("verify", file, args);
  doc["input"]["budget"] = budget;
  doc["input"]["tol"] = tol;
  doc["power"] = cpnorm::io::to_json(power);
  doc["diagnostics"] = cpnorm::io::to_json(diagnostics);
  doc["oracle"] = cpnorm::io::to_json(oracle);
  doc["cross_validation"] = cpnorm::io::to_json(check);
  if (cpnorm::is_diagonal_covariant(file.map)) {
    const cpnorm::OracleResult grid = cpnorm::spectral_grid_max(file.map, p, q);
    const cpnorm::CrossValidation grid_check = cpnorm::cross_validate(power, grid, tol, certified);
    doc["spectral_grid"] = cpnorm::io::to_json(grid);
    doc["spectral_grid_cross_validation"] = cpnorm::io::to_json(grid_check);
    if (grid_check.status == cpnorm::CrossValidation::Status::Fail ||
        (grid_check.status == cpnorm::CrossValidation::Status::Warn &&
         check.status == cpnorm::CrossValidation::Status::Pass))
      check.status = grid_check.status;
  }
  doc["status"] = cpnorm::to_string(check.status);
  emit(doc, args.out);
  print_warnings(power.warnings);
  if (check.status == cpnorm::CrossValidation::Status::Warn)
    std::cerr << "warning: " << check.message << "\n";
  return check.status == cpnorm::CrossValidation::Status::Fail ? kExitFail : kExitOk;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--map", args.map_path, "Map file (JSON)")->required();
  cmd->add_option("--p", args.p, "Input Schatten exponent, 1 < p < inf")->required();
  cmd->add_option("--q", args.q, "Output Schatten exponent, 1 < q < inf")->required();
  cmd->add_option("--seed", args.seed, "Root seed for all sampling")->default_val(0);
  cmd->add_option("--out", args.out, "Write the JSON record here instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"S_p -> S_q norms of completely positive maps"};
  app.require_subcommand(1);

  long long gen_n = 2, gen_m = 2, gen_k = 1;
  std::uint64_t gen_seed = 0;
  std::string gen_kind = "generic", gen_out, gen_matrix, gen_name;
  CLI::App* gen = app.add_subcommand("gen", "Generate a seeded CP map file");
  gen->add_option("--n", gen_n, "Input dimension")->default_val(2);
  gen->add_option("--m", gen_m, "Output dimension")->default_val(2);
  gen->add_option("--k", gen_k, "Number of Kraus operators")->default_val(1);
  gen->add_option("--seed", gen_seed, "Seed")->default_val(0);
  gen->add_option("--kind", gen_kind,
                  "generic | positively_improving | diagonal_from_matrix | identity | depolarizing")
      ->default_val("generic");
  gen->add_option("--matrix", gen_matrix, "Nonnegative matrix file for diagonal_from_matrix");
  gen->add_option("--name", gen_name, "Name stored in the metadata");
  gen->add_option("--out", gen_out, "Output file (default stdout)");

  CommonArgs compute_args;
  double tol = 1e-10, tol_objective = 1e-12;
  int max_iter = 1000;
  std::string start = "default", trace_path;
  CLI::App* compute = app.add_subcommand("compute", "Run the power method");
  add_common(compute, compute_args);
  compute->add_option("--tol", tol, "Fixed-point tolerance on |A_{k+1} - A_k|_F")->default_val(1e-10);
  compute->add_option("--tol-objective", tol_objective, "Objective stall tolerance")->default_val(1e-12);
  compute->add_option("--max-iter", max_iter, "Iteration cap")->default_val(1000);
  compute->add_option("--start", start, "default (I/n^{1/p}) or random (seeded PD start)")->default_val("default");
  compute->add_option("--trace", trace_path, "Write per-iteration CSV rows here");

  CommonArgs diagnose_args;
  int trials = cpnorm::kDefaultRankTrials;
  CLI::App* diag = app.add_subcommand("diagnose", "Structural checks and contraction bounds");
  add_common(diag, diagnose_args);
  diag->add_option("--trials", trials, "Sampling budget per check")->default_val(cpnorm::kDefaultRankTrials);

  CommonArgs verify_args;
  long budget = 20000;
  double verify_tol = 1e-6;
  CLI::App* verify = app.add_subcommand("verify", "Cross-check the power method against a brute-force oracle");
  add_common(verify, verify_args);
  verify->add_option("--budget", budget, "Oracle objective-evaluation budget")->default_val(20000);
  verify->add_option("--tol", verify_tol, "Agreement tolerance")->default_val(1e-6);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*gen) return run_gen(gen_n, gen_m, gen_k, gen_seed, gen_kind, gen_matrix, gen_name, gen_out);
    if (*compute) return run_compute(compute_args, tol, tol_objective, max_iter, start, trace_path);
    if (*diag) return run_diagnose(diagnose_args, trials);
    if (*verify) return run_verify(verify_args, budget, verify_tol);
  } catch (const cpnorm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
