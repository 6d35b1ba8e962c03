// Command-line front end: Katz expansions, row valuations, and d'_p sweeps.

#include <gmpxx.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "katz/katz.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kBadInput = 2,
  kMismatch = 3,
  kUnsolvable = 4,
  kCheckpoint = 5,
};

struct ExpandArgs {
  unsigned long p = 0;
  long n = 0;
  int prec = 0;
  std::string input;
  std::string out;
};

struct ValuationArgs {
  unsigned long p = 0;
  long r = 0;
  int lambda = 0;
  std::vector<unsigned long> weights;
  long j_max = -1;
};

struct SweepArgs {
  unsigned long p = 0;
  long i_max = 0;
  std::string checkpoint;
  bool resume = false;
  std::string out;
  std::string summary;
  unsigned threads = 0;
};

std::ostream* open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return &std::cout;
  file.open(path, std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  return &file;
}

int run_expand(const ExpandArgs& a) {
  std::ifstream in(a.input);
  if (!in) throw katz::InputFormatError("cannot read " + a.input);
  auto coeffs = katz::parse_qexpansion(in);
  const auto matrix = katz::cached_matrix(a.p, a.n, a.prec);
  if (coeffs.size() > matrix->size()) {
    throw katz::MismatchError("input has " + std::to_string(coeffs.size()) +
                              " coefficients; required N = d_{n(p-1)} = " + std::to_string(matrix->size()));
  }
  coeffs.resize(matrix->size());
  const katz::QSeries f(matrix->ring(), std::move(coeffs));
  const katz::KatzTuple t = katz::psi(*matrix, f);
  std::ofstream file;
  *open_output(a.out, file) << katz::katz_tuple_json(t, matrix->size()).dump(2) << '\n';
  return kOk;
}

int run_valuations(const ValuationArgs& a) {
  katz::ValuationRow row;
  if (!a.weights.empty()) {
    row = katz::solve_row(a.p, a.r, a.weights, a.j_max);
  } else {
    row = katz::solve_row(a.p, a.r, a.lambda, a.j_max);
  }
  katz::write_row_csv(std::cout, row);
  return kOk;
}

int run_sweep(const SweepArgs& a) {
  std::optional<katz::SweepState> resume;
  katz::SweepOptions options;
  options.threads = a.threads;
  if (!a.checkpoint.empty()) {
    options.checkpoint = a.checkpoint;
    if (a.resume) {
      if (std::filesystem::exists(a.checkpoint)) {
        resume = katz::load_checkpoint(a.checkpoint);
      } else {
        std::cerr << "note: no checkpoint at " << a.checkpoint << ", starting fresh\n";
      }
    }
  } else if (a.resume) {
    throw std::invalid_argument("--resume requires --checkpoint");
  }
  const katz::SweepState state = katz::run_sweep(a.p, a.i_max, std::move(resume), options);
  if (!a.out.empty()) {
    std::ofstream file;
    katz::write_sweep_csv(*open_output(a.out, file), state);
  }
  std::ofstream file;
  *open_output(a.summary, file) << katz::sweep_summary_json(state).dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Katz expansions and overconvergence valuations for E*/V(E*)"};
  app.require_subcommand(1);

  ExpandArgs expand;
  auto* expand_cmd = app.add_subcommand("katz-expand", "Partial Katz expansion of a q-expansion");
  expand_cmd->add_option("--p", expand.p, "Prime p >= 5")->required();
  expand_cmd->add_option("--n", expand.n, "Number of terms beyond b_0")->required()->check(CLI::NonNegativeNumber);
  expand_cmd->add_option("--prec", expand.prec, "p-adic precision C")->required()->check(CLI::PositiveNumber);
  expand_cmd->add_option("--input", expand.input, "q-expansion file (lines or JSON array)")->required();
  expand_cmd->add_option("--out", expand.out, "Output JSON file (default stdout)");

  ValuationArgs val;
  auto* val_cmd = app.add_subcommand("valuations", "Valuations nu(b_{r,j}) for one row");
  val_cmd->add_option("--p", val.p, "Prime p >= 5")->required();
  val_cmd->add_option("--r", val.r, "Row index r")->required()->check(CLI::NonNegativeNumber);
  auto* lambda_opt = val_cmd->add_option("--lambda", val.lambda, "Number of canonical weights")->check(CLI::PositiveNumber);
  auto* weights_opt = val_cmd->add_option("--weights", val.weights, "Comma-separated s values (k = s(p-1))")->delimiter(',');
  lambda_opt->excludes(weights_opt);
  val_cmd->add_option("--jmax", val.j_max, "Largest j to report (default min(r, lambda-1))");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep rows 1..imax for the bound d'_p");
  sweep_cmd->add_option("--p", sweep.p, "Prime p >= 5")->required();
  sweep_cmd->add_option("--imax", sweep.i_max, "Last row")->required()->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--checkpoint", sweep.checkpoint, "Checkpoint JSON, updated after every row");
  sweep_cmd->add_flag("--resume", sweep.resume, "Continue from the checkpoint");
  sweep_cmd->add_option("--out", sweep.out, "CSV of all (i, j, status, value, gamma)");
  sweep_cmd->add_option("--summary", sweep.summary, "Summary JSON file (default stdout)");
  sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (default KATZ_THREADS or all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (*expand_cmd) return run_expand(expand);
    if (*val_cmd) {
      if (val.weights.empty() && val.lambda == 0) throw std::invalid_argument("one of --lambda or --weights is required");
      return run_valuations(val);
    }
    if (*sweep_cmd) return run_sweep(sweep);
  } catch (const katz::InputFormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const katz::MismatchError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMismatch;
  } catch (const katz::UnsolvableSystemError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUnsolvable;
  } catch (const katz::CheckpointError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckpoint;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n' << app.help() << '\n';
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
