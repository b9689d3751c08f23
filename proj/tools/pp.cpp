// pp: command-line front end for the icspp C library.
//
//   pp run --input data.csv --d 2 --mode ics-pp --h 0.5 --nu 0 --gamma 1
//   pp generate --kind circle --p 16 --n 500 --seed 7 --out circ.csv
//   pp reference --d 2 --h 0.5
//
// Exit codes: 0 success, 2 input error, 3 numerical failure, 4 every start
// stopped on an iteration cap.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "icspp/icspp.h"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCapped = 4;

int exit_code_for(icspp_status s) {
  switch (s) {
    case ICSPP_OK: return 0;
    case ICSPP_ERR_NOT_POSITIVE_DEFINITE:
    case ICSPP_ERR_DEGENERATE_PAIRS:
    case ICSPP_ERR_SINGULAR_DESIGN:
    case ICSPP_ERR_INTERNAL:
      return kExitNumerical;
    default:
      return kExitInput;
  }
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (static_cast<unsigned char>(c) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04x", c);
      out += buf;
    } else {
      out += c;
    }
  }
  return out;
}

// Machine-readable error line on stderr.
int report(icspp_status s) {
  std::cerr << "{\"error\":\"" << icspp_status_name(s) << "\",\"message\":\"" << json_escape(icspp_last_error())
            << "\"}\n";
  return exit_code_for(s);
}

int report_usage(const std::string& message) {
  std::cerr << "{\"error\":\"InvalidArgument\",\"message\":\"" << json_escape(message) << "\"}\n";
  return kExitInput;
}

std::vector<int> parse_int_list(const std::string& text, char sep) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad integer '" + item + "'");
    out.push_back(v);
  }
  return out;
}

template <class Handle, void (*Free)(Handle*)>
struct Owned {
  Handle* ptr = nullptr;
  Owned() = default;
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  ~Owned() { Free(ptr); }
};

using DatasetHandle = Owned<icspp_dataset, icspp_dataset_free>;
using ConfigHandle = Owned<icspp_config, icspp_config_free>;
using ResultHandle = Owned<icspp_result, icspp_result_free>;
using GeneratedHandle = Owned<icspp_generated, icspp_generated_free>;

struct RunOptions {
  std::string input;
  bool header = false;
  int d = 2;
  std::string mode = "ics-pp";
  std::string starts = "default";
  double h = 0.5;
  double nu = 0.0;
  double gamma = 1.0;
  double delta0 = 1e-11;
  int max_iters = 1000;
  int max_halvings = 60;
  int restarts = 0;
  std::uint64_t seed = 0;
  std::string out_dir = "pp_out";
  std::string snapshot_iters = "1,2,4";
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
};

int run_command(const RunOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  ConfigHandle cfg;
  icspp_status s = icspp_config_create(&cfg.ptr);
  if (s != ICSPP_OK) return report(s);

  static const std::map<std::string, icspp_mode> modes{
      {"ics-pp", ICSPP_MODE_ICS_PP}, {"global-pp", ICSPP_MODE_GLOBAL_PP}, {"ics-only", ICSPP_MODE_ICS_ONLY}};
  static const std::map<std::string, icspp_starts> policies{{"default", ICSPP_STARTS_DEFAULT},
                                                            {"all-pairs", ICSPP_STARTS_ALL_PAIRS},
                                                            {"ics-adjacent", ICSPP_STARTS_ICS_ADJACENT},
                                                            {"best-initial", ICSPP_STARTS_BEST_INITIAL}};

  auto step = [&](icspp_status st) {
    if (st != ICSPP_OK && s == ICSPP_OK) s = st;
  };
  step(icspp_config_set_d(cfg.ptr, o.d));
  step(icspp_config_set_mode(cfg.ptr, modes.at(o.mode)));
  if (o.starts.rfind("explicit=", 0) == 0) {
    // explicit=j,k[;j,k...] with 1-based component indices
    std::vector<int> flat;
    std::size_t count = 0;
    try {
      std::stringstream ss(o.starts.substr(9));
      std::string tuple;
      while (std::getline(ss, tuple, ';')) {
        const std::vector<int> t = parse_int_list(tuple, ',');
        if (static_cast<int>(t.size()) != o.d)
          return report_usage("each explicit start needs exactly d=" + std::to_string(o.d) + " indices");
        flat.insert(flat.end(), t.begin(), t.end());
        ++count;
      }
    } catch (const std::exception& e) {
      return report_usage(std::string("cannot parse --starts: ") + e.what());
    }
    step(icspp_config_set_explicit_starts(cfg.ptr, flat.data(), count, o.d));
  } else {
    const auto it = policies.find(o.starts);
    if (it == policies.end()) return report_usage("unknown --starts value '" + o.starts + "'");
    step(icspp_config_set_starts(cfg.ptr, it->second));
  }
  step(icspp_config_set_bandwidth(cfg.ptr, o.h));
  step(icspp_config_set_nu(cfg.ptr, o.nu));
  step(icspp_config_set_gamma(cfg.ptr, o.gamma));
  step(icspp_config_set_threshold(cfg.ptr, o.delta0));
  step(icspp_config_set_max_iters(cfg.ptr, o.max_iters));
  step(icspp_config_set_max_halvings(cfg.ptr, o.max_halvings));
  step(icspp_config_set_restarts(cfg.ptr, o.restarts));
  step(icspp_config_set_seed(cfg.ptr, o.seed));
  step(icspp_config_set_jobs(cfg.ptr, o.jobs));
  std::vector<int> snaps;
  try {
    snaps = parse_int_list(o.snapshot_iters, ',');
  } catch (const std::exception& e) {
    return report_usage(std::string("cannot parse --snapshot-iters: ") + e.what());
  }
  step(icspp_config_set_snapshot_iters(cfg.ptr, snaps.data(), snaps.size()));
  if (s != ICSPP_OK) return report(s);

  DatasetHandle data;
  if ((s = icspp_dataset_read_csv(o.input.c_str(), o.header ? 1 : 0, &data.ptr)) != ICSPP_OK) return report(s);
  ResultHandle result;
  if ((s = icspp_run(data.ptr, cfg.ptr, &result.ptr)) != ICSPP_OK) return report(s);

  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if ((s = icspp_result_write_outputs(result.ptr, o.out_dir.c_str(), o.input.c_str(), total)) != ICSPP_OK)
    return report(s);

  icspp_start_info best{};
  std::vector<int> idx(static_cast<std::size_t>(o.d));
  if ((s = icspp_result_best_start(result.ptr, &best, idx.data(), idx.size())) != ICSPP_OK) return report(s);
  std::cout << "starts evaluated: " << icspp_result_start_count(result.ptr) << "\n";
  std::cout << "best start: (";
  for (std::size_t i = 0; i < idx.size(); ++i) std::cout << (i ? "," : "") << idx[i];
  std::cout << ")" << (best.restart ? " restart " + std::to_string(best.restart) : std::string()) << "\n";
  std::printf("initial H: %.6f\nfinal H: %.6f (reference %.4f)\niterations: %d\n", best.initial_H, best.final_H,
              icspp_result_reference_H(result.ptr), best.iterations);
  std::cout << "outputs written to " << o.out_dir << "\n";
  if (icspp_result_all_starts_capped(result.ptr)) {
    std::cerr << "{\"error\":\"CapTermination\",\"message\":\"every start stopped on an iteration cap\"}\n";
    return kExitCapped;
  }
  return 0;
}

struct GenerateOptions {
  std::string kind = "clusters";
  int n = 0;
  int p = 0;
  std::uint64_t seed = 0;
  std::string mixing = "orthogonal";
  std::string out;
  std::string truth;
};

int generate_command(const GenerateOptions& o) {
  static const std::map<std::string, icspp_generator_kind> kinds{{"clusters", ICSPP_GEN_CLUSTERS},
                                                                 {"circle", ICSPP_GEN_CIRCLE},
                                                                 {"hyperplanes", ICSPP_GEN_HYPERPLANES},
                                                                 {"gaussian", ICSPP_GEN_GAUSSIAN}};
  static const std::map<std::string, icspp_mixing> mixings{
      {"none", ICSPP_MIX_NONE}, {"orthogonal", ICSPP_MIX_ORTHOGONAL}, {"nonsingular", ICSPP_MIX_NONSINGULAR}};
  GeneratedHandle gen;
  icspp_status s = icspp_generate(kinds.at(o.kind), o.n, o.p, o.seed, mixings.at(o.mixing), &gen.ptr);
  if (s != ICSPP_OK) return report(s);
  DatasetHandle data;
  if ((s = icspp_generated_dataset(gen.ptr, &data.ptr)) != ICSPP_OK) return report(s);
  if ((s = icspp_dataset_write_csv(data.ptr, o.out.c_str())) != ICSPP_OK) return report(s);
  if (!o.truth.empty() && (s = icspp_generated_write_truth(gen.ptr, o.truth.c_str())) != ICSPP_OK)
    return report(s);
  std::cout << "wrote " << icspp_dataset_rows(data.ptr) << "x" << icspp_dataset_cols(data.ptr) << " to " << o.out
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariant coordinate selection refined by local projection pursuit"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run the projection pursuit pipeline on a CSV file");
  run_cmd->set_help_flag("--help", "Print this help message and exit");
  run_cmd->add_option("--input", run.input, "Numeric CSV, one observation per row")->required();
  run_cmd->add_flag("--header", run.header, "First row holds column names");
  run_cmd->add_option("--d", run.d, "Target projection dimension")->capture_default_str();
  run_cmd->add_option("--mode", run.mode, "ics-pp | global-pp | ics-only")
      ->check(CLI::IsMember({"ics-pp", "global-pp", "ics-only"}))
      ->capture_default_str();
  run_cmd
      ->add_option("--starts", run.starts,
                   "all-pairs | ics-adjacent | best-initial | explicit=j,k[;j,k...] (1-based); "
                   "default: all-pairs for d=2, ics-adjacent otherwise")
      ->capture_default_str();
  run_cmd->add_option("--h", run.h, "Kernel bandwidth")->capture_default_str();
  run_cmd->add_option("--nu", run.nu, "Scatter estimator offset nu >= 0")->capture_default_str();
  run_cmd->add_option("--gamma", run.gamma, "Scatter estimator exponent gamma > 0")->capture_default_str();
  run_cmd->add_option("--delta0", run.delta0, "Stop when squared gradient norm drops below this")
      ->capture_default_str();
  run_cmd->add_option("--max-iters", run.max_iters, "Outer iteration cap per start")->capture_default_str();
  run_cmd->add_option("--max-halvings", run.max_halvings, "Step-halving cap per iteration")->capture_default_str();
  run_cmd->add_option("--restarts", run.restarts, "Random orthogonal restarts (global-pp)")->capture_default_str();
  run_cmd->add_option("--seed", run.seed, "Seed for random restarts")->capture_default_str();
  run_cmd->add_option("--out-dir", run.out_dir, "Directory for result files")->capture_default_str();
  run_cmd->add_option("--snapshot-iters", run.snapshot_iters, "Iterations to plot for the best start")
      ->capture_default_str();
  run_cmd->add_option("--jobs", run.jobs, "Parallel starts")->capture_default_str();

  GenerateOptions gen;
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic data set with planted structure");
  gen_cmd->add_option("--kind", gen.kind, "clusters | circle | hyperplanes | gaussian")
      ->check(CLI::IsMember({"clusters", "circle", "hyperplanes", "gaussian"}))
      ->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "Observations (0 = preset)");
  gen_cmd->add_option("--p", gen.p, "Dimension (0 = preset)");
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--mixing", gen.mixing, "none | orthogonal | nonsingular")
      ->check(CLI::IsMember({"none", "orthogonal", "nonsingular"}))
      ->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output CSV")->required();
  gen_cmd->add_option("--truth", gen.truth, "Optional JSON file with labels and planted basis");

  int ref_d = 2;
  double ref_h = 0.5;
  auto* ref_cmd = app.add_subcommand("reference", "Print the Gaussian reference entropy for (d, h)");
  ref_cmd->set_help_flag("--help", "Print this help message and exit");
  ref_cmd->add_option("--d", ref_d, "Dimension")->capture_default_str();
  ref_cmd->add_option("--h", ref_h, "Bandwidth")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_usage(e.what());
  }

  if (*run_cmd) return run_command(run);
  if (*gen_cmd) return generate_command(gen);
  if (*ref_cmd) {
    double value = 0.0;
    const icspp_status s = icspp_reference_entropy(ref_d, ref_h, &value);
    if (s != ICSPP_OK) return report(s);
    std::printf("%.4f\n", value);
    return 0;
  }
  return kExitInput;
}
