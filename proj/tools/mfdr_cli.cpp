// Command-line front end: fit solution paths, run permutation estimates, and
// drive simulation studies.  Exit codes: 0 success, 2 bad input, 3 numerical
// failure.

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mfdr/csv.hpp"
#include "mfdr/dataset.hpp"
#include "mfdr/errors.hpp"
#include "mfdr/manifest.hpp"
#include "mfdr/mfdr_table.hpp"
#include "mfdr/parallel.hpp"
#include "mfdr/permutation.hpp"
#include "mfdr/serialize.hpp"
#include "mfdr/sha256.hpp"
#include "mfdr/simulate.hpp"
#include "mfdr/solver.hpp"

namespace {

using namespace mfdr;

struct PenaltyFlags {
  std::string penalty = "lasso";
  double gamma = 3.0;
  double alpha = 1.0;
  int nlambda = 100;
  double lambda_min_ratio = 0.0;  // 0 -> 0.05 when p > n, else 0.001
};

void add_penalty_flags(CLI::App* cmd, PenaltyFlags& pf) {
  cmd->add_option("--penalty", pf.penalty, "penalty family: lasso, mcp, enet")
      ->check(CLI::IsMember({"lasso", "mcp", "enet"}));
  cmd->add_option("--gamma", pf.gamma, "mcp concavity (> 1)");
  cmd->add_option("--alpha", pf.alpha, "enet l1 fraction in (0, 1]");
  cmd->add_option("--nlambda", pf.nlambda, "grid length")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--lambda-min-ratio", pf.lambda_min_ratio,
                  "smallest lambda as a fraction of the largest");
}

struct DataFlags {
  std::string data_file;
  std::string response;
  std::string y_file;
};

void add_data_flags(CLI::App* cmd, DataFlags& df) {
  cmd->add_option("--data", df.data_file, "CSV with a header row")->required();
  cmd->add_option("--response", df.response,
                  "name of the response column inside --data");
  cmd->add_option("--y-file", df.y_file,
                  "single-column CSV holding the response");
}

Dataset load_dataset(const DataFlags& df) {
  const CsvTable table = read_csv(df.data_file);
  const bool has_resp = !df.response.empty();
  const bool has_yfile = !df.y_file.empty();
  if (has_resp == has_yfile)
    throw InvalidInput("give exactly one of --response or --y-file");
  if (has_resp) return dataset_from_csv(table, df.response);
  const CsvTable ytab = read_csv(df.y_file);
  if (ytab.n_cols() != 1)
    throw InvalidInput("--y-file must have exactly one column");
  Eigen::VectorXd y(ytab.n_rows());
  for (int i = 0; i < ytab.n_rows(); ++i) y[i] = ytab.rows[i][0];
  return dataset_from_csv(table, y);
}

PenaltySpec build_spec(const Dataset& ds, const PenaltyFlags& pf) {
  PenaltySpec spec;
  spec.family = family_from_name(pf.penalty);
  spec.gamma = pf.gamma;
  spec.alpha = pf.alpha;
  {
    // surface bad gamma/alpha before they feed the grid construction
    PenaltySpec probe = spec;
    probe.lambda_grid = {1.0, 0.5};
    probe.validate();
  }
  double ratio = pf.lambda_min_ratio;
  if (ratio == 0.0) ratio = ds.p() > ds.n() ? 0.05 : 0.001;
  double top = lambda_max(ds);
  // an l1 fraction below 1 delays the first selection to lambda_max / alpha
  if (spec.family == PenaltyFamily::enet) top /= spec.alpha;
  spec.lambda_grid = log_spaced_grid(top, ratio * top, pf.nlambda);
  spec.validate();
  return spec;
}

nlohmann::json penalty_params(const PenaltyFlags& pf, const PenaltySpec& spec) {
  nlohmann::json j;
  j["penalty"] = pf.penalty;
  j["gamma"] = pf.gamma;
  j["alpha"] = pf.alpha;
  j["nlambda"] = static_cast<int>(spec.lambda_grid.size());
  j["lambda_top"] = spec.lambda_grid.front();
  j["lambda_bottom"] = spec.lambda_grid.back();
  return j;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create output directory: " + dir);
}

nlohmann::json chosen_to_json(const ChosenLambda& ch, const Dataset& ds,
                              const PathFit& fit, double target) {
  nlohmann::json j;
  j["target"] = target;
  switch (ch.status) {
    case LambdaChoice::ok: {
      j["status"] = "ok";
      j["lambda"] = ch.lambda;
      j["lambda_index"] = ch.index;
      auto names = nlohmann::json::array();
      for (const int f : fit.selected[ch.index])
        names.push_back(ds.feature_names[f]);
      j["selected"] = names;
      break;
    }
    case LambdaChoice::empty_only:
      j["status"] = "empty-model-only";
      j["lambda"] = ch.lambda;
      j["lambda_index"] = ch.index;
      j["selected"] = nlohmann::json::array();
      break;
    case LambdaChoice::none:
      j["status"] = "no-qualifying-lambda";
      break;
  }
  return j;
}

void print_chosen(const nlohmann::json& j) {
  const std::string status = j["status"];
  if (status == "ok") {
    std::cout << "mfdr target " << j["target"] << ": lambda = "
              << format_double(j["lambda"]) << ", selected";
    for (const auto& name : j["selected"]) std::cout << ' ' << std::string(name);
    std::cout << '\n';
  } else if (status == "empty-model-only") {
    std::cout << "mfdr target " << j["target"]
              << ": only the empty model qualifies (lambda = "
              << format_double(j["lambda"]) << ")\n";
  } else {
    std::cout << "mfdr target " << j["target"]
              << ": no qualifying lambda (every model exceeds the target)\n";
  }
}

int cmd_fit(const std::vector<std::string>& argv, const DataFlags& df,
            const PenaltyFlags& pf, const std::string& out_dir,
            double mfdr_target) {
  const Dataset ds = load_dataset(df);
  const PenaltySpec spec = build_spec(ds, pf);
  const SolverConfig cfg;
  const PathFit fit = fit_path(ds, spec, cfg);
  const MfdrTable table = mfdr_analytic(ds, fit);

  prepare_out_dir(out_dir);
  write_path_fit(out_dir, ds, fit);
  write_text_file(join_path(out_dir, "mfdr.csv"), mfdr_table_csv(table));
  write_text_file(join_path(out_dir, "mfdr.json"), mfdr_table_json(table));

  RunManifest man;
  man.command = "fit";
  man.argv = argv;
  man.input_sha256[df.data_file] = sha256_file_hex(df.data_file);
  if (!df.y_file.empty())
    man.input_sha256[df.y_file] = sha256_file_hex(df.y_file);
  man.params = penalty_params(pf, spec);
  man.params["n"] = ds.n();
  man.params["p"] = ds.p();
  man.threads_used = 1;
  if (mfdr_target > 0.0) {
    const ChosenLambda ch = choose_lambda_mfdr(table, mfdr_target);
    const nlohmann::json cj = chosen_to_json(ch, ds, fit, mfdr_target);
    write_text_file(join_path(out_dir, "chosen.json"), cj.dump(2) + "\n");
    man.params["mfdr_target"] = mfdr_target;
    print_chosen(cj);
  }
  man.write(join_path(out_dir, "manifest.json"));
  std::cout << "fit: " << ds.n() << " observations, " << ds.p()
            << " features, " << fit.n_lambda() << " lambda values -> "
            << out_dir << '\n';
  return 0;
}

int cmd_perm(const std::vector<std::string>& argv, const DataFlags& df,
             const PenaltyFlags& pf, bool adopt_stored,
             const std::string& method, int B, std::uint64_t seed,
             const std::string& fit_dir, const std::string& out_dir) {
  const Dataset ds = load_dataset(df);
  PenaltyFlags eff = pf;
  PenaltySpec spec;
  if (adopt_stored) {
    spec = load_stored_spec(fit_dir);
    eff.penalty = family_name(spec.family);
    eff.gamma = spec.gamma;
    eff.alpha = spec.alpha;
  } else {
    spec = build_spec(ds, pf);
  }
  const SolverConfig cfg;
  PermutationPlan plan{B, seed, default_thread_count()};

  std::optional<PathFit> original;
  if (!fit_dir.empty()) original = load_path_fit(fit_dir, ds, spec);
  const PathFit* orig_ptr = original ? &*original : nullptr;

  MfdrTable table;
  if (method == "perm-y") {
    table = mfdr_perm_y(ds, spec, cfg, plan, orig_ptr);
  } else if (method == "perm-r") {
    table = mfdr_perm_r(ds, spec, cfg, plan, orig_ptr);
  } else {
    throw InvalidInput("--method must be perm-y or perm-r");
  }

  prepare_out_dir(out_dir);
  write_text_file(join_path(out_dir, "mfdr_perm.csv"), mfdr_table_csv(table));
  write_text_file(join_path(out_dir, "mfdr_perm.json"),
                  mfdr_table_json(table));

  RunManifest man;
  man.command = "perm";
  man.argv = argv;
  man.input_sha256[df.data_file] = sha256_file_hex(df.data_file);
  if (!df.y_file.empty())
    man.input_sha256[df.y_file] = sha256_file_hex(df.y_file);
  man.params = penalty_params(eff, spec);
  man.params["method"] = method;
  man.params["B"] = B;
  man.params["seed"] = seed;
  if (!fit_dir.empty()) man.params["fit_dir"] = fit_dir;
  man.threads_used = plan.n_threads;
  man.write(join_path(out_dir, "manifest.json"));
  std::cout << "perm: " << method << " with B = " << B << " -> " << out_dir
            << '\n';
  return 0;
}

struct SimFlags {
  std::string preset;
  int n = 100;
  int p = 60;
  int causative = 6;
  int m = 0;
  double rho_corr = 0.5;
  std::string noise = "independent";
  double rho_noise = 0.0;
  double beta = 1.0;
  double sigma = 1.0;
  double grid_max = 0.0;
  double grid_min = 0.0;
  int grid_len = 40;
};

int cmd_simulate(const std::vector<std::string>& argv, const SimFlags& sf,
                 const PenaltyFlags& pf, const std::string& methods_arg,
                 int reps, int B, std::uint64_t seed, double mfdr_target,
                 const std::string& out_dir) {
  StudyConfig study;
  if (!sf.preset.empty()) {
    const StudyPreset ps = preset_by_name(sf.preset);
    study.design = ps.design;
    study.spec.lambda_grid = ps.lambda_grid;
  } else {
    study.design.n = sf.n;
    study.design.p = sf.p;
    study.design.n_causative = sf.causative;
    study.design.m_per_causative = sf.m;
    study.design.rho_corr = sf.rho_corr;
    study.design.noise = noise_kind_from_name(sf.noise);
    study.design.rho_noise = sf.rho_noise;
    study.design.beta = sf.beta;
    study.design.sigma = sf.sigma;
    if (!(sf.grid_max > 0.0))
      throw InvalidInput("explicit designs need --grid-max");
  }
  if (sf.grid_max > 0.0) {
    const double bottom =
        sf.grid_min > 0.0 ? sf.grid_min : 0.1 * sf.grid_max;
    study.spec.lambda_grid = log_spaced_grid(sf.grid_max, bottom, sf.grid_len);
  }
  study.spec.family = family_from_name(pf.penalty);
  study.spec.gamma = pf.gamma;
  study.spec.alpha = pf.alpha;
  study.spec.validate();

  std::stringstream ms(methods_arg);
  std::string tok;
  while (std::getline(ms, tok, ','))
    if (!tok.empty()) study.methods.push_back(method_from_name(tok));
  if (study.methods.empty())
    throw InvalidInput("--methods must name at least one estimator");
  study.reps = reps;
  study.B = B;
  study.seed = seed;
  study.n_threads = default_thread_count();
  study.mfdr_target = mfdr_target;

  const StudyResult result = replicate_study(study);

  prepare_out_dir(out_dir);
  write_text_file(join_path(out_dir, "study.csv"), study_csv(result));

  RunManifest man;
  man.command = "simulate";
  man.argv = argv;
  man.params["design"] = {
      {"n", study.design.n},
      {"p", study.design.p},
      {"causative", study.design.n_causative},
      {"m_per_causative", study.design.m_per_causative},
      {"rho_corr", study.design.rho_corr},
      {"noise", noise_kind_name(study.design.noise)},
      {"rho_noise", study.design.rho_noise},
      {"beta", study.design.beta},
      {"sigma", study.design.sigma},
  };
  if (!sf.preset.empty()) man.params["preset"] = sf.preset;
  man.params["penalty"] = pf.penalty;
  man.params["gamma"] = pf.gamma;
  man.params["alpha"] = pf.alpha;
  man.params["grid_top"] = study.spec.lambda_grid.front();
  man.params["grid_bottom"] = study.spec.lambda_grid.back();
  man.params["grid_len"] = static_cast<int>(study.spec.lambda_grid.size());
  man.params["methods"] = methods_arg;
  man.params["reps"] = reps;
  man.params["B"] = B;
  man.params["seed"] = seed;
  man.params["failures"] = result.failures;
  man.threads_used = study.n_threads;

  if (mfdr_target > 0.0) {
    nlohmann::json cj;
    cj["target"] = mfdr_target;
    cj["replicates_ok"] = result.chosen_ok;
    cj["replicates_empty_model_only"] = result.chosen_empty;
    cj["replicates_no_qualifying_lambda"] = result.chosen_none;
    cj["realized_true_mfdr"] = result.realized_true_mfdr;
    write_text_file(join_path(out_dir, "chosen_summary.json"),
                    cj.dump(2) + "\n");
    std::cout << "mfdr target " << mfdr_target << ": realized true mfdr "
              << format_double(result.realized_true_mfdr) << " over "
              << result.chosen_ok << " selecting replicates ("
              << result.chosen_none << " with no qualifying lambda)\n";
  }
  man.write(join_path(out_dir, "manifest.json"));
  std::cout << "simulate: " << reps << " replicates, " << result.failures
            << " failures -> " << out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Penalized regression paths with marginal false discovery "
               "rate estimates"};
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "fit a solution path and the "
                                        "analytic mfdr table");
  DataFlags fit_data;
  PenaltyFlags fit_pen;
  std::string fit_out;
  double fit_target = 0.0;
  add_data_flags(fit, fit_data);
  add_penalty_flags(fit, fit_pen);
  fit->add_option("--out-dir", fit_out, "output directory")->required();
  fit->add_option("--mfdr-target", fit_target,
                  "report the smallest lambda with mfdr below this target");

  // perm
  auto* perm = app.add_subcommand("perm", "permutation-based mfdr estimate");
  DataFlags perm_data;
  PenaltyFlags perm_pen;
  std::string perm_method, perm_out, perm_fit_dir;
  int perm_B = 100;
  std::uint64_t perm_seed = 0;
  add_data_flags(perm, perm_data);
  add_penalty_flags(perm, perm_pen);
  perm->add_option("--method", perm_method, "perm-y or perm-r")
      ->required()
      ->check(CLI::IsMember({"perm-y", "perm-r"}));
  perm->add_option("--B", perm_B, "number of permutations")
      ->check(CLI::PositiveNumber);
  perm->add_option("--seed", perm_seed, "permutation seed");
  perm->add_option("--fit-dir", perm_fit_dir,
                   "reuse a stored fit; its penalty and lambda grid are "
                   "adopted unless penalty flags override them");
  perm->add_option("--out-dir", perm_out, "output directory")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "replicate study on a synthetic "
                                             "design");
  SimFlags sim_flags;
  PenaltyFlags sim_pen;
  std::string sim_methods = "analytic";
  std::string sim_out;
  int sim_reps = 100;
  int sim_B = 100;
  std::uint64_t sim_seed = 0;
  double sim_target = 0.0;
  sim->add_option("--preset", sim_flags.preset,
                  "named design: lowdim-ind, highdim-ind, ar-corr, exch-corr");
  sim->add_option("--n", sim_flags.n, "observations");
  sim->add_option("--p", sim_flags.p, "features");
  sim->add_option("--causative", sim_flags.causative, "causative features");
  sim->add_option("--m", sim_flags.m, "correlated shadows per causative");
  sim->add_option("--rho-corr", sim_flags.rho_corr,
                  "causative-shadow correlation");
  sim->add_option("--noise", sim_flags.noise,
                  "noise structure: independent, ar, exchangeable");
  sim->add_option("--rho-noise", sim_flags.rho_noise, "noise correlation");
  sim->add_option("--beta", sim_flags.beta, "causative coefficient");
  sim->add_option("--sigma", sim_flags.sigma, "error standard deviation");
  sim->add_option("--grid-max", sim_flags.grid_max, "largest grid lambda");
  sim->add_option("--grid-min", sim_flags.grid_min,
                  "smallest grid lambda (default grid-max / 10)");
  sim->add_option("--grid-len", sim_flags.grid_len, "grid length")
      ->check(CLI::PositiveNumber);
  add_penalty_flags(sim, sim_pen);
  sim->add_option("--methods", sim_methods,
                  "comma list of analytic, perm-y, perm-r");
  sim->add_option("--reps", sim_reps, "replicates")->check(CLI::PositiveNumber);
  sim->add_option("--B", sim_B, "permutations per replicate")
      ->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "study seed");
  sim->add_option("--mfdr-target", sim_target,
                  "per-replicate smallest-lambda-under-target rule");
  sim->add_option("--out-dir", sim_out, "output directory")->required();

  try {
    app.parse(argc, argv);
    if (fit->parsed())
      return cmd_fit(args, fit_data, fit_pen, fit_out, fit_target);
    if (perm->parsed()) {
      const bool pen_given =
          perm->count("--penalty") || perm->count("--gamma") ||
          perm->count("--alpha") || perm->count("--nlambda") ||
          perm->count("--lambda-min-ratio");
      return cmd_perm(args, perm_data, perm_pen,
                      !perm_fit_dir.empty() && !pen_given, perm_method,
                      perm_B, perm_seed, perm_fit_dir, perm_out);
    }
    if (sim->parsed())
      return cmd_simulate(args, sim_flags, sim_pen, sim_methods, sim_reps,
                          sim_B, sim_seed, sim_target, sim_out);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const mfdr::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const mfdr::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
