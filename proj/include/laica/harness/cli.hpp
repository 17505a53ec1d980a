#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "laica/harness/experiment.hpp"
#include "laica/verify/bounds.hpp"

namespace laica {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2 };

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError(path, "cannot open config file");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

inline ExperimentConfig load_config(const std::string& path, std::string* text_out = nullptr) {
  std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path, std::string("malformed JSON: ") + e.what());
  }
  if (text_out) *text_out = text;
  try {
    return parse_experiment_config(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path, e.what());
  }
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Theorem1Options {
  int instances = 50;
  std::uint64_t seed = 0;
  int n_states = 10;
  int latent_dim = 2;
  int n_changes = 5;
  int initial = 1;
  int per_change = 2;
  double gamma = 0.9;
  int grid_per_dim = 64;
  int threads = 0;
};

inline std::vector<BoundRow> run_theorem1(const Theorem1Options& o) {
  std::vector<std::vector<BoundRow>> per(static_cast<size_t>(o.instances));
  CertifyOptions copt;
  copt.grid_per_dim = o.grid_per_dim;
  parallel_for(o.instances, resolve_threads(o.threads), [&](int i) {
    auto inst = make_verification_instance(derive_seed(o.seed, {static_cast<std::uint64_t>(i)}), o.n_states,
                                           o.latent_dim, o.n_changes, o.initial, o.per_change, o.gamma);
    per[static_cast<size_t>(i)] = certify_theorem1(inst.env, inst.schedule, copt, i).rows;
  });
  std::vector<BoundRow> rows;
  for (auto& p : per) rows.insert(rows.end(), p.begin(), p.end());
  return rows;
}

struct Corollary1Options {
  int seeds = 20;
  std::uint64_t seed = 0;
  int n_states = 10;
  int latent_dim = 1;
  int n_changes = 10;
  int initial = 1;
  int per_change = 4;
  double gamma = 0.9;
  int grid_per_dim = 64;
  int threads = 0;
};

struct Corollary1Result {
  std::vector<TrendReport> runs;
  bool epsilon_monotone_all = true;
  double median_gap_first = 0.0;
  double median_gap_last = 0.0;
  int gap_decreased = 0;  // runs with gap_last <= gap_first
};

inline Corollary1Result run_corollary1(const Corollary1Options& o) {
  Corollary1Result res;
  res.runs.resize(static_cast<size_t>(o.seeds));
  CertifyOptions copt;
  copt.grid_per_dim = o.grid_per_dim;
  parallel_for(o.seeds, resolve_threads(o.threads), [&](int i) {
    auto inst = make_verification_instance(derive_seed(o.seed, {static_cast<std::uint64_t>(i)}), o.n_states,
                                           o.latent_dim, o.n_changes, o.initial, o.per_change, o.gamma);
    res.runs[static_cast<size_t>(i)] = certify_corollary1(inst.env, inst.schedule, copt);
  });
  std::vector<double> first, last;
  for (const auto& r : res.runs) {
    res.epsilon_monotone_all = res.epsilon_monotone_all && r.epsilon_nonincreasing;
    first.push_back(r.gap.front());
    last.push_back(r.gap.back());
    res.gap_decreased += r.gap.back() <= r.gap.front();
  }
  res.median_gap_first = median(first);
  res.median_gap_last = median(last);
  return res;
}

// Adaptation-only pass over one seed's schedule: rows are stacked and the
// lower bound optimized at every change, with no policy improvement.
inline nlohmann::json adaptation_report(const ExperimentConfig& cfg, int seed_index) {
  auto env = build_environment(cfg.env);
  auto schedule = experiment_schedule(cfg, env, seed_index);
  std::uint64_t seed = trial_seed(cfg.master_seed, seed_index);
  Rng init_rng = make_rng(seed, {static_cast<std::uint64_t>(Stream::init)});
  Rng adapt_rng = make_rng(seed, {static_cast<std::uint64_t>(Stream::adaptation)});
  Rng row_rng = make_rng(seed, {static_cast<std::uint64_t>(Stream::row_init)});
  Rng kl_rng = make_rng(seed, {static_cast<std::uint64_t>(Stream::probes)});
  Featurizer featurizer = make_featurizer(cfg.agent.features, env.env->info().observation_dim);
  PolicyBundle bundle(featurizer, cfg.agent.bundle, init_rng);
  ActionRegistry registry(env.space);
  nlohmann::json out = nlohmann::json::array();
  for (int c = 0; c < schedule.n_changes(); ++c) {
    auto added = registry.add_change(schedule.additions[static_cast<size_t>(c)]);
    bundle.selector.stack_rows(static_cast<int>(added.size()), row_rng);
    nlohmann::json row{{"k", registry.current_k()}, {"n_available", registry.size()}};
    if (env.tabular)
      row["kl_objective_pre"] =
          estimate_kl_objective(bundle.selector, bundle.inverse, featurizer, *env.tabular, registry, 4096, kl_rng).value;
    row["adaptation"] = to_json(run_adaptation(bundle, *env.env, registry, cfg.agent.adaptation, adapt_rng));
    if (env.tabular) {
      row["kl_objective_post"] =
          estimate_kl_objective(bundle.selector, bundle.inverse, featurizer, *env.tabular, registry, 4096, kl_rng).value;
      row["delta_hat"] = measure_delta_k(bundle.selector, bundle.inverse, featurizer, *env.tabular, registry, 4096, kl_rng);
    }
    out.push_back(row);
  }
  return {{"env", env_type(cfg.env)}, {"seed_index", seed_index}, {"changes", out}};
}

// Re-emits curves.csv from a run directory's trials and manifest.
inline CurveBundle curves_from_run_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  fs::path root(dir);
  if (!fs::is_directory(root / "trials")) throw ConfigError(dir, "no trials/ directory");
  auto manifest = nlohmann::json::parse(read_file((root / "manifest.json").string()));
  int window = manifest.at("running_mean_window");
  std::vector<std::string> names = manifest.at("config").at("algorithms");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(root / "trials"))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<TrialRecord> trials;
  for (const auto& f : files) trials.push_back(trial_from_json(nlohmann::json::parse(read_file(f.string()))));
  return aggregate(names, trials, window);
}

inline int cli_dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"laica-lab: lifelong RL with action-set changes"};
  app.require_subcommand(1);

  std::string config_path, out_dir, in_dir, out_file;
  std::uint64_t seed = 0;
  int threads = 0;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "run a multi-seed lifelong experiment");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  auto* run_seed = run->add_option("--seed", seed, "master seed override");
  run->add_option("--out", out_dir, "output directory override");
  run->add_option("--threads", threads, "worker threads (default: LAICA_LAB_THREADS or hardware)");
  run->add_flag("--quiet", quiet, "no per-trial progress");

  Theorem1Options t1;
  auto* th1 = app.add_subcommand("verify-theorem1", "certify the sub-optimality bound on random tabular instances");
  th1->add_option("--instances", t1.instances)->check(CLI::PositiveNumber);
  th1->add_option("--seed", t1.seed);
  th1->add_option("--out", out_dir)->required();
  th1->add_option("--states", t1.n_states)->check(CLI::Range(2, 64));
  th1->add_option("--latent-dim", t1.latent_dim)->check(CLI::Range(1, 2));
  th1->add_option("--changes", t1.n_changes)->check(CLI::PositiveNumber);
  th1->add_option("--initial", t1.initial)->check(CLI::PositiveNumber);
  th1->add_option("--per-change", t1.per_change)->check(CLI::PositiveNumber);
  th1->add_option("--gamma", t1.gamma)->check(CLI::Range(0.0, 0.999));
  th1->add_option("--grid", t1.grid_per_dim)->check(CLI::Range(2, 4096));
  th1->add_option("--threads", t1.threads);

  Corollary1Options c1;
  auto* co1 = app.add_subcommand("verify-corollary1", "measure the covering-radius and gap trend under uniform additions");
  co1->add_option("--seeds", c1.seeds)->check(CLI::PositiveNumber);
  co1->add_option("--seed", c1.seed);
  co1->add_option("--out", out_dir)->required();
  co1->add_option("--states", c1.n_states)->check(CLI::Range(2, 64));
  co1->add_option("--latent-dim", c1.latent_dim)->check(CLI::Range(1, 2));
  co1->add_option("--changes", c1.n_changes)->check(CLI::PositiveNumber);
  co1->add_option("--initial", c1.initial)->check(CLI::PositiveNumber);
  co1->add_option("--per-change", c1.per_change)->check(CLI::PositiveNumber);
  co1->add_option("--gamma", c1.gamma)->check(CLI::Range(0.0, 0.999));
  co1->add_option("--grid", c1.grid_per_dim)->check(CLI::Range(2, 4096));
  co1->add_option("--threads", c1.threads);

  int seed_index = 0;
  auto* ar = app.add_subcommand("adapt-report", "adaptation-only diagnostics for one seed");
  ar->add_option("--config", config_path)->required();
  ar->add_option("--seed-index", seed_index)->check(CLI::NonNegativeNumber);
  ar->add_option("--out", out_file, "write JSON here instead of stdout");

  auto* pd = app.add_subcommand("plot-data", "re-emit curves.csv from a run directory");
  pd->add_option("--in", in_dir)->required();
  pd->add_option("--out", out_file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (*run) {
      std::string text;
      auto cfg = load_config(config_path, &text);
      if (*run_seed) cfg.master_seed = seed;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      RunOptions ro;
      ro.config_text = text;
      ro.threads = threads;
      if (!quiet) ro.log = [&err](const std::string& s) { err << s << "\n"; };
      auto res = run_experiment(cfg, ro);
      out << "wrote " << cfg.output_dir << " (" << res.trials.size() << " trials, " << res.manifest["n_faulted"]
          << " faulted)\n";
    } else if (*th1) {
      auto rows = run_theorem1(t1);
      std::filesystem::create_directories(out_dir);
      std::ostringstream csv;
      write_bound_csv(csv, rows);
      write_text(std::filesystem::path(out_dir) / "theorem1.csv", csv.str());
      auto summary = bound_summary(rows);
      write_text(std::filesystem::path(out_dir) / "theorem1_summary.json", summary.dump(2) + "\n");
      out << summary.dump() << "\n";
      if (!summary["all_hold"].get<bool>()) {
        err << "bound violated on " << (rows.size() - summary["holds"].get<size_t>()) << " rows\n";
        return kExitRuntime;
      }
    } else if (*co1) {
      auto res = run_corollary1(c1);
      std::filesystem::create_directories(out_dir);
      std::ostringstream csv;
      csv << "seed,k,epsilon_k,gap\n";
      csv.precision(17);
      for (size_t i = 0; i < res.runs.size(); ++i)
        for (size_t k = 0; k < res.runs[i].gap.size(); ++k)
          csv << i << "," << k + 1 << "," << res.runs[i].epsilon[k] << "," << res.runs[i].gap[k] << "\n";
      write_text(std::filesystem::path(out_dir) / "corollary1.csv", csv.str());
      nlohmann::json summary{{"seeds", c1.seeds},
                             {"changes", c1.n_changes},
                             {"epsilon_nonincreasing_all", res.epsilon_monotone_all},
                             {"median_gap_first", res.median_gap_first},
                             {"median_gap_last", res.median_gap_last},
                             {"runs_gap_decreased", res.gap_decreased}};
      write_text(std::filesystem::path(out_dir) / "corollary1_summary.json", summary.dump(2) + "\n");
      out << summary.dump() << "\n";
      if (!res.epsilon_monotone_all) {
        err << "covering radius increased after an addition\n";
        return kExitRuntime;
      }
    } else if (*ar) {
      auto cfg = load_config(config_path);
      auto rep = adaptation_report(cfg, seed_index).dump(2) + "\n";
      if (out_file.empty())
        out << rep;
      else
        write_text(out_file, rep);
    } else if (*pd) {
      auto curves = curves_from_run_dir(in_dir);
      std::ostringstream csv;
      write_curves_csv(curves, csv);
      write_text(out_file, csv.str());
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "runtime fault: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace laica
