#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <openssl/evp.h>

#include "laica/harness/aggregate.hpp"
#include "laica/harness/config.hpp"

namespace laica {

struct ExperimentFailed : LaicaError {
  using LaicaError::LaicaError;
};

// Hash of a byte string as git computes it for a blob object.
inline std::string git_blob_sha1(const std::string& content) {
  std::string data = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr) != 1)
    throw LaicaError("sha1 digest failed");
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

// Flag, then LAICA_LAB_THREADS, then hardware concurrency.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LAICA_LAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs job(i) for i in [0, n) on `threads` workers. Exceptions escaping a job
// are rethrown after the join.
inline void parallel_for(int n, int threads, const std::function<void(int)>& job) {
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i; (i = next.fetch_add(1)) < n;) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  threads = std::max(1, std::min(threads, n));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct ExperimentResult {
  CurveBundle curves;
  std::vector<TrialRecord> trials;
  std::vector<ChangeSchedule> schedules;  // one per seed index, shared by algorithms
  nlohmann::json manifest;
};

struct RunOptions {
  std::string config_text;  // raw input bytes, hashed into the manifest
  int threads = 0;          // overrides config.threads when positive
  std::function<void(const std::string&)> log;
};

// Shared by every algorithm at one seed index, so all of them start from the
// same environment and schedule realization.
inline std::uint64_t trial_seed(std::uint64_t master, int seed_index) {
  return derive_seed(master, {static_cast<std::uint64_t>(Stream::trial), static_cast<std::uint64_t>(seed_index)});
}

inline ChangeSchedule experiment_schedule(const ExperimentConfig& cfg, const EnvironmentBundle& env, int seed_index) {
  Rng rng = make_rng(cfg.master_seed, {static_cast<std::uint64_t>(Stream::schedule), static_cast<std::uint64_t>(seed_index)});
  return build_schedule(cfg.schedule, env, rng);
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw LaicaError("cannot write " + p.string());
  os << text;
}

// Runs every (algorithm, seed) trial and writes curves.csv, trials/*.json,
// schedules/*.json and manifest.json under cfg.output_dir.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
  namespace fs = std::filesystem;
  const auto env = build_environment(cfg.env);
  ExperimentResult res;
  for (int i = 0; i < cfg.n_seeds; ++i) res.schedules.push_back(experiment_schedule(cfg, env, i));

  const int n_alg = static_cast<int>(cfg.algorithms.size());
  const int n_trials = n_alg * cfg.n_seeds;
  res.trials.resize(static_cast<size_t>(n_trials));
  std::mutex log_mutex;
  parallel_for(n_trials, resolve_threads(opt.threads > 0 ? opt.threads : cfg.threads), [&](int t) {
    Algorithm a = cfg.algorithms[static_cast<size_t>(t / cfg.n_seeds)];
    int i = t % cfg.n_seeds;
    LifelongSetup setup{env.env.get(), env.space, res.schedules[static_cast<size_t>(i)], cfg.schedule.episodes_per_segment};
    auto rec = run_lifelong(setup, a, cfg.agent, trial_seed(cfg.master_seed, i));
    rec.seed = static_cast<std::uint64_t>(i);
    if (opt.log) {
      std::lock_guard lock(log_mutex);
      std::size_t tail = std::min<std::size_t>(100, rec.returns.size());
      std::vector<double> last(rec.returns.end() - static_cast<std::ptrdiff_t>(tail), rec.returns.end());
      opt.log(to_string(a) + " seed " + std::to_string(i) + (rec.fault ? " FAULT: " + *rec.fault : "") +
              " final-100 mean " + format_double(mean_of(last)));
    }
    res.trials[static_cast<size_t>(t)] = std::move(rec);
  });

  std::vector<std::string> names;
  for (auto a : cfg.algorithms) names.push_back(to_string(a));
  res.curves = aggregate(names, res.trials, cfg.running_mean_window);

  int faults = 0;
  nlohmann::json fault_list = nlohmann::json::array();
  std::vector<std::string> warnings = res.curves.warnings;
  for (const auto& t : res.trials)
    if (t.fault) {
      ++faults;
      fault_list.push_back({{"algorithm", t.algorithm}, {"seed", t.seed}, {"fault", *t.fault}});
      warnings.push_back(t.algorithm + " seed " + std::to_string(t.seed) + " faulted and was excluded: " + *t.fault);
    }

  fs::path out(cfg.output_dir);
  fs::create_directories(out / "trials");
  fs::create_directories(out / "schedules");
  for (const auto& t : res.trials)
    write_text(out / "trials" / (t.algorithm + "_seed" + std::to_string(t.seed) + ".json"), to_json(t).dump() + "\n");
  for (int i = 0; i < cfg.n_seeds; ++i)
    write_text(out / "schedules" / ("seed" + std::to_string(i) + ".json"), to_json(res.schedules[static_cast<size_t>(i)]).dump() + "\n");
  {
    std::ostringstream os;
    write_curves_csv(res.curves, os);
    write_text(out / "curves.csv", os.str());
  }
  auto resolved = to_json(cfg);
  res.manifest = {
      {"config", resolved},
      {"input_sha1", git_blob_sha1(opt.config_text.empty() ? resolved.dump() : opt.config_text)},
      {"resolved_config_sha1", git_blob_sha1(resolved.dump())},
      {"n_trials", n_trials},
      {"n_faulted", faults},
      {"faults", fault_list},
      {"warnings", warnings},
      {"running_mean_window", cfg.running_mean_window},
      {"setting_note",
       "curves use one fixed hyperparameter setting per algorithm, not the best setting of a search"}};
  write_text(out / "manifest.json", res.manifest.dump(2) + "\n");

  if (faults * 5 > n_trials)
    throw ExperimentFailed(std::to_string(faults) + " of " + std::to_string(n_trials) + " trials faulted (limit 20%)");
  return res;
}

}  // namespace laica
