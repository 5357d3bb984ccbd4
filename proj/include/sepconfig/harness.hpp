#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sepconfig/catalog.hpp"

namespace sepconfig {

enum class SolveStatus { Optimal, GapLimit, TimeLimit, Error };

std::string_view to_string(SolveStatus status);

struct SolveOutcome {
  std::string instance;
  std::string config_hash;
  int seed = 0;
  SolveStatus status = SolveStatus::Error;
  /// Wall seconds for SCIP, work units for Gurobi, scripted units for the stub.
  double time = 0.0;
  double gap = 0.0;  // fraction; 0 when solved to optimality
  std::string log_path;
  std::string message;  // error detail when status == Error
};

/// Cuts applied per separator while solving one instance, keyed by the
/// solver's statistics row name.
struct SeparatorUsage {
  std::string instance;
  std::map<std::string, long long> cuts_applied;
};

struct SolveRequest {
  std::string instance;       // file path, or table id for the stub
  std::string settings_text;  // rendered separator settings
  std::string config_hash;
  int seed = 0;
  std::optional<double> time_limit;
  double gap_target = 0.0;
  int threads = 4;
  bool collect_usage = false;
};

struct SolveReport {
  SolveOutcome outcome;
  std::optional<SeparatorUsage> usage;
};

class Solver {
public:
  virtual ~Solver() = default;
  virtual SolveReport solve(const SolveRequest& request) = 0;
  virtual std::string name() const = 0;
};

/// Scripted in-process solver. The solve time of (instance, configuration) is
///   base_time(instance) * factor(configuration) * jitter(seed)
/// where the factor is either an exact per-configuration override or the
/// product of per-separator level factors. Gap behaviour follows the
/// instance's gap trace: a step function of (time, gap) breakpoints.
struct StubTable {
  struct Instance {
    double base_time = 1.0;
    std::vector<std::pair<double, double>> gap_trace;  // (time, gap) steps
  };

  double initial_gap = 1.0;
  double seed_jitter = 0.0;  // relative amplitude of deterministic per-seed noise
  std::map<std::string, Instance> instances;
  std::map<std::string, std::map<std::string, double>> level_factors;  // sep -> level -> factor
  std::map<std::string, double> config_factors;                        // config hash -> factor
  std::map<std::string, std::map<std::string, long long>> usage;       // default-config stats

  static StubTable from_json(const nlohmann::json& doc);
  nlohmann::ordered_json to_json() const;
  static StubTable load(const std::filesystem::path& path);
};

class StubSolver : public Solver {
public:
  explicit StubSolver(StubTable table) : table_(std::move(table)) {}

  SolveReport solve(const SolveRequest& request) override;
  std::string name() const override { return "stub"; }

  long long call_count() const { return calls_.load(); }
  void reset_call_count() { calls_ = 0; }

  /// The scripted time before any time limit is applied.
  double scripted_time(const std::string& instance, const std::string& settings_text,
                       const std::string& config_hash, int seed) const;

private:
  StubTable table_;
  std::atomic<long long> calls_{0};
};

/// Command templates for batch-mode solver invocation. Placeholders:
/// {binary}, {settings} (settings file path), {instance}, {params}
/// (settings rendered as name=value command-line arguments).
struct SubprocessSolverConfig {
  std::string binary;
  std::string command_template;
  std::filesystem::path work_dir = ".";
};

/// Runs SCIP in batch mode and parses its summary block and separator
/// statistics table. Seed, limits and the thread cap are appended to the
/// settings file using SCIP's native parameters.
class ScipSolver : public Solver {
public:
  explicit ScipSolver(SubprocessSolverConfig config);
  SolveReport solve(const SolveRequest& request) override;
  std::string name() const override { return "scip"; }

private:
  SubprocessSolverConfig config_;
  std::atomic<long long> run_counter_{0};
};

/// Runs the Gurobi command-line solver; times are work units and limits are
/// enforced through WorkLimit.
class GurobiSolver : public Solver {
public:
  explicit GurobiSolver(SubprocessSolverConfig config);
  SolveReport solve(const SolveRequest& request) override;
  std::string name() const override { return "gurobi"; }

private:
  SubprocessSolverConfig config_;
  std::atomic<long long> run_counter_{0};
};

/// Parsed fields of a SCIP batch log.
struct ScipLogSummary {
  SolveStatus status = SolveStatus::Error;
  double solving_time = 0.0;
  double gap = 0.0;
  std::map<std::string, long long> cuts_applied;
};
ScipLogSummary parse_scip_log(const std::string& log_text);

struct GurobiLogSummary {
  SolveStatus status = SolveStatus::Error;
  double work_units = 0.0;
  double gap = 0.0;
  std::map<std::string, long long> cuts_applied;
};
GurobiLogSummary parse_gurobi_log(const std::string& log_text);

/// Evaluation protocol parameters.
struct RunPlan {
  SolverKind solver = SolverKind::Stub;
  std::string catalog_hash;
  std::string val_set;
  std::string eval_set;
  int seeds = 10;
  int base_seed = 0;
  double limit_multiplier = 2.5;
  double gap_target = 0.0;  // 0 = solve to optimality
  int threads_per_solve = 4;
  int workers = 1;

  std::vector<int> seed_list() const;
  nlohmann::ordered_json to_json() const;
  static RunPlan from_json(const nlohmann::json& doc);
};

struct InstanceSet {
  std::string name;
  std::vector<std::string> instances;
};

/// Per-instance evaluation of one configuration against the default.
struct EvalRecord {
  std::string instance;
  double t_default = 0.0;
  double t_config = 0.0;
  double improvement = 0.0;
  bool censored = false;
  /// All runs finished without hitting the time limit (gap-limit runs count
  /// as finished: they reached the requested target).
  bool solved = true;
  double mean_gap = 0.0;
  int error_runs = 0;
  bool valid = true;  // at least one non-error run contributed
  std::string error_message;
};

double mean_time(const std::vector<SolveOutcome>& outcomes);

struct ImprovementValue {
  double value = 0.0;
  bool censored = false;
};

/// Relative solve-time improvement in percent: 100 * (t_default - t_config) /
/// t_default. When the mean sits at the limit (t_config == multiplier *
/// t_default) the value is exactly 100 * (1 - multiplier) and the censored
/// flag is set. Requires t_default > 0.
ImprovementValue improvement(double t_default, double t_config, double limit_multiplier);

/// Cache of default-configuration mean solve times keyed by instance,
/// solver, and the exact seed list, optionally persisted to disk.
class DefaultsCache {
public:
  DefaultsCache() = default;
  explicit DefaultsCache(std::filesystem::path file);

  std::optional<double> lookup(const std::string& key) const;
  void store(const std::string& key, double mean);
  static std::string key_for(const std::string& instance, const std::string& solver,
                             const std::vector<int>& seeds);

private:
  void save() const;

  std::filesystem::path file_;
  std::map<std::string, double> entries_;
  mutable std::mutex mutex_;
};

/// Drives solves for one (solver, catalog, plan) and turns them into
/// EvalRecords. The per-instance time limit for configured runs is
/// limit_multiplier times that instance's default mean; default runs are
/// unlimited.
class Evaluator {
public:
  Evaluator(Solver& solver, const SeparatorCatalog& catalog, RunPlan plan,
            DefaultsCache* cache = nullptr, std::filesystem::path log_dir = {});

  std::vector<EvalRecord> evaluate(const Configuration& config, const InstanceSet& instances);
  double default_mean(const std::string& instance);
  std::vector<SeparatorUsage> collect_default_usage(const InstanceSet& instances);

  const RunPlan& plan() const { return plan_; }
  /// Solves performed through this evaluator, defaults included.
  long long solve_count() const { return solves_.load(); }

private:
  SolveOutcome run_one(const std::string& instance, const Configuration& config, int seed,
                       std::optional<double> time_limit, bool collect_usage,
                       SeparatorUsage* usage_out);

  Solver& solver_;
  const SeparatorCatalog& catalog_;
  RunPlan plan_;
  DefaultsCache* cache_ = nullptr;
  DefaultsCache local_cache_;
  std::filesystem::path log_dir_;
  Configuration default_config_;
  std::string default_settings_;
  std::atomic<long long> solves_{0};
};

struct Summary {
  double median = 0.0;
  double iqr = 0.0;
  int solved = 0;
  int censored = 0;
  int count = 0;   // records with at least one successful run
  int errors = 0;  // records excluded because every run failed
};

/// Median and IQR (type-7 quantiles) of the improvement values. Records whose
/// every run errored are excluded from the statistics and counted separately.
Summary summarize(const std::vector<EvalRecord>& records);

/// Median, over instances solved by neither method, of (gap_b - gap_a) in
/// percentage points. Pass the configured run as `a` and the reference as
/// `b`, so larger favors the configured run.
double gap_comparison(const std::vector<EvalRecord>& a, const std::vector<EvalRecord>& b);

nlohmann::ordered_json eval_records_to_json(const std::vector<EvalRecord>& records);
std::vector<EvalRecord> eval_records_from_json(const nlohmann::json& doc);

}  // namespace sepconfig
