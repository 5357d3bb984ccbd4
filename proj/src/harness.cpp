#include "sepconfig/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sepconfig/errors.hpp"
#include "sepconfig/parallel.hpp"
#include "sepconfig/stats.hpp"

namespace sepconfig {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::GapLimit: return "gap_limit";
    case SolveStatus::TimeLimit: return "time_limit";
    case SolveStatus::Error: return "error";
  }
  return "error";
}

// ---------------------------------------------------------------------------
// Stub solver

StubTable StubTable::from_json(const json& doc) {
  StubTable table;
  table.initial_gap = doc.value("initial_gap", 1.0);
  table.seed_jitter = doc.value("seed_jitter", 0.0);
  for (const auto& [name, entry] : doc.value("instances", json::object()).items()) {
    Instance inst;
    inst.base_time = entry.value("base_time", 1.0);
    for (const auto& point : entry.value("gap_trace", json::array())) {
      inst.gap_trace.emplace_back(point[0].get<double>(), point[1].get<double>());
    }
    table.instances.emplace(name, std::move(inst));
  }
  for (const auto& [sep, levels] : doc.value("level_factors", json::object()).items()) {
    for (const auto& [level, factor] : levels.items()) {
      table.level_factors[sep][level] = factor.get<double>();
    }
  }
  for (const auto& [hash, factor] : doc.value("config_factors", json::object()).items()) {
    table.config_factors[hash] = factor.get<double>();
  }
  for (const auto& [inst, counts] : doc.value("usage", json::object()).items()) {
    for (const auto& [sep, count] : counts.items()) {
      table.usage[inst][sep] = count.get<long long>();
    }
  }
  return table;
}

ordered_json StubTable::to_json() const {
  ordered_json doc;
  doc["initial_gap"] = initial_gap;
  doc["seed_jitter"] = seed_jitter;
  ordered_json insts;
  for (const auto& [name, inst] : instances) {
    ordered_json entry;
    entry["base_time"] = inst.base_time;
    if (!inst.gap_trace.empty()) {
      ordered_json trace = ordered_json::array();
      for (const auto& [t, g] : inst.gap_trace) trace.push_back({t, g});
      entry["gap_trace"] = std::move(trace);
    }
    insts[name] = std::move(entry);
  }
  doc["instances"] = std::move(insts);
  doc["level_factors"] = level_factors;
  doc["config_factors"] = config_factors;
  doc["usage"] = usage;
  return doc;
}

StubTable StubTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open stub table: " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ParseError("invalid stub table: " + std::string(e.what()));
  }
}

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Levels as the stub sees them, recovered from the rendered settings text:
/// "stub/<id>/freq = -1" disables, "= 10" is aggressive, absent is default.
std::map<std::string, std::string> stub_levels_from_settings(const std::string& settings_text) {
  std::map<std::string, std::string> levels;
  std::istringstream in(settings_text);
  std::string line;
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string param = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
    };
    trim(param);
    trim(value);
    if (param.rfind("stub/", 0) != 0 || !param.ends_with("/freq")) continue;
    std::string id = param.substr(5, param.size() - 5 - 5);
    levels[id] = (value == "-1") ? "off" : "aggressive";
  }
  return levels;
}

}  // namespace

double StubSolver::scripted_time(const std::string& instance, const std::string& settings_text,
                                 const std::string& config_hash, int seed) const {
  auto it = table_.instances.find(instance);
  if (it == table_.instances.end()) throw Error("stub table has no instance \"" + instance + "\"");
  double factor = 1.0;
  auto override_it = table_.config_factors.find(config_hash);
  if (override_it != table_.config_factors.end()) {
    factor = override_it->second;
  } else {
    auto levels = stub_levels_from_settings(settings_text);
    for (const auto& [sep, level_map] : table_.level_factors) {
      auto level_it = levels.find(sep);
      const std::string level = level_it == levels.end() ? "default" : level_it->second;
      auto factor_it = level_map.find(level);
      if (factor_it != level_map.end()) factor *= factor_it->second;
    }
  }
  double jitter = 1.0;
  if (table_.seed_jitter > 0.0) {
    const std::uint64_t h =
        fnv1a(instance + "|" + config_hash + "|" + std::to_string(seed));
    const double centered = 2.0 * (static_cast<double>(h % 10001) / 10000.0) - 1.0;
    jitter = std::max(0.01, 1.0 + table_.seed_jitter * centered);
  }
  return it->second.base_time * factor * jitter;
}

SolveReport StubSolver::solve(const SolveRequest& request) {
  calls_.fetch_add(1);
  SolveReport report;
  SolveOutcome& out = report.outcome;
  out.instance = request.instance;
  out.config_hash = request.config_hash;
  out.seed = request.seed;

  auto it = table_.instances.find(request.instance);
  if (it == table_.instances.end()) {
    out.status = SolveStatus::Error;
    out.message = "stub table has no instance \"" + request.instance + "\"";
    return report;
  }

  const double full_time =
      scripted_time(request.instance, request.settings_text, request.config_hash, request.seed);
  const auto& trace = it->second.gap_trace;

  double finish_time = full_time;
  SolveStatus finish_status = SolveStatus::Optimal;
  double finish_gap = 0.0;
  if (request.gap_target > 0.0) {
    for (const auto& [t, g] : trace) {
      if (g <= request.gap_target && t < finish_time) {
        finish_time = t;
        finish_status = SolveStatus::GapLimit;
        finish_gap = g;
        break;
      }
    }
  }

  if (request.time_limit && finish_time > *request.time_limit) {
    out.status = SolveStatus::TimeLimit;
    out.time = *request.time_limit;
    double gap = table_.initial_gap;
    for (const auto& [t, g] : trace) {
      if (t <= *request.time_limit) gap = g;
    }
    out.gap = gap;
  } else {
    out.status = finish_status;
    out.time = finish_time;
    out.gap = finish_gap;
  }

  if (request.collect_usage) {
    SeparatorUsage usage;
    usage.instance = request.instance;
    auto usage_it = table_.usage.find(request.instance);
    if (usage_it != table_.usage.end()) usage.cuts_applied = usage_it->second;
    report.usage = std::move(usage);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Subprocess solvers

namespace {

bool binary_resolvable(const std::string& binary) {
  if (binary.empty()) return false;
  if (binary.find('/') != std::string::npos) return std::filesystem::exists(binary);
  const char* path_env = std::getenv("PATH");
  if (!path_env) return false;
  std::istringstream paths(path_env);
  std::string dir;
  while (std::getline(paths, dir, ':')) {
    if (!dir.empty() && std::filesystem::exists(std::filesystem::path(dir) / binary)) return true;
  }
  return false;
}

std::string replace_all(std::string text, const std::string& token, const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text.find(token, pos)) != std::string::npos) {
    text.replace(pos, token.size(), value);
    pos += value.size();
  }
  return text;
}

/// Runs the command with stderr folded into stdout and returns the output.
std::string run_command(const std::string& command) {
  std::string wrapped = command + " 2>&1";
  FILE* pipe = popen(wrapped.c_str(), "r");
  if (!pipe) throw LaunchError("failed to launch: " + command);
  std::string output;
  char buf[1 << 14];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, n);
  pclose(pipe);  // solvers signal limit states in the log, not the exit code
  return output;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

std::filesystem::path ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  return dir;
}

}  // namespace

ScipSolver::ScipSolver(SubprocessSolverConfig config) : config_(std::move(config)) {
  if (config_.command_template.empty()) {
    config_.command_template =
        "{binary} -c \"set load {settings}\" -c \"read {instance}\" -c optimize "
        "-c \"display statistics\" -c quit";
  }
  if (!binary_resolvable(config_.binary)) {
    throw SolverNotFound("scip binary not found: \"" + config_.binary + "\"");
  }
}

SolveReport ScipSolver::solve(const SolveRequest& request) {
  const long long run = run_counter_.fetch_add(1);
  ensure_dir(config_.work_dir);
  const auto stem = config_.work_dir / ("scip_run_" + std::to_string(run));

  std::string settings = request.settings_text;
  settings += "randomization/randomseedshift = " + std::to_string(request.seed) + "\n";
  settings += "limits/gap = " + std::to_string(request.gap_target) + "\n";
  if (request.time_limit) {
    settings += "limits/time = " + std::to_string(*request.time_limit) + "\n";
  }
  settings += "parallel/maxnthreads = " + std::to_string(request.threads) + "\n";
  settings += "lp/threads = " + std::to_string(request.threads) + "\n";
  const auto settings_path = stem.string() + ".set";
  write_file(settings_path, settings);

  std::string command = config_.command_template;
  command = replace_all(command, "{binary}", config_.binary);
  command = replace_all(command, "{settings}", settings_path);
  command = replace_all(command, "{instance}", request.instance);

  SolveReport report;
  SolveOutcome& out = report.outcome;
  out.instance = request.instance;
  out.config_hash = request.config_hash;
  out.seed = request.seed;

  const std::string log = run_command(command);
  const auto log_path = stem.string() + ".log";
  write_file(log_path, log);
  out.log_path = log_path;

  try {
    ScipLogSummary summary = parse_scip_log(log);
    out.status = summary.status;
    out.time = summary.solving_time;
    out.gap = summary.gap;
    if (out.status == SolveStatus::TimeLimit && request.time_limit) {
      out.time = *request.time_limit;  // censored runs enter means at the limit
    }
    if (request.collect_usage) {
      report.usage = SeparatorUsage{request.instance, summary.cuts_applied};
    }
  } catch (const LogParseError& e) {
    out.status = SolveStatus::Error;
    out.message = e.what();
  }
  return report;
}

GurobiSolver::GurobiSolver(SubprocessSolverConfig config) : config_(std::move(config)) {
  if (config_.command_template.empty()) {
    config_.command_template = "{binary} {params} {instance}";
  }
  if (!binary_resolvable(config_.binary)) {
    throw SolverNotFound("gurobi binary not found: \"" + config_.binary + "\"");
  }
}

SolveReport GurobiSolver::solve(const SolveRequest& request) {
  const long long run = run_counter_.fetch_add(1);
  ensure_dir(config_.work_dir);
  const auto stem = config_.work_dir / ("gurobi_run_" + std::to_string(run));

  std::string settings = request.settings_text;
  settings += "Seed " + std::to_string(request.seed) + "\n";
  if (request.gap_target > 0.0) settings += "MIPGap " + std::to_string(request.gap_target) + "\n";
  if (request.time_limit) settings += "WorkLimit " + std::to_string(*request.time_limit) + "\n";
  settings += "Threads " + std::to_string(request.threads) + "\n";
  const auto settings_path = stem.string() + ".prm";
  write_file(settings_path, settings);

  // "Name value" lines become Name=value command-line parameters.
  std::string params;
  std::istringstream lines(settings);
  std::string line;
  while (std::getline(lines, line)) {
    auto space = line.find(' ');
    if (space == std::string::npos) continue;
    if (!params.empty()) params += " ";
    params += line.substr(0, space) + "=" + line.substr(space + 1);
  }

  std::string command = config_.command_template;
  command = replace_all(command, "{binary}", config_.binary);
  command = replace_all(command, "{params}", params);
  command = replace_all(command, "{settings}", settings_path);
  command = replace_all(command, "{instance}", request.instance);

  SolveReport report;
  SolveOutcome& out = report.outcome;
  out.instance = request.instance;
  out.config_hash = request.config_hash;
  out.seed = request.seed;

  const std::string log = run_command(command);
  const auto log_path = stem.string() + ".log";
  write_file(log_path, log);
  out.log_path = log_path;

  try {
    GurobiLogSummary summary = parse_gurobi_log(log);
    out.status = summary.status;
    out.time = summary.work_units;
    out.gap = summary.gap;
    if (out.status == SolveStatus::Optimal && request.gap_target > 0.0 && out.gap > 1e-9) {
      out.status = SolveStatus::GapLimit;  // stopped at the requested gap
    }
    if (out.status == SolveStatus::TimeLimit && request.time_limit) {
      out.time = *request.time_limit;
    }
    if (request.collect_usage) {
      report.usage = SeparatorUsage{request.instance, summary.cuts_applied};
    }
  } catch (const LogParseError& e) {
    out.status = SolveStatus::Error;
    out.message = e.what();
  }
  return report;
}

// ---------------------------------------------------------------------------
// Plans, metrics, evaluation

std::vector<int> RunPlan::seed_list() const {
  std::vector<int> seeds_out;
  seeds_out.reserve(static_cast<std::size_t>(seeds));
  for (int i = 0; i < seeds; ++i) seeds_out.push_back(base_seed + i);
  return seeds_out;
}

ordered_json RunPlan::to_json() const {
  ordered_json doc;
  doc["solver"] = std::string(to_string(solver));
  doc["catalog_hash"] = catalog_hash;
  doc["val_set"] = val_set;
  doc["eval_set"] = eval_set;
  doc["seeds"] = seeds;
  doc["base_seed"] = base_seed;
  doc["limit_multiplier"] = limit_multiplier;
  doc["gap_target"] = gap_target;
  doc["threads_per_solve"] = threads_per_solve;
  doc["workers"] = workers;
  return doc;
}

RunPlan RunPlan::from_json(const json& doc) {
  RunPlan plan;
  if (doc.contains("solver")) {
    auto kind = solver_kind_from_string(doc["solver"].get<std::string>());
    if (!kind) throw ParseError("unknown solver in plan");
    plan.solver = *kind;
  }
  plan.catalog_hash = doc.value("catalog_hash", std::string{});
  plan.val_set = doc.value("val_set", std::string{});
  plan.eval_set = doc.value("eval_set", std::string{});
  plan.seeds = doc.value("seeds", 10);
  plan.base_seed = doc.value("base_seed", 0);
  plan.limit_multiplier = doc.value("limit_multiplier", 2.5);
  plan.gap_target = doc.value("gap_target", 0.0);
  plan.threads_per_solve = doc.value("threads_per_solve", 4);
  plan.workers = doc.value("workers", 1);
  if (plan.seeds < 1) throw ValidationError("plan needs at least one seed");
  if (plan.limit_multiplier <= 1.0) throw ValidationError("limit multiplier must exceed 1");
  return plan;
}

double mean_time(const std::vector<SolveOutcome>& outcomes) {
  if (outcomes.empty()) throw EmptyList("mean over an empty outcome list");
  double sum = 0.0;
  for (const SolveOutcome& o : outcomes) sum += o.time;
  return sum / static_cast<double>(outcomes.size());
}

ImprovementValue improvement(double t_default, double t_config, double limit_multiplier) {
  if (t_default <= 0.0) throw NonPositiveDefaultTime("default mean time must be positive");
  const double limit = limit_multiplier * t_default;
  if (t_config >= limit) {
    return {100.0 * (1.0 - limit_multiplier), true};
  }
  return {100.0 * (t_default - t_config) / t_default, false};
}

DefaultsCache::DefaultsCache(std::filesystem::path file) : file_(std::move(file)) {
  std::ifstream in(file_);
  if (!in) return;
  try {
    json doc = json::parse(in);
    for (const auto& [key, value] : doc.items()) entries_[key] = value.get<double>();
  } catch (const json::parse_error&) {
    // stale or truncated cache files are simply rebuilt
    entries_.clear();
  }
}

std::optional<double> DefaultsCache::lookup(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void DefaultsCache::store(const std::string& key, double mean) {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_[key] = mean;
  save();
}

std::string DefaultsCache::key_for(const std::string& instance, const std::string& solver,
                                   const std::vector<int>& seeds) {
  std::string key = instance + "|" + solver + "|";
  for (int seed : seeds) key += std::to_string(seed) + ",";
  return key;
}

void DefaultsCache::save() const {
  if (file_.empty()) return;
  ordered_json doc;
  for (const auto& [key, value] : entries_) doc[key] = value;
  const auto tmp = file_.string() + ".tmp";
  std::ofstream out(tmp);
  out << doc.dump(2) << "\n";
  out.close();
  std::filesystem::rename(tmp, file_);
}

Evaluator::Evaluator(Solver& solver, const SeparatorCatalog& catalog, RunPlan plan,
                     DefaultsCache* cache, std::filesystem::path log_dir)
    : solver_(solver),
      catalog_(catalog),
      plan_(std::move(plan)),
      cache_(cache ? cache : &local_cache_),
      log_dir_(std::move(log_dir)),
      default_config_(default_configuration(catalog)),
      default_settings_(render_settings(default_config_, catalog)) {}

SolveOutcome Evaluator::run_one(const std::string& instance, const Configuration& config,
                                int seed, std::optional<double> time_limit, bool collect_usage,
                                SeparatorUsage* usage_out) {
  SolveRequest request;
  request.instance = instance;
  request.settings_text = config.content_hash() == default_config_.content_hash()
                              ? default_settings_
                              : render_settings(config, catalog_);
  request.config_hash = config.content_hash();
  request.seed = seed;
  request.time_limit = time_limit;
  request.gap_target = plan_.gap_target;
  request.threads = plan_.threads_per_solve;
  request.collect_usage = collect_usage;
  SolveReport report = solver_.solve(request);
  solves_.fetch_add(1);
  if (usage_out && report.usage) *usage_out = *report.usage;
  return report.outcome;
}

double Evaluator::default_mean(const std::string& instance) {
  const std::string key = DefaultsCache::key_for(instance, solver_.name(), plan_.seed_list());
  if (auto cached = cache_->lookup(key)) return *cached;

  std::vector<SolveOutcome> valid;
  std::string last_error;
  for (int seed : plan_.seed_list()) {
    // Default-configuration runs are never time limited.
    SolveOutcome outcome = run_one(instance, default_config_, seed, std::nullopt, false, nullptr);
    if (outcome.status == SolveStatus::Error) {
      last_error = outcome.message;
      continue;
    }
    valid.push_back(std::move(outcome));
  }
  if (valid.empty()) {
    throw Error("default solves failed for \"" + instance + "\": " + last_error);
  }
  const double mean = mean_time(valid);
  if (mean <= 0.0) throw NonPositiveDefaultTime("default mean is zero for \"" + instance + "\"");
  cache_->store(key, mean);
  return mean;
}

std::vector<EvalRecord> Evaluator::evaluate(const Configuration& config,
                                            const InstanceSet& instances) {
  std::vector<EvalRecord> records(instances.instances.size());
  parallel_for(instances.instances.size(), plan_.workers, [&](std::size_t i) {
    const std::string& instance = instances.instances[i];
    EvalRecord& record = records[i];
    record.instance = instance;
    try {
      const double t_default = default_mean(instance);
      const double limit = plan_.limit_multiplier * t_default;

      std::vector<SolveOutcome> valid;
      bool hit_limit = false;
      for (int seed : plan_.seed_list()) {
        SolveOutcome outcome = run_one(instance, config, seed, limit, false, nullptr);
        if (outcome.status == SolveStatus::Error) {
          ++record.error_runs;
          record.error_message = outcome.message;
          continue;
        }
        if (outcome.status == SolveStatus::TimeLimit) hit_limit = true;
        valid.push_back(std::move(outcome));
      }
      if (valid.empty()) {
        record.valid = false;
        record.solved = false;
        return;
      }
      record.t_default = t_default;
      record.t_config = mean_time(valid);
      double gap_sum = 0.0;
      for (const SolveOutcome& o : valid) gap_sum += o.gap;
      record.mean_gap = gap_sum / static_cast<double>(valid.size());
      const ImprovementValue value =
          improvement(t_default, record.t_config, plan_.limit_multiplier);
      record.improvement = value.value;
      record.censored = value.censored;
      record.solved = !hit_limit && record.error_runs == 0;
    } catch (const std::exception& e) {
      record.valid = false;
      record.solved = false;
      record.error_message = e.what();
    }
  });
  return records;
}

std::vector<SeparatorUsage> Evaluator::collect_default_usage(const InstanceSet& instances) {
  std::vector<SeparatorUsage> usage(instances.instances.size());
  parallel_for(instances.instances.size(), plan_.workers, [&](std::size_t i) {
    SeparatorUsage collected;
    SolveOutcome outcome = run_one(instances.instances[i], default_config_, plan_.base_seed,
                                   std::nullopt, true, &collected);
    if (outcome.status == SolveStatus::Error) {
      throw Error("default usage solve failed for \"" + instances.instances[i] +
                  "\": " + outcome.message);
    }
    collected.instance = instances.instances[i];
    usage[i] = std::move(collected);
  });
  return usage;
}

Summary summarize(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw EmptyList("summary of an empty record list");
  Summary summary;
  std::vector<double> improvements;
  for (const EvalRecord& record : records) {
    if (!record.valid) {
      ++summary.errors;
      continue;
    }
    improvements.push_back(record.improvement);
    ++summary.count;
    if (record.solved) ++summary.solved;
    if (record.censored) ++summary.censored;
  }
  if (improvements.empty()) throw EmptyList("every record in the summary errored");
  summary.median = stats::median(improvements);
  summary.iqr = stats::iqr(improvements);
  return summary;
}

double gap_comparison(const std::vector<EvalRecord>& a, const std::vector<EvalRecord>& b) {
  std::map<std::string, const EvalRecord*> b_by_instance;
  for (const EvalRecord& record : b) b_by_instance[record.instance] = &record;
  std::vector<double> diffs;
  for (const EvalRecord& record : a) {
    if (!record.valid || record.solved) continue;
    auto it = b_by_instance.find(record.instance);
    if (it == b_by_instance.end() || !it->second->valid || it->second->solved) continue;
    diffs.push_back(100.0 * (it->second->mean_gap - record.mean_gap));
  }
  if (diffs.empty()) throw NoCommonUnsolved("no instance is unsolved under both runs");
  return stats::median(diffs);
}

ordered_json eval_records_to_json(const std::vector<EvalRecord>& records) {
  ordered_json out = ordered_json::array();
  for (const EvalRecord& r : records) {
    ordered_json doc;
    doc["instance"] = r.instance;
    doc["t_default"] = r.t_default;
    doc["t_config"] = r.t_config;
    doc["improvement"] = r.improvement;
    doc["censored"] = r.censored;
    doc["solved"] = r.solved;
    doc["mean_gap"] = r.mean_gap;
    doc["error_runs"] = r.error_runs;
    doc["valid"] = r.valid;
    if (!r.error_message.empty()) doc["error_message"] = r.error_message;
    out.push_back(std::move(doc));
  }
  return out;
}

std::vector<EvalRecord> eval_records_from_json(const json& doc) {
  std::vector<EvalRecord> records;
  for (const auto& entry : doc) {
    EvalRecord r;
    r.instance = entry.value("instance", std::string{});
    r.t_default = entry.value("t_default", 0.0);
    r.t_config = entry.value("t_config", 0.0);
    r.improvement = entry.value("improvement", 0.0);
    r.censored = entry.value("censored", false);
    r.solved = entry.value("solved", true);
    r.mean_gap = entry.value("mean_gap", 0.0);
    r.error_runs = entry.value("error_runs", 0);
    r.valid = entry.value("valid", true);
    r.error_message = entry.value("error_message", std::string{});
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace sepconfig
