#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>

#include "sepconfig/artifacts.hpp"
#include "sepconfig/baselines.hpp"
#include "sepconfig/catalog.hpp"
#include "sepconfig/ensemble.hpp"
#include "sepconfig/errors.hpp"
#include "sepconfig/harness.hpp"
#include "sepconfig/llm.hpp"
#include "sepconfig/mps.hpp"
#include "sepconfig/report.hpp"
#include "sepconfig/sha256.hpp"
#include "sepconfig/textfree.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace sepconfig;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitPartial = 3;
constexpr int kExitEnvironment = 4;

std::string env_or(const char* name, const std::string& fallback) {
  const char* value = std::getenv(name);
  return value ? value : fallback;
}

/// Defaults, overridable through a JSON config file and per-command flags.
struct AppConfig {
  int pool_size = 100;
  int k = 5;
  int seeds = 10;
  int base_seed = 0;
  double limit_multiplier = 2.5;
  double gap_target = 0.0;
  int threads_per_solve = 4;
  int workers = 1;
  int retry_budget = 3;
  int concurrency = 4;
  double temperature = 1.0;
  std::string model_id = "gpt-4o";
  std::string scip_binary;
  std::string gurobi_binary;
  std::string scip_template;
  std::string gurobi_template;
};

AppConfig load_app_config(const std::string& path_arg) {
  AppConfig config;
  std::string path = path_arg.empty() ? env_or("SEPCFG_CONFIG", "") : path_arg;
  if (path.empty()) return config;
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("invalid config file: " + std::string(e.what()));
  }
  config.pool_size = doc.value("pool_size", config.pool_size);
  config.k = doc.value("k", config.k);
  config.seeds = doc.value("seeds", config.seeds);
  config.base_seed = doc.value("base_seed", config.base_seed);
  config.limit_multiplier = doc.value("limit_multiplier", config.limit_multiplier);
  config.gap_target = doc.value("gap_target", config.gap_target);
  config.threads_per_solve = doc.value("threads_per_solve", config.threads_per_solve);
  config.workers = doc.value("workers", config.workers);
  config.retry_budget = doc.value("retry_budget", config.retry_budget);
  config.concurrency = doc.value("concurrency", config.concurrency);
  config.temperature = doc.value("temperature", config.temperature);
  config.model_id = doc.value("model_id", config.model_id);
  config.scip_binary = doc.value("scip_binary", config.scip_binary);
  config.gurobi_binary = doc.value("gurobi_binary", config.gurobi_binary);
  config.scip_template = doc.value("scip_command", config.scip_template);
  config.gurobi_template = doc.value("gurobi_command", config.gurobi_template);
  return config;
}

InstanceSet load_instances(const std::string& spec, int limit) {
  InstanceSet set;
  fs::path path(spec);
  if (fs::is_directory(path)) {
    set.name = path.filename().string();
    for (const auto& entry : fs::directory_iterator(path)) {
      const std::string name = entry.path().filename().string();
      if (name.ends_with(".mps") || name.ends_with(".mps.gz")) {
        set.instances.push_back(entry.path().string());
      }
    }
    std::sort(set.instances.begin(), set.instances.end());
  } else if (fs::is_regular_file(path)) {
    std::ifstream in(path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ParseError("invalid instance set file: " + std::string(e.what()));
    }
    set.name = doc.value("name", path.stem().string());
    for (const auto& inst : doc.at("instances")) set.instances.push_back(inst.get<std::string>());
  } else {
    throw ParseError("instance set not found: " + spec);
  }
  if (set.instances.empty()) throw ValidationError("instance set \"" + spec + "\" is empty");
  if (limit > 0 && static_cast<int>(set.instances.size()) > limit) {
    set.instances.resize(static_cast<std::size_t>(limit));
  }
  return set;
}

std::string instance_set_hash(const InstanceSet& set) {
  std::string key = set.name;
  for (const auto& inst : set.instances) key += "\x1f" + inst;
  return sha256_hex(key);
}

struct SolverOptions {
  std::string solver = "stub";
  std::string stub_table;
  std::string binary;
  std::string work_dir = "solver_runs";
};

std::unique_ptr<Solver> make_solver(const SolverOptions& options, const AppConfig& config) {
  if (options.solver == "stub") {
    if (options.stub_table.empty()) {
      throw ValidationError("the stub solver needs --stub-table");
    }
    return std::make_unique<StubSolver>(StubTable::load(options.stub_table));
  }
  if (options.solver == "scip") {
    SubprocessSolverConfig sub;
    sub.binary = !options.binary.empty() ? options.binary
                                         : env_or("SEPCFG_SCIP_BIN",
                                                  config.scip_binary.empty() ? "scip"
                                                                             : config.scip_binary);
    sub.command_template = config.scip_template;
    sub.work_dir = options.work_dir;
    return std::make_unique<ScipSolver>(sub);
  }
  if (options.solver == "gurobi") {
    SubprocessSolverConfig sub;
    sub.binary = !options.binary.empty()
                     ? options.binary
                     : env_or("SEPCFG_GUROBI_BIN",
                              config.gurobi_binary.empty() ? "gurobi_cl" : config.gurobi_binary);
    sub.command_template = config.gurobi_template;
    sub.work_dir = options.work_dir;
    return std::make_unique<GurobiSolver>(sub);
  }
  throw ValidationError("unknown solver \"" + options.solver + "\"");
}

SolverKind solver_kind_of(const std::string& name) {
  auto kind = solver_kind_from_string(name);
  if (!kind) throw ValidationError("unknown solver \"" + name + "\"");
  return *kind;
}

struct ClientBundle {
  std::unique_ptr<FixtureStore> recorder;
  std::unique_ptr<LlmClient> client;
};

ClientBundle make_client(const std::string& selector, const std::string& fixtures,
                         const std::string& record_dir) {
  ClientBundle bundle;
  if (selector == "replay") {
    if (fixtures.empty()) throw ValidationError("the replay client needs --fixtures");
    bundle.client = std::make_unique<ReplayClient>(fixtures);
    return bundle;
  }
  if (selector == "live") {
    HttpClientConfig http;
    http.endpoint_url = env_or("SEPCFG_LLM_ENDPOINT", "");
    http.api_key = env_or("SEPCFG_LLM_API_KEY", "");
    if (http.endpoint_url.empty()) {
      throw SolverNotFound("SEPCFG_LLM_ENDPOINT is not set; the live client is unavailable");
    }
    if (!record_dir.empty()) {
      bundle.recorder = std::make_unique<FixtureStore>(record_dir);
      http.record_to = bundle.recorder.get();
    }
    bundle.client = std::make_unique<HttpLlmClient>(http);
    return bundle;
  }
  throw ValidationError("unknown client \"" + selector + "\" (use live or replay)");
}

Configuration load_config_arg(const std::string& arg, const SeparatorCatalog& catalog) {
  if (arg == "default") return default_configuration(catalog);
  std::ifstream in(arg);
  if (!in) throw ParseError("cannot open configuration source: " + arg);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("invalid configuration source: " + std::string(e.what()));
  }
  if (doc.contains("selection")) return parse_configuration(doc["selection"]["final"], catalog);
  if (doc.contains("final")) return parse_configuration(doc["final"], catalog);
  return parse_configuration(doc, catalog);
}

ordered_json catalog_input_block(const SeparatorCatalog& catalog) {
  ordered_json block;
  block["solver"] = std::string(to_string(catalog.solver()));
  block["version_tag"] = catalog.version_tag();
  block["hash"] = catalog.ref().content_hash;
  return block;
}

ordered_json flags_to_json(const PromptFlags& flags) {
  ordered_json doc;
  doc["separator_descriptions"] = flags.separator_descriptions;
  doc["problem_text"] = flags.problem_text;
  doc["latex_model"] = flags.latex_model;
  return doc;
}

ordered_json summary_to_json(const Summary& summary) {
  ordered_json doc;
  doc["median"] = summary.median;
  doc["iqr"] = summary.iqr;
  doc["solved"] = summary.solved;
  doc["censored"] = summary.censored;
  doc["count"] = summary.count;
  doc["errors"] = summary.errors;
  return doc;
}

std::string eval_csv(const std::vector<EvalRecord>& records) {
  std::string csv =
      "instance,t_default,t_config,improvement,censored,solved,mean_gap,error_runs,valid\n";
  for (const EvalRecord& r : records) {
    csv += r.instance + "," + format_double(r.t_default) + "," + format_double(r.t_config) + "," +
           format_double(r.improvement) + "," + (r.censored ? "1" : "0") + "," +
           (r.solved ? "1" : "0") + "," + format_double(r.mean_gap) + "," +
           std::to_string(r.error_runs) + "," + (r.valid ? "1" : "0") + "\n";
  }
  return csv;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

int map_exception(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  if (dynamic_cast<const SolverNotFound*>(&e)) return kExitEnvironment;
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const MissingValidationSet*>(&e) || dynamic_cast<const MissingField*>(&e)) {
    return kExitUsage;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cutting plane separator configuration toolkit"};
  app.require_subcommand(1);

  std::string artifacts_dir = "artifacts";
  std::string config_path;
  app.add_option("--artifacts", artifacts_dir, "Artifact store directory");
  app.add_option("--config", config_path, "JSON file with default parameters");

  // generate -----------------------------------------------------------------
  auto* generate = app.add_subcommand("generate", "Sample a configuration pool from the model");
  struct {
    std::string card, catalog, client = "replay", fixtures, record;
    int pool_size = -1, retry_budget = -1, concurrency = -1;
    double temperature = -1.0;
    std::string model;
    bool no_sep_desc = false, no_problem_text = false, no_latex = false;
    std::string label;
  } gen;
  generate->add_option("--card", gen.card, "Problem card JSON file")->required();
  generate->add_option("--catalog", gen.catalog, "Separator catalog file")->required();
  generate->add_option("--pool-size", gen.pool_size, "Number of samples");
  generate->add_option("--client", gen.client, "live or replay");
  generate->add_option("--fixtures", gen.fixtures, "Fixture directory for replay");
  generate->add_option("--record-fixtures", gen.record, "Record live completions here");
  generate->add_option("--model", gen.model, "Model id");
  generate->add_option("--temperature", gen.temperature, "Sampling temperature");
  generate->add_option("--retry-budget", gen.retry_budget, "Completions per sample");
  generate->add_option("--concurrency", gen.concurrency, "Concurrent completions");
  generate->add_option("--label", gen.label, "Label stored in the artifact");
  generate->add_flag("--no-sep-descriptions", gen.no_sep_desc,
                     "List separator names without their descriptions");
  generate->add_flag("--no-problem-text", gen.no_problem_text, "Omit the problem description");
  generate->add_flag("--no-latex", gen.no_latex, "Omit the LaTeX formulation");

  // ensemble -----------------------------------------------------------------
  auto* ensemble_cmd = app.add_subcommand("ensemble", "Cluster a pool and select a configuration");
  struct {
    std::string pool, catalog, mode = "llm0";
    int k = -1;
    std::uint64_t seed = 0;
    std::string instances;
    int val_limit = 0;
    SolverOptions solver;
    int seeds = -1, base_seed = -1, threads = -1, workers = -1;
    double multiplier = -1.0, gap_target = -1.0;
  } ens;
  ensemble_cmd->add_option("--pool", ens.pool, "Pool artifact path")->required();
  ensemble_cmd->add_option("--catalog", ens.catalog, "Separator catalog file")->required();
  ensemble_cmd->add_option("--mode", ens.mode, "llm0, llmk, average, mode, or smallest");
  ensemble_cmd->add_option("--k", ens.k, "Number of clusters");
  ensemble_cmd->add_option("--seed", ens.seed, "Clustering seed (recorded)");
  ensemble_cmd->add_option("--instances", ens.instances, "Validation set (llmk)");
  ensemble_cmd->add_option("--val-limit", ens.val_limit, "Use only the first N instances");
  ensemble_cmd->add_option("--solver", ens.solver.solver, "stub, scip, or gurobi");
  ensemble_cmd->add_option("--stub-table", ens.solver.stub_table, "Stub solver table");
  ensemble_cmd->add_option("--solver-bin", ens.solver.binary, "Solver binary");
  ensemble_cmd->add_option("--work-dir", ens.solver.work_dir, "Solver scratch directory");
  ensemble_cmd->add_option("--seeds", ens.seeds, "Seeds per (instance, config)");
  ensemble_cmd->add_option("--base-seed", ens.base_seed, "First solver seed");
  ensemble_cmd->add_option("--multiplier", ens.multiplier, "Time limit multiplier");
  ensemble_cmd->add_option("--gap-target", ens.gap_target, "Relative gap target");
  ensemble_cmd->add_option("--threads", ens.threads, "Threads per solve");
  ensemble_cmd->add_option("--workers", ens.workers, "Concurrent solves");

  // evaluate -----------------------------------------------------------------
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate a configuration on instances");
  struct {
    std::string config, catalog, instances, label;
    int val_limit = 0;
    SolverOptions solver;
    int seeds = -1, base_seed = -1, threads = -1, workers = -1;
    double multiplier = -1.0, gap_target = -1.0;
    std::string defaults_cache;
  } ev;
  evaluate_cmd->add_option("--config", ev.config,
                           "\"default\", a selection artifact, or a configuration document")
      ->required();
  evaluate_cmd->add_option("--catalog", ev.catalog, "Separator catalog file")->required();
  evaluate_cmd->add_option("--instances", ev.instances, "Instance directory or set file")
      ->required();
  evaluate_cmd->add_option("--label", ev.label, "Label stored in the artifact");
  evaluate_cmd->add_option("--val-limit", ev.val_limit, "Use only the first N instances");
  evaluate_cmd->add_option("--solver", ev.solver.solver, "stub, scip, or gurobi");
  evaluate_cmd->add_option("--stub-table", ev.solver.stub_table, "Stub solver table");
  evaluate_cmd->add_option("--solver-bin", ev.solver.binary, "Solver binary");
  evaluate_cmd->add_option("--work-dir", ev.solver.work_dir, "Solver scratch directory");
  evaluate_cmd->add_option("--seeds", ev.seeds, "Seeds per (instance, config)");
  evaluate_cmd->add_option("--base-seed", ev.base_seed, "First solver seed");
  evaluate_cmd->add_option("--multiplier", ev.multiplier, "Time limit multiplier");
  evaluate_cmd->add_option("--gap-target", ev.gap_target, "Relative gap target");
  evaluate_cmd->add_option("--threads", ev.threads, "Threads per solve");
  evaluate_cmd->add_option("--workers", ev.workers, "Concurrent solves");
  evaluate_cmd->add_option("--defaults-cache", ev.defaults_cache,
                           "Default-time cache file (default: <artifacts>/defaults_cache.json)");

  // baseline -----------------------------------------------------------------
  auto* baseline_cmd = app.add_subcommand("baseline", "Run a comparison method");
  struct {
    std::string kind, catalog, usage, instances;
    int val_limit = 0;
    int depth = 5;
    std::uint64_t seed = 0;
    SolverOptions solver;
    int seeds = -1, base_seed = -1, threads = -1, workers = -1;
    double multiplier = -1.0, gap_target = -1.0;
  } base;
  baseline_cmd->add_option("kind", base.kind, "pruning or search")->required();
  baseline_cmd->add_option("--catalog", base.catalog, "Separator catalog file")->required();
  baseline_cmd->add_option("--usage", base.usage, "Separator usage JSON (pruning)");
  baseline_cmd->add_option("--instances", base.instances, "Validation set");
  baseline_cmd->add_option("--val-limit", base.val_limit, "Use only the first N instances");
  baseline_cmd->add_option("--depth", base.depth, "Candidates to sample (search)");
  baseline_cmd->add_option("--seed", base.seed, "Sampling seed (search)");
  baseline_cmd->add_option("--solver", base.solver.solver, "stub, scip, or gurobi");
  baseline_cmd->add_option("--stub-table", base.solver.stub_table, "Stub solver table");
  baseline_cmd->add_option("--solver-bin", base.solver.binary, "Solver binary");
  baseline_cmd->add_option("--work-dir", base.solver.work_dir, "Solver scratch directory");
  baseline_cmd->add_option("--seeds", base.seeds, "Seeds per (instance, config)");
  baseline_cmd->add_option("--base-seed", base.base_seed, "First solver seed");
  baseline_cmd->add_option("--multiplier", base.multiplier, "Time limit multiplier");
  baseline_cmd->add_option("--gap-target", base.gap_target, "Relative gap target");
  baseline_cmd->add_option("--threads", base.threads, "Threads per solve");
  baseline_cmd->add_option("--workers", base.workers, "Concurrent solves");

  // textfree -----------------------------------------------------------------
  auto* textfree_cmd = app.add_subcommand("textfree", "Configure from an MPS file alone");
  struct {
    std::string instance, catalog, client = "replay", fixtures, record;
    int k_desc = -1, configs_per_desc = -1, k = -1, concurrency = -1, retry_budget = -1;
    double temperature = -1.0;
    std::string model;
    std::uint64_t seed = 0;
  } tf;
  textfree_cmd->add_option("--instance", tf.instance, "MPS file")->required();
  textfree_cmd->add_option("--catalog", tf.catalog, "Separator catalog file")->required();
  textfree_cmd->add_option("--client", tf.client, "live or replay");
  textfree_cmd->add_option("--fixtures", tf.fixtures, "Fixture directory for replay");
  textfree_cmd->add_option("--record-fixtures", tf.record, "Record live completions here");
  textfree_cmd->add_option("--k-desc", tf.k_desc, "Candidate descriptions to request");
  textfree_cmd->add_option("--configs-per-desc", tf.configs_per_desc, "Samples per description");
  textfree_cmd->add_option("--k", tf.k, "Number of clusters");
  textfree_cmd->add_option("--model", tf.model, "Model id");
  textfree_cmd->add_option("--temperature", tf.temperature, "Sampling temperature");
  textfree_cmd->add_option("--retry-budget", tf.retry_budget, "Completions per sample");
  textfree_cmd->add_option("--concurrency", tf.concurrency, "Concurrent pool expansions");
  textfree_cmd->add_option("--seed", tf.seed, "Clustering seed (recorded)");

  // stats --------------------------------------------------------------------
  auto* stats_cmd = app.add_subcommand("stats", "Classify constraints of MPS instances");
  struct {
    std::vector<std::string> inputs;
    std::string csv;
    bool skip_unsupported = false;
  } st;
  stats_cmd->add_option("inputs", st.inputs, "MPS files or directories")->required();
  stats_cmd->add_option("--csv", st.csv, "Write one CSV row per instance here");
  stats_cmd->add_flag("--skip-unsupported", st.skip_unsupported,
                      "Skip unsupported sections with a warning");

  // filter -------------------------------------------------------------------
  auto* filter_cmd = app.add_subcommand("filter", "Apply benchmark keep/drop rules");
  struct {
    std::string summaries;
  } fi;
  filter_cmd->add_option("--summaries", fi.summaries, "JSON map of instance -> solve summary")
      ->required();

  // report -------------------------------------------------------------------
  auto* report_cmd = app.add_subcommand("report", "Tabulate evaluation artifacts");
  struct {
    std::vector<std::string> artifacts;
    std::vector<std::string> labels;
    std::string gap_against, csv;
  } rp;
  report_cmd->add_option("artifacts", rp.artifacts, "Evaluation artifact paths")->required();
  report_cmd->add_option("--labels", rp.labels, "One label per artifact");
  report_cmd->add_option("--gap-against", rp.gap_against, "Reference artifact for gap diffs");
  report_cmd->add_option("--csv", rp.csv, "Write the CSV table here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const AppConfig config = load_app_config(config_path);
    ArtifactStore store{artifacts_dir};

    auto make_plan = [&](const std::string& solver_name, const std::string& catalog_hash,
                         int seeds, int base_seed, double multiplier, double gap_target,
                         int threads, int workers, const std::string& val_name,
                         const std::string& eval_name) {
      RunPlan plan;
      plan.solver = solver_kind_of(solver_name);
      plan.catalog_hash = catalog_hash;
      plan.val_set = val_name;
      plan.eval_set = eval_name;
      plan.seeds = seeds > 0 ? seeds : config.seeds;
      plan.base_seed = base_seed >= 0 ? base_seed : config.base_seed;
      plan.limit_multiplier = multiplier > 0 ? multiplier : config.limit_multiplier;
      plan.gap_target = gap_target >= 0 ? gap_target : config.gap_target;
      plan.threads_per_solve = threads > 0 ? threads : config.threads_per_solve;
      const std::string budget = env_or("SEPCFG_THREAD_BUDGET", "");
      if (workers > 0) {
        plan.workers = workers;
      } else if (!budget.empty()) {
        plan.workers = std::max(1, std::stoi(budget) / plan.threads_per_solve);
      } else {
        plan.workers = config.workers;
      }
      return plan;
    };

    if (*generate) {
      const SeparatorCatalog catalog = load_catalog(gen.catalog);
      const ProblemCard card = ProblemCard::load(gen.card);
      ClientBundle client = make_client(gen.client, gen.fixtures, gen.record);

      PoolRequest request;
      request.pool_size = gen.pool_size > 0 ? gen.pool_size : config.pool_size;
      request.flags = PromptFlags{!gen.no_sep_desc, !gen.no_problem_text, !gen.no_latex};
      request.temperature = gen.temperature >= 0 ? gen.temperature : config.temperature;
      request.model_id = !gen.model.empty() ? gen.model : config.model_id;
      request.retry_budget = gen.retry_budget > 0 ? gen.retry_budget : config.retry_budget;
      request.concurrency = gen.concurrency > 0 ? gen.concurrency : config.concurrency;

      const PromptBundle prompt = build_config_prompt(card, catalog, request.flags,
                                                      request.temperature, request.model_id);
      bool partial = false;
      ConfigurationPool pool;
      try {
        pool = generate_pool(card, catalog, *client.client, request);
      } catch (const PoolIncomplete& e) {
        std::cerr << "warning: " << e.what() << "\n";
        pool = e.partial();
        partial = true;
      }

      ordered_json doc;
      doc["kind"] = "pool";
      if (!gen.label.empty()) doc["label"] = gen.label;
      ordered_json inputs;
      inputs["card_hash"] = card.content_hash();
      inputs["catalog"] = catalog_input_block(catalog);
      inputs["prompt_hash"] = prompt.hash();
      inputs["flags"] = flags_to_json(request.flags);
      inputs["model_id"] = request.model_id;
      inputs["temperature"] = request.temperature;
      inputs["pool_size"] = request.pool_size;
      inputs["retry_budget"] = request.retry_budget;
      inputs["client"] = gen.client;
      doc["inputs"] = std::move(inputs);
      doc["complete"] = !partial;
      doc["pool"] = serialize_pool(pool, catalog);
      const auto path = store.put("pools", std::move(doc));
      std::cout << path.string() << "\n";
      return partial ? kExitPartial : kExitOk;
    }

    if (*ensemble_cmd) {
      const SeparatorCatalog catalog = load_catalog(ens.catalog);
      const json pool_doc = read_json_file(ens.pool);
      if (!pool_doc.contains("pool")) throw ParseError("not a pool artifact: " + ens.pool);
      const ConfigurationPool pool = parse_pool(pool_doc["pool"], catalog);
      const int k = ens.k > 0 ? ens.k : config.k;

      ordered_json doc;
      doc["kind"] = "selection";
      ordered_json inputs;
      inputs["pool_artifact"] = ArtifactStore::content_hash(pool_doc);
      inputs["catalog"] = catalog_input_block(catalog);
      inputs["mode"] = ens.mode;
      inputs["k"] = k;
      inputs["seed"] = ens.seed;
      long long solve_count = 0;

      if (ens.mode == "llm0") {
        const Clustering clustering = kmedoids(pool, k, ens.seed);
        const SelectionOutcome outcome = select_cold_start(clustering, pool);
        doc["clustering"] = clustering_to_json(clustering);
        doc["selection"] = selection_to_json(outcome, catalog);
      } else if (ens.mode == "llmk") {
        if (ens.instances.empty()) {
          throw MissingValidationSet("mode llmk needs --instances");
        }
        const InstanceSet val_set = load_instances(ens.instances, ens.val_limit);
        const Clustering clustering = kmedoids(pool, k, ens.seed);
        std::vector<Configuration> medoids;
        for (std::size_t index : clustering.medoid_indices) medoids.push_back(pool.configs[index]);

        auto solver = make_solver(ens.solver, config);
        RunPlan plan = make_plan(ens.solver.solver, catalog.ref().content_hash, ens.seeds,
                                 ens.base_seed, ens.multiplier, ens.gap_target, ens.threads,
                                 ens.workers, val_set.name, "");
        DefaultsCache cache(fs::path(artifacts_dir) / "defaults_cache.json");
        Evaluator evaluator(*solver, catalog, plan, &cache);

        std::vector<std::vector<double>> improvements;
        ordered_json validation = ordered_json::array();
        for (const Configuration& medoid : medoids) {
          const auto records = evaluator.evaluate(medoid, val_set);
          std::vector<double> values;
          for (const EvalRecord& record : records) {
            if (record.valid) values.push_back(record.improvement);
          }
          improvements.push_back(std::move(values));
          ordered_json entry;
          entry["config_hash"] = medoid.content_hash();
          entry["records"] = eval_records_to_json(records);
          validation.push_back(std::move(entry));
        }
        SelectionOutcome outcome = select_validated(medoids, improvements);
        outcome.solve_count = static_cast<long long>(medoids.size()) *
                              static_cast<long long>(val_set.instances.size()) * plan.seeds;
        solve_count = outcome.solve_count;
        inputs["plan"] = plan.to_json();
        inputs["validation_set"] = instance_set_hash(val_set);
        doc["clustering"] = clustering_to_json(clustering);
        doc["selection"] = selection_to_json(outcome, catalog);
        doc["validation"] = std::move(validation);
      } else {
        Configuration final = ens.mode == "average"  ? ensemble_average(pool)
                              : ens.mode == "mode"   ? ensemble_mode(pool)
                              : ens.mode == "smallest"
                                  ? ensemble_smallest(pool)
                                  : throw ValidationError("unknown mode \"" + ens.mode + "\"");
        const SelectionStrategy strategy = ens.mode == "average" ? SelectionStrategy::Average
                                           : ens.mode == "mode"  ? SelectionStrategy::Mode
                                                                 : SelectionStrategy::Smallest;
        doc["selection"] = selection_to_json({final, strategy, {}, 0}, catalog);
      }

      doc["inputs"] = std::move(inputs);
      doc["solve_count"] = solve_count;
      const auto path = store.put("selections", std::move(doc));
      std::cout << path.string() << "\n";
      return kExitOk;
    }

    if (*evaluate_cmd) {
      const SeparatorCatalog catalog = load_catalog(ev.catalog);
      const Configuration target = load_config_arg(ev.config, catalog);
      const InstanceSet instances = load_instances(ev.instances, ev.val_limit);

      auto solver = make_solver(ev.solver, config);
      RunPlan plan = make_plan(ev.solver.solver, catalog.ref().content_hash, ev.seeds,
                               ev.base_seed, ev.multiplier, ev.gap_target, ev.threads, ev.workers,
                               "", instances.name);
      const std::string cache_path = !ev.defaults_cache.empty()
                                         ? ev.defaults_cache
                                         : (fs::path(artifacts_dir) / "defaults_cache.json").string();
      DefaultsCache cache{fs::path(cache_path)};
      Evaluator evaluator(*solver, catalog, plan, &cache);

      const std::vector<EvalRecord> records = evaluator.evaluate(target, instances);
      const Summary summary = summarize(records);

      ordered_json doc;
      doc["kind"] = "eval";
      doc["label"] = !ev.label.empty() ? ev.label : (ev.config == "default" ? "default" : "config");
      ordered_json inputs;
      inputs["config_hash"] = target.content_hash();
      inputs["config"] = serialize_configuration(target, catalog);
      inputs["catalog"] = catalog_input_block(catalog);
      inputs["instance_set"] = instances.name;
      inputs["instance_set_hash"] = instance_set_hash(instances);
      inputs["plan"] = plan.to_json();
      doc["inputs"] = std::move(inputs);
      doc["records"] = eval_records_to_json(records);
      doc["summary"] = summary_to_json(summary);
      const auto path = store.put("evals", std::move(doc));

      fs::path csv_path = path;
      csv_path.replace_extension(".csv");
      write_text_file(csv_path, eval_csv(records));

      std::cout << path.string() << "\n";
      std::cout << csv_path.string() << "\n";
      char line[160];
      std::snprintf(line, sizeof(line), "median %.2f (IQR %.2f), solved %d/%d, censored %d",
                    summary.median, summary.iqr, summary.solved, summary.count, summary.censored);
      std::cout << line << "\n";
      const bool had_errors =
          std::any_of(records.begin(), records.end(), [](const EvalRecord& r) { return !r.valid; });
      return had_errors ? kExitPartial : kExitOk;
    }

    if (*baseline_cmd) {
      const SeparatorCatalog catalog = load_catalog(base.catalog);
      ordered_json doc;
      doc["kind"] = "selection";
      ordered_json inputs;
      inputs["catalog"] = catalog_input_block(catalog);
      inputs["baseline"] = base.kind;

      if (base.kind == "pruning") {
        std::vector<SeparatorUsage> usage;
        long long solve_count = 0;
        if (!base.usage.empty()) {
          const json usage_doc = read_json_file(base.usage);
          for (const auto& entry : usage_doc) {
            SeparatorUsage u;
            u.instance = entry.value("instance", std::string{});
            for (const auto& [sep, count] : entry.at("cuts_applied").items()) {
              u.cuts_applied[sep] = count.get<long long>();
            }
            usage.push_back(std::move(u));
          }
        } else if (!base.instances.empty()) {
          const InstanceSet val_set = load_instances(base.instances, base.val_limit);
          auto solver = make_solver(base.solver, config);
          RunPlan plan = make_plan(base.solver.solver, catalog.ref().content_hash, base.seeds,
                                   base.base_seed, base.multiplier, base.gap_target, base.threads,
                                   base.workers, val_set.name, "");
          Evaluator evaluator(*solver, catalog, plan);
          usage = evaluator.collect_default_usage(val_set);
          solve_count = evaluator.solve_count();
        } else {
          throw ValidationError("pruning needs --usage or --instances");
        }
        std::vector<std::string> unmapped;
        const Configuration pruned = pruning(usage, catalog, &unmapped);
        if (!unmapped.empty()) {
          std::cerr << "note: unobservable separators left at default:";
          for (const auto& id : unmapped) std::cerr << " " << id;
          std::cerr << "\n";
        }
        doc["inputs"] = std::move(inputs);
        doc["final"] = serialize_configuration(pruned, catalog);
        doc["final_hash"] = pruned.content_hash();
        doc["unmapped"] = unmapped;
        doc["solve_count"] = solve_count;
      } else if (base.kind == "search") {
        if (base.instances.empty()) throw MissingValidationSet("search needs --instances");
        const InstanceSet val_set = load_instances(base.instances, base.val_limit);
        auto solver = make_solver(base.solver, config);
        RunPlan plan = make_plan(base.solver.solver, catalog.ref().content_hash, base.seeds,
                                 base.base_seed, base.multiplier, base.gap_target, base.threads,
                                 base.workers, val_set.name, "");
        DefaultsCache cache(fs::path(artifacts_dir) / "defaults_cache.json");
        Evaluator evaluator(*solver, catalog, plan, &cache);
        std::mt19937_64 rng(base.seed);
        const SelectionOutcome outcome = search(base.depth, catalog, val_set, evaluator, rng);
        inputs["depth"] = base.depth;
        inputs["seed"] = base.seed;
        inputs["plan"] = plan.to_json();
        inputs["validation_set"] = instance_set_hash(val_set);
        doc["inputs"] = std::move(inputs);
        doc["selection"] = selection_to_json(outcome, catalog);
        doc["solve_count"] = outcome.solve_count;
      } else {
        throw ValidationError("unknown baseline \"" + base.kind + "\" (use pruning or search)");
      }
      const auto path = store.put("selections", std::move(doc));
      std::cout << path.string() << "\n";
      return kExitOk;
    }

    if (*textfree_cmd) {
      const SeparatorCatalog catalog = load_catalog(tf.catalog);
      ClientBundle client = make_client(tf.client, tf.fixtures, tf.record);

      TextFreePlan plan;
      plan.k_desc = tf.k_desc > 0 ? tf.k_desc : 5;
      plan.configs_per_desc = tf.configs_per_desc > 0 ? tf.configs_per_desc : 20;
      plan.clusters = tf.k > 0 ? tf.k : config.k;
      plan.temperature = tf.temperature >= 0 ? tf.temperature : config.temperature;
      plan.model_id = !tf.model.empty() ? tf.model : config.model_id;
      plan.retry_budget = tf.retry_budget > 0 ? tf.retry_budget : config.retry_budget;
      plan.concurrency = tf.concurrency > 0 ? tf.concurrency : config.concurrency;

      const TextFreeResult result =
          textfree_configure(tf.instance, catalog, *client.client, plan, tf.seed);

      ordered_json doc;
      doc["kind"] = "selection";
      ordered_json inputs;
      inputs["pipeline"] = "textfree";
      inputs["instance"] = tf.instance;
      inputs["catalog"] = catalog_input_block(catalog);
      inputs["k_desc"] = plan.k_desc;
      inputs["configs_per_desc"] = plan.configs_per_desc;
      inputs["k"] = plan.clusters;
      inputs["model_id"] = plan.model_id;
      inputs["temperature"] = plan.temperature;
      doc["inputs"] = std::move(inputs);
      ordered_json hist;
      hist["n_vars"] = result.histogram.n_vars;
      hist["n_constrs"] = result.histogram.n_constrs;
      for (std::size_t i = 0; i < mps::kConstraintTypeCount; ++i) {
        if (result.histogram.counts[i] == 0) continue;
        hist[std::string(mps::to_string(static_cast<mps::ConstraintType>(i)))] =
            result.histogram.counts[i];
      }
      doc["histogram"] = std::move(hist);
      ordered_json cards = ordered_json::array();
      for (const ProblemCard& card : result.cards) {
        ordered_json entry;
        entry["title"] = card.title;
        entry["description"] = card.description;
        cards.push_back(std::move(entry));
      }
      doc["cards"] = std::move(cards);
      doc["pool"] = serialize_pool(result.pool, catalog);
      doc["clustering"] = clustering_to_json(result.clustering);
      doc["selection"] = selection_to_json(result.selection, catalog);
      const auto path = store.put("selections", std::move(doc));
      std::cout << path.string() << "\n";
      return kExitOk;
    }

    if (*stats_cmd) {
      std::vector<std::string> files;
      for (const std::string& input : st.inputs) {
        if (fs::is_directory(input)) {
          for (const auto& entry : fs::directory_iterator(input)) {
            const std::string name = entry.path().filename().string();
            if (name.ends_with(".mps") || name.ends_with(".mps.gz")) {
              files.push_back(entry.path().string());
            }
          }
        } else {
          files.push_back(input);
        }
      }
      std::sort(files.begin(), files.end());
      if (files.empty()) throw ValidationError("no MPS inputs found");

      std::string csv = mps::histogram_csv_header() + "\n";
      bool had_errors = false;
      for (const std::string& file : files) {
        try {
          const mps::MilpInstance instance =
              mps::parse_mps(file, mps::ParseOptions{st.skip_unsupported});
          const mps::StructureHistogram hist = mps::histogram(instance);
          std::cout << mps::histogram_report(instance.name, hist) << "\n";
          for (const std::string& warning : instance.warnings) {
            std::cerr << "warning: " << file << ": " << warning << "\n";
          }
          csv += mps::histogram_csv_row(instance.name, hist) + "\n";
        } catch (const std::exception& e) {
          std::cerr << "error: " << file << ": " << e.what() << "\n";
          had_errors = true;
        }
      }
      if (!st.csv.empty()) write_text_file(st.csv, csv);
      return had_errors ? kExitPartial : kExitOk;
    }

    if (*filter_cmd) {
      const json doc = read_json_file(fi.summaries);
      std::cout << "instance,keep,reason\n";
      for (const auto& [instance, summary_doc] : doc.items()) {
        const mps::SolveSummary summary = mps::solve_summary_from_json(summary_doc);
        const mps::FilterDecision decision = mps::miplib_filter(summary);
        std::cout << instance << "," << (decision.keep ? "keep" : "drop") << ","
                  << decision.reason << "\n";
      }
      return kExitOk;
    }

    if (*report_cmd) {
      std::vector<json> artifacts;
      std::vector<std::string> labels = rp.labels;
      for (const std::string& path : rp.artifacts) {
        artifacts.push_back(read_json_file(path));
        if (labels.size() < artifacts.size()) {
          const json& doc = artifacts.back();
          labels.push_back(doc.value("label", fs::path(path).stem().string().substr(0, 12)));
        }
      }
      std::optional<json> reference;
      if (!rp.gap_against.empty()) reference = read_json_file(rp.gap_against);

      const Report report =
          build_report(artifacts, labels, reference ? &*reference : nullptr);
      std::cout << report.text;
      if (!rp.csv.empty()) write_text_file(rp.csv, report.csv);
      return kExitOk;
    }

    return kExitUsage;
  } catch (const std::exception& e) {
    return map_exception(e);
  }
}
