#include "sepconfig/llm.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "sepconfig/parallel.hpp"
#include "sepconfig/sha256.hpp"

namespace sepconfig {

using nlohmann::json;
using nlohmann::ordered_json;

ProblemCard ProblemCard::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open problem card: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("invalid problem card: " + std::string(e.what()));
  }
  ProblemCard card;
  card.title = doc.value("title", std::string{});
  card.description = doc.value("description", std::string{});
  card.latex_model = doc.value("latex_model", std::string{});
  card.source = Source::Authored;
  if (card.description.empty()) {
    throw ValidationError("authored problem card needs a non-empty description");
  }
  return card;
}

std::string ProblemCard::content_hash() const {
  return sha256_hex(title + "\x1f" + description + "\x1f" + latex_model + "\x1f" +
                    (source == Source::Authored ? "authored" : "generated"));
}

namespace {

std::string format_temperature(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", t);
  return buf;
}

std::string allowed_level_list(const SeparatorCatalog& catalog) {
  std::string out;
  for (SettingLevel level : catalog.allowed_levels()) {
    if (!out.empty()) out += ", ";
    out += to_string(level);
  }
  return out;
}

}  // namespace

std::string PromptBundle::hash() const {
  return sha256_hex("model=" + model_id + "|temp=" + format_temperature(temperature) +
                    "|system=" + system_text + "|user=" + user_text);
}

PromptBundle build_config_prompt(const ProblemCard& card, const SeparatorCatalog& catalog,
                                 PromptFlags flags, double temperature,
                                 const std::string& model_id) {
  if (catalog.size() == 0) throw EmptyCatalog("cannot build a prompt from an empty catalog");
  if (flags.problem_text && card.description.empty()) {
    throw ValidationError("problem text requested but the card has no description");
  }

  PromptBundle bundle;
  bundle.temperature = temperature;
  bundle.model_id = model_id;
  bundle.components = flags;
  if (card.latex_model.empty()) bundle.components.latex_model = false;

  const std::string solver_name(to_string(catalog.solver()));
  bundle.system_text =
      "You are an expert in mixed-integer programming who tunes cutting plane "
      "separators for the " +
      solver_name + " solver.";

  std::ostringstream user;
  if (bundle.components.problem_text) {
    user << "## Optimization problem\n";
    if (!card.title.empty()) user << card.title << "\n\n";
    user << card.description << "\n\n";
  }
  if (bundle.components.problem_text && bundle.components.latex_model) {
    user << "## Model formulation (LaTeX)\n" << card.latex_model << "\n\n";
  }

  user << "## Available cutting plane separators (" << solver_name << " "
       << catalog.version_tag() << ")\n";
  for (const SeparatorSpec& spec : catalog.separators()) {
    user << "- " << spec.id << " (parameter " << spec.solver_param << ", \"" << spec.display_name
         << "\")";
    if (bundle.components.separator_descriptions && !spec.description.empty()) {
      user << ": " << spec.description;
    }
    user << "\n";
  }

  user << "\n## Task\n"
       << "Choose a setting for every separator above to minimize the expected solve time";
  if (bundle.components.problem_text) {
    user << " for the problem described";
  } else {
    user << " for typical instances handled by this solver";
  }
  user << ". The levels are: " << allowed_level_list(catalog)
       << ". Respond with exactly one fenced code block containing one line per separator in"
          " the form `id: level`, using the ids listed above and nothing else inside the"
          " block. Separators you omit stay at their default setting.\n";

  bundle.user_text = user.str();
  return bundle;
}

namespace {

/// Extracts the contents of fenced blocks (``` ... ```), skipping the info
/// string on the opening fence.
std::vector<std::string> fenced_blocks(const std::string& raw) {
  std::vector<std::string> blocks;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = raw.find("```", pos);
    if (open == std::string::npos) break;
    std::size_t content_start = raw.find('\n', open);
    if (content_start == std::string::npos) break;
    ++content_start;
    std::size_t close = raw.find("```", content_start);
    if (close == std::string::npos) break;
    blocks.push_back(raw.substr(content_start, close - content_start));
    pos = raw.find('\n', close);
    if (pos == std::string::npos) break;
  }
  return blocks;
}

std::string trim(std::string s) {
  s.erase(0, s.find_first_not_of(" \t\r\n"));
  s.erase(s.find_last_not_of(" \t\r\n") + 1);
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

Configuration parse_config_response(const std::string& raw, const SeparatorCatalog& catalog) {
  const auto blocks = fenced_blocks(raw);
  if (blocks.empty()) throw NoBlockFound("response contains no fenced block");
  const std::string& block = blocks.front();

  std::vector<SettingLevel> levels(catalog.size(), SettingLevel::Default);
  std::vector<std::string> unknown;
  std::istringstream lines(block);
  std::string line;
  while (std::getline(lines, line)) {
    line = trim(line);
    if (line.empty()) continue;
    // tolerate bullet markers in front of assignments
    while (!line.empty() && (line[0] == '-' || line[0] == '*')) line = trim(line.substr(1));
    auto sep = line.find_first_of(":=");
    if (sep == std::string::npos) continue;  // prose line inside the block
    const std::string id = trim(line.substr(0, sep));
    std::string value = lower(trim(line.substr(sep + 1)));
    // keep only the first word; models like to append commentary
    auto space = value.find_first_of(" \t(");
    if (space != std::string::npos) value = value.substr(0, space);
    if (id.empty() || value.empty()) continue;

    auto index = catalog.index_of(id);
    if (!index) {
      unknown.push_back(id);
      continue;
    }
    auto level = setting_level_from_string(value);
    if (!level) {
      throw IllegalLevel("separator \"" + id + "\" assigned unknown level \"" + value + "\"");
    }
    if (!catalog.level_allowed(*level)) {
      throw IllegalLevel("separator \"" + id + "\" assigned level \"" + value +
                         "\" outside the catalog's allowed set");
    }
    levels[*index] = *level;
  }
  if (!unknown.empty()) throw UnknownSeparator(std::move(unknown));
  return Configuration(catalog.ref(), std::move(levels), Provenance::manual());
}

PromptBundle build_description_prompt(const mps::StructureHistogram& hist, int k_desc,
                                      double temperature, const std::string& model_id) {
  if (hist.empty()) throw EmptyHistogram("structural profile has no classified constraints");
  if (k_desc < 1) throw ValidationError("at least one candidate description is required");

  PromptBundle bundle;
  bundle.temperature = temperature;
  bundle.model_id = model_id;
  bundle.components = PromptFlags{false, false, false};
  bundle.system_text =
      "You are an expert in mixed-integer programming who recognizes classic "
      "optimization problems from their constraint structure.";

  std::ostringstream user;
  user << "## Instance structure\n"
       << "variables: " << hist.n_vars << " (" << hist.n_binary << " binary, " << hist.n_integer
       << " integer, " << hist.n_continuous << " continuous)\n"
       << "constraints: " << hist.n_constrs << "\n"
       << "constraint types:\n";
  for (std::size_t i = 0; i < mps::kConstraintTypeCount; ++i) {
    if (hist.counts[i] == 0) continue;
    user << "- " << mps::to_string(static_cast<mps::ConstraintType>(i)) << ": " << hist.counts[i]
         << "\n";
  }
  user << "\n## Task\n"
       << "Propose " << k_desc
       << " distinct, plausible real-world optimization problems whose MILP formulations"
          " would produce exactly this mix of constraint types. Write each candidate as a"
          " short problem description (3-6 sentences) inside its own fenced code block,"
          " one block per candidate, and nothing outside the blocks.\n";
  bundle.user_text = user.str();
  return bundle;
}

std::vector<ProblemCard> parse_descriptions(const std::string& raw, int k_desc) {
  const auto blocks = fenced_blocks(raw);
  if (blocks.empty()) throw NoBlockFound("response contains no fenced block");
  std::vector<ProblemCard> cards;
  for (const std::string& block : blocks) {
    if (static_cast<int>(cards.size()) >= k_desc) break;
    std::string text = trim(block);
    if (text.empty()) continue;
    ProblemCard card;
    card.title = "candidate " + std::to_string(cards.size() + 1);
    card.description = std::move(text);
    card.source = ProblemCard::Source::LlmGenerated;
    cards.push_back(std::move(card));
  }
  if (cards.empty()) throw NoBlockFound("every fenced block was empty");
  return cards;
}

ScriptedClient::ScriptedClient(std::vector<std::string> responses, bool cyclic) {
  if (responses.empty()) throw ValidationError("scripted client needs at least one response");
  script_ = [responses = std::move(responses), cyclic](const PromptBundle&,
                                                       std::uint64_t nonce) -> std::string {
    if (cyclic) return responses[nonce % responses.size()];
    if (nonce >= responses.size()) throw Error("scripted responses exhausted");
    return responses[nonce];
  };
}

std::string ScriptedClient::complete(const PromptBundle& prompt, std::uint64_t nonce) {
  calls_.fetch_add(1);
  return script_(prompt, nonce);
}

FixtureStore::FixtureStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path FixtureStore::file_for(const std::string& prompt_hash) const {
  return dir_ / (prompt_hash + ".json");
}

std::optional<std::string> FixtureStore::response(const std::string& prompt_hash,
                                                  std::uint64_t nonce) const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::ifstream in(file_for(prompt_hash));
  if (!in) return std::nullopt;
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
  const auto& responses = doc.value("responses", json::object());
  auto it = responses.find(std::to_string(nonce));
  if (it == responses.end()) return std::nullopt;
  return it->get<std::string>();
}

void FixtureStore::record(const std::string& prompt_hash, std::uint64_t nonce,
                          const std::string& response_text) {
  std::lock_guard<std::mutex> lock(mutex_);
  const auto path = file_for(prompt_hash);
  ordered_json doc;
  {
    std::ifstream in(path);
    if (in) {
      try {
        doc = ordered_json::parse(in);
      } catch (const json::parse_error&) {
        doc = ordered_json{};
      }
    }
  }
  doc["prompt_hash"] = prompt_hash;
  doc["responses"][std::to_string(nonce)] = response_text;
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << doc.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

std::string ReplayClient::complete(const PromptBundle& prompt, std::uint64_t nonce) {
  auto recorded = store_.response(prompt.hash(), nonce);
  if (!recorded) {
    throw Error("no recorded response for prompt " + prompt.hash().substr(0, 12) + "... nonce " +
                std::to_string(nonce));
  }
  return *recorded;
}

// ---------------------------------------------------------------------------
// Live HTTP client

struct HttpLlmClient::Impl {
  HttpClientConfig config;
  std::string base;
  std::string path;
};

HttpLlmClient::HttpLlmClient(HttpClientConfig config) : impl_(std::make_unique<Impl>()) {
  if (config.endpoint_url.empty()) throw ValidationError("endpoint URL is required");
  impl_->config = std::move(config);
  const std::string& url = impl_->config.endpoint_url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ValidationError("endpoint URL needs a scheme");
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    impl_->base = url;
    impl_->path = "/v1/chat/completions";
  } else {
    impl_->base = url.substr(0, path_start);
    impl_->path = url.substr(path_start);
  }
}

HttpLlmClient::~HttpLlmClient() = default;

std::string HttpLlmClient::complete(const PromptBundle& prompt, std::uint64_t nonce) {
  ordered_json body;
  body["model"] = prompt.model_id;
  body["temperature"] = prompt.temperature;
  body["messages"] = ordered_json::array(
      {ordered_json{{"role", "system"}, {"content", prompt.system_text}},
       ordered_json{{"role", "user"}, {"content", prompt.user_text}}});

  httplib::Headers headers;
  if (!impl_->config.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + impl_->config.api_key);
  }

  std::string last_error;
  for (int attempt = 0; attempt < std::max(1, impl_->config.transport_retries); ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::seconds(1 << (attempt - 1)));
    }
    httplib::Client client(impl_->base);
    client.set_read_timeout(impl_->config.timeout_sec, 0);
    client.set_connection_timeout(impl_->config.timeout_sec, 0);
    auto res = client.Post(impl_->path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error("chat endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    json doc;
    try {
      doc = json::parse(res->body);
    } catch (const json::parse_error& e) {
      throw Error("chat endpoint returned invalid JSON: " + std::string(e.what()));
    }
    if (!doc.contains("choices") || doc["choices"].empty()) {
      throw Error("chat endpoint response has no choices");
    }
    std::string content = doc["choices"][0]["message"]["content"].get<std::string>();
    if (impl_->config.record_to) {
      impl_->config.record_to->record(prompt.hash(), nonce, content);
    }
    return content;
  }
  throw Error("chat endpoint unreachable after retries: " + last_error);
}

// ---------------------------------------------------------------------------

ConfigurationPool generate_pool(const ProblemCard& card, const SeparatorCatalog& catalog,
                                LlmClient& client, const PoolRequest& request) {
  if (request.pool_size < 1) throw ValidationError("pool size must be at least 1");
  if (request.retry_budget < 1) throw ValidationError("retry budget must be at least 1");

  const PromptBundle prompt =
      build_config_prompt(card, catalog, request.flags, request.temperature, request.model_id);

  std::vector<std::optional<Configuration>> samples(
      static_cast<std::size_t>(request.pool_size));
  std::vector<RetryRecord> retries;
  std::mutex retries_mutex;

  parallel_for(static_cast<std::size_t>(request.pool_size), request.concurrency,
               [&](std::size_t i) {
                 for (int attempt = 0; attempt < request.retry_budget; ++attempt) {
                   const std::uint64_t nonce =
                       i * static_cast<std::uint64_t>(request.retry_budget) +
                       static_cast<std::uint64_t>(attempt);
                   std::string raw;
                   try {
                     raw = client.complete(prompt, nonce);
                     Configuration config = parse_config_response(raw, catalog);
                     samples[i] = config.with_provenance(
                         Provenance::llm_sample(static_cast<int>(i), request.card_index));
                     return;
                   } catch (const std::exception& e) {
                     std::lock_guard<std::mutex> lock(retries_mutex);
                     retries.push_back(
                         {static_cast<int>(i), attempt, e.what(), std::move(raw)});
                   }
                 }
               });

  std::sort(retries.begin(), retries.end(), [](const RetryRecord& a, const RetryRecord& b) {
    return std::tie(a.sample_index, a.attempt) < std::tie(b.sample_index, b.attempt);
  });

  ConfigurationPool pool;
  pool.catalog_ref = catalog.ref();
  pool.retries = std::move(retries);
  bool complete = true;
  for (auto& sample : samples) {
    if (sample) {
      pool.configs.push_back(std::move(*sample));
    } else {
      complete = false;
    }
  }
  if (!complete) {
    const std::string msg = "assembled " + std::to_string(pool.configs.size()) + " of " +
                            std::to_string(request.pool_size) + " samples within the retry budget";
    throw PoolIncomplete(msg, std::move(pool));
  }
  return pool;
}

}  // namespace sepconfig
