#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sepconfig/catalog.hpp"
#include "sepconfig/errors.hpp"
#include "sepconfig/mps.hpp"

namespace sepconfig {

/// A problem to configure for: a short prose description plus an optional
/// formal model written in LaTeX.
struct ProblemCard {
  enum class Source { Authored, LlmGenerated };

  std::string title;
  std::string description;
  std::string latex_model;
  Source source = Source::Authored;

  static ProblemCard load(const std::filesystem::path& path);
  std::string content_hash() const;
};

/// Which prompt components to include; each flag maps to one ablation of the
/// full prompt.
struct PromptFlags {
  bool separator_descriptions = true;
  bool problem_text = true;
  bool latex_model = true;
};

struct PromptBundle {
  std::string system_text;
  std::string user_text;
  PromptFlags components;
  double temperature = 1.0;
  std::string model_id;

  /// Key for fixture recording/replay; covers everything that shapes the
  /// completion distribution.
  std::string hash() const;
};

/// Full prompt asking the model to assign every separator a level. The
/// separator section appears exactly once; descriptions drop to bare names
/// when the flag is off, and empty card fields are omitted with the flags
/// updated to reflect what the prompt actually contains.
PromptBundle build_config_prompt(const ProblemCard& card, const SeparatorCatalog& catalog,
                                 PromptFlags flags, double temperature = 1.0,
                                 const std::string& model_id = "gpt-4o");

/// Extracts the first fenced block from raw model output and maps its
/// "id: level" lines onto the catalog. Ids absent from the block stay
/// Default; unknown ids and disallowed levels are rejected.
Configuration parse_config_response(const std::string& raw, const SeparatorCatalog& catalog);

/// Prompt asking for `k_desc` plausible problem descriptions matching the
/// structural profile, one per fenced block.
PromptBundle build_description_prompt(const mps::StructureHistogram& hist, int k_desc,
                                      double temperature = 1.0,
                                      const std::string& model_id = "gpt-4o");

/// Cards for each fenced block found, capped at k_desc; fewer blocks than
/// requested is accepted, zero is NoBlockFound.
std::vector<ProblemCard> parse_descriptions(const std::string& raw, int k_desc);

class LlmClient {
public:
  virtual ~LlmClient() = default;
  /// One completion. Mock implementations must be deterministic in
  /// (prompt hash, nonce); nonces increase across retries so a retry never
  /// replays the failed response.
  virtual std::string complete(const PromptBundle& prompt, std::uint64_t nonce) = 0;
};

/// Deterministic mock: the response is a pure function of (prompt, nonce).
/// The vector form indexes responses by nonce (modulo size when cyclic).
class ScriptedClient : public LlmClient {
public:
  using Script = std::function<std::string(const PromptBundle&, std::uint64_t)>;

  explicit ScriptedClient(Script script) : script_(std::move(script)) {}
  explicit ScriptedClient(std::vector<std::string> responses, bool cyclic = false);

  std::string complete(const PromptBundle& prompt, std::uint64_t nonce) override;
  int calls() const { return calls_.load(); }

private:
  Script script_;
  std::atomic<int> calls_{0};
};

/// One file per prompt hash holding the ordered recorded responses.
class FixtureStore {
public:
  explicit FixtureStore(std::filesystem::path dir);

  std::optional<std::string> response(const std::string& prompt_hash, std::uint64_t nonce) const;
  void record(const std::string& prompt_hash, std::uint64_t nonce, const std::string& response);

  const std::filesystem::path& dir() const { return dir_; }

private:
  std::filesystem::path file_for(const std::string& prompt_hash) const;

  std::filesystem::path dir_;
  mutable std::mutex mutex_;
};

/// Replays recorded completions; a miss is an error rather than a live call,
/// so replay runs cannot silently depend on the network.
class ReplayClient : public LlmClient {
public:
  explicit ReplayClient(std::filesystem::path fixture_dir) : store_(std::move(fixture_dir)) {}
  std::string complete(const PromptBundle& prompt, std::uint64_t nonce) override;

private:
  FixtureStore store_;
};

struct HttpClientConfig {
  std::string endpoint_url;  // full chat-completions URL
  std::string api_key;
  int timeout_sec = 120;
  int transport_retries = 3;
  /// When set, every completion is recorded for later replay.
  FixtureStore* record_to = nullptr;
};

/// Chat-completions client over HTTP(S) with exponential backoff on
/// transport errors and 429/5xx responses.
class HttpLlmClient : public LlmClient {
public:
  explicit HttpLlmClient(HttpClientConfig config);
  ~HttpLlmClient() override;
  std::string complete(const PromptBundle& prompt, std::uint64_t nonce) override;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Carries the partial pool assembled before the retry budget ran out.
class PoolIncomplete : public Error {
public:
  PoolIncomplete(const std::string& msg, ConfigurationPool partial)
      : Error(msg), partial_(std::move(partial)) {}
  const ConfigurationPool& partial() const { return partial_; }

private:
  ConfigurationPool partial_;
};

struct PoolRequest {
  int pool_size = 100;
  PromptFlags flags;
  double temperature = 1.0;
  std::string model_id = "gpt-4o";
  int retry_budget = 3;
  int concurrency = 1;
  /// Stamped into each sample's provenance when >= 0 (text-free segments).
  int card_index = -1;
};

/// Samples pool_size validated configurations, retrying invalid completions
/// up to retry_budget times per sample. Sample order in the pool follows the
/// sample index regardless of completion scheduling. Throws PoolIncomplete
/// when any sample exhausts its budget.
ConfigurationPool generate_pool(const ProblemCard& card, const SeparatorCatalog& catalog,
                                LlmClient& client, const PoolRequest& request);

}  // namespace sepconfig
