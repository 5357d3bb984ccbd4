#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace sepconfig {

/// Per-separator setting. Ordering Off < Default < Aggressive is total and
/// matches the ordinal values used by the averaging ensemble.
enum class SettingLevel : int { Off = 0, Default = 1, Aggressive = 2 };

inline constexpr SettingLevel kAllLevels[] = {SettingLevel::Off, SettingLevel::Default,
                                              SettingLevel::Aggressive};

std::string_view to_string(SettingLevel level);
std::optional<SettingLevel> setting_level_from_string(std::string_view name);

enum class SolverKind { Scip, Gurobi, Stub };

std::string_view to_string(SolverKind kind);
std::optional<SolverKind> solver_kind_from_string(std::string_view name);

/// One "parameter path = value" pair in the target solver's settings syntax.
struct ParamSetting {
  std::string param;
  std::string value;

  bool operator==(const ParamSetting&) const = default;
};

/// One separator as exposed by a solver: identity, prompt text, and how each
/// setting level translates into solver parameters.
struct SeparatorSpec {
  std::string id;
  std::string solver_param;
  std::string display_name;
  std::string description;
  /// Row name in the solver's cut statistics, when the solver reports one.
  /// Separators without a stats name can never be pruned from usage data.
  std::optional<std::string> stats_name;
  std::map<SettingLevel, std::vector<ParamSetting>> renderings;
};

/// Identity of a catalog: enough to refuse mixing configurations across
/// catalogs without holding the full catalog.
struct CatalogRef {
  SolverKind solver = SolverKind::Stub;
  std::string version_tag;
  std::string content_hash;

  bool operator==(const CatalogRef&) const = default;
};

/// Immutable, validated list of a solver's separators. The content hash is
/// computed over the canonicalized document so identical catalogs loaded from
/// different files compare equal.
class SeparatorCatalog {
public:
  static SeparatorCatalog from_json(const nlohmann::json& doc);

  SolverKind solver() const { return ref_.solver; }
  const std::string& version_tag() const { return ref_.version_tag; }
  const CatalogRef& ref() const { return ref_; }
  const std::vector<SeparatorSpec>& separators() const { return separators_; }
  const std::set<SettingLevel>& allowed_levels() const { return allowed_levels_; }

  std::size_t size() const { return separators_.size(); }
  const SeparatorSpec& at(std::size_t i) const { return separators_.at(i); }
  std::optional<std::size_t> index_of(std::string_view id) const;
  bool level_allowed(SettingLevel level) const { return allowed_levels_.count(level) > 0; }

  nlohmann::ordered_json to_json() const;

private:
  SeparatorCatalog() = default;

  CatalogRef ref_;
  std::vector<SeparatorSpec> separators_;
  std::set<SettingLevel> allowed_levels_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Loads and validates a catalog file (see docs/formats.md for the schema).
SeparatorCatalog load_catalog(const std::filesystem::path& path);

/// Where a configuration came from. Pool entries additionally record the
/// candidate problem description they were generated from (card_index >= 0).
struct Provenance {
  enum class Kind { LlmSample, Ensemble, Baseline, Manual };

  Kind kind = Kind::Manual;
  int sample_index = -1;
  int card_index = -1;
  std::string label;

  static Provenance llm_sample(int sample_index, int card_index = -1) {
    return {Kind::LlmSample, sample_index, card_index, ""};
  }
  static Provenance ensemble(std::string strategy) {
    return {Kind::Ensemble, -1, -1, std::move(strategy)};
  }
  static Provenance baseline(std::string name) {
    return {Kind::Baseline, -1, -1, std::move(name)};
  }
  static Provenance manual() { return {}; }

  std::string to_string() const;
  static Provenance from_string(std::string_view text);
};

/// A total assignment of a setting level to every separator of one catalog.
/// Levels are stored in catalog order; all comparisons require matching refs.
class Configuration {
public:
  Configuration(CatalogRef ref, std::vector<SettingLevel> levels, Provenance provenance);

  const CatalogRef& catalog_ref() const { return ref_; }
  const std::vector<SettingLevel>& levels() const { return levels_; }
  SettingLevel level(std::size_t i) const { return levels_.at(i); }
  const Provenance& provenance() const { return provenance_; }

  std::size_t size() const { return levels_.size(); }
  int non_default_count() const;
  int enabled_count() const;  // levels != Off

  /// Hash of (catalog hash, level vector); stable across provenance changes.
  const std::string& content_hash() const { return hash_; }

  bool same_catalog(const Configuration& other) const { return ref_ == other.ref_; }
  /// Level-wise equality; throws CatalogMismatch when refs differ.
  bool same_levels(const Configuration& other) const;

  Configuration with_provenance(Provenance p) const;

private:
  CatalogRef ref_;
  std::vector<SettingLevel> levels_;
  Provenance provenance_;
  std::string hash_;
};

/// All levels Default.
Configuration default_configuration(const SeparatorCatalog& catalog);

/// Renders the configuration to the solver's native settings syntax:
/// "path = value" lines for SCIP and the stub, "Name value" lines for Gurobi,
/// concatenated in catalog order. Byte-deterministic for a given input.
std::string render_settings(const Configuration& config, const SeparatorCatalog& catalog);

/// Canonical interchange document (stable field order, diff-friendly).
nlohmann::ordered_json serialize_configuration(const Configuration& config,
                                               const SeparatorCatalog& catalog);

/// Parses an interchange document against `catalog`. Unknown ids are rejected;
/// ids missing from the document are an error unless the document declares
/// "partial": true, in which case they fill as Default.
Configuration parse_configuration(const nlohmann::json& doc, const SeparatorCatalog& catalog);
Configuration parse_configuration(const std::string& doc_text, const SeparatorCatalog& catalog);

/// One failed completion while assembling a pool.
struct RetryRecord {
  int sample_index = 0;
  int attempt = 0;
  std::string error;
  std::string raw;
};

/// Ordered multiset of configurations over one catalog, with generation
/// provenance. Duplicates are retained; they weight clustering.
struct ConfigurationPool {
  CatalogRef catalog_ref;
  std::vector<Configuration> configs;
  std::vector<RetryRecord> retries;

  std::size_t size() const { return configs.size(); }
  bool empty() const { return configs.empty(); }
  /// Hash of the member level vectors in order (retries excluded).
  std::string content_hash() const;
};

nlohmann::ordered_json serialize_pool(const ConfigurationPool& pool,
                                      const SeparatorCatalog& catalog);
ConfigurationPool parse_pool(const nlohmann::json& doc, const SeparatorCatalog& catalog);

}  // namespace sepconfig
