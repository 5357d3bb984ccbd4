#include "sepconfig/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sepconfig/errors.hpp"
#include "sepconfig/sha256.hpp"

namespace sepconfig {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(SettingLevel level) {
  switch (level) {
    case SettingLevel::Off: return "off";
    case SettingLevel::Default: return "default";
    case SettingLevel::Aggressive: return "aggressive";
  }
  return "default";
}

std::optional<SettingLevel> setting_level_from_string(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "off") return SettingLevel::Off;
  if (lower == "default") return SettingLevel::Default;
  if (lower == "aggressive") return SettingLevel::Aggressive;
  return std::nullopt;
}

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Scip: return "scip";
    case SolverKind::Gurobi: return "gurobi";
    case SolverKind::Stub: return "stub";
  }
  return "stub";
}

std::optional<SolverKind> solver_kind_from_string(std::string_view name) {
  if (name == "scip") return SolverKind::Scip;
  if (name == "gurobi") return SolverKind::Gurobi;
  if (name == "stub") return SolverKind::Stub;
  return std::nullopt;
}

namespace {

const json& require_field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(std::string("missing field \"") + key + "\"");
  return *it;
}

SettingLevel parse_level_or_throw(const std::string& name) {
  auto level = setting_level_from_string(name);
  if (!level) throw IllegalLevel("unknown setting level \"" + name + "\"");
  return *level;
}

}  // namespace

SeparatorCatalog SeparatorCatalog::from_json(const json& doc) {
  SeparatorCatalog cat;

  const std::string solver_name = require_field(doc, "solver").get<std::string>();
  auto solver = solver_kind_from_string(solver_name);
  if (!solver) throw ParseError("unknown solver \"" + solver_name + "\"");
  cat.ref_.solver = *solver;
  cat.ref_.version_tag = require_field(doc, "version_tag").get<std::string>();

  for (const auto& name : require_field(doc, "allowed_levels")) {
    cat.allowed_levels_.insert(parse_level_or_throw(name.get<std::string>()));
  }
  if (cat.allowed_levels_.size() < 2 || !cat.allowed_levels_.count(SettingLevel::Default)) {
    throw ValidationError("allowed_levels must contain Default and at least one other level");
  }

  const json& seps = require_field(doc, "separators");
  if (!seps.is_array() || seps.empty()) {
    throw ValidationError("catalog must list at least one separator");
  }

  std::set<std::string> seen_params;
  for (const auto& entry : seps) {
    SeparatorSpec spec;
    spec.id = require_field(entry, "id").get<std::string>();
    spec.solver_param = require_field(entry, "solver_param").get<std::string>();
    spec.display_name = require_field(entry, "display_name").get<std::string>();
    spec.description = entry.value("description", std::string{});
    if (entry.contains("stats_name") && !entry["stats_name"].is_null()) {
      spec.stats_name = entry["stats_name"].get<std::string>();
    }
    for (const auto& [level_name, pairs] : require_field(entry, "renderings").items()) {
      std::vector<ParamSetting> settings;
      for (const auto& pair : pairs) {
        if (!pair.is_array() || pair.size() != 2) {
          throw ParseError("rendering entries must be [param, value] pairs (separator \"" +
                           spec.id + "\")");
        }
        std::string value = pair[1].is_string() ? pair[1].get<std::string>() : pair[1].dump();
        settings.push_back({pair[0].get<std::string>(), std::move(value)});
      }
      spec.renderings[parse_level_or_throw(level_name)] = std::move(settings);
    }

    if (spec.id.empty()) throw ValidationError("separator id must be non-empty");
    if (spec.solver_param.empty()) {
      throw ValidationError("separator \"" + spec.id + "\" has empty solver_param");
    }
    if (!seen_params.insert(spec.solver_param).second) {
      throw ValidationError("duplicate solver_param \"" + spec.solver_param + "\"");
    }
    if (cat.index_.count(spec.id)) throw ValidationError("duplicate separator id \"" + spec.id + "\"");
    for (SettingLevel level : cat.allowed_levels_) {
      if (!spec.renderings.count(level)) {
        throw ValidationError("separator \"" + spec.id + "\" lacks a rendering for level \"" +
                              std::string(to_string(level)) + "\"");
      }
    }

    cat.index_[spec.id] = cat.separators_.size();
    cat.separators_.push_back(std::move(spec));
  }

  // Identity hash over the canonical dump; recomputed on every load so two
  // files with the same content always produce the same ref.
  cat.ref_.content_hash = sha256_hex(cat.to_json().dump());
  return cat;
}

ordered_json SeparatorCatalog::to_json() const {
  ordered_json doc;
  doc["solver"] = std::string(to_string(ref_.solver));
  doc["version_tag"] = ref_.version_tag;
  ordered_json levels = ordered_json::array();
  for (SettingLevel level : allowed_levels_) levels.push_back(std::string(to_string(level)));
  doc["allowed_levels"] = std::move(levels);
  ordered_json seps = ordered_json::array();
  for (const auto& spec : separators_) {
    ordered_json entry;
    entry["id"] = spec.id;
    entry["solver_param"] = spec.solver_param;
    entry["display_name"] = spec.display_name;
    entry["description"] = spec.description;
    if (spec.stats_name) entry["stats_name"] = *spec.stats_name;
    ordered_json renderings;
    for (const auto& [level, pairs] : spec.renderings) {
      ordered_json list = ordered_json::array();
      for (const auto& p : pairs) list.push_back({p.param, p.value});
      renderings[std::string(to_string(level))] = std::move(list);
    }
    entry["renderings"] = std::move(renderings);
    seps.push_back(std::move(entry));
  }
  doc["separators"] = std::move(seps);
  return doc;
}

std::optional<std::size_t> SeparatorCatalog::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SeparatorCatalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open catalog file: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("invalid catalog document: " + std::string(e.what()));
  }
  return SeparatorCatalog::from_json(doc);
}

std::string Provenance::to_string() const {
  switch (kind) {
    case Kind::LlmSample: {
      std::string out = "llm_sample:" + std::to_string(sample_index);
      if (card_index >= 0) out += ":card" + std::to_string(card_index);
      return out;
    }
    case Kind::Ensemble: return "ensemble:" + label;
    case Kind::Baseline: return "baseline:" + label;
    case Kind::Manual: return "manual";
  }
  return "manual";
}

Provenance Provenance::from_string(std::string_view text) {
  if (text == "manual") return manual();
  auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ParseError("bad provenance: " + std::string(text));
  std::string_view head = text.substr(0, colon);
  std::string_view rest = text.substr(colon + 1);
  if (head == "ensemble") return ensemble(std::string(rest));
  if (head == "baseline") return baseline(std::string(rest));
  if (head == "llm_sample") {
    int sample = -1;
    int card = -1;
    auto second = rest.find(':');
    try {
      sample = std::stoi(std::string(rest.substr(0, second)));
      if (second != std::string_view::npos) {
        std::string_view card_part = rest.substr(second + 1);
        if (card_part.rfind("card", 0) == 0) card = std::stoi(std::string(card_part.substr(4)));
      }
    } catch (const std::exception&) {
      throw ParseError("bad provenance: " + std::string(text));
    }
    return llm_sample(sample, card);
  }
  throw ParseError("bad provenance: " + std::string(text));
}

Configuration::Configuration(CatalogRef ref, std::vector<SettingLevel> levels,
                             Provenance provenance)
    : ref_(std::move(ref)), levels_(std::move(levels)), provenance_(std::move(provenance)) {
  std::string key = ref_.content_hash + "|";
  for (SettingLevel level : levels_) key.push_back(static_cast<char>('0' + static_cast<int>(level)));
  hash_ = sha256_hex(key);
}

int Configuration::non_default_count() const {
  return static_cast<int>(
      std::count_if(levels_.begin(), levels_.end(),
                    [](SettingLevel l) { return l != SettingLevel::Default; }));
}

int Configuration::enabled_count() const {
  return static_cast<int>(std::count_if(levels_.begin(), levels_.end(),
                                        [](SettingLevel l) { return l != SettingLevel::Off; }));
}

bool Configuration::same_levels(const Configuration& other) const {
  if (!same_catalog(other)) {
    throw CatalogMismatch("cannot compare configurations from different catalogs");
  }
  return levels_ == other.levels_;
}

Configuration Configuration::with_provenance(Provenance p) const {
  return Configuration(ref_, levels_, std::move(p));
}

Configuration default_configuration(const SeparatorCatalog& catalog) {
  return Configuration(catalog.ref(),
                       std::vector<SettingLevel>(catalog.size(), SettingLevel::Default),
                       Provenance::manual());
}

std::string render_settings(const Configuration& config, const SeparatorCatalog& catalog) {
  if (config.catalog_ref() != catalog.ref()) {
    throw CatalogMismatch("configuration was built against a different catalog");
  }
  std::string out;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const auto& spec = catalog.at(i);
    auto it = spec.renderings.find(config.level(i));
    if (it == spec.renderings.end()) continue;  // validated at load; defensive lookup only
    for (const auto& setting : it->second) {
      if (catalog.solver() == SolverKind::Gurobi) {
        out += setting.param + " " + setting.value + "\n";
      } else {
        out += setting.param + " = " + setting.value + "\n";
      }
    }
  }
  return out;
}

ordered_json serialize_configuration(const Configuration& config,
                                     const SeparatorCatalog& catalog) {
  if (config.catalog_ref() != catalog.ref()) {
    throw CatalogMismatch("configuration was built against a different catalog");
  }
  ordered_json doc;
  ordered_json cat;
  cat["solver"] = std::string(to_string(catalog.solver()));
  cat["version_tag"] = catalog.version_tag();
  cat["hash"] = catalog.ref().content_hash;
  doc["catalog"] = std::move(cat);
  doc["partial"] = false;
  doc["provenance"] = config.provenance().to_string();
  ordered_json levels;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    levels[catalog.at(i).id] = std::string(to_string(config.level(i)));
  }
  doc["levels"] = std::move(levels);
  return doc;
}

Configuration parse_configuration(const json& doc, const SeparatorCatalog& catalog) {
  const json& cat = require_field(doc, "catalog");
  const std::string hash = require_field(cat, "hash").get<std::string>();
  if (hash != catalog.ref().content_hash) {
    throw CatalogMismatch("document catalog hash " + hash.substr(0, 12) +
                          "... does not match the loaded catalog");
  }
  const bool partial = doc.value("partial", false);

  std::vector<std::optional<SettingLevel>> assigned(catalog.size());
  std::vector<std::string> unknown;
  for (const auto& [id, level_name] : require_field(doc, "levels").items()) {
    auto index = catalog.index_of(id);
    if (!index) {
      unknown.push_back(id);
      continue;
    }
    auto level = setting_level_from_string(level_name.get<std::string>());
    if (!level) throw IllegalLevel("unknown setting level \"" + level_name.get<std::string>() + "\"");
    if (!catalog.level_allowed(*level)) {
      throw IllegalLevel("level \"" + std::string(to_string(*level)) +
                         "\" is not allowed by the catalog");
    }
    assigned[*index] = *level;
  }
  if (!unknown.empty()) throw UnknownSeparator(std::move(unknown));

  std::vector<SettingLevel> levels(catalog.size(), SettingLevel::Default);
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (assigned[i]) {
      levels[i] = *assigned[i];
    } else if (!partial) {
      throw ParseError("separator \"" + catalog.at(i).id +
                       "\" missing from a non-partial configuration document");
    }
  }

  Provenance prov = Provenance::manual();
  if (doc.contains("provenance")) prov = Provenance::from_string(doc["provenance"].get<std::string>());
  return Configuration(catalog.ref(), std::move(levels), std::move(prov));
}

Configuration parse_configuration(const std::string& doc_text, const SeparatorCatalog& catalog) {
  json doc;
  try {
    doc = json::parse(doc_text);
  } catch (const json::parse_error& e) {
    throw ParseError("invalid configuration document: " + std::string(e.what()));
  }
  return parse_configuration(doc, catalog);
}

std::string ConfigurationPool::content_hash() const {
  std::string key = catalog_ref.content_hash + "|";
  for (const auto& config : configs) {
    for (SettingLevel level : config.levels()) {
      key.push_back(static_cast<char>('0' + static_cast<int>(level)));
    }
    key.push_back(';');
  }
  return sha256_hex(key);
}

ordered_json serialize_pool(const ConfigurationPool& pool, const SeparatorCatalog& catalog) {
  ordered_json doc;
  ordered_json cat;
  cat["solver"] = std::string(to_string(catalog.solver()));
  cat["version_tag"] = catalog.version_tag();
  cat["hash"] = catalog.ref().content_hash;
  doc["catalog"] = std::move(cat);
  doc["pool_hash"] = pool.content_hash();
  ordered_json configs = ordered_json::array();
  for (const auto& config : pool.configs) configs.push_back(serialize_configuration(config, catalog));
  doc["configs"] = std::move(configs);
  ordered_json retries = ordered_json::array();
  for (const auto& r : pool.retries) {
    ordered_json entry;
    entry["sample_index"] = r.sample_index;
    entry["attempt"] = r.attempt;
    entry["error"] = r.error;
    entry["raw"] = r.raw;
    retries.push_back(std::move(entry));
  }
  doc["retries"] = std::move(retries);
  return doc;
}

ConfigurationPool parse_pool(const json& doc, const SeparatorCatalog& catalog) {
  const json& cat = require_field(doc, "catalog");
  if (require_field(cat, "hash").get<std::string>() != catalog.ref().content_hash) {
    throw CatalogMismatch("pool document does not match the loaded catalog");
  }
  ConfigurationPool pool;
  pool.catalog_ref = catalog.ref();
  for (const auto& entry : require_field(doc, "configs")) {
    pool.configs.push_back(parse_configuration(entry, catalog));
  }
  for (const auto& entry : doc.value("retries", json::array())) {
    RetryRecord r;
    r.sample_index = entry.value("sample_index", 0);
    r.attempt = entry.value("attempt", 0);
    r.error = entry.value("error", std::string{});
    r.raw = entry.value("raw", std::string{});
    pool.retries.push_back(std::move(r));
  }
  return pool;
}

}  // namespace sepconfig
