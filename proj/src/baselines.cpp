#include "sepconfig/baselines.hpp"

#include <map>

#include "sepconfig/errors.hpp"

namespace sepconfig {

Configuration pruning(const std::vector<SeparatorUsage>& usage, const SeparatorCatalog& catalog,
                      std::vector<std::string>* unmapped) {
  if (usage.empty()) throw EmptyValidationSet("pruning needs at least one validation instance");

  std::map<std::string, std::size_t> stats_to_index;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (catalog.at(i).stats_name) stats_to_index[*catalog.at(i).stats_name] = i;
  }

  std::vector<long long> totals(catalog.size(), 0);
  for (const SeparatorUsage& per_instance : usage) {
    for (const auto& [stats_name, count] : per_instance.cuts_applied) {
      auto it = stats_to_index.find(stats_name);
      if (it == stats_to_index.end()) {
        throw UnknownSeparatorInStats("statistics row \"" + stats_name +
                                      "\" maps to no catalog separator");
      }
      totals[it->second] += count;
    }
  }

  std::vector<SettingLevel> levels(catalog.size(), SettingLevel::Default);
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (!catalog.at(i).stats_name) {
      // Unobservable separators are never pruned.
      if (unmapped) unmapped->push_back(catalog.at(i).id);
      continue;
    }
    if (totals[i] == 0) levels[i] = SettingLevel::Off;
  }
  return Configuration(catalog.ref(), std::move(levels), Provenance::baseline("pruning"));
}

namespace {

/// Unbiased index in [0, n) from raw 64-bit engine output.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return static_cast<std::size_t>(draw % n);
}

}  // namespace

Configuration random_configuration(const SeparatorCatalog& catalog, std::mt19937_64& rng) {
  std::vector<SettingLevel> allowed(catalog.allowed_levels().begin(),
                                    catalog.allowed_levels().end());
  std::vector<SettingLevel> levels(catalog.size(), SettingLevel::Default);
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    levels[i] = allowed[uniform_index(rng, allowed.size())];
  }
  return Configuration(catalog.ref(), std::move(levels), Provenance::baseline("random"));
}

SelectionOutcome search(int depth, const SeparatorCatalog& catalog, const InstanceSet& val_set,
                        Evaluator& evaluator, std::mt19937_64& rng) {
  if (depth < 1) throw ValidationError("search depth must be at least 1");

  std::vector<Configuration> candidates;
  candidates.reserve(static_cast<std::size_t>(depth));
  for (int i = 0; i < depth; ++i) {
    candidates.push_back(
        random_configuration(catalog, rng)
            .with_provenance(Provenance::baseline("search(d=" + std::to_string(depth) + ")")));
  }

  std::vector<std::vector<double>> improvements;
  improvements.reserve(candidates.size());
  for (const Configuration& candidate : candidates) {
    std::vector<double> values;
    for (const EvalRecord& record : evaluator.evaluate(candidate, val_set)) {
      if (record.valid) values.push_back(record.improvement);
    }
    improvements.push_back(std::move(values));
  }

  SelectionOutcome outcome = select_validated(candidates, improvements);
  outcome.solve_count = static_cast<long long>(depth) *
                        static_cast<long long>(val_set.instances.size()) *
                        static_cast<long long>(evaluator.plan().seeds);
  return outcome;
}

}  // namespace sepconfig
