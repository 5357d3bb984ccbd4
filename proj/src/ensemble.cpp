#include "sepconfig/ensemble.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "sepconfig/errors.hpp"
#include "sepconfig/stats.hpp"

namespace sepconfig {

int config_distance(const Configuration& a, const Configuration& b) {
  if (!a.same_catalog(b)) {
    throw CatalogMismatch("distance requires configurations from the same catalog");
  }
  int distance = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.level(i) != b.level(i)) ++distance;
  }
  return distance;
}

std::vector<std::size_t> Clustering::cluster_sizes() const {
  std::vector<std::size_t> sizes(medoid_indices.size(), 0);
  for (std::size_t cluster : assignment) ++sizes[cluster];
  return sizes;
}

namespace {

void require_uniform_pool(const ConfigurationPool& pool) {
  if (pool.empty()) throw EmptyPool("operation requires a non-empty pool");
  for (const Configuration& c : pool.configs) {
    if (c.catalog_ref() != pool.catalog_ref) {
      throw CatalogMismatch("pool members span multiple catalogs");
    }
  }
}

long long total_cost_for(const std::vector<std::vector<int>>& dist,
                         const std::vector<std::size_t>& medoids) {
  long long cost = 0;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    int best = std::numeric_limits<int>::max();
    for (std::size_t m : medoids) best = std::min(best, dist[j][m]);
    cost += best;
  }
  return cost;
}

}  // namespace

std::size_t distinct_configuration_count(const ConfigurationPool& pool) {
  std::set<std::vector<SettingLevel>> seen;
  for (const Configuration& c : pool.configs) seen.insert(c.levels());
  return seen.size();
}

Clustering kmedoids(const ConfigurationPool& pool, int k, std::uint64_t seed) {
  require_uniform_pool(pool);
  const std::size_t n = pool.size();
  if (k < 1) throw KTooLarge("k must be at least 1");
  const std::size_t distinct = distinct_configuration_count(pool);
  if (static_cast<std::size_t>(k) > distinct) {
    throw KTooLarge("k = " + std::to_string(k) + " exceeds the " + std::to_string(distinct) +
                    " distinct configurations in the pool");
  }
  (void)seed;  // PAM below is fully deterministic; the seed is recorded by callers

  std::vector<std::vector<int>> dist(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      int d = config_distance(pool.configs[i], pool.configs[j]);
      dist[i][j] = d;
      dist[j][i] = d;
    }
  }

  // BUILD: start from the 1-medoid optimum, then greedily add the candidate
  // with the largest cost reduction. Ties break toward the lower index.
  std::vector<std::size_t> medoids;
  std::vector<bool> is_medoid(n, false);
  {
    long long best_sum = std::numeric_limits<long long>::max();
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
      long long sum = 0;
      for (std::size_t j = 0; j < n; ++j) sum += dist[i][j];
      if (sum < best_sum) {
        best_sum = sum;
        best = i;
      }
    }
    medoids.push_back(best);
    is_medoid[best] = true;
  }
  std::vector<int> nearest(n);
  auto refresh_nearest = [&] {
    for (std::size_t j = 0; j < n; ++j) {
      int best = std::numeric_limits<int>::max();
      for (std::size_t m : medoids) best = std::min(best, dist[j][m]);
      nearest[j] = best;
    }
  };
  while (medoids.size() < static_cast<std::size_t>(k)) {
    refresh_nearest();
    long long best_profit = -1;
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (is_medoid[i]) continue;
      long long profit = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (dist[i][j] < nearest[j]) profit += nearest[j] - dist[i][j];
      }
      if (profit > best_profit) {
        best_profit = profit;
        best = i;
      }
    }
    medoids.push_back(best);
    is_medoid[best] = true;
  }

  // SWAP: best-improvement exchange until no swap strictly lowers the cost.
  long long current = total_cost_for(dist, medoids);
  while (true) {
    long long best_cost = current;
    std::size_t best_slot = n;
    std::size_t best_candidate = n;
    for (std::size_t slot = 0; slot < medoids.size(); ++slot) {
      const std::size_t original = medoids[slot];
      for (std::size_t h = 0; h < n; ++h) {
        if (is_medoid[h]) continue;
        medoids[slot] = h;
        long long cost = total_cost_for(dist, medoids);
        if (cost < best_cost) {
          best_cost = cost;
          best_slot = slot;
          best_candidate = h;
        }
      }
      medoids[slot] = original;
    }
    if (best_slot == n) break;
    is_medoid[medoids[best_slot]] = false;
    medoids[best_slot] = best_candidate;
    is_medoid[best_candidate] = true;
    current = best_cost;
  }

  Clustering result;
  result.k = k;
  result.medoid_indices = medoids;
  result.assignment.resize(n);
  result.within_cost.assign(medoids.size(), 0);
  result.total_cost = 0;
  for (std::size_t j = 0; j < n; ++j) {
    int best = std::numeric_limits<int>::max();
    std::size_t cluster = 0;
    for (std::size_t c = 0; c < medoids.size(); ++c) {
      if (dist[j][medoids[c]] < best) {
        best = dist[j][medoids[c]];
        cluster = c;
      }
    }
    result.assignment[j] = cluster;
    result.within_cost[cluster] += best;
    result.total_cost += best;
  }
  return result;
}

std::string_view to_string(SelectionStrategy strategy) {
  switch (strategy) {
    case SelectionStrategy::ColdStartLargestCluster: return "cold_start_largest_cluster";
    case SelectionStrategy::ValidatedBestMedian: return "validated_best_median";
    case SelectionStrategy::Average: return "average";
    case SelectionStrategy::Mode: return "mode";
    case SelectionStrategy::Smallest: return "smallest";
  }
  return "cold_start_largest_cluster";
}

SelectionOutcome select_cold_start(const Clustering& clustering, const ConfigurationPool& pool) {
  require_uniform_pool(pool);
  const auto sizes = clustering.cluster_sizes();
  std::size_t best = 0;
  for (std::size_t c = 1; c < sizes.size(); ++c) {
    if (sizes[c] > sizes[best] ||
        (sizes[c] == sizes[best] && clustering.within_cost[c] < clustering.within_cost[best])) {
      best = c;
    }
  }
  // Selected medoids keep their pool provenance so the sample index that
  // produced them stays traceable.
  return {pool.configs[clustering.medoid_indices[best]],
          SelectionStrategy::ColdStartLargestCluster,
          {},
          0};
}

SelectionOutcome select_validated(const std::vector<Configuration>& medoids,
                                  const std::vector<std::vector<double>>& improvements) {
  if (medoids.empty()) throw MissingResults("no candidates to select from");
  if (improvements.size() != medoids.size()) {
    throw MissingResults("improvement lists do not line up with candidates");
  }
  SelectionOutcome outcome{medoids.front(), SelectionStrategy::ValidatedBestMedian, {}, 0};
  std::size_t best = 0;
  double best_median = 0;
  for (std::size_t i = 0; i < medoids.size(); ++i) {
    if (improvements[i].empty()) {
      throw MissingResults("candidate " + std::to_string(i) + " has no validation results");
    }
    const double med = stats::median(improvements[i]);
    outcome.candidates_tested.push_back({medoids[i], med});
    if (i == 0 || med > best_median ||
        (med == best_median &&
         medoids[i].non_default_count() < medoids[best].non_default_count())) {
      best = i;
      best_median = med;
    }
  }
  outcome.final = medoids[best];
  return outcome;
}

Configuration ensemble_average(const ConfigurationPool& pool) {
  require_uniform_pool(pool);
  const std::size_t width = pool.configs.front().size();
  std::vector<SettingLevel> levels(width, SettingLevel::Default);
  const long long n = static_cast<long long>(pool.size());
  for (std::size_t i = 0; i < width; ++i) {
    long long sum = 0;
    for (const Configuration& c : pool.configs) sum += static_cast<int>(c.level(i));
    // round half-up of sum/n, kept in integers for exactness
    const long long ordinal = (2 * sum + n) / (2 * n);
    levels[i] = static_cast<SettingLevel>(ordinal);
  }
  return Configuration(pool.catalog_ref, std::move(levels), Provenance::ensemble("average"));
}

Configuration ensemble_mode(const ConfigurationPool& pool) {
  require_uniform_pool(pool);
  std::map<std::vector<SettingLevel>, std::pair<std::size_t, std::size_t>> counts;  // -> count, first index
  for (std::size_t i = 0; i < pool.size(); ++i) {
    auto [it, inserted] = counts.try_emplace(pool.configs[i].levels(), 0, i);
    ++it->second.first;
  }
  std::size_t best_index = 0;
  std::size_t best_count = 0;
  for (const auto& [levels, stats] : counts) {
    const auto [count, first] = stats;
    const Configuration& candidate = pool.configs[first];
    const Configuration& incumbent = pool.configs[best_index];
    bool better = count > best_count;
    if (count == best_count) {
      if (candidate.non_default_count() < incumbent.non_default_count()) {
        better = true;
      } else if (candidate.non_default_count() == incumbent.non_default_count() &&
                 first < best_index) {
        better = true;
      }
    }
    if (best_count == 0 || better) {
      best_count = count;
      best_index = first;
    }
  }
  return pool.configs[best_index].with_provenance(Provenance::ensemble("mode"));
}

Configuration ensemble_smallest(const ConfigurationPool& pool) {
  require_uniform_pool(pool);
  std::size_t best = 0;
  for (std::size_t i = 1; i < pool.size(); ++i) {
    if (pool.configs[i].enabled_count() < pool.configs[best].enabled_count()) best = i;
  }
  return pool.configs[best].with_provenance(Provenance::ensemble("smallest"));
}

nlohmann::ordered_json clustering_to_json(const Clustering& clustering) {
  nlohmann::ordered_json doc;
  doc["k"] = clustering.k;
  doc["medoid_indices"] = clustering.medoid_indices;
  doc["assignment"] = clustering.assignment;
  doc["within_cost"] = clustering.within_cost;
  doc["total_cost"] = clustering.total_cost;
  return doc;
}

nlohmann::ordered_json selection_to_json(const SelectionOutcome& outcome,
                                         const SeparatorCatalog& catalog) {
  nlohmann::ordered_json doc;
  doc["strategy"] = std::string(to_string(outcome.strategy));
  doc["final"] = serialize_configuration(outcome.final, catalog);
  doc["final_hash"] = outcome.final.content_hash();
  nlohmann::ordered_json candidates = nlohmann::ordered_json::array();
  for (const CandidateResult& candidate : outcome.candidates_tested) {
    nlohmann::ordered_json entry;
    entry["config_hash"] = candidate.config.content_hash();
    entry["median_improvement"] = candidate.median_improvement;
    candidates.push_back(std::move(entry));
  }
  doc["candidates_tested"] = std::move(candidates);
  doc["solve_count"] = outcome.solve_count;
  return doc;
}

}  // namespace sepconfig
