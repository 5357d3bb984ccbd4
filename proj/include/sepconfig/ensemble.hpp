#pragma once

#include <cstdint>
#include <vector>

#include "sepconfig/catalog.hpp"

namespace sepconfig {

/// Hamming distance over setting vectors. Levels are categorical, so the
/// count of differing separators is the natural notion of structural
/// dissimilarity. Throws CatalogMismatch when refs differ.
int config_distance(const Configuration& a, const Configuration& b);

/// Number of distinct setting vectors in the pool (duplicates collapse).
std::size_t distinct_configuration_count(const ConfigurationPool& pool);

struct Clustering {
  int k = 0;
  std::vector<std::size_t> medoid_indices;   // pool indices, one per cluster
  std::vector<std::size_t> assignment;       // pool index -> cluster index
  std::vector<long long> within_cost;        // summed member-to-medoid distance
  long long total_cost = 0;

  std::vector<std::size_t> cluster_sizes() const;
};

/// PAM: greedy BUILD seeding followed by best-improvement SWAP until no
/// single medoid exchange lowers the total cost. Duplicates in the pool are
/// retained and weight clusters; k may not exceed the number of distinct
/// configurations (KTooLarge). Deterministic: ties break toward lower
/// indices, so the seed only enters the run record.
Clustering kmedoids(const ConfigurationPool& pool, int k, std::uint64_t seed = 0);

enum class SelectionStrategy {
  ColdStartLargestCluster,
  ValidatedBestMedian,
  Average,
  Mode,
  Smallest,
};

std::string_view to_string(SelectionStrategy strategy);

struct CandidateResult {
  Configuration config;
  double median_improvement = 0.0;
};

struct SelectionOutcome {
  Configuration final;
  SelectionStrategy strategy;
  std::vector<CandidateResult> candidates_tested;
  /// Solver invocations spent selecting (0 for data-free strategies).
  long long solve_count = 0;
};

/// Medoid of the most populous cluster; ties break toward lower within-cluster
/// cost, then lower cluster index.
SelectionOutcome select_cold_start(const Clustering& clustering, const ConfigurationPool& pool);

/// Argmax of median improvement across candidates. `improvements[i]` holds the
/// per-instance values for `medoids[i]`; all must be non-empty. Ties break
/// toward fewer non-default levels, then earlier position.
SelectionOutcome select_validated(const std::vector<Configuration>& medoids,
                                  const std::vector<std::vector<double>>& improvements);

/// Per separator: mean of the level ordinals over the pool, rounded half-up.
Configuration ensemble_average(const ConfigurationPool& pool);

/// Most frequent whole setting vector; ties break toward fewer non-default
/// levels, then the earliest pool index.
Configuration ensemble_mode(const ConfigurationPool& pool);

/// Pool member enabling the fewest separators; ties break toward the earliest
/// pool index.
Configuration ensemble_smallest(const ConfigurationPool& pool);

nlohmann::ordered_json clustering_to_json(const Clustering& clustering);
nlohmann::ordered_json selection_to_json(const SelectionOutcome& outcome,
                                         const SeparatorCatalog& catalog);

}  // namespace sepconfig
