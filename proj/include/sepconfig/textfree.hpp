#pragma once

#include <filesystem>

#include "sepconfig/ensemble.hpp"
#include "sepconfig/llm.hpp"
#include "sepconfig/mps.hpp"

namespace sepconfig {

/// Text-free pipeline parameters: the structural profile of one MPS file is
/// turned into k_desc candidate descriptions, each expanded into
/// configs_per_desc samples, and the pooled result is clustered and selected
/// cold-start (no solves at any point).
struct TextFreePlan {
  int k_desc = 5;
  int configs_per_desc = 20;
  int clusters = 5;
  PromptFlags flags;
  double temperature = 1.0;
  std::string model_id = "gpt-4o";
  int retry_budget = 3;
  int concurrency = 1;
};

struct TextFreeResult {
  mps::StructureHistogram histogram;
  std::vector<ProblemCard> cards;
  ConfigurationPool pool;
  Clustering clustering;
  SelectionOutcome selection;
};

/// MPS file -> histogram -> candidate descriptions -> pooled configurations
/// -> largest-cluster medoid. The pool shrinks proportionally when the model
/// produces fewer than k_desc descriptions; zero descriptions is
/// NoDescriptions. Pool order is (description index, sample index).
TextFreeResult textfree_configure(const std::filesystem::path& instance_path,
                                  const SeparatorCatalog& catalog, LlmClient& client,
                                  const TextFreePlan& plan, std::uint64_t clustering_seed = 0);

}  // namespace sepconfig
