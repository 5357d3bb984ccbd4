#include "sepconfig/textfree.hpp"

#include "sepconfig/errors.hpp"
#include "sepconfig/parallel.hpp"

namespace sepconfig {

TextFreeResult textfree_configure(const std::filesystem::path& instance_path,
                                  const SeparatorCatalog& catalog, LlmClient& client,
                                  const TextFreePlan& plan, std::uint64_t clustering_seed) {
  if (plan.k_desc < 1) throw ValidationError("k_desc must be at least 1");
  if (plan.configs_per_desc < 1) throw ValidationError("configs_per_desc must be at least 1");

  const mps::MilpInstance instance = mps::parse_mps(instance_path);
  mps::StructureHistogram hist = mps::histogram(instance);

  const PromptBundle description_prompt =
      build_description_prompt(hist, plan.k_desc, plan.temperature, plan.model_id);
  std::vector<ProblemCard> cards;
  try {
    cards = parse_descriptions(client.complete(description_prompt, 0), plan.k_desc);
  } catch (const NoBlockFound&) {
    throw NoDescriptions("the model produced no candidate descriptions for \"" +
                         instance_path.string() + "\"");
  }

  // Expand every candidate description into its own pool segment; segments
  // concatenate in (description index, sample index) order.
  std::vector<ConfigurationPool> segments(cards.size());
  parallel_for(cards.size(), plan.concurrency, [&](std::size_t i) {
    PoolRequest request;
    request.pool_size = plan.configs_per_desc;
    request.flags = plan.flags;
    request.temperature = plan.temperature;
    request.model_id = plan.model_id;
    request.retry_budget = plan.retry_budget;
    request.concurrency = 1;  // outer loop already parallel
    request.card_index = static_cast<int>(i);
    segments[i] = generate_pool(cards[i], catalog, client, request);
  });

  ConfigurationPool pool;
  pool.catalog_ref = catalog.ref();
  for (const ConfigurationPool& segment : segments) {
    pool.configs.insert(pool.configs.end(), segment.configs.begin(), segment.configs.end());
    pool.retries.insert(pool.retries.end(), segment.retries.begin(), segment.retries.end());
  }

  const int k = std::min<int>(plan.clusters, static_cast<int>(distinct_configuration_count(pool)));
  Clustering clustering = kmedoids(pool, k, clustering_seed);
  SelectionOutcome selection = select_cold_start(clustering, pool);
  return TextFreeResult{std::move(hist), std::move(cards), std::move(pool), std::move(clustering),
                        std::move(selection)};
}

}  // namespace sepconfig
