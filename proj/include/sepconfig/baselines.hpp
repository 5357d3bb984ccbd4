#pragma once

#include <random>
#include <vector>

#include "sepconfig/catalog.hpp"
#include "sepconfig/ensemble.hpp"
#include "sepconfig/harness.hpp"

namespace sepconfig {

/// Turns off every separator that applied no cuts across the validation
/// solves and leaves the rest at Default. Stats row names map to catalog ids
/// through each separator's stats_name; separators without one cannot be
/// observed and stay Default (their ids are appended to `unmapped` when
/// given). A usage row naming no catalog separator is an error.
Configuration pruning(const std::vector<SeparatorUsage>& usage, const SeparatorCatalog& catalog,
                      std::vector<std::string>* unmapped = nullptr);

/// Draws each separator's level independently and uniformly from the
/// catalog's allowed set. Uses rejection sampling on the raw engine output,
/// so the draw sequence does not depend on the standard library's
/// distribution implementation.
Configuration random_configuration(const SeparatorCatalog& catalog, std::mt19937_64& rng);

/// Samples `depth` configurations uniformly at random, evaluates each on the
/// validation set, and keeps the best median. All candidates are drawn from
/// the rng before any evaluation starts, so the candidate sequence for a
/// given seed is a prefix of the sequence for any larger depth.
SelectionOutcome search(int depth, const SeparatorCatalog& catalog, const InstanceSet& val_set,
                        Evaluator& evaluator, std::mt19937_64& rng);

}  // namespace sepconfig
