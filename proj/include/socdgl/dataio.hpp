#pragma once

#include "socdgl/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace socdgl {

// Tab-separated view file: header row of entity identifiers, then one row
// per feature. Columns are reordered to match the EntitySet order.
FeatureView parse_feature_view(const std::filesystem::path& path,
                               EntityKind entity_kind, const EntitySet& entities);

// Reads only the header row of a view file (used to bootstrap an EntitySet
// when no interaction file fixes the id order).
std::vector<std::string> read_view_ids(const std::filesystem::path& path);

// Tab-separated triples drug_id, target_id, label in {0,1}. Unlisted pairs
// are unknown. Duplicate identical lines collapse; conflicting labels throw.
InteractionSet parse_interactions(const std::filesystem::path& path,
                                  const EntitySet& entities);

void write_interactions(const std::filesystem::path& path,
                        const InteractionSet& interactions,
                        const EntitySet& entities);

// Association-based negative sampling: grows the negative list to
// floor(ratio * |y+|) pairs picked from the unknown pairs in ascending order
// of their max similarity to any drug positively linked to the same target.
// Ties are broken by a seeded shuffle. Existing explicit negatives are kept.
InteractionSet sample_negatives(const InteractionSet& interactions,
                                const AffinityMatrix& drug_affinity, double ratio,
                                std::uint64_t seed);

// Warm k-fold partition over the labeled pairs, or one split per held-out
// entity for the cold modes.
SplitPlan plan_splits(const InteractionSet& interactions, const EntitySet& entities,
                      SplitMode mode, int k,
                      const std::vector<std::string>& holdout_ids,
                      std::uint64_t seed);

}  // namespace socdgl
