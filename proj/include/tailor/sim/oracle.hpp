#pragma once

#include <string>

#include "tailor/catalog.hpp"
#include "tailor/snapshot.hpp"
#include "tailor/topic.hpp"

namespace tailor::sim {

// Unoptimized, self-contained re-derivation of the per-user topic scores
// straight from the snapshot's raw signals: blend weights, rating
// correlation, attribute distances, the explicit/implicit blend and the
// interest cosine are all recomputed inline without touching the engine's
// scoring code. Reference path for equivalence checks; not used in
// production planning.
PerTopic<double> oracle_hybrid_scores(const std::string& user_id, const CohortSnapshot& snap,
                                      const MessageCatalog& catalog);

}  // namespace tailor::sim
