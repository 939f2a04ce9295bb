#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "tailor/catalog.hpp"
#include "tailor/rng.hpp"
#include "tailor/snapshot.hpp"
#include "tailor/topic.hpp"

namespace tailor {

// Nonnegative per-topic score vector. Deliberately not normalized; the
// roulette selector divides by the sum.
using TopicDistribution = PerTopic<double>;

// Per-algorithm blend weights. The demographic and utility weights grow
// with evidence (neighbors, ratings) while the content weight shrinks,
// which is what carries a user out of the cold-start regime.
struct HybridWeights {
    double demographic = 0.0;
    double utility = 0.0;
    double content = 1.0;
};

struct ComponentScores {
    TopicDistribution demographic = {};
    TopicDistribution utility = {};
    TopicDistribution content = {};
};

// 1 - 50/(n^2 + 50): 0 at n=0, strictly increasing, crosses 0.9 above 22
// neighbors, asymptotically 1.
double beta_demographic(int n_neighbors);
// Same curve over the user's distinct rated-message count.
double beta_utility(int n_ratings);
// 1 - (bd + bu)/2.
double beta_content(double beta_demo, double beta_util);
HybridWeights hybrid_weights(const UserStats& stats);

// Pearson correlation over the co-rated message set; folds to 0 when
// fewer than two co-rated messages exist or either side is constant.
double pearson_rating_similarity(const std::map<std::string, double>& ratings_a,
                                 const std::map<std::string, double>& ratings_b);

// Equal-weight mean over gender, employment status, age, quit date and the
// two clinical scores. Categorical attributes score 1 when equal, else 0;
// numeric attributes score 1 - |diff|/range with |diff| capped at range.
double attribute_similarity(const UserProfile& a, const UserProfile& b);

// Mean of the rating similarity (remapped to [0,1] via (p+1)/2) and the
// attribute similarity, giving a nonnegative neighbor weight.
double user_similarity(const UserProfile& a, const UserProfile& b, const CohortSnapshot& snap);

// Similarity-weighted mean of the neighbors' explicit topic rates over all
// other active users. Topics nobody informs fall back to 0.5.
TopicDistribution demographic_scores(const std::string& user_id, const CohortSnapshot& snap);

// Mean vote score over the user's latest votes on the topic's messages;
// absent when the user has not voted on the topic.
std::optional<double> explicit_topic_rate(const std::string& user_id, Topic t,
                                          const CohortSnapshot& snap);

// Mean of the user's dwell-qualified section-access share and message-read
// share for the topic; an empty denominator folds to the uniform 1/5.
double implicit_topic_rate(const std::string& user_id, Topic t, const CohortSnapshot& snap);

// Explicit/implicit blend: (1 - 1/v) * e_t + (1/v) * i_t over the vote
// count v, pure implicit at v = 0, absent e_t folded to 0.5.
TopicDistribution utility_scores(const std::string& user_id, const CohortSnapshot& snap);

// Cosine between the mapped interest vector (0, 0.5, 1 per Likert level)
// and each topic's unit basis vector; an all-zero vector folds to uniform.
TopicDistribution content_scores(const UserProfile& user);

ComponentScores component_scores(const std::string& user_id, const CohortSnapshot& snap);

// The weighted hybrid: beta_d * demographic + beta_u * utility +
// beta_c * content, per topic.
TopicDistribution hybrid_scores(const std::string& user_id, const CohortSnapshot& snap);

// Uniform draw over the topic's least-delivered messages: fresh messages
// first, and once the pool is exhausted the no-repeat window resets and
// every message becomes eligible again. Throws on an empty pool.
const Message& pick_message(Topic t, const MessageCatalog& catalog,
                            const std::map<std::string, int>& delivered_counts, Rng& rng);

// Per-message delivery counts for pick_message, from a user's history.
std::map<std::string, int> delivered_counts(std::span<const DeliveryRecord> history);

}  // namespace tailor
