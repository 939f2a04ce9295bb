#include "tailor/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tailor/errors.hpp"

namespace tailor {

namespace {

constexpr double kFallbackRate = 0.5;        // uninformative prior for missing evidence
constexpr double kUniformShare = 1.0 / 5.0;  // uniform over the five topics

constexpr double kAgeRange = 82.0;  // ages are validated to 18..100
constexpr double kQuitDateRangeDays = 365.0;
constexpr double kClinicalScoreRange = 10.0;

double numeric_similarity(double a, double b, double range) {
    const double diff = std::min(std::abs(a - b), range);
    return 1.0 - diff / range;
}

}  // namespace

double beta_demographic(int n_neighbors) {
    const double n = static_cast<double>(n_neighbors);
    return 1.0 - 50.0 / (n * n + 50.0);
}

double beta_utility(int n_ratings) {
    const double r = static_cast<double>(n_ratings);
    return 1.0 - 50.0 / (r * r + 50.0);
}

double beta_content(double beta_demo, double beta_util) {
    return 1.0 - (beta_demo + beta_util) / 2.0;
}

HybridWeights hybrid_weights(const UserStats& stats) {
    HybridWeights w;
    w.demographic = beta_demographic(stats.n_neighbors);
    w.utility = beta_utility(stats.n_ratings);
    w.content = beta_content(w.demographic, w.utility);
    return w;
}

double pearson_rating_similarity(const std::map<std::string, double>& ratings_a,
                                 const std::map<std::string, double>& ratings_b) {
    std::vector<std::pair<double, double>> pairs;
    auto ia = ratings_a.begin();
    auto ib = ratings_b.begin();
    while (ia != ratings_a.end() && ib != ratings_b.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            pairs.emplace_back(ia->second, ib->second);
            ++ia;
            ++ib;
        }
    }
    if (pairs.size() < 2) return 0.0;
    const double n = static_cast<double>(pairs.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (const auto& [x, y] : pairs) {
        mean_a += x;
        mean_b += y;
    }
    mean_a /= n;
    mean_b /= n;
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (const auto& [x, y] : pairs) {
        const double dx = x - mean_a;
        const double dy = y - mean_b;
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    if (var_a <= 0.0 || var_b <= 0.0) return 0.0;
    return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

double attribute_similarity(const UserProfile& a, const UserProfile& b) {
    double total = 0.0;
    total += a.gender == b.gender ? 1.0 : 0.0;
    total += a.employment_status == b.employment_status ? 1.0 : 0.0;
    total += numeric_similarity(a.age, b.age, kAgeRange);
    total += numeric_similarity(static_cast<double>(a.quit_date.epoch_days),
                                static_cast<double>(b.quit_date.epoch_days), kQuitDateRangeDays);
    total += numeric_similarity(a.fagerstrom, b.fagerstrom, kClinicalScoreRange);
    total += numeric_similarity(a.richmond, b.richmond, kClinicalScoreRange);
    return total / 6.0;
}

double user_similarity(const UserProfile& a, const UserProfile& b, const CohortSnapshot& snap) {
    const double pearson = pearson_rating_similarity(snap.stats_for(a.user_id).rating_scores,
                                                     snap.stats_for(b.user_id).rating_scores);
    return ((pearson + 1.0) / 2.0 + attribute_similarity(a, b)) / 2.0;
}

TopicDistribution demographic_scores(const std::string& user_id, const CohortSnapshot& snap) {
    TopicDistribution scores;
    scores.fill(kFallbackRate);
    const UserProfile* profile = snap.find_profile(user_id);
    if (profile == nullptr) return scores;

    PerTopic<double> weighted_sum = {};
    PerTopic<double> weight_sum = {};
    for (const UserProfile& neighbor : snap.active_users) {
        if (neighbor.user_id == user_id) continue;
        const double sim = user_similarity(*profile, neighbor, snap);
        const UserStats& neighbor_stats = snap.stats_for(neighbor.user_id);
        for (std::size_t t = 0; t < kTopicCount; ++t) {
            if (neighbor_stats.explicit_rate[t]) {
                weighted_sum[t] += sim * *neighbor_stats.explicit_rate[t];
                weight_sum[t] += sim;
            }
        }
    }
    for (std::size_t t = 0; t < kTopicCount; ++t) {
        if (weight_sum[t] > 0.0) scores[t] = weighted_sum[t] / weight_sum[t];
    }
    return scores;
}

std::optional<double> explicit_topic_rate(const std::string& user_id, Topic t,
                                          const CohortSnapshot& snap) {
    return snap.stats_for(user_id).explicit_rate[topic_index(t)];
}

double implicit_topic_rate(const std::string& user_id, Topic t, const CohortSnapshot& snap) {
    return snap.stats_for(user_id).implicit_rate[topic_index(t)];
}

TopicDistribution utility_scores(const std::string& user_id, const CohortSnapshot& snap) {
    const UserStats& stats = snap.stats_for(user_id);
    TopicDistribution scores = {};
    const int votes = stats.n_ratings;
    for (std::size_t t = 0; t < kTopicCount; ++t) {
        const double implicit = stats.implicit_rate[t];
        if (votes == 0) {
            // The blend divides by the vote count; with no votes it is
            // defined as the pure implicit rate, continuous with v = 1.
            scores[t] = implicit;
            continue;
        }
        const double explicit_part = stats.explicit_rate[t].value_or(kFallbackRate);
        const double inv = 1.0 / static_cast<double>(votes);
        scores[t] = (1.0 - inv) * explicit_part + inv * implicit;
    }
    return scores;
}

TopicDistribution content_scores(const UserProfile& user) {
    PerTopic<double> mapped;
    double norm_sq = 0.0;
    for (std::size_t t = 0; t < kTopicCount; ++t) {
        mapped[t] = static_cast<double>(user.interests[t]) / 2.0;
        norm_sq += mapped[t] * mapped[t];
    }
    TopicDistribution scores;
    if (norm_sq <= 0.0) {
        scores.fill(kUniformShare);
        return scores;
    }
    const double norm = std::sqrt(norm_sq);
    for (std::size_t t = 0; t < kTopicCount; ++t) {
        // Cosine against topic t's unit basis vector collapses to the
        // t-th coordinate over the vector norm.
        scores[t] = mapped[t] / norm;
    }
    return scores;
}

ComponentScores component_scores(const std::string& user_id, const CohortSnapshot& snap) {
    ComponentScores out;
    out.demographic = demographic_scores(user_id, snap);
    out.utility = utility_scores(user_id, snap);
    const UserProfile* profile = snap.find_profile(user_id);
    out.content = profile != nullptr ? content_scores(*profile)
                                     : TopicDistribution{kUniformShare, kUniformShare,
                                                         kUniformShare, kUniformShare,
                                                         kUniformShare};
    return out;
}

TopicDistribution hybrid_scores(const std::string& user_id, const CohortSnapshot& snap) {
    const HybridWeights weights = hybrid_weights(snap.stats_for(user_id));
    const ComponentScores parts = component_scores(user_id, snap);
    TopicDistribution scores = {};
    for (std::size_t t = 0; t < kTopicCount; ++t) {
        scores[t] = weights.demographic * parts.demographic[t] +
                    weights.utility * parts.utility[t] + weights.content * parts.content[t];
    }
    return scores;
}

std::map<std::string, int> delivered_counts(std::span<const DeliveryRecord> history) {
    std::map<std::string, int> counts;
    for (const DeliveryRecord& d : history) ++counts[d.message_id];
    return counts;
}

const Message& pick_message(Topic t, const MessageCatalog& catalog,
                            const std::map<std::string, int>& delivered, Rng& rng) {
    const std::vector<Message>& pool = catalog.pool(t);
    if (pool.empty()) {
        throw DomainError(std::string("pick_message: empty pool for topic ") +
                          std::string(topic_name(t)));
    }
    int min_count = std::numeric_limits<int>::max();
    for (const Message& m : pool) {
        auto it = delivered.find(m.id);
        min_count = std::min(min_count, it == delivered.end() ? 0 : it->second);
        if (min_count == 0) break;
    }
    std::vector<const Message*> eligible;
    eligible.reserve(pool.size());
    for (const Message& m : pool) {
        auto it = delivered.find(m.id);
        const int count = it == delivered.end() ? 0 : it->second;
        if (count == min_count) eligible.push_back(&m);
    }
    return *eligible[uniform_below(rng, eligible.size())];
}

}  // namespace tailor
