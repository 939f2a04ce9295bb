#include "tailor/sim/oracle.hpp"

#include <cmath>
#include <vector>

namespace tailor::sim {

namespace {

double vote_score(VoteValue v) {
    if (v == VoteValue::kLike) return 1.0;
    if (v == VoteValue::kDislike) return 0.0;
    return 0.5;
}

// Mean vote score per topic from the latest-vote map; count 0 leaves the
// topic without an explicit rate.
void explicit_rates(const UserSignals& sig, const MessageCatalog& catalog,
                    PerTopic<double>& rate, PerTopic<int>& count) {
    rate = {};
    count = {};
    for (const auto& [message_id, value] : sig.latest_votes) {
        const Message* msg = catalog.find(message_id);
        if (msg == nullptr) continue;
        rate[topic_index(msg->topic)] += vote_score(value);
        ++count[topic_index(msg->topic)];
    }
    for (std::size_t t = 0; t < kTopicCount; ++t) {
        if (count[t] > 0) rate[t] /= count[t];
    }
}

PerTopic<double> implicit_rates(const UserSignals& sig) {
    double accesses_total = 0.0;
    double reads_total = 0.0;
    for (std::size_t t = 0; t < kTopicCount; ++t) {
        accesses_total += sig.section_accesses[t];
        reads_total += sig.message_reads[t];
    }
    PerTopic<double> rates;
    for (std::size_t t = 0; t < kTopicCount; ++t) {
        const double access_share =
            accesses_total > 0.0 ? sig.section_accesses[t] / accesses_total : 0.2;
        const double read_share = reads_total > 0.0 ? sig.message_reads[t] / reads_total : 0.2;
        rates[t] = 0.5 * (access_share + read_share);
    }
    return rates;
}

// Pearson over co-rated messages via the computational formula
// (n*Sxy - Sx*Sy) / sqrt((n*Sxx - Sx^2) * (n*Syy - Sy^2)).
double pearson(const UserSignals& a, const UserSignals& b) {
    double n = 0.0, sx = 0.0, sy = 0.0, sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (const auto& [message_id, value_a] : a.latest_votes) {
        auto it = b.latest_votes.find(message_id);
        if (it == b.latest_votes.end()) continue;
        const double x = vote_score(value_a);
        const double y = vote_score(it->second);
        n += 1.0;
        sx += x;
        sy += y;
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
    }
    if (n < 2.0) return 0.0;
    const double var_x = n * sxx - sx * sx;
    const double var_y = n * syy - sy * sy;
    if (var_x <= 0.0 || var_y <= 0.0) return 0.0;
    double r = (n * sxy - sx * sy) / std::sqrt(var_x * var_y);
    if (r > 1.0) r = 1.0;
    if (r < -1.0) r = -1.0;
    return r;
}

double attribute_mean(const UserProfile& a, const UserProfile& b) {
    auto numeric = [](double x, double y, double range) {
        double diff = x > y ? x - y : y - x;
        if (diff > range) diff = range;
        return 1.0 - diff / range;
    };
    const double gender = a.gender == b.gender ? 1.0 : 0.0;
    const double employment = a.employment_status == b.employment_status ? 1.0 : 0.0;
    const double age = numeric(a.age, b.age, 82.0);
    const double quit = numeric(static_cast<double>(a.quit_date.epoch_days),
                                static_cast<double>(b.quit_date.epoch_days), 365.0);
    const double fagerstrom = numeric(a.fagerstrom, b.fagerstrom, 10.0);
    const double richmond = numeric(a.richmond, b.richmond, 10.0);
    return (gender + employment + age + quit + fagerstrom + richmond) / 6.0;
}

}  // namespace

PerTopic<double> oracle_hybrid_scores(const std::string& user_id, const CohortSnapshot& snap,
                                      const MessageCatalog& catalog) {
    const UserProfile* me = snap.find_profile(user_id);
    const UserSignals& my_signals = snap.signals_for(user_id);

    // Blend weights from the evidence counters.
    int neighbors = 0;
    for (const UserProfile& other : snap.active_users) {
        if (other.user_id != user_id) ++neighbors;
    }
    const int votes = static_cast<int>(my_signals.latest_votes.size());
    const double beta_demo = 1.0 - 50.0 / (static_cast<double>(neighbors) * neighbors + 50.0);
    const double beta_util = 1.0 - 50.0 / (static_cast<double>(votes) * votes + 50.0);
    const double beta_cont = 1.0 - (beta_demo + beta_util) / 2.0;

    // Demographic component: similarity-weighted mean of neighbors'
    // explicit topic rates.
    PerTopic<double> demo;
    demo.fill(0.5);
    if (me != nullptr) {
        PerTopic<double> numerator = {};
        PerTopic<double> denominator = {};
        for (const UserProfile& other : snap.active_users) {
            if (other.user_id == user_id) continue;
            const UserSignals& other_signals = snap.signals_for(other.user_id);
            const double sim =
                0.5 * ((pearson(my_signals, other_signals) + 1.0) / 2.0 +
                       attribute_mean(*me, other));
            PerTopic<double> other_rate;
            PerTopic<int> other_count;
            explicit_rates(other_signals, catalog, other_rate, other_count);
            for (std::size_t t = 0; t < kTopicCount; ++t) {
                if (other_count[t] > 0) {
                    numerator[t] += sim * other_rate[t];
                    denominator[t] += sim;
                }
            }
        }
        for (std::size_t t = 0; t < kTopicCount; ++t) {
            if (denominator[t] > 0.0) demo[t] = numerator[t] / denominator[t];
        }
    }

    // Utility component: vote-count blend of explicit and implicit rates.
    PerTopic<double> my_explicit;
    PerTopic<int> my_explicit_count;
    explicit_rates(my_signals, catalog, my_explicit, my_explicit_count);
    const PerTopic<double> my_implicit = implicit_rates(my_signals);
    PerTopic<double> utility;
    for (std::size_t t = 0; t < kTopicCount; ++t) {
        if (votes == 0) {
            utility[t] = my_implicit[t];
        } else {
            const double e = my_explicit_count[t] > 0 ? my_explicit[t] : 0.5;
            utility[t] = (1.0 - 1.0 / votes) * e + (1.0 / votes) * my_implicit[t];
        }
    }

    // Content component: cosine of the mapped interest vector against each
    // basis vector.
    PerTopic<double> content;
    content.fill(0.2);
    if (me != nullptr) {
        std::vector<double> mapped(kTopicCount);
        double norm = 0.0;
        for (std::size_t t = 0; t < kTopicCount; ++t) {
            mapped[t] = me->interests[t] == 2 ? 1.0 : (me->interests[t] == 1 ? 0.5 : 0.0);
            norm += mapped[t] * mapped[t];
        }
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            for (std::size_t t = 0; t < kTopicCount; ++t) content[t] = mapped[t] / norm;
        }
    }

    PerTopic<double> scores;
    for (std::size_t t = 0; t < kTopicCount; ++t) {
        scores[t] = beta_demo * demo[t] + beta_util * utility[t] + beta_cont * content[t];
    }
    return scores;
}

}  // namespace tailor::sim
