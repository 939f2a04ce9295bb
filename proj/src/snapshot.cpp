#include "tailor/snapshot.hpp"

#include <algorithm>

#include "tailor/errors.hpp"

namespace tailor {

namespace {

const UserSignals kEmptySignals;
const UserStats kEmptyStats;

PerTopic<double> implicit_rates(const UserSignals& sig) {
    std::uint64_t total_accesses = 0;
    std::uint64_t total_reads = 0;
    for (std::size_t t = 0; t < kTopicCount; ++t) {
        total_accesses += sig.section_accesses[t];
        total_reads += sig.message_reads[t];
    }
    constexpr double kUniform = 1.0 / static_cast<double>(kTopicCount);
    PerTopic<double> rates;
    for (std::size_t t = 0; t < kTopicCount; ++t) {
        const double access_share =
            total_accesses > 0
                ? static_cast<double>(sig.section_accesses[t]) / static_cast<double>(total_accesses)
                : kUniform;
        const double read_share =
            total_reads > 0
                ? static_cast<double>(sig.message_reads[t]) / static_cast<double>(total_reads)
                : kUniform;
        rates[t] = (access_share + read_share) / 2.0;
    }
    return rates;
}

}  // namespace

const UserProfile* CohortSnapshot::find_profile(const std::string& user_id) const {
    auto it = profiles.find(user_id);
    return it == profiles.end() ? nullptr : &it->second;
}

const UserSignals& CohortSnapshot::signals_for(const std::string& user_id) const {
    auto it = signals.find(user_id);
    return it == signals.end() ? kEmptySignals : it->second;
}

const UserStats& CohortSnapshot::stats_for(const std::string& user_id) const {
    auto it = stats.find(user_id);
    return it == stats.end() ? kEmptyStats : it->second;
}

std::span<const DeliveryRecord> CohortSnapshot::deliveries_for(const std::string& user_id) const {
    auto it = deliveries.find(user_id);
    if (it == deliveries.end()) return {};
    return it->second;
}

SnapshotBuild build_snapshot(std::span<const EventRecord> log, Date as_of,
                             const SnapshotConfig& config) {
    if (config.catalog == nullptr) {
        throw DomainError("build_snapshot: a message catalog is required");
    }
    SnapshotBuild out;
    CohortSnapshot& snap = out.snapshot;
    snap.as_of = as_of;
    snap.cutoff = midnight(as_of);

    std::uint64_t last_seq = 0;
    bool first = true;
    for (const EventRecord& rec : log) {
        if (!first && rec.seq <= last_seq) {
            throw DomainError("build_snapshot: seq " + std::to_string(rec.seq) +
                              " not strictly increasing");
        }
        first = false;
        last_seq = rec.seq;
        if (rec.at >= snap.cutoff) continue;

        auto reject = [&](std::string reason) {
            out.rejects.push_back({rec.seq, std::move(reason)});
        };

        if (const auto* update = std::get_if<ProfileUpdateEvent>(&rec.kind)) {
            if (update->profile.user_id != rec.user_id) {
                reject("profile user_id does not match record user_id");
                continue;
            }
            if (auto problem = validate_profile(update->profile)) {
                reject("invalid profile: " + *problem);
                continue;
            }
            snap.profiles[rec.user_id] = update->profile;
            continue;
        }

        auto profile_it = snap.profiles.find(rec.user_id);
        if (profile_it == snap.profiles.end()) {
            reject("event for unknown user " + rec.user_id);
            continue;
        }
        UserSignals& sig = snap.signals[rec.user_id];

        if (const auto* interests = std::get_if<InterestsUpdateEvent>(&rec.kind)) {
            profile_it->second.interests = interests->interests;
        } else if (const auto* vote = std::get_if<VoteEvent>(&rec.kind)) {
            if (config.catalog->find(vote->message_id) == nullptr) {
                reject("vote references unknown message " + vote->message_id);
                continue;
            }
            sig.latest_votes[vote->message_id] = vote->value;
        } else if (const auto* access = std::get_if<SectionAccessEvent>(&rec.kind)) {
            if (access->dwell_seconds < 0.0) {
                reject("negative dwell");
                continue;
            }
            // Sub-threshold visits stay in the log but never reach the
            // implicit counters.
            if (access->dwell_seconds >= config.dwell_threshold_seconds) {
                ++sig.section_accesses[topic_index(access->topic)];
            }
        } else if (const auto* read = std::get_if<MessageReadEvent>(&rec.kind)) {
            const Message* msg = config.catalog->find(read->message_id);
            if (msg == nullptr) {
                reject("read references unknown message " + read->message_id);
                continue;
            }
            ++sig.message_reads[topic_index(msg->topic)];
            // First read at or after the send closes the delivery.
            auto deliveries_it = snap.deliveries.find(rec.user_id);
            if (deliveries_it != snap.deliveries.end()) {
                DeliveryRecord* open_delivery = nullptr;
                for (DeliveryRecord& d : deliveries_it->second) {
                    if (d.message_id == read->message_id && !d.read_at && d.sent_at <= rec.at) {
                        if (open_delivery == nullptr || d.sent_at > open_delivery->sent_at) {
                            open_delivery = &d;
                        }
                    }
                }
                if (open_delivery != nullptr) open_delivery->read_at = rec.at;
            }
        } else if (const auto* sample = std::get_if<ActivitySampleEvent>(&rec.kind)) {
            if (sample->active_minutes < 0.0) {
                reject("negative active_minutes");
                continue;
            }
            sig.activity_minutes[sample->day] = sample->active_minutes;
        } else if (const auto* delivered = std::get_if<MessageDeliveredEvent>(&rec.kind)) {
            const Message* msg = config.catalog->find(delivered->message_id);
            if (msg == nullptr) {
                reject("delivery references unknown message " + delivered->message_id);
                continue;
            }
            snap.deliveries[rec.user_id].push_back(DeliveryRecord{
                rec.user_id, delivered->message_id, delivered->topic, delivered->plan_date,
                rec.at, std::nullopt, delivered->slot_index});
        }
    }

    // Active cohort: not dropped out, admitted in enrollment order up to
    // the cap, then kept sorted by user_id.
    std::vector<const UserProfile*> candidates;
    for (const auto& [id, profile] : snap.profiles) {
        if (profile.active()) candidates.push_back(&profile);
    }
    std::sort(candidates.begin(), candidates.end(), [](const UserProfile* a, const UserProfile* b) {
        if (a->enrolled_at != b->enrolled_at) return a->enrolled_at < b->enrolled_at;
        return a->user_id < b->user_id;
    });
    if (config.cohort_cap >= 0 && candidates.size() > static_cast<std::size_t>(config.cohort_cap)) {
        candidates.resize(static_cast<std::size_t>(config.cohort_cap));
    }
    for (const UserProfile* p : candidates) {
        snap.active_users.push_back(*p);
        snap.active_ids.insert(p->user_id);
    }
    std::sort(snap.active_users.begin(), snap.active_users.end(),
              [](const UserProfile& a, const UserProfile& b) { return a.user_id < b.user_id; });

    const int active_count = static_cast<int>(snap.active_users.size());
    for (const auto& [id, profile] : snap.profiles) {
        const UserSignals& sig = snap.signals_for(id);
        UserStats stats;
        stats.n_neighbors = active_count - (snap.is_active(id) ? 1 : 0);
        stats.n_ratings = static_cast<int>(sig.latest_votes.size());
        PerTopic<double> sums = {};
        PerTopic<int> counts = {};
        for (const auto& [message_id, value] : sig.latest_votes) {
            const Message* msg = config.catalog->find(message_id);
            const double score = vote_value_to_score(value);
            stats.rating_scores.emplace(message_id, score);
            sums[topic_index(msg->topic)] += score;
            ++counts[topic_index(msg->topic)];
        }
        for (std::size_t t = 0; t < kTopicCount; ++t) {
            if (counts[t] > 0) stats.explicit_rate[t] = sums[t] / counts[t];
        }
        stats.implicit_rate = implicit_rates(sig);
        snap.stats.emplace(id, std::move(stats));
    }
    return out;
}

}  // namespace tailor
