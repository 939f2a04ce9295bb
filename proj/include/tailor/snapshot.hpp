#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tailor/catalog.hpp"
#include "tailor/events.hpp"
#include "tailor/time.hpp"
#include "tailor/topic.hpp"
#include "tailor/types.hpp"

namespace tailor {

struct DeliveryRecord {
    std::string user_id;
    std::string message_id;
    Topic topic = Topic::kGeneralMotivation;
    Date plan_date;
    Timestamp sent_at;
    std::optional<Timestamp> read_at;  // earliest read at or after sent_at
    int slot_index = 0;
};

// Raw per-user aggregates replayed from the log. These are the primitives
// every derived rate is computed from; the oracle recomputes straight from
// here.
struct UserSignals {
    std::map<std::string, VoteValue> latest_votes;  // re-votes override
    PerTopic<std::uint32_t> section_accesses = {};  // dwell-qualified only
    PerTopic<std::uint32_t> message_reads = {};
    std::map<Date, double> activity_minutes;  // day -> latest reported total
};

struct UserStats {
    int n_neighbors = 0;  // other active users in the capped cohort
    int n_ratings = 0;    // distinct messages voted on; re-votes do not add
    PerTopic<std::optional<double>> explicit_rate;  // absent without votes on the topic
    PerTopic<double> implicit_rate = {};
    std::map<std::string, double> rating_scores;  // message -> vote score
};

struct RejectedRecord {
    std::uint64_t seq = 0;
    std::string reason;
};

struct SnapshotConfig {
    const MessageCatalog* catalog = nullptr;
    int cohort_cap = 120;
    double dwell_threshold_seconds = 4.0;
};

// Immutable nightly view of the cohort, derived from the log prefix with
// timestamps strictly before midnight of as_of. Rebuilding from the same
// prefix yields an identical snapshot.
struct CohortSnapshot {
    Date as_of;
    Timestamp cutoff;

    // Active, validated, capped; sorted by user_id.
    std::vector<UserProfile> active_users;
    std::set<std::string> active_ids;

    // Every user ever registered, dropped-out and over-cap ones included;
    // their historical ratings stay available.
    std::map<std::string, UserProfile> profiles;
    std::map<std::string, UserSignals> signals;
    std::map<std::string, UserStats> stats;
    std::map<std::string, std::vector<DeliveryRecord>> deliveries;

    bool is_active(const std::string& user_id) const { return active_ids.contains(user_id); }
    const UserProfile* find_profile(const std::string& user_id) const;
    const UserSignals& signals_for(const std::string& user_id) const;
    const UserStats& stats_for(const std::string& user_id) const;
    std::span<const DeliveryRecord> deliveries_for(const std::string& user_id) const;
};

struct SnapshotBuild {
    CohortSnapshot snapshot;
    std::vector<RejectedRecord> rejects;
};

// Replays the log prefix below the as_of cutoff. Malformed records are
// rejected individually with their seq number; a non-increasing seq is a
// caller bug and throws.
SnapshotBuild build_snapshot(std::span<const EventRecord> log, Date as_of,
                             const SnapshotConfig& config);

}  // namespace tailor
