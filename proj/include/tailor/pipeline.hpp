#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tailor/catalog.hpp"
#include "tailor/config.hpp"
#include "tailor/events.hpp"
#include "tailor/snapshot.hpp"

namespace tailor {

struct PlanEntry {
    std::string user_id;
    std::string message_id;
    Topic topic = Topic::kGeneralMotivation;
    Timestamp send_at;
    int slot_index = 0;
    Date plan_date;
    // Set when a templated activity-comparison message had to be swapped
    // for a plain one because the user has no activity data for the prior
    // day.
    bool fallback = false;
};

struct NightlyPlan {
    Date plan_date;
    std::uint64_t master_seed = 0;
    std::vector<PlanEntry> entries;  // sorted by user_id, draw order within a user
    std::map<std::string, std::uint64_t> user_seeds;
};

// Active users whose quit date has arrived (the quit day itself counts).
std::vector<const UserProfile*> eligible_users(const CohortSnapshot& snap, Date plan_date);

// The nightly batch: snapshot the log as of the plan date, then per
// eligible user draw a topic from the hybrid scores, a fresh message from
// its pool, a slot from the latency-utility scores and a minute within the
// slot. A pure function of (log prefix, plan date, master seed, config):
// per-user generators are seeded from those three alone, so no user's
// draws can disturb another's.
//
// Throws DomainError when the date already has deliveries in the log
// (unless force) and when any catalog pool is empty.
NightlyPlan run_nightly(std::span<const EventRecord> log, const MessageCatalog& catalog,
                        Date plan_date, std::uint64_t master_seed, const EngineConfig& config,
                        bool force = false);

// Delivery events for a committed plan, stamped with the planned send
// instants and numbered from first_seq.
std::vector<EventRecord> delivery_events(const NightlyPlan& plan, std::uint64_t first_seq);

bool log_has_deliveries_for(std::span<const EventRecord> log, Date plan_date);

struct ReadReceipt {
    std::string user_id;
    std::string message_id;
    Timestamp read_at;
};

struct RejectedReceipt {
    std::size_t index = 0;  // position in the receipts span
    std::string reason;
};

struct OutcomeEvents {
    std::vector<EventRecord> events;  // message_read appends, numbered from first_seq
    std::vector<RejectedReceipt> rejected;
};

// Closes the loop on a plan: each receipt that matches a plan entry not
// yet receipted (first one wins) becomes a message_read append; the rest
// are rejected individually and the batch continues.
OutcomeEvents record_delivery_outcomes(const NightlyPlan& plan,
                                       std::span<const ReadReceipt> receipts,
                                       std::uint64_t first_seq);

// Plan file: one JSONL entry per delivery,
// {user_id, message_id, topic, send_at, slot_index, plan_date} plus
// "fallback": true on substituted entries.
void write_plan(const std::string& path, const NightlyPlan& plan);
NightlyPlan read_plan(const std::string& path);
std::string plan_to_jsonl(const NightlyPlan& plan);

}  // namespace tailor
