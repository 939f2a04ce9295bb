#include "tailor/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>

#include <json.hpp>

#include "tailor/activity.hpp"
#include "tailor/errors.hpp"
#include "tailor/hybrid.hpp"
#include "tailor/roulette.hpp"
#include "tailor/timing.hpp"

namespace tailor {

using Json = nlohmann::ordered_json;

std::vector<const UserProfile*> eligible_users(const CohortSnapshot& snap, Date plan_date) {
    std::vector<const UserProfile*> out;
    for (const UserProfile& user : snap.active_users) {
        if (user.quit_date <= plan_date) out.push_back(&user);
    }
    return out;
}

bool log_has_deliveries_for(std::span<const EventRecord> log, Date plan_date) {
    for (const EventRecord& rec : log) {
        if (const auto* delivered = std::get_if<MessageDeliveredEvent>(&rec.kind)) {
            if (delivered->plan_date == plan_date) return true;
        }
    }
    return false;
}

namespace {

// A templated activity-comparison message is only deliverable when the
// prior day has a sample to compare against; otherwise swap in the least-
// delivered plain message of the same pool.
const Message* ppal_fallback(const MessageCatalog& catalog,
                             const std::map<std::string, int>& delivered, Rng& rng) {
    const std::vector<Message>& pool = catalog.pool(Topic::kPpal);
    std::vector<const Message*> plain;
    for (const Message& m : pool) {
        if (!m.has_delta_placeholder()) plain.push_back(&m);
    }
    if (plain.empty()) return nullptr;
    int min_count = std::numeric_limits<int>::max();
    for (const Message* m : plain) {
        auto it = delivered.find(m->id);
        min_count = std::min(min_count, it == delivered.end() ? 0 : it->second);
    }
    std::vector<const Message*> eligible;
    for (const Message* m : plain) {
        auto it = delivered.find(m->id);
        if ((it == delivered.end() ? 0 : it->second) == min_count) eligible.push_back(m);
    }
    return eligible[uniform_below(rng, eligible.size())];
}

}  // namespace

NightlyPlan run_nightly(std::span<const EventRecord> log, const MessageCatalog& catalog,
                        Date plan_date, std::uint64_t master_seed, const EngineConfig& config,
                        bool force) {
    if (!force && log_has_deliveries_for(log, plan_date)) {
        throw DomainError("plan date " + format_date(plan_date) +
                          " already has deliveries in the log (use force to replan)");
    }
    if (catalog.size() == 0 || catalog.any_pool_empty()) {
        throw DomainError("message catalog has an empty pool; seed all five topics first");
    }

    SnapshotConfig snap_config;
    snap_config.catalog = &catalog;
    snap_config.cohort_cap = config.cohort_cap;
    snap_config.dwell_threshold_seconds = config.dwell_threshold_seconds;
    const CohortSnapshot snap = build_snapshot(log, plan_date, snap_config).snapshot;

    NightlyPlan plan;
    plan.plan_date = plan_date;
    plan.master_seed = master_seed;

    for (const UserProfile* user : eligible_users(snap, plan_date)) {
        const std::uint64_t seed =
            derive_seed(master_seed, user->user_id, plan_date.epoch_days);
        plan.user_seeds.emplace(user->user_id, seed);
        Rng rng(seed);

        const TopicDistribution topic_scores = hybrid_scores(user->user_id, snap);
        const auto history = snap.deliveries_for(user->user_id);
        std::map<std::string, int> counts = delivered_counts(history);
        const SlotModel slots = slot_partition(user->window, config.timing.max_slots);
        const std::vector<double> slot_weights = slot_scores(history, slots, config.timing);
        const bool has_prior_day_activity =
            activity_stats(snap.signals_for(user->user_id).activity_minutes, user->user_id,
                           plan_date - 1, config.ppal_window_days)
                .has_value();

        for (int k = 0; k < config.messages_per_day; ++k) {
            PlanEntry entry;
            entry.user_id = user->user_id;
            entry.plan_date = plan_date;
            entry.topic = kAllTopics[roulette_index(topic_scores, rng)];
            const Message* message = &pick_message(entry.topic, catalog, counts, rng);
            if (message->topic == Topic::kPpal && message->has_delta_placeholder() &&
                !has_prior_day_activity) {
                const Message* plain = ppal_fallback(catalog, counts, rng);
                if (plain == nullptr) {
                    throw DomainError(
                        "ppal pool has no plain message to fall back to for user " +
                        user->user_id);
                }
                message = plain;
                entry.fallback = true;
            }
            entry.message_id = message->id;
            ++counts[message->id];
            const int slot = static_cast<int>(roulette_index(slot_weights, rng));
            entry.slot_index = slot;
            const int minute = choose_send_minute(slots.interval(slot), rng);
            entry.send_at = midnight(plan_date) + static_cast<std::int64_t>(minute) * 60;
            plan.entries.push_back(std::move(entry));
        }
    }
    return plan;
}

std::vector<EventRecord> delivery_events(const NightlyPlan& plan, std::uint64_t first_seq) {
    std::vector<EventRecord> events;
    events.reserve(plan.entries.size());
    std::uint64_t seq = first_seq;
    for (const PlanEntry& entry : plan.entries) {
        EventRecord rec;
        rec.seq = seq++;
        rec.user_id = entry.user_id;
        rec.at = entry.send_at;
        rec.kind = MessageDeliveredEvent{entry.message_id, entry.topic, entry.plan_date,
                                         entry.slot_index};
        events.push_back(std::move(rec));
    }
    return events;
}

OutcomeEvents record_delivery_outcomes(const NightlyPlan& plan,
                                       std::span<const ReadReceipt> receipts,
                                       std::uint64_t first_seq) {
    OutcomeEvents out;
    std::set<std::size_t> receipted_entries;
    std::uint64_t seq = first_seq;
    for (std::size_t i = 0; i < receipts.size(); ++i) {
        const ReadReceipt& receipt = receipts[i];
        std::optional<std::size_t> match;
        for (std::size_t e = 0; e < plan.entries.size(); ++e) {
            const PlanEntry& entry = plan.entries[e];
            if (entry.user_id != receipt.user_id || entry.message_id != receipt.message_id) {
                continue;
            }
            if (receipt.read_at < entry.send_at) continue;
            if (receipted_entries.contains(e)) continue;
            match = e;
            break;
        }
        if (!match) {
            const bool known = std::any_of(
                plan.entries.begin(), plan.entries.end(), [&](const PlanEntry& entry) {
                    return entry.user_id == receipt.user_id &&
                           entry.message_id == receipt.message_id;
                });
            out.rejected.push_back(
                {i, known ? "duplicate or premature receipt (first read wins)"
                          : "receipt matches no delivery in this plan"});
            continue;
        }
        receipted_entries.insert(*match);
        EventRecord rec;
        rec.seq = seq++;
        rec.user_id = receipt.user_id;
        rec.at = receipt.read_at;
        rec.kind = MessageReadEvent{receipt.message_id};
        out.events.push_back(std::move(rec));
    }
    return out;
}

namespace {

Json entry_to_json(const PlanEntry& entry) {
    Json j{{"user_id", entry.user_id},
           {"message_id", entry.message_id},
           {"topic", topic_name(entry.topic)},
           {"send_at", format_timestamp(entry.send_at)},
           {"slot_index", entry.slot_index},
           {"plan_date", format_date(entry.plan_date)}};
    if (entry.fallback) j["fallback"] = true;
    return j;
}

PlanEntry entry_from_json(const Json& j, const std::string& where) {
    if (!j.is_object()) throw IoError(where + ": plan entry is not an object");
    for (const char* key : {"user_id", "message_id", "topic", "send_at", "plan_date"}) {
        if (!j.contains(key) || !j[key].is_string()) {
            throw IoError(where + ": plan entry missing string field " + key);
        }
    }
    if (!j.contains("slot_index") || !j["slot_index"].is_number_integer()) {
        throw IoError(where + ": plan entry missing integer slot_index");
    }
    PlanEntry entry;
    entry.user_id = j["user_id"].get<std::string>();
    entry.message_id = j["message_id"].get<std::string>();
    auto topic = parse_topic(j["topic"].get<std::string>());
    if (!topic) throw IoError(where + ": unknown topic " + j["topic"].get<std::string>());
    entry.topic = *topic;
    auto send_at = parse_timestamp(j["send_at"].get<std::string>());
    if (!send_at) throw IoError(where + ": invalid send_at timestamp");
    entry.send_at = *send_at;
    entry.slot_index = j["slot_index"].get<int>();
    auto plan_date = parse_date(j["plan_date"].get<std::string>());
    if (!plan_date) throw IoError(where + ": invalid plan_date");
    entry.plan_date = *plan_date;
    entry.fallback = j.value("fallback", false);
    return entry;
}

}  // namespace

std::string plan_to_jsonl(const NightlyPlan& plan) {
    std::string out;
    for (const PlanEntry& entry : plan.entries) {
        out += entry_to_json(entry).dump();
        out += '\n';
    }
    return out;
}

void write_plan(const std::string& path, const NightlyPlan& plan) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write plan file: " + path);
    out << plan_to_jsonl(plan);
    out.flush();
    if (!out) throw IoError("failed writing plan file: " + path);
}

NightlyPlan read_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open plan file: " + path);
    NightlyPlan plan;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(line_no);
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded()) throw IoError(where + ": invalid JSON");
        plan.entries.push_back(entry_from_json(j, where));
    }
    if (!plan.entries.empty()) plan.plan_date = plan.entries.front().plan_date;
    return plan;
}

}  // namespace tailor
