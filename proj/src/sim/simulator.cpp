#include "tailor/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "tailor/catalog.hpp"
#include "tailor/config.hpp"
#include "tailor/errors.hpp"
#include "tailor/events.hpp"
#include "tailor/pipeline.hpp"
#include "tailor/roulette.hpp"
#include "tailor/rng.hpp"
#include "tailor/snapshot.hpp"
#include "tailor/timing.hpp"

namespace tailor::sim {

namespace {

// Behavior draws must never share a stream with the planner's draws.
const std::uint64_t kBehaviorSalt = fnv1a("persona-behavior");

VoteValue truthful_vote(const Persona& persona, Topic topic) {
    const double preference = persona.preference[topic_index(topic)];
    // Thresholds straddle the uniform 1/5 weight: clearly-above reads as
    // an endorsement, clearly-below as a rejection.
    if (preference > 0.25) return VoteValue::kLike;
    if (preference < 0.15) return VoteValue::kDislike;
    return VoteValue::kNeutral;
}

VoteValue random_vote(Rng& rng) {
    switch (uniform_below(rng, 3)) {
        case 0: return VoteValue::kDislike;
        case 1: return VoteValue::kNeutral;
        default: return VoteValue::kLike;
    }
}

int convergence_day_of(const UserReport& report, std::optional<std::size_t> dominant) {
    if (!dominant || report.deliveries.empty()) return -1;
    PerTopic<int> counts = {};
    int last_bad_day = -1;
    bool last_was_bad = false;
    for (const auto& [day, topic] : report.deliveries) {
        ++counts[topic_index(topic)];
        std::size_t modal = 0;
        bool unique = true;
        for (std::size_t t = 1; t < kTopicCount; ++t) {
            if (counts[t] > counts[modal]) {
                modal = t;
                unique = true;
            } else if (counts[t] == counts[modal]) {
                unique = false;
            }
        }
        const bool bad = !unique || modal != *dominant;
        last_was_bad = bad;
        if (bad) last_bad_day = day;
    }
    if (last_was_bad) return -1;
    if (last_bad_day < 0) return report.deliveries.front().first;
    for (const auto& [day, topic] : report.deliveries) {
        if (day > last_bad_day) return day;
    }
    return -1;
}

}  // namespace

SimReport simulate(const Scenario& scenario) {
    const MessageCatalog catalog = generate_catalog(scenario.catalog_per_topic);
    EngineConfig config;
    config.messages_per_day = scenario.messages_per_day;
    config.cohort_cap = scenario.cohort_cap;
    SnapshotConfig snap_config;
    snap_config.catalog = &catalog;
    snap_config.cohort_cap = config.cohort_cap;
    snap_config.dwell_threshold_seconds = config.dwell_threshold_seconds;

    std::map<std::string, const Persona*> persona_by_id;
    for (const Persona& p : scenario.personas) persona_by_id.emplace(p.profile.user_id, &p);

    SimReport report;
    report.seed = scenario.seed;
    report.start_date = scenario.start_date;
    report.days = scenario.days;
    for (const Persona& p : scenario.personas) {
        report.users.emplace(p.profile.user_id, UserReport{p.profile.user_id, {}, {}, {}, -1});
    }

    // Nobody to simulate: an empty report, not a grid of zero rows.
    if (scenario.personas.empty()) return report;

    std::vector<EventRecord> log;
    std::uint64_t next_seq = 1;
    auto append = [&](const std::string& user_id, Timestamp at, EventKind kind) {
        log.push_back(EventRecord{next_seq++, user_id, at, std::move(kind)});
    };

    for (int day = 0; day < scenario.days; ++day) {
        const Date date = scenario.start_date + day;
        const Timestamp day_start = midnight(date);

        // Enrollment churn first thing in the morning; both become visible
        // to the next night's snapshot.
        for (const Persona& p : scenario.personas) {
            if (p.dropout_day && *p.dropout_day == day) {
                UserProfile dropped = p.profile;
                dropped.dropped_out_at = date;
                append(p.profile.user_id, day_start + 7 * 3600,
                       ProfileUpdateEvent{std::move(dropped)});
            }
            if (p.signup_day == day) {
                append(p.profile.user_id, day_start + 8 * 3600, ProfileUpdateEvent{p.profile});
            }
        }

        // Plan-time snapshot, shared by the slot curves and the metrics.
        const CohortSnapshot snap = build_snapshot(log, date, snap_config).snapshot;
        for (const UserProfile* user : eligible_users(snap, date)) {
            const Persona* persona = persona_by_id.at(user->user_id);
            UserReport& user_report = report.users.at(user->user_id);
            const auto history = snap.deliveries_for(user->user_id);
            const SlotModel slots = slot_partition(user->window, config.timing.max_slots);
            const std::vector<double> weights = slot_scores(history, slots, config.timing);
            double total = 0.0;
            for (double w : weights) total += w;
            SlotPoint point;
            point.day = day;
            point.deliveries_before = static_cast<int>(history.size());
            point.max_slot_prob = *std::max_element(weights.begin(), weights.end()) / total;
            if (!persona->receptive_ranges.empty()) {
                const auto [begin, end] = persona->receptive_ranges.front();
                if (auto slot = slots.slot_for_minute((begin + end) / 2)) {
                    point.receptive_slot_prob = weights[static_cast<std::size_t>(*slot)] / total;
                }
            }
            user_report.slot_points.push_back(point);
        }

        const NightlyPlan plan =
            run_nightly(log, catalog, date, scenario.seed, config, /*force=*/false);
        {
            auto deliveries = delivery_events(plan, next_seq);
            next_seq += deliveries.size();
            for (auto& rec : deliveries) log.push_back(std::move(rec));
        }

        DayMetrics metrics;
        metrics.day = day;
        metrics.date = date;
        metrics.deliveries = static_cast<int>(plan.entries.size());

        // Persona reactions: reads flow back as receipts through the
        // outcome op, and every read message gets voted.
        std::map<std::string, Rng> day_rng;
        auto rng_for = [&](const std::string& user_id) -> Rng& {
            auto it = day_rng.find(user_id);
            if (it == day_rng.end()) {
                it = day_rng
                         .emplace(user_id, Rng(derive_seed(scenario.seed ^ kBehaviorSalt,
                                                           user_id, date.epoch_days)))
                         .first;
            }
            return it->second;
        };

        std::vector<ReadReceipt> receipts;
        struct PendingVote {
            std::string user_id;
            std::string message_id;
            Timestamp at;
            VoteValue value;
            Topic topic;
        };
        std::vector<PendingVote> pending_votes;

        for (const PlanEntry& entry : plan.entries) {
            const Persona* persona = persona_by_id.at(entry.user_id);
            UserReport& user_report = report.users.at(entry.user_id);
            user_report.deliveries.emplace_back(day, entry.topic);
            ++user_report.delivered_totals[topic_index(entry.topic)];

            Rng& rng = rng_for(entry.user_id);
            const int send_minute = minute_of_day(entry.send_at);
            const bool receptive = persona->receptive_at(send_minute);
            const double read_prob =
                receptive ? persona->read_prob_receptive : persona->read_prob_otherwise;
            if (uniform_double(rng) >= read_prob) continue;
            const double latency_minutes = receptive ? persona->read_latency_receptive_minutes
                                                     : persona->read_latency_otherwise_minutes;
            const Timestamp read_at =
                entry.send_at + static_cast<std::int64_t>(std::llround(latency_minutes * 60.0));
            receipts.push_back({entry.user_id, entry.message_id, read_at});
            ++metrics.reads;

            const bool honest = uniform_double(rng) < persona->vote_honesty;
            const VoteValue vote = honest ? truthful_vote(*persona, entry.topic)
                                          : random_vote(rng);
            pending_votes.push_back(
                {entry.user_id, entry.message_id, read_at + 60, vote, entry.topic});

            const auto dominant = persona->dominant_topic();
            if (vote == VoteValue::kLike && dominant &&
                *dominant == topic_index(entry.topic)) {
                ++metrics.correct;
            }
            if (vote == VoteValue::kDislike) ++metrics.false_positives;
        }

        {
            OutcomeEvents outcomes = record_delivery_outcomes(plan, receipts, next_seq);
            if (!outcomes.rejected.empty()) {
                throw DomainError("simulate: generated receipt rejected: " +
                                  outcomes.rejected.front().reason);
            }
            next_seq += outcomes.events.size();
            for (auto& rec : outcomes.events) log.push_back(std::move(rec));
        }
        for (const PendingVote& vote : pending_votes) {
            append(vote.user_id, vote.at, VoteEvent{vote.message_id, vote.value});
            ++metrics.votes;
        }

        // Browsing and wearable signals for every enrolled persona.
        for (const Persona& p : scenario.personas) {
            if (p.signup_day > day) continue;
            if (p.dropout_day && *p.dropout_day <= day) continue;
            Rng& rng = rng_for(p.profile.user_id);
            for (int visit = 0; visit < p.section_visits_per_day; ++visit) {
                const std::size_t topic = roulette_index(p.preference, rng);
                const double dwell =
                    p.dwell_mean_seconds <= 0.0
                        ? 0.0
                        : -p.dwell_mean_seconds * std::log(1.0 - uniform_double(rng));
                append(p.profile.user_id, day_start + 19 * 3600 + visit * 120,
                       SectionAccessEvent{kAllTopics[topic], dwell});
            }
            if (p.activity_base_minutes) {
                double minutes = *p.activity_base_minutes;
                if (p.activity_jitter_minutes > 0.0) {
                    minutes += (2.0 * uniform_double(rng) - 1.0) * p.activity_jitter_minutes;
                }
                minutes = std::max(0.0, minutes);
                append(p.profile.user_id, day_start + 23 * 3600 + 1800,
                       ActivitySampleEvent{minutes, date});
            }
        }

        if (metrics.deliveries > 0) {
            metrics.correct_rate =
                static_cast<double>(metrics.correct) / metrics.deliveries;
            metrics.false_positive_rate =
                static_cast<double>(metrics.false_positives) / metrics.deliveries;
        }
        report.daily.push_back(metrics);
    }

    for (auto& [user_id, user_report] : report.users) {
        user_report.convergence_day =
            convergence_day_of(user_report, persona_by_id.at(user_id)->dominant_topic());
    }
    return report;
}

namespace {

std::string format_value(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

}  // namespace

std::string report_to_csv_string(const SimReport& report) {
    std::string out = "day,metric,user,value\n";
    auto row = [&out](int day, const std::string& metric, const std::string& user,
                      const std::string& value) {
        out += std::to_string(day);
        out += ',';
        out += metric;
        out += ',';
        out += user;
        out += ',';
        out += value;
        out += '\n';
    };
    for (const DayMetrics& m : report.daily) {
        row(m.day, "correct_rate", "", format_value(m.correct_rate));
        row(m.day, "deliveries", "", std::to_string(m.deliveries));
        row(m.day, "false_positive_rate", "", format_value(m.false_positive_rate));
        row(m.day, "reads", "", std::to_string(m.reads));
        row(m.day, "votes", "", std::to_string(m.votes));
        for (const auto& [user_id, user_report] : report.users) {
            for (const SlotPoint& point : user_report.slot_points) {
                if (point.day != m.day) continue;
                row(m.day, "deliveries_before", user_id, std::to_string(point.deliveries_before));
                row(m.day, "max_slot_prob", user_id, format_value(point.max_slot_prob));
                if (point.receptive_slot_prob >= 0.0) {
                    row(m.day, "receptive_slot_prob", user_id,
                        format_value(point.receptive_slot_prob));
                }
            }
        }
    }
    for (const auto& [user_id, user_report] : report.users) {
        row(report.days, "convergence_day", user_id,
            std::to_string(user_report.convergence_day));
    }
    return out;
}

void report_to_csv(const SimReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write report: " + path);
    out << report_to_csv_string(report);
    out.flush();
    if (!out) throw IoError("failed writing report: " + path);
}

}  // namespace tailor::sim
