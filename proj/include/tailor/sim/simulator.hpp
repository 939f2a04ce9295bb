#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tailor/sim/scenario.hpp"
#include "tailor/time.hpp"
#include "tailor/topic.hpp"

namespace tailor::sim {

struct DayMetrics {
    int day = 0;
    Date date;
    int deliveries = 0;
    int reads = 0;
    int votes = 0;
    int correct = 0;          // delivered the dominant latent topic and voted like
    int false_positives = 0;  // delivered a topic the persona voted dislike
    double correct_rate = 0.0;
    double false_positive_rate = 0.0;
};

// Per-user timing state sampled at plan time, before the day's deliveries.
struct SlotPoint {
    int day = 0;
    int deliveries_before = 0;
    double receptive_slot_prob = -1.0;  // -1 when the persona has no receptive range
    double max_slot_prob = 0.0;
};

struct UserReport {
    std::string user_id;
    std::vector<SlotPoint> slot_points;
    std::vector<std::pair<int, Topic>> deliveries;  // (day, topic), delivery order
    PerTopic<int> delivered_totals = {};
    // First day from which the cumulative modal delivered topic stays
    // uniquely equal to the dominant latent topic; -1 when that never
    // settles.
    int convergence_day = -1;
};

struct SimReport {
    std::uint64_t seed = 0;
    Date start_date;
    int days = 0;
    std::vector<DayMetrics> daily;
    std::map<std::string, UserReport> users;
};

// Runs the real nightly pipeline day by day against a synthetic cohort:
// personas sign up, receive plans, read/vote/browse per their behavioral
// model, and the engine's learning is scored against their latent
// preferences. Deterministic for a given scenario (seed included).
SimReport simulate(const Scenario& scenario);

// Long-format CSV with columns day,metric,user,value: one row per daily
// cohort metric, per-user slot curves, and final convergence rows at
// day == days. Byte-stable for a given report.
std::string report_to_csv_string(const SimReport& report);
void report_to_csv(const SimReport& report, const std::string& path);

}  // namespace tailor::sim
