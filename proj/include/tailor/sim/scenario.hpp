#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tailor/time.hpp"
#include "tailor/topic.hpp"
#include "tailor/types.hpp"

namespace tailor::sim {

// A synthetic participant: a ground-truth preference the engine is judged
// against, plus a behavioral model that turns deliveries into reads,
// votes, section visits and activity samples.
struct Persona {
    UserProfile profile;           // declared attributes, interests, window
    PerTopic<double> preference = {0.2, 0.2, 0.2, 0.2, 0.2};  // latent, simplex
    std::vector<std::pair<int, int>> receptive_ranges;  // minute-of-day [begin, end)
    double read_prob_receptive = 0.9;
    double read_prob_otherwise = 0.2;
    double read_latency_receptive_minutes = 0.0;
    double read_latency_otherwise_minutes = 120.0;
    double vote_honesty = 1.0;  // probability a vote reflects the latent preference
    double dwell_mean_seconds = 8.0;  // exponential dwell draw per section visit
    int section_visits_per_day = 1;
    int signup_day = 0;                  // day offset from scenario start
    std::optional<int> dropout_day;      // day offset; absent = stays enrolled
    int quit_day = 0;                    // day offset; eligibility starts here
    std::optional<double> activity_base_minutes;  // absent = no activity samples
    double activity_jitter_minutes = 0.0;

    bool receptive_at(int minute_of_day) const;
    // Index of the dominant latent topic, or nullopt on a tie.
    std::optional<std::size_t> dominant_topic() const;
};

struct Scenario {
    Date start_date = make_date(2030, 1, 1);
    int days = 30;
    std::uint64_t seed = 0;
    int cohort_cap = 120;
    int messages_per_day = 1;
    int catalog_per_topic = 20;  // generated fixture catalog size
    std::vector<Persona> personas;
};

// Parses the declarative scenario JSON; throws ConfigError naming the
// offending field. `path` is used in diagnostics only.
Scenario parse_scenario(const std::string& json_text, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace tailor::sim
