#pragma once

#include <optional>
#include <string>

#include "tailor/timing.hpp"

namespace tailor {

// Tunables shared by the nightly job, the service and the simulator.
struct EngineConfig {
    int messages_per_day = 1;   // plan.messages_per_day
    int cohort_cap = 120;       // plan.cohort_cap
    double dwell_threshold_seconds = 4.0;  // snapshot.dwell_seconds
    int ppal_window_days = 7;   // ppal.window_days
    TimingConfig timing;        // timing.tau_minutes / slot_prior / max_slots
};

// Loads `key = value` lines ('#' comments, blank lines ignored) and then
// applies environment overrides named TAILOR_<KEY> with dots replaced by
// underscores, e.g. TAILOR_TIMING_TAU_MINUTES. Unknown keys or unparsable
// values raise ConfigError.
EngineConfig load_engine_config(const std::optional<std::string>& path);

}  // namespace tailor
