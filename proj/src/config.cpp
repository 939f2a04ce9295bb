#include "tailor/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>

#include "tailor/errors.hpp"

namespace tailor {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

int parse_int(const std::string& key, const std::string& value) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("config key " + key + ": expected an integer, got '" + value + "'");
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double out = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": expected a number, got '" + value + "'");
    }
}

void apply(EngineConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "plan.messages_per_day") {
        cfg.messages_per_day = parse_int(key, value);
        if (cfg.messages_per_day < 1) throw ConfigError("plan.messages_per_day must be >= 1");
    } else if (key == "plan.cohort_cap") {
        cfg.cohort_cap = parse_int(key, value);
        if (cfg.cohort_cap < 1) throw ConfigError("plan.cohort_cap must be >= 1");
    } else if (key == "snapshot.dwell_seconds") {
        cfg.dwell_threshold_seconds = parse_double(key, value);
        if (cfg.dwell_threshold_seconds < 0) throw ConfigError("snapshot.dwell_seconds must be >= 0");
    } else if (key == "ppal.window_days") {
        cfg.ppal_window_days = parse_int(key, value);
        if (cfg.ppal_window_days < 1) throw ConfigError("ppal.window_days must be >= 1");
    } else if (key == "timing.tau_minutes") {
        cfg.timing.tau_minutes = parse_double(key, value);
        if (cfg.timing.tau_minutes <= 0) throw ConfigError("timing.tau_minutes must be > 0");
    } else if (key == "timing.slot_prior") {
        cfg.timing.slot_prior = parse_double(key, value);
        if (cfg.timing.slot_prior < 0) throw ConfigError("timing.slot_prior must be >= 0");
    } else if (key == "timing.max_slots") {
        cfg.timing.max_slots = parse_int(key, value);
        if (cfg.timing.max_slots < 1) throw ConfigError("timing.max_slots must be >= 1");
    } else {
        throw ConfigError("unknown config key: " + key);
    }
}

std::string env_name(std::string key) {
    for (char& c : key) {
        if (c == '.') c = '_';
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return "TAILOR_" + key;
}

}  // namespace

EngineConfig load_engine_config(const std::optional<std::string>& path) {
    EngineConfig cfg;
    if (path) {
        std::ifstream in(*path);
        if (!in) throw ConfigError("cannot open config file: " + *path);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string stripped = trim(line.substr(0, line.find('#')));
            if (stripped.empty()) continue;
            const std::size_t eq = stripped.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(*path + ":" + std::to_string(line_no) +
                                  ": expected 'key = value'");
            }
            apply(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
        }
    }
    for (const char* key :
         {"plan.messages_per_day", "plan.cohort_cap", "snapshot.dwell_seconds",
          "ppal.window_days", "timing.tau_minutes", "timing.slot_prior", "timing.max_slots"}) {
        if (const char* value = std::getenv(env_name(key).c_str())) {
            apply(cfg, key, value);
        }
    }
    return cfg;
}

}  // namespace tailor
