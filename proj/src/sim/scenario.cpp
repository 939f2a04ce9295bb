#include "tailor/sim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tailor/errors.hpp"

namespace tailor::sim {

using Json = nlohmann::ordered_json;

bool Persona::receptive_at(int minute_of_day) const {
    for (const auto& [begin, end] : receptive_ranges) {
        if (minute_of_day >= begin && minute_of_day < end) return true;
    }
    return false;
}

std::optional<std::size_t> Persona::dominant_topic() const {
    std::size_t best = 0;
    for (std::size_t t = 1; t < kTopicCount; ++t) {
        if (preference[t] > preference[best]) best = t;
    }
    for (std::size_t t = 0; t < kTopicCount; ++t) {
        if (t != best && preference[t] == preference[best]) return std::nullopt;
    }
    return best;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& field,
                       const std::string& what) {
    throw ConfigError(path + ": " + field + ": " + what);
}

// `key` is the JSON member name; `label` is the dotted path used in
// diagnostics (e.g. "personas[2].age").
double number_field(const Json& j, const std::string& path, const std::string& key,
                    const std::string& label, double fallback, double min, double max) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) fail(path, label, "expected a number");
    const double value = j[key].get<double>();
    if (value < min || value > max) {
        std::ostringstream msg;
        msg << "must be in [" << min << ", " << max << "]";
        fail(path, label, msg.str());
    }
    return value;
}

int int_field(const Json& j, const std::string& path, const std::string& key,
              const std::string& label, int fallback, int min, int max) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) fail(path, label, "expected an integer");
    const int value = j[key].get<int>();
    if (value < min || value > max) {
        fail(path, label,
             "must be in [" + std::to_string(min) + ", " + std::to_string(max) + "]");
    }
    return value;
}

std::string string_field(const Json& j, const std::string& path, const std::string& key,
                         const std::string& label, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) fail(path, label, "expected a string");
    return j[key].get<std::string>();
}

Persona parse_persona(const Json& j, const std::string& path, std::size_t index,
                      Date start_date) {
    const std::string where = "personas[" + std::to_string(index) + "]";
    if (!j.is_object()) fail(path, where, "expected an object");
    auto str = [&](const char* key, const std::string& fallback) {
        return string_field(j, path, key, where + "." + key, fallback);
    };
    auto num = [&](const char* key, double fallback, double min, double max) {
        return number_field(j, path, key, where + "." + key, fallback, min, max);
    };
    auto integer = [&](const char* key, int fallback, int min, int max) {
        return int_field(j, path, key, where + "." + key, fallback, min, max);
    };
    Persona p;
    p.profile.user_id = str("user_id", "persona-" + std::to_string(index + 1));
    p.profile.name = str("name", p.profile.user_id);
    p.profile.gender = str("gender", "unspecified");
    p.profile.employment_status = str("employment_status", "unspecified");
    p.profile.age = integer("age", 40, 18, 100);
    p.profile.fagerstrom = integer("fagerstrom", 5, 0, 10);
    p.profile.richmond = integer("richmond", 5, 0, 10);

    if (j.contains("interests")) {
        const auto& arr = j["interests"];
        if (!arr.is_array() || arr.size() != kTopicCount) {
            fail(path, where + ".interests", "expected 5 Likert levels");
        }
        for (std::size_t t = 0; t < kTopicCount; ++t) {
            if (!arr[t].is_number_integer() || arr[t].get<int>() < 0 || arr[t].get<int>() > 2) {
                fail(path, where + ".interests", "levels must be 0, 1 or 2");
            }
            p.profile.interests[t] = static_cast<std::uint8_t>(arr[t].get<int>());
        }
    } else {
        p.profile.interests = {1, 1, 1, 1, 1};
    }

    if (j.contains("window")) {
        const auto& w = j["window"];
        if (!w.is_object() || !w.contains("start") || !w.contains("end") ||
            !w["start"].is_number_integer() || !w["end"].is_number_integer()) {
            fail(path, where + ".window", "expected {start, end} minutes");
        }
        p.profile.window = TimeWindow{w["start"].get<int>(), w["end"].get<int>()};
        if (!valid_window(p.profile.window)) {
            fail(path, where + ".window", "must satisfy 0 <= start < end <= 1440");
        }
    }

    if (j.contains("preference")) {
        const auto& arr = j["preference"];
        if (!arr.is_array() || arr.size() != kTopicCount) {
            fail(path, where + ".preference", "expected 5 weights");
        }
        double sum = 0.0;
        for (std::size_t t = 0; t < kTopicCount; ++t) {
            if (!arr[t].is_number() || arr[t].get<double>() < 0.0) {
                fail(path, where + ".preference", "weights must be nonnegative numbers");
            }
            p.preference[t] = arr[t].get<double>();
            sum += p.preference[t];
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            fail(path, where + ".preference", "weights must sum to 1");
        }
    }

    if (j.contains("receptive")) {
        const auto& arr = j["receptive"];
        if (!arr.is_array()) fail(path, where + ".receptive", "expected a list of ranges");
        for (const auto& range : arr) {
            if (!range.is_array() || range.size() != 2 || !range[0].is_number_integer() ||
                !range[1].is_number_integer()) {
                fail(path, where + ".receptive", "each range must be [begin, end] minutes");
            }
            const int begin = range[0].get<int>();
            const int end = range[1].get<int>();
            if (begin < 0 || end > kMinutesPerDay || end <= begin) {
                fail(path, where + ".receptive", "ranges must satisfy 0 <= begin < end <= 1440");
            }
            p.receptive_ranges.emplace_back(begin, end);
        }
    }

    p.read_prob_receptive = num("read_prob_receptive", p.read_prob_receptive, 0.0, 1.0);
    p.read_prob_otherwise = num("read_prob_otherwise", p.read_prob_otherwise, 0.0, 1.0);
    p.read_latency_receptive_minutes =
        num("read_latency_receptive_minutes", p.read_latency_receptive_minutes, 0.0, 1e6);
    p.read_latency_otherwise_minutes =
        num("read_latency_otherwise_minutes", p.read_latency_otherwise_minutes, 0.0, 1e6);
    p.vote_honesty = num("vote_honesty", p.vote_honesty, 0.0, 1.0);
    p.dwell_mean_seconds = num("dwell_mean_seconds", p.dwell_mean_seconds, 0.0, 1e6);
    p.section_visits_per_day =
        integer("section_visits_per_day", p.section_visits_per_day, 0, 1000);
    p.signup_day = integer("signup_day", 0, 0, 100000);
    if (j.contains("dropout_day") && !j["dropout_day"].is_null()) {
        p.dropout_day = integer("dropout_day", 0, 0, 100000);
    }
    p.quit_day = integer("quit_day", p.signup_day, 0, 100000);
    if (j.contains("activity") && !j["activity"].is_null()) {
        const auto& act = j["activity"];
        if (!act.is_object()) fail(path, where + ".activity", "expected an object");
        p.activity_base_minutes = number_field(act, path, "base_minutes",
                                               where + ".activity.base_minutes", 60.0, 0.0,
                                               kMinutesPerDay);
        p.activity_jitter_minutes =
            number_field(act, path, "jitter_minutes", where + ".activity.jitter_minutes", 0.0,
                         0.0, kMinutesPerDay);
    }

    p.profile.enrolled_at = start_date + p.signup_day;
    p.profile.quit_date = start_date + p.quit_day;
    if (auto problem = validate_profile(p.profile)) fail(path, where, *problem);
    return p;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text, const std::string& path) {
    Json j = Json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ConfigError(path + ": scenario file is not a JSON object");
    }
    Scenario scenario;
    const std::string start_raw = string_field(j, path, "start_date", "start_date", "2030-01-01");
    auto start = parse_date(start_raw);
    if (!start) fail(path, "start_date", "not a valid YYYY-MM-DD date");
    scenario.start_date = *start;
    scenario.days = int_field(j, path, "days", "days", scenario.days, 1, 100000);
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
            fail(path, "seed", "expected an integer");
        }
        scenario.seed = j["seed"].get<std::uint64_t>();
    }
    scenario.cohort_cap = int_field(j, path, "cohort_cap", "cohort_cap", scenario.cohort_cap, 1, 100000);
    scenario.messages_per_day =
        int_field(j, path, "messages_per_day", "messages_per_day", scenario.messages_per_day, 1, 100);
    scenario.catalog_per_topic =
        int_field(j, path, "catalog_per_topic", "catalog_per_topic", scenario.catalog_per_topic, 1, 10000);
    if (!j.contains("personas") || !j["personas"].is_array()) {
        fail(path, "personas", "expected a list");
    }
    std::size_t index = 0;
    for (const auto& persona_json : j["personas"]) {
        scenario.personas.push_back(
            parse_persona(persona_json, path, index++, scenario.start_date));
    }
    for (std::size_t a = 0; a < scenario.personas.size(); ++a) {
        for (std::size_t b = a + 1; b < scenario.personas.size(); ++b) {
            if (scenario.personas[a].profile.user_id == scenario.personas[b].profile.user_id) {
                fail(path, "personas", "duplicate user_id " +
                                           scenario.personas[a].profile.user_id);
            }
        }
    }
    return scenario;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), path);
}

}  // namespace tailor::sim
