#include "tailor/events.hpp"

#include <fstream>

#include <json.hpp>

#include "tailor/errors.hpp"

namespace tailor {

using Json = nlohmann::ordered_json;

namespace {

Json window_to_json(const TimeWindow& w) {
    return Json{{"start", w.start_minute}, {"end", w.end_minute}};
}

std::optional<TimeWindow> window_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("start") || !j.contains("end") ||
        !j["start"].is_number_integer() || !j["end"].is_number_integer()) {
        return std::nullopt;
    }
    TimeWindow w{j["start"].get<int>(), j["end"].get<int>()};
    if (!valid_window(w)) return std::nullopt;
    return w;
}

Json profile_to_json_obj(const UserProfile& p) {
    Json j{{"user_id", p.user_id},
           {"name", p.name},
           {"gender", p.gender},
           {"employment_status", p.employment_status},
           {"age", p.age},
           {"quit_date", format_date(p.quit_date)},
           {"fagerstrom", p.fagerstrom},
           {"richmond", p.richmond},
           {"interests", p.interests},
           {"window", window_to_json(p.window)},
           {"enrolled_at", format_date(p.enrolled_at)}};
    if (p.dropped_out_at) j["dropped_out_at"] = format_date(*p.dropped_out_at);
    return j;
}

std::optional<Likert3> interests_from_json(const Json& j, std::string* error) {
    if (!j.is_array() || j.size() != kTopicCount) {
        if (error) *error = "interests must be an array of 5 levels";
        return std::nullopt;
    }
    Likert3 out{};
    for (std::size_t i = 0; i < kTopicCount; ++i) {
        if (!j[i].is_number_integer() || j[i].get<int>() < 0 || j[i].get<int>() > 2) {
            if (error) *error = "interest levels must be 0, 1 or 2";
            return std::nullopt;
        }
        out[i] = static_cast<std::uint8_t>(j[i].get<int>());
    }
    return out;
}

std::optional<UserProfile> profile_from_json_obj(const Json& j, std::string* error) {
    auto fail = [&](const std::string& msg) {
        if (error) *error = msg;
        return std::nullopt;
    };
    if (!j.is_object()) return fail("profile must be an object");
    for (const char* key : {"user_id", "name", "gender", "employment_status"}) {
        if (!j.contains(key) || !j[key].is_string()) {
            return fail(std::string("profile.") + key + " must be a string");
        }
    }
    for (const char* key : {"age", "fagerstrom", "richmond"}) {
        if (!j.contains(key) || !j[key].is_number_integer()) {
            return fail(std::string("profile.") + key + " must be an integer");
        }
    }
    UserProfile p;
    p.user_id = j["user_id"].get<std::string>();
    p.name = j["name"].get<std::string>();
    p.gender = j["gender"].get<std::string>();
    p.employment_status = j["employment_status"].get<std::string>();
    p.age = j["age"].get<int>();
    p.fagerstrom = j["fagerstrom"].get<int>();
    p.richmond = j["richmond"].get<int>();
    if (!j.contains("quit_date") || !j["quit_date"].is_string()) {
        return fail("profile.quit_date must be a date string");
    }
    auto quit = parse_date(j["quit_date"].get<std::string>());
    if (!quit) return fail("profile.quit_date is not a valid YYYY-MM-DD date");
    p.quit_date = *quit;
    if (!j.contains("interests")) return fail("profile.interests missing");
    auto interests = interests_from_json(j["interests"], error);
    if (!interests) return std::nullopt;
    p.interests = *interests;
    if (!j.contains("window")) return fail("profile.window missing");
    auto window = window_from_json(j["window"]);
    if (!window) return fail("profile.window must be {start, end} minutes with end > start");
    p.window = *window;
    if (j.contains("enrolled_at")) {
        if (!j["enrolled_at"].is_string()) return fail("profile.enrolled_at must be a date string");
        auto enrolled = parse_date(j["enrolled_at"].get<std::string>());
        if (!enrolled) return fail("profile.enrolled_at is not a valid date");
        p.enrolled_at = *enrolled;
    }
    if (j.contains("dropped_out_at") && !j["dropped_out_at"].is_null()) {
        if (!j["dropped_out_at"].is_string()) {
            return fail("profile.dropped_out_at must be a date string");
        }
        auto dropped = parse_date(j["dropped_out_at"].get<std::string>());
        if (!dropped) return fail("profile.dropped_out_at is not a valid date");
        p.dropped_out_at = *dropped;
    }
    if (auto problem = validate_profile(p)) return fail(*problem);
    return p;
}

struct KindToJson {
    Json operator()(const VoteEvent& e) const {
        return Json{{"message_id", e.message_id}, {"value", vote_value_name(e.value)}};
    }
    Json operator()(const SectionAccessEvent& e) const {
        return Json{{"topic", topic_name(e.topic)}, {"dwell_seconds", e.dwell_seconds}};
    }
    Json operator()(const MessageReadEvent& e) const {
        return Json{{"message_id", e.message_id}};
    }
    Json operator()(const ActivitySampleEvent& e) const {
        return Json{{"active_minutes", e.active_minutes}, {"day", format_date(e.day)}};
    }
    Json operator()(const ProfileUpdateEvent& e) const {
        return Json{{"profile", profile_to_json_obj(e.profile)}};
    }
    Json operator()(const InterestsUpdateEvent& e) const {
        return Json{{"interests", e.interests}};
    }
    Json operator()(const MessageDeliveredEvent& e) const {
        return Json{{"message_id", e.message_id},
                    {"topic", topic_name(e.topic)},
                    {"plan_date", format_date(e.plan_date)},
                    {"slot_index", e.slot_index}};
    }
};

const char* kind_name(const EventKind& kind) {
    static constexpr const char* kNames[] = {
        "vote",           "section_access",   "message_read",     "activity_sample",
        "profile_update", "interests_update", "message_delivered"};
    return kNames[kind.index()];
}

std::optional<EventKind> kind_from_json(const std::string& kind, const Json& payload,
                                        std::string* error) {
    auto fail = [&](const std::string& msg) -> std::optional<EventKind> {
        if (error) *error = msg;
        return std::nullopt;
    };
    if (!payload.is_object()) return fail("payload must be an object");
    if (kind == "vote") {
        if (!payload.contains("message_id") || !payload["message_id"].is_string()) {
            return fail("vote.message_id must be a string");
        }
        if (!payload.contains("value") || !payload["value"].is_string()) {
            return fail("vote.value must be one of like/neutral/dislike");
        }
        auto value = parse_vote_value(payload["value"].get<std::string>());
        if (!value) return fail("vote.value must be one of like/neutral/dislike");
        return EventKind{VoteEvent{payload["message_id"].get<std::string>(), *value}};
    }
    if (kind == "section_access") {
        if (!payload.contains("topic") || !payload["topic"].is_string()) {
            return fail("section_access.topic must be a topic name");
        }
        auto topic = parse_topic(payload["topic"].get<std::string>());
        if (!topic) return fail("section_access.topic is not a known topic");
        if (!payload.contains("dwell_seconds") || !payload["dwell_seconds"].is_number()) {
            return fail("section_access.dwell_seconds must be a number");
        }
        const double dwell = payload["dwell_seconds"].get<double>();
        if (dwell < 0.0) return fail("section_access.dwell_seconds must be >= 0");
        return EventKind{SectionAccessEvent{*topic, dwell}};
    }
    if (kind == "message_read") {
        if (!payload.contains("message_id") || !payload["message_id"].is_string()) {
            return fail("message_read.message_id must be a string");
        }
        return EventKind{MessageReadEvent{payload["message_id"].get<std::string>()}};
    }
    if (kind == "activity_sample") {
        if (!payload.contains("active_minutes") || !payload["active_minutes"].is_number()) {
            return fail("activity_sample.active_minutes must be a number");
        }
        const double minutes = payload["active_minutes"].get<double>();
        if (minutes < 0.0) return fail("activity_sample.active_minutes must be >= 0");
        if (!payload.contains("day") || !payload["day"].is_string()) {
            return fail("activity_sample.day must be a date string");
        }
        auto day = parse_date(payload["day"].get<std::string>());
        if (!day) return fail("activity_sample.day is not a valid date");
        return EventKind{ActivitySampleEvent{minutes, *day}};
    }
    if (kind == "profile_update") {
        if (!payload.contains("profile")) return fail("profile_update.profile missing");
        auto profile = profile_from_json_obj(payload["profile"], error);
        if (!profile) return std::nullopt;
        return EventKind{ProfileUpdateEvent{std::move(*profile)}};
    }
    if (kind == "interests_update") {
        if (!payload.contains("interests")) return fail("interests_update.interests missing");
        auto interests = interests_from_json(payload["interests"], error);
        if (!interests) return std::nullopt;
        return EventKind{InterestsUpdateEvent{*interests}};
    }
    if (kind == "message_delivered") {
        if (!payload.contains("message_id") || !payload["message_id"].is_string()) {
            return fail("message_delivered.message_id must be a string");
        }
        if (!payload.contains("topic") || !payload["topic"].is_string()) {
            return fail("message_delivered.topic must be a topic name");
        }
        auto topic = parse_topic(payload["topic"].get<std::string>());
        if (!topic) return fail("message_delivered.topic is not a known topic");
        if (!payload.contains("plan_date") || !payload["plan_date"].is_string()) {
            return fail("message_delivered.plan_date must be a date string");
        }
        auto plan_date = parse_date(payload["plan_date"].get<std::string>());
        if (!plan_date) return fail("message_delivered.plan_date is not a valid date");
        if (!payload.contains("slot_index") || !payload["slot_index"].is_number_integer() ||
            payload["slot_index"].get<int>() < 0) {
            return fail("message_delivered.slot_index must be a nonnegative integer");
        }
        return EventKind{MessageDeliveredEvent{payload["message_id"].get<std::string>(), *topic,
                                               *plan_date, payload["slot_index"].get<int>()}};
    }
    return fail("unknown event kind: " + kind);
}

}  // namespace

std::string event_to_json_line(const EventRecord& rec) {
    Json j{{"seq", rec.seq},
           {"user_id", rec.user_id},
           {"at", format_timestamp(rec.at)},
           {"kind", kind_name(rec.kind)},
           {"payload", std::visit(KindToJson{}, rec.kind)}};
    return j.dump();
}

std::optional<EventRecord> event_from_json_line(const std::string& line, std::string* error) {
    auto fail = [&](const std::string& msg) -> std::optional<EventRecord> {
        if (error) *error = msg;
        return std::nullopt;
    };
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return fail("line is not a JSON object");
    if (!j.contains("seq") || !j["seq"].is_number_unsigned()) {
        return fail("seq must be a nonnegative integer");
    }
    if (!j.contains("user_id") || !j["user_id"].is_string()) {
        return fail("user_id must be a string");
    }
    if (!j.contains("at") || !j["at"].is_string()) return fail("at must be a timestamp string");
    auto at = parse_timestamp(j["at"].get<std::string>());
    if (!at) return fail("at is not a valid RFC 3339 timestamp");
    if (!j.contains("kind") || !j["kind"].is_string()) return fail("kind must be a string");
    if (!j.contains("payload")) return fail("payload missing");
    auto kind = kind_from_json(j["kind"].get<std::string>(), j["payload"], error);
    if (!kind) return std::nullopt;
    EventRecord rec;
    rec.seq = j["seq"].get<std::uint64_t>();
    rec.user_id = j["user_id"].get<std::string>();
    rec.at = *at;
    rec.kind = std::move(*kind);
    return rec;
}

std::string profile_to_json(const UserProfile& p) {
    return profile_to_json_obj(p).dump();
}

std::optional<UserProfile> profile_from_json(const std::string& json, std::string* error) {
    Json j = Json::parse(json, nullptr, false);
    if (j.is_discarded()) {
        if (error) *error = "invalid JSON";
        return std::nullopt;
    }
    return profile_from_json_obj(j, error);
}

std::vector<EventRecord> read_event_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open event log: " + path);
    std::vector<EventRecord> log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::string error;
        auto rec = event_from_json_line(line, &error);
        if (!rec) {
            throw IoError(path + ":" + std::to_string(line_no) + ": " + error);
        }
        log.push_back(std::move(*rec));
    }
    return log;
}

void write_event_log(const std::string& path, const std::vector<EventRecord>& log) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write event log: " + path);
    for (const auto& rec : log) out << event_to_json_line(rec) << '\n';
    out.flush();
    if (!out) throw IoError("failed writing event log: " + path);
}

void append_event_lines(const std::string& path, const std::vector<EventRecord>& records) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw IoError("cannot append to event log: " + path);
    for (const auto& rec : records) out << event_to_json_line(rec) << '\n';
    out.flush();
    if (!out) throw IoError("failed appending to event log: " + path);
}

}  // namespace tailor
