#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tailor/time.hpp"
#include "tailor/topic.hpp"
#include "tailor/types.hpp"

namespace tailor {

// Event payloads. The log is append-only; records are immutable once
// appended and everything downstream (snapshots, plans, reports) is
// derived by replaying a log prefix.

struct VoteEvent {
    std::string message_id;
    VoteValue value = VoteValue::kNeutral;
};

struct SectionAccessEvent {
    Topic topic = Topic::kGeneralMotivation;
    double dwell_seconds = 0.0;
};

struct MessageReadEvent {
    std::string message_id;
};

struct ActivitySampleEvent {
    double active_minutes = 0.0;
    Date day;
};

struct ProfileUpdateEvent {
    UserProfile profile;
};

struct InterestsUpdateEvent {
    Likert3 interests = {0, 0, 0, 0, 0};
};

// Appended when a nightly plan is committed: the send act itself, stamped
// with the planned send instant. Deliveries must live in the log so that
// snapshots (and with them repeat-avoidance and slot scoring) stay a pure
// function of the log prefix.
struct MessageDeliveredEvent {
    std::string message_id;
    Topic topic = Topic::kGeneralMotivation;
    Date plan_date;
    int slot_index = 0;
};

using EventKind = std::variant<VoteEvent, SectionAccessEvent, MessageReadEvent,
                               ActivitySampleEvent, ProfileUpdateEvent, InterestsUpdateEvent,
                               MessageDeliveredEvent>;

struct EventRecord {
    std::uint64_t seq = 0;
    std::string user_id;
    Timestamp at;
    EventKind kind;
};

// One JSON object per line, fields {seq, user_id, at, kind, payload}.
std::string event_to_json_line(const EventRecord& rec);

// Profile wire format, shared by profile_update payloads and the HTTP
// registration endpoint.
std::string profile_to_json(const UserProfile& p);
std::optional<UserProfile> profile_from_json(const std::string& json, std::string* error);

// Returns nullopt with *error set when the line is not a valid record.
std::optional<EventRecord> event_from_json_line(const std::string& line, std::string* error);

std::vector<EventRecord> read_event_log(const std::string& path);
void write_event_log(const std::string& path, const std::vector<EventRecord>& log);
void append_event_lines(const std::string& path, const std::vector<EventRecord>& records);

}  // namespace tailor
