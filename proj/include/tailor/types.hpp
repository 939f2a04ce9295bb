#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "tailor/time.hpp"
#include "tailor/topic.hpp"

namespace tailor {

enum class VoteValue : int { kDislike = 0, kNeutral = 1, kLike = 2 };

std::string_view vote_value_name(VoteValue v);
std::optional<VoteValue> parse_vote_value(std::string_view name);

// Like -> 1.0, Neutral -> 0.5, Dislike -> 0.0. Symmetric endpoints keep
// explicit rates in [0,1] so they compose with implicit rates unscaled.
double vote_value_to_score(VoteValue v);

// Declared interest per topic on a 3-level Likert scale: 0, 1 or 2.
using Likert3 = std::array<std::uint8_t, kTopicCount>;

// Daily delivery window in minutes of day, half-open [start, end).
struct TimeWindow {
    int start_minute = 0;
    int end_minute = kMinutesPerDay;

    int duration_minutes() const { return end_minute - start_minute; }
    bool contains(int minute) const { return minute >= start_minute && minute < end_minute; }

    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

// Window must span at least one minute inside a single day.
bool valid_window(const TimeWindow& w);

struct UserProfile {
    std::string user_id;
    std::string name;
    std::string gender;             // categorical, compared for equality only
    std::string employment_status;  // categorical
    int age = 0;                    // years, 18..100
    Date quit_date;
    int fagerstrom = 0;  // 0..10
    int richmond = 0;    // 0..10
    Likert3 interests = {0, 0, 0, 0, 0};
    TimeWindow window;
    Date enrolled_at;
    std::optional<Date> dropped_out_at;

    bool active() const { return !dropped_out_at.has_value(); }

    friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

// Returns a description of the first violated constraint, or nullopt when
// the profile is valid.
std::optional<std::string> validate_profile(const UserProfile& p);

inline constexpr std::string_view kNamePlaceholder = "{name}";
inline constexpr std::string_view kDeltaPlaceholder = "{delta_minutes}";

struct Message {
    std::string id;
    Topic topic = Topic::kGeneralMotivation;
    std::string body;

    bool has_delta_placeholder() const { return body.find(kDeltaPlaceholder) != std::string::npos; }
};

}  // namespace tailor
