#include "tailor/types.hpp"

namespace tailor {

std::string_view vote_value_name(VoteValue v) {
    switch (v) {
        case VoteValue::kDislike: return "dislike";
        case VoteValue::kNeutral: return "neutral";
        case VoteValue::kLike: return "like";
    }
    return "neutral";
}

std::optional<VoteValue> parse_vote_value(std::string_view name) {
    if (name == "like") return VoteValue::kLike;
    if (name == "neutral") return VoteValue::kNeutral;
    if (name == "dislike") return VoteValue::kDislike;
    return std::nullopt;
}

double vote_value_to_score(VoteValue v) {
    switch (v) {
        case VoteValue::kDislike: return 0.0;
        case VoteValue::kNeutral: return 0.5;
        case VoteValue::kLike: return 1.0;
    }
    return 0.5;
}

bool valid_window(const TimeWindow& w) {
    return w.start_minute >= 0 && w.start_minute <= kMinutesPerDay - 1 && w.end_minute >= 1 &&
           w.end_minute <= kMinutesPerDay && w.end_minute > w.start_minute;
}

std::optional<std::string> validate_profile(const UserProfile& p) {
    if (p.user_id.empty()) return "user_id must not be empty";
    if (p.age < 18 || p.age > 100) return "age must be in [18,100]";
    if (p.fagerstrom < 0 || p.fagerstrom > 10) return "fagerstrom must be in [0,10]";
    if (p.richmond < 0 || p.richmond > 10) return "richmond must be in [0,10]";
    for (std::uint8_t level : p.interests) {
        if (level > 2) return "interest levels must be 0, 1 or 2";
    }
    if (!valid_window(p.window)) return "window must satisfy 0 <= start < end <= 1440";
    if (p.dropped_out_at && *p.dropped_out_at < p.enrolled_at) {
        return "dropped_out_at must not precede enrolled_at";
    }
    return std::nullopt;
}

}  // namespace tailor
