#include "tailor/activity.hpp"

#include <cmath>

namespace tailor {

namespace {

std::string replace_all(std::string text, std::string_view placeholder,
                        const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(placeholder, pos)) != std::string::npos) {
        text.replace(pos, placeholder.size(), value);
        pos += value.size();
    }
    return text;
}

}  // namespace

std::optional<ActivityStats> activity_stats(const std::map<Date, double>& samples,
                                            const std::string& user_id, Date day,
                                            int window_days) {
    auto it = samples.find(day);
    if (it == samples.end()) return std::nullopt;
    const Date window_start = day - (window_days - 1);
    double sum = 0.0;
    int count = 0;
    for (auto w = samples.lower_bound(window_start); w != samples.end() && w->first <= day; ++w) {
        sum += w->second;
        ++count;
    }
    return ActivityStats{user_id, day, it->second, sum / count};
}

int ppal_delta_minutes(const ActivityStats& stats) {
    return static_cast<int>(std::lround(stats.active_minutes - stats.rolling_mean));
}

std::string render_ppal_message(const std::string& body, const UserProfile& user,
                                const ActivityStats& stats) {
    std::string out = replace_all(body, kNamePlaceholder, user.name);
    return replace_all(std::move(out), kDeltaPlaceholder,
                       std::to_string(ppal_delta_minutes(stats)));
}

std::string render_name_only(const std::string& body, const UserProfile& user) {
    return replace_all(body, kNamePlaceholder, user.name);
}

}  // namespace tailor
