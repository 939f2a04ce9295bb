#pragma once

#include <map>
#include <optional>
#include <string>

#include "tailor/time.hpp"
#include "tailor/types.hpp"

namespace tailor {

struct ActivityStats {
    std::string user_id;
    Date day;
    double active_minutes = 0.0;
    double rolling_mean = 0.0;  // mean over the trailing window's sampled days
};

// Stats for a day, from the user's day -> active-minutes samples (latest
// report per day wins, as stored in UserSignals). The rolling mean covers
// the window_days days ending at `day`, averaging only days that have a
// sample. Returns nullopt when the day itself has no sample.
std::optional<ActivityStats> activity_stats(const std::map<Date, double>& samples,
                                            const std::string& user_id, Date day,
                                            int window_days = 7);

// Rounded difference between the day's activity and the rolling mean.
int ppal_delta_minutes(const ActivityStats& stats);

// Substitutes {name} and {delta_minutes} in a templated activity-
// comparison body. Whether the surrounding text says "over" or "under" is
// the message author's concern; only the numbers are substituted.
std::string render_ppal_message(const std::string& body, const UserProfile& user,
                                const ActivityStats& stats);

// {name} substitution alone, for plain bodies rendered without stats.
std::string render_name_only(const std::string& body, const UserProfile& user);

}  // namespace tailor
