#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace tailor {

// Calendar date, UTC. Stored as days since the Unix epoch so date
// arithmetic is plain integer arithmetic.
struct Date {
    std::int64_t epoch_days = 0;

    friend auto operator<=>(const Date&, const Date&) = default;

    Date operator+(std::int64_t days) const { return Date{epoch_days + days}; }
    Date operator-(std::int64_t days) const { return Date{epoch_days - days}; }
    std::int64_t operator-(const Date& other) const { return epoch_days - other.epoch_days; }
};

// Instant in UTC, seconds since the Unix epoch.
struct Timestamp {
    std::int64_t epoch_seconds = 0;

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;

    Timestamp operator+(std::int64_t seconds) const { return Timestamp{epoch_seconds + seconds}; }
    Timestamp operator-(std::int64_t seconds) const { return Timestamp{epoch_seconds - seconds}; }
    std::int64_t operator-(const Timestamp& other) const { return epoch_seconds - other.epoch_seconds; }
};

constexpr std::int64_t kSecondsPerDay = 86'400;
constexpr int kMinutesPerDay = 1'440;

Date make_date(int year, unsigned month, unsigned day);
void civil_from_date(Date d, int& year, unsigned& month, unsigned& day);

// Midnight UTC at the start of the given day.
Timestamp midnight(Date d);
Date date_of(Timestamp t);
int minute_of_day(Timestamp t);

// "YYYY-MM-DD"
std::string format_date(Date d);
std::optional<Date> parse_date(const std::string& s);

// RFC 3339, always rendered as UTC with a trailing 'Z'. Parsing accepts
// 'Z' or a numeric offset and normalizes to UTC; fractional seconds are
// accepted and discarded.
std::string format_timestamp(Timestamp t);
std::optional<Timestamp> parse_timestamp(const std::string& s);

}  // namespace tailor
