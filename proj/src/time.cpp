#include "tailor/time.hpp"

#include <cstdio>

namespace tailor {

namespace {

// Days-from-civil / civil-from-days, Howard Hinnant's algorithms.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
    return a - floor_div(a, b) * b;
}

}  // namespace

Date make_date(int year, unsigned month, unsigned day) {
    return Date{days_from_civil(year, month, day)};
}

void civil_from_date(Date d, int& year, unsigned& month, unsigned& day) {
    civil_from_days(d.epoch_days, year, month, day);
}

Timestamp midnight(Date d) {
    return Timestamp{d.epoch_days * kSecondsPerDay};
}

Date date_of(Timestamp t) {
    return Date{floor_div(t.epoch_seconds, kSecondsPerDay)};
}

int minute_of_day(Timestamp t) {
    return static_cast<int>(floor_mod(t.epoch_seconds, kSecondsPerDay) / 60);
}

std::string format_date(Date d) {
    int y;
    unsigned m, dd;
    civil_from_days(d.epoch_days, y, m, dd);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, dd);
    return buf;
}

std::optional<Date> parse_date(const std::string& s) {
    int y = 0;
    unsigned m = 0, d = 0;
    char extra = 0;
    if (std::sscanf(s.c_str(), "%d-%2u-%2u%c", &y, &m, &d, &extra) != 3) return std::nullopt;
    if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    Date out{days_from_civil(y, m, d)};
    // Round-trip guard rejects overflow days like 2024-02-31.
    int ry;
    unsigned rm, rd;
    civil_from_days(out.epoch_days, ry, rm, rd);
    if (ry != y || rm != m || rd != d) return std::nullopt;
    return out;
}

std::string format_timestamp(Timestamp t) {
    const std::int64_t days = floor_div(t.epoch_seconds, kSecondsPerDay);
    const std::int64_t sod = floor_mod(t.epoch_seconds, kSecondsPerDay);
    int y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, m, d,
                  static_cast<long long>(sod / 3600), static_cast<long long>(sod / 60 % 60),
                  static_cast<long long>(sod % 60));
    return buf;
}

std::optional<Timestamp> parse_timestamp(const std::string& s) {
    int y = 0;
    unsigned mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%d-%2u-%2uT%2u:%2u:%2u%n", &y, &mo, &d, &h, &mi, &sec,
                    &consumed) != 6) {
        return std::nullopt;
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 60) {
        return std::nullopt;
    }
    const char* rest = s.c_str() + consumed;
    if (*rest == '.') {  // fractional seconds: skip digits
        ++rest;
        if (*rest < '0' || *rest > '9') return std::nullopt;
        while (*rest >= '0' && *rest <= '9') ++rest;
    }
    std::int64_t offset_seconds = 0;
    if (*rest == 'Z' || *rest == 'z') {
        ++rest;
    } else if (*rest == '+' || *rest == '-') {
        const int sign = (*rest == '-') ? -1 : 1;
        unsigned oh = 0, om = 0;
        int n = 0;
        if (std::sscanf(rest + 1, "%2u:%2u%n", &oh, &om, &n) != 2 || oh > 23 || om > 59) {
            return std::nullopt;
        }
        offset_seconds = sign * (static_cast<std::int64_t>(oh) * 3600 + om * 60);
        rest += 1 + n;
    } else {
        return std::nullopt;
    }
    if (*rest != '\0') return std::nullopt;
    const std::int64_t local =
        days_from_civil(y, mo, d) * kSecondsPerDay + h * 3600 + mi * 60 + sec;
    return Timestamp{local - offset_seconds};
}

}  // namespace tailor
