#include "flowtrace/event.hpp"

#include <cctype>
#include <cstdio>

#include "flowtrace/errors.hpp"

namespace flowtrace {

namespace {

// Howard Hinnant's civil-date algorithms; proleptic Gregorian, no locale.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : static_cast<unsigned>(-9));
    y = static_cast<int>(yr + (m <= 2));
}

bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

unsigned days_in_month(int y, unsigned m) {
    static const unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return kDays[m - 1];
}

[[noreturn]] void bad_timestamp(const std::string& text) {
    throw ParseError(ParseError::Kind::malformed_record,
                     "unparseable timestamp: \"" + text + "\"");
}

// Parses exactly n digits at text[pos..), advancing pos.
int take_digits(const std::string& text, std::size_t& pos, int n) {
    int value = 0;
    for (int i = 0; i < n; ++i) {
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
            bad_timestamp(text);
        value = value * 10 + (text[pos++] - '0');
    }
    return value;
}

void expect_char(const std::string& text, std::size_t& pos, char c) {
    if (pos >= text.size() || text[pos] != c) bad_timestamp(text);
    ++pos;
}

}  // namespace

TimestampMs parse_timestamp(const std::string& text) {
    std::size_t pos = 0;
    const int year = take_digits(text, pos, 4);
    expect_char(text, pos, '-');
    const int month = take_digits(text, pos, 2);
    expect_char(text, pos, '-');
    const int day = take_digits(text, pos, 2);
    if (pos >= text.size() || (text[pos] != 'T' && text[pos] != 't')) bad_timestamp(text);
    ++pos;
    const int hour = take_digits(text, pos, 2);
    expect_char(text, pos, ':');
    const int minute = take_digits(text, pos, 2);
    expect_char(text, pos, ':');
    const int second = take_digits(text, pos, 2);

    int millis = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        int digits = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            if (digits < 3) millis = millis * 10 + (text[pos] - '0');
            ++digits;
            ++pos;
        }
        if (digits == 0 || digits > 3) bad_timestamp(text);
        while (digits < 3) {
            millis *= 10;
            ++digits;
        }
    }

    // Explicit UTC offset required.
    std::int64_t offset_minutes = 0;
    if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
        ++pos;
    } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        const bool negative = text[pos] == '-';
        ++pos;
        const int oh = take_digits(text, pos, 2);
        expect_char(text, pos, ':');
        const int om = take_digits(text, pos, 2);
        if (oh > 23 || om > 59) bad_timestamp(text);
        offset_minutes = oh * 60 + om;
        if (negative) offset_minutes = -offset_minutes;
    } else {
        bad_timestamp(text);
    }
    if (pos != text.size()) bad_timestamp(text);

    if (month < 1 || month > 12) bad_timestamp(text);
    if (day < 1 || static_cast<unsigned>(day) > days_in_month(year, month)) bad_timestamp(text);
    if (hour > 23 || minute > 59 || second > 59) bad_timestamp(text);

    const std::int64_t days = days_from_civil(year, month, day);
    std::int64_t ms = days * 86400000 +
                      (static_cast<std::int64_t>(hour) * 3600 + minute * 60 + second) * 1000 +
                      millis;
    ms -= offset_minutes * 60000;
    return ms;
}

std::string format_timestamp(TimestampMs ms) {
    std::int64_t days = ms / 86400000;
    std::int64_t rem = ms % 86400000;
    if (rem < 0) {
        rem += 86400000;
        --days;
    }
    int year;
    unsigned month, day;
    civil_from_days(days, year, month, day);
    const int hour = static_cast<int>(rem / 3600000);
    const int minute = static_cast<int>(rem / 60000 % 60);
    const int second = static_cast<int>(rem / 1000 % 60);
    const int millis = static_cast<int>(rem % 1000);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", year, month, day,
                  hour, minute, second, millis);
    return buf;
}

}  // namespace flowtrace
