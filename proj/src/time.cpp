#include "soop/time.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace soop {

namespace {

using namespace std::chrono;

constexpr long long kNanosPerDay = 86'400'000'000'000LL;

int parse_digits(std::string_view text, std::size_t pos, std::size_t count) {
    if (pos + count > text.size()) throw std::invalid_argument("truncated timestamp: " + std::string(text));
    int value = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') throw std::invalid_argument("bad digit in timestamp: " + std::string(text));
        value = value * 10 + (c - '0');
    }
    return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
    if (pos >= text.size() || text[pos] != c)
        throw std::invalid_argument("malformed RFC-3339 timestamp: " + std::string(text));
}

}  // namespace

UtcTime parse_rfc3339(std::string_view text) {
    // YYYY-MM-DDTHH:MM:SS[.frac](Z|+hh:mm|-hh:mm)
    const int y = parse_digits(text, 0, 4);
    expect(text, 4, '-');
    const int mo = parse_digits(text, 5, 2);
    expect(text, 7, '-');
    const int d = parse_digits(text, 8, 2);
    if (text.size() <= 10 || (text[10] != 'T' && text[10] != 't' && text[10] != ' '))
        throw std::invalid_argument("malformed RFC-3339 timestamp: " + std::string(text));
    const int h = parse_digits(text, 11, 2);
    expect(text, 13, ':');
    const int mi = parse_digits(text, 14, 2);
    expect(text, 16, ':');
    const int s = parse_digits(text, 17, 2);
    std::size_t pos = 19;

    long long frac_ns = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        long long scale = 100'000'000;
        const std::size_t begin = pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            frac_ns += (text[pos] - '0') * scale;
            scale /= 10;
            ++pos;
        }
        if (pos == begin) throw std::invalid_argument("empty fraction in timestamp: " + std::string(text));
    }

    long long offset_min = 0;
    if (pos >= text.size()) throw std::invalid_argument("missing UTC offset in timestamp: " + std::string(text));
    if (text[pos] == 'Z' || text[pos] == 'z') {
        ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
        const int sign = text[pos] == '-' ? -1 : 1;
        const int oh = parse_digits(text, pos + 1, 2);
        expect(text, pos + 3, ':');
        const int om = parse_digits(text, pos + 4, 2);
        offset_min = sign * (oh * 60LL + om);
        pos += 6;
    } else {
        throw std::invalid_argument("malformed UTC offset in timestamp: " + std::string(text));
    }
    if (pos != text.size()) throw std::invalid_argument("trailing characters in timestamp: " + std::string(text));

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 60)
        throw std::invalid_argument("out-of-range field in timestamp: " + std::string(text));

    const auto t = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + nanoseconds{frac_ns} -
                   minutes{offset_min};
    return time_point_cast<nanoseconds>(t);
}

std::string format_rfc3339(UtcTime t) {
    const auto day_start = floor<days>(t);
    const year_month_day ymd{day_start};
    long long ns = (t - day_start).count();
    const long long h = ns / 3'600'000'000'000LL;
    ns -= h * 3'600'000'000'000LL;
    const long long mi = ns / 60'000'000'000LL;
    ns -= mi * 60'000'000'000LL;
    const long long s = ns / 1'000'000'000LL;
    ns -= s * 1'000'000'000LL;

    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), h, mi, s);
    std::string out = buf;
    if (ns != 0) {
        char frac[16];
        std::snprintf(frac, sizeof frac, ".%09lld", ns);
        std::string f = frac;
        while (f.back() == '0') f.pop_back();
        out += f;
    }
    out += 'Z';
    return out;
}

UtcTime from_tle_epoch(int two_digit_year, double day_of_year) {
    const int y = two_digit_year < 57 ? 2000 + two_digit_year : 1900 + two_digit_year;
    const auto jan1 = sys_days{year{y} / January / 1};
    const long long ns = std::llround((day_of_year - 1.0) * static_cast<double>(kNanosPerDay));
    return time_point_cast<nanoseconds>(jan1) + nanoseconds{ns};
}

JulianDate julian_date(UtcTime t) {
    // Unix epoch is JD 2440587.5.
    const auto day_start = floor<days>(t);
    const double whole = 2440587.5 + static_cast<double>(day_start.time_since_epoch().count());
    const double fraction = static_cast<double>((t - day_start).count()) / static_cast<double>(kNanosPerDay);
    return {whole, fraction};
}

double minutes_between(UtcTime a, UtcTime b) {
    return static_cast<double>((a - b).count()) / 60e9;
}

double seconds_between(UtcTime a, UtcTime b) {
    return static_cast<double>((a - b).count()) / 1e9;
}

UtcTime add_seconds(UtcTime t, double seconds) {
    return t + nanoseconds{std::llround(seconds * 1e9)};
}

}  // namespace soop
