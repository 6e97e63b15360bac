#include "trajsurv/date.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace trajsurv {

namespace chr = std::chrono;

namespace {

chr::year_month_day to_ymd(long serial)
{
    return chr::year_month_day{chr::sys_days{chr::days{serial}}};
}

template <typename T>
bool parse_digits(std::string_view s, T& out)
{
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::optional<Date> Date::from_ymd(int year, unsigned month, unsigned day)
{
    const chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
    if (!ymd.ok()) return std::nullopt;
    return Date{chr::sys_days{ymd}.time_since_epoch().count()};
}

std::optional<Date> Date::parse(std::string_view text)
{
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0, d = 0;
    if (!parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m) ||
        !parse_digits(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    return from_ymd(y, m, d);
}

Date Date::parse_or_throw(std::string_view text)
{
    if (auto d = parse(text)) return *d;
    throw std::invalid_argument("invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
}

int Date::year() const { return static_cast<int>(to_ymd(days_).year()); }
unsigned Date::month() const { return static_cast<unsigned>(to_ymd(days_).month()); }
unsigned Date::day() const { return static_cast<unsigned>(to_ymd(days_).day()); }

std::string Date::to_string() const
{
    const auto ymd = to_ymd(days_);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Date academic_year_start(Date d, unsigned start_month)
{
    if (start_month < 1 || start_month > 12) {
        throw std::invalid_argument("academic year start month must be in 1..12");
    }
    int y = d.year();
    if (d.month() < start_month) --y;
    return *Date::from_ymd(y, start_month, 1);
}

}  // namespace trajsurv
