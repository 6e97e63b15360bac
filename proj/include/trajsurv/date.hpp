#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace trajsurv {

/// Calendar date with day precision, stored as days since 1970-01-01.
class Date {
public:
    constexpr Date() = default;

    static std::optional<Date> from_ymd(int year, unsigned month, unsigned day);

    /// Strict ISO-8601 `YYYY-MM-DD`. Returns nullopt for anything else,
    /// including impossible dates such as 2001-02-29.
    static std::optional<Date> parse(std::string_view text);

    /// Like parse() but throws std::invalid_argument.
    static Date parse_or_throw(std::string_view text);

    static constexpr Date from_serial(long serial) { return Date{serial}; }

    [[nodiscard]] constexpr long serial() const { return days_; }
    [[nodiscard]] int year() const;
    [[nodiscard]] unsigned month() const;
    [[nodiscard]] unsigned day() const;
    [[nodiscard]] std::string to_string() const;

    [[nodiscard]] constexpr Date plus_days(long n) const { return Date{days_ + n}; }

    friend constexpr auto operator<=>(Date, Date) = default;
    friend constexpr long operator-(Date a, Date b) { return a.days_ - b.days_; }

private:
    constexpr explicit Date(long days) : days_(days) {}
    long days_ = 0;
};

inline constexpr double kDaysPerYear = 365.25;

/// Elapsed time in years between two dates (days / 365.25).
[[nodiscard]] inline double years_between(Date from, Date to)
{
    return static_cast<double>(to - from) / kDaysPerYear;
}

/// True when the gap between the two dates strictly exceeds `window_years`.
[[nodiscard]] inline bool gap_exceeds(Date earlier, Date later, double window_years)
{
    return static_cast<double>(later - earlier) > window_years * kDaysPerYear;
}

/// Most recent academic-year boundary (first day of `start_month`) on or
/// before `d`.
[[nodiscard]] Date academic_year_start(Date d, unsigned start_month = 1);

}  // namespace trajsurv
