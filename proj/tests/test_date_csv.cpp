#include "fixtures.hpp"

#include "trajsurv/csv.hpp"
#include "trajsurv/date.hpp"

#include <doctest.h>

#include <cmath>

using namespace trajsurv;

TEST_CASE("dates parse strictly as YYYY-MM-DD")
{
    CHECK(Date::parse("2000-03-15").has_value());
    CHECK(Date::parse("2000-02-29").has_value());
    CHECK_FALSE(Date::parse("2001-02-29").has_value());
    CHECK_FALSE(Date::parse("2000-13-40").has_value());
    CHECK_FALSE(Date::parse("2000-3-15").has_value());
    CHECK_FALSE(Date::parse("15/03/2000").has_value());
    CHECK_FALSE(Date::parse("2000-03-1x").has_value());
    CHECK_FALSE(Date::parse("").has_value());
    CHECK_THROWS_AS(Date::parse_or_throw("nope"), std::invalid_argument);

    const auto x = Date::parse_or_throw("1999-12-31");
    CHECK(x.year() == 1999);
    CHECK(x.month() == 12);
    CHECK(x.day() == 31);
    CHECK(x.to_string() == "1999-12-31");
    CHECK(x.plus_days(1).to_string() == "2000-01-01");
}

TEST_CASE("day differences match the proleptic Gregorian calendar")
{
    using testing::d;
    // Frozen from Python's datetime.date arithmetic.
    CHECK(d("2003-06-01") - d("2000-03-01") == 1187);
    CHECK(d("2010-05-01") - d("2000-03-01") == 3713);
    CHECK(d("2004-07-01") - d("2000-07-01") == 1461);
    CHECK(d("2001-03-01") - d("2000-03-01") == 365);
    CHECK(years_between(d("2000-07-01"), d("2004-07-01")) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("gap rule uses a strict inequality on days")
{
    using testing::d;
    // 2 * 365.25 = 730.5 days
    CHECK_FALSE(gap_exceeds(d("2000-01-01"), d("2000-01-01").plus_days(730), 2.0));
    CHECK(gap_exceeds(d("2000-01-01"), d("2000-01-01").plus_days(731), 2.0));
    CHECK_FALSE(gap_exceeds(d("2000-01-01"), d("2000-01-01").plus_days(365), 1.0));
    CHECK(gap_exceeds(d("2000-01-01"), d("2000-01-01").plus_days(366), 1.0));
}

TEST_CASE("academic year start")
{
    using testing::d;
    CHECK(academic_year_start(d("2000-07-01")) == d("2000-01-01"));
    CHECK(academic_year_start(d("2000-01-01")) == d("2000-01-01"));
    CHECK(academic_year_start(d("2000-07-01"), 3) == d("2000-03-01"));
    CHECK(academic_year_start(d("2000-02-10"), 3) == d("1999-03-01"));
    CHECK_THROWS_AS(static_cast<void>(academic_year_start(d("2000-02-10"), 13)), std::invalid_argument);
}

TEST_CASE("csv splitting and escaping")
{
    CHECK(csv::split_line("a,b,,d") == std::vector<std::string>{"a", "b", "", "d"});
    CHECK(csv::split_line("a,b\r") == std::vector<std::string>{"a", "b"});
    CHECK(csv::split_line("\"x,y\",\"he said \"\"hi\"\"\"") == std::vector<std::string>{"x,y", "he said \"hi\""});
    CHECK(csv::escape("plain") == "plain");
    CHECK(csv::escape("a,b") == "\"a,b\"");
    CHECK(csv::split_line(csv::escape("q\"uote,d")).front() == "q\"uote,d");
}

TEST_CASE("fixed formatting")
{
    CHECK(csv::fixed(1.0 / 3.0) == "0.333333");
    CHECK(csv::fixed(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(csv::fixed(-0.0) == "0.000000");
    CHECK(csv::fixed(-1e-9, 2) == "0.00");
    CHECK(csv::fixed(4.325, 1) == "4.3");
}
