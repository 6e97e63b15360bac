#include "fixtures.hpp"

#include "trajsurv/error.hpp"
#include "trajsurv/ingest.hpp"
#include "trajsurv/rng.hpp"

#include <doctest.h>

#include <sstream>

using namespace trajsurv;
using testing::d;
using testing::parse_text;

namespace {
const std::string kHeader = "student_id,date,kind,major_code,plan_code\n";
}

TEST_CASE("parse_events maps a well-formed row field by field")
{
    const auto r = parse_text(kHeader + "s1,2000-03-15,enrolment,CIV,1985\n");
    REQUIRE(r.events.size() == 1);
    CHECK(r.errors.empty());
    const auto& e = r.events.front();
    CHECK(e.student_id == "s1");
    CHECK(e.date == d("2000-03-15"));
    CHECK(e.kind == EventKind::enrolment);
    CHECK(e.major_code == "CIV");
    CHECK(e.plan_code == "1985");
    CHECK(e.seq == 0);
}

TEST_CASE("malformed rows become RecordErrors, never silently dropped")
{
    const auto r = parse_text(kHeader +
                              "s1,2000-13-40,enrolment,CIV,1985\n"
                              "s1,2000-03-15,tutoring,CIV,1985\n"
                              "s2,2000-03-15,exam,,1985\n"
                              "s2,2000-03-15,exam,CIV,\n"
                              ",2000-03-15,exam,CIV,1985\n"
                              "s3,2000-03-15\n"
                              "s3,2000-03-15,graduation,,\n"
                              "s3,2000-03-15,exam,CIV,1985\n");
    REQUIRE(r.errors.size() == 6);
    CHECK(r.data_rows == 8);
    CHECK(r.events.size() + r.errors.size() == r.data_rows);

    CHECK(r.errors[0].row == 0u);
    CHECK(r.errors[0].reason.find("invalid date") != std::string::npos);
    CHECK(r.errors[1].row == 1u);
    CHECK(r.errors[1].reason.find("unknown kind") != std::string::npos);
    CHECK(r.errors[2].reason == "missing major_code");
    CHECK(r.errors[3].reason == "missing plan_code");
    CHECK_FALSE(r.errors[4].student_id.has_value());
    CHECK(r.errors[5].reason.find("expected 5 fields") != std::string::npos);

    // Graduation rows may omit codes.
    REQUIRE(r.events.size() == 2);
    CHECK(r.events[0].kind == EventKind::graduation);
    CHECK(r.events[0].seq == 6);
    CHECK(r.events[1].seq == 7);
}

TEST_CASE("record errors serialise as JSON lines")
{
    CHECK(to_json_line({3u, std::string("s1"), "invalid date 'x'"}) ==
          R"({"row":3,"student_id":"s1","reason":"invalid date 'x'"})");
    CHECK(to_json_line({std::nullopt, std::string("s9"), "no enrolment event"}) ==
          R"({"row":null,"student_id":"s9","reason":"no enrolment event"})");
}

TEST_CASE("header handling")
{
    CHECK_THROWS_AS(parse_text(""), InputError);
    CHECK_THROWS_AS(parse_text("id,date,kind,major,plan\n"), InputError);
    CHECK_THROWS_AS(parse_text("student_id,kind,date,major_code,plan_code\n"), InputError);

    const auto r = parse_text("student_id,date,kind,major_code,plan_code,campus\n"
                              "s1,2000-03-15,enrolment,CIV,1985,north\n");
    CHECK(r.events.size() == 1);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("campus") != std::string::npos);

    const auto bom = parse_text("\xEF\xBB\xBF" + kHeader + "s1,2000-03-15,enrolment,CIV,1985\r\n\n");
    CHECK(bom.events.size() == 1);
    CHECK(bom.errors.empty());

    CHECK_THROWS_AS(parse_events_file("/nonexistent/events.csv"), InputError);
}

TEST_CASE("build_histories groups, sorts and takes the baseline from the first enrolment")
{
    std::vector<EventRecord> evs{
        testing::ev("s1", "2002-07-01", EventKind::exam, "CIV", "1985", 0),
        testing::ev("s2", "1995-04-01", EventKind::enrolment, "IND", "1990", 1),
        testing::ev("s1", "2001-08-01", EventKind::enrolment, "CIV", "1985", 2),
        testing::ev("s1", "2001-03-01", EventKind::enrolment, "CIV", "1985", 3),
        testing::ev("s3", "2001-03-01", EventKind::exam, "CIV", "1985", 4),
        testing::ev("s2", "1996-04-01", EventKind::graduation, "", "", 5),
    };
    const auto res = build_histories(evs);
    REQUIRE(res.histories.size() == 2);
    const auto& s1 = res.histories[0];
    CHECK(s1.student_id == "s1");
    CHECK(s1.first_enrolment_date == d("2001-03-01"));
    CHECK(s1.entry_year == 2001);
    CHECK(s1.entry_period == EntryPeriod::P3);
    CHECK(s1.first_major == "CIV");
    CHECK_FALSE(s1.graduated_on.has_value());
    REQUIRE(s1.events.size() == 3);
    CHECK(s1.events[0].date == d("2001-03-01"));
    CHECK(s1.events[2].date == d("2002-07-01"));

    const auto& s2 = res.histories[1];
    CHECK(s2.entry_period == EntryPeriod::P2);
    CHECK(s2.graduated_on == d("1996-04-01"));

    REQUIRE(res.skipped.size() == 1);
    CHECK(res.skipped[0].student_id == "s3");
    CHECK(res.skipped[0].reason == "no enrolment event");
}

TEST_CASE("same-day events are ordered by source row")
{
    const auto h = testing::history_of({
        testing::ev("s1", "2001-03-01", EventKind::exam, "IND", "2000"),
        testing::ev("s1", "2001-03-01", EventKind::enrolment, "CIV", "1985"),
    });
    CHECK(h.events[0].major_code == "IND");
    // First enrolment event decides the baseline even when a same-day exam precedes it.
    CHECK(h.first_major == "CIV");
}

TEST_CASE("assign_entry_period boundaries")
{
    CHECK(assign_entry_period(1980) == EntryPeriod::P1);
    CHECK(assign_entry_period(1985) == EntryPeriod::P1);
    CHECK(assign_entry_period(1989) == EntryPeriod::P1);
    CHECK(assign_entry_period(1990) == EntryPeriod::P2);
    CHECK(assign_entry_period(1999) == EntryPeriod::P2);
    CHECK(assign_entry_period(2000) == EntryPeriod::P3);
    CHECK(assign_entry_period(2009) == EntryPeriod::P3);
    CHECK(assign_entry_period(2010) == EntryPeriod::P4);
    CHECK(assign_entry_period(2019) == EntryPeriod::P4);
    CHECK_THROWS_AS(assign_entry_period(1979), ValidationError);
    try {
        assign_entry_period(1975, "s42");
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("s42") != std::string::npos);
    }
    CHECK(period_display_name(EntryPeriod::P4) == "P4 (2010+)");
    CHECK(parse_entry_period("P2") == EntryPeriod::P2);
    CHECK(parse_entry_period("P3 (2000-2009)") == EntryPeriod::P3);
    CHECK_FALSE(parse_entry_period("P5").has_value());
}

TEST_CASE("pre-1980 entrants are rejected into the skip list")
{
    const auto res = build_histories({testing::ev("old", "1978-03-01", EventKind::enrolment, "CIV", "1970")});
    CHECK(res.histories.empty());
    REQUIRE(res.skipped.size() == 1);
    CHECK(res.skipped[0].reason.find("1978") != std::string::npos);
}

TEST_CASE("property: every row accounted for, parsing deterministic")
{
    Xoshiro256 rng(99);
    const char* kinds[] = {"enrolment", "exam", "status_update", "plan_change", "graduation", "tutoring"};
    for (int trial = 0; trial < 50; ++trial) {
        std::string text = kHeader;
        const auto rows = rng.uniform_int(0, 60);
        for (std::int64_t i = 0; i < rows; ++i) {
            const auto month = rng.uniform_int(1, 14);  // 13 and 14 are invalid
            text += "s" + std::to_string(rng.uniform_int(1, 8)) + ",2001-" + (month < 10 ? "0" : "") +
                    std::to_string(month) + "-1" + std::to_string(rng.uniform_int(0, 9)) + "," +
                    kinds[rng.uniform_int(0, 5)] + "," + (rng.uniform_int(0, 9) == 0 ? "" : "CIV") + ",1985\n";
        }
        const auto a = parse_text(text);
        const auto b = parse_text(text);
        CHECK(a.events.size() + a.errors.size() == static_cast<std::size_t>(rows));
        CHECK(a.events == b.events);
        CHECK(a.errors == b.errors);
        CHECK(build_histories(a.events).histories == build_histories(b.events).histories);
    }
}

TEST_CASE("property: baseline covariates ignore later events")
{
    Xoshiro256 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<EventRecord> evs{testing::ev("s", "2003-05-10", EventKind::enrolment, "ELE", "2000", 0)};
        const auto n = rng.uniform_int(1, 10);
        for (std::int64_t i = 0; i < n; ++i) {
            const auto kind = static_cast<EventKind>(rng.uniform_int(0, 3));
            evs.push_back(EventRecord{"s", d("2003-05-10").plus_days(rng.uniform_int(1, 4000)), kind,
                                      rng.uniform_int(0, 1) ? "ELE" : "MEC", "2000", static_cast<std::size_t>(i + 1)});
        }
        const auto base = build_histories(evs).histories.at(0);
        // perturb every later event
        auto perturbed = evs;
        for (std::size_t i = 1; i < perturbed.size(); ++i) {
            perturbed[i].major_code = "XXX";
            perturbed[i].date = perturbed[i].date.plus_days(rng.uniform_int(0, 500));
        }
        const auto h = build_histories(perturbed).histories.at(0);
        CHECK(h.first_major == base.first_major);
        CHECK(h.entry_year == base.entry_year);
        CHECK(h.entry_period == base.entry_period);
        CHECK(h.first_enrolment_date == base.first_enrolment_date);
    }
}

TEST_CASE("write_events_csv round-trips through parse_events")
{
    std::vector<EventRecord> evs{testing::ev("s,1", "2001-03-01", EventKind::enrolment, "CIV", "1985", 0),
                                 testing::ev("s,1", "2002-03-01", EventKind::graduation, "", "", 1)};
    std::ostringstream out;
    write_events_csv(out, evs);
    const auto back = parse_text(out.str());
    CHECK(back.errors.empty());
    CHECK(back.events == evs);
}
