#include "fixtures.hpp"

#include "trajsurv/error.hpp"
#include "trajsurv/rng.hpp"
#include "trajsurv/synth.hpp"
#include "trajsurv/trajectory.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace trajsurv;
using testing::d;

namespace {

std::string as_csv(const std::vector<EventRecord>& evs)
{
    std::ostringstream out;
    write_events_csv(out, evs);
    return out.str();
}

GapConfig gap2(const CohortSpec& spec)
{
    GapConfig g;
    g.observation_end = spec.observation_end;
    return g;
}

}  // namespace

TEST_CASE("RNG reference values")
{
    // SplitMix64 from state 0 (published test vector)
    std::uint64_t s = 0;
    CHECK(splitmix64(s) == 0xE220A8397B1DCDAFULL);
    CHECK(splitmix64(s) == 0x6E789E6AA1B965F4ULL);

    Xoshiro256 a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        if (i == 0) CHECK(x != c());
    }
    Xoshiro256 r(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform_open01();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        const auto k = r.uniform_int(-3, 3);
        CHECK(k >= -3);
        CHECK(k <= 3);
    }
    CHECK(substream_seed(42, 0) != substream_seed(42, 1));
    CHECK(substream_seed(42, 0) != substream_seed(43, 0));
}

TEST_CASE("sample_piecewise_exp inverts the cumulative hazard")
{
    const double u = std::exp(-1.0);
    CHECK(sample_piecewise_exp(HazardSpec::constant(1.0), u) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sample_piecewise_exp(HazardSpec::constant(0.5), u) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sample_piecewise_exp(HazardSpec{{{0.0, 0.0}, {1.0, 1.0}}}, u) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::isinf(sample_piecewise_exp(HazardSpec::zero(), 0.5)));
    CHECK(std::isinf(sample_piecewise_exp(HazardSpec{{{0.0, 0.1}, {2.0, 0.0}}}, 0.5)));
    CHECK_THROWS_AS(sample_piecewise_exp(HazardSpec::constant(1.0), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sample_piecewise_exp(HazardSpec::constant(1.0), 1.0), std::invalid_argument);

    // inversion round trip through the cumulative hazard
    const HazardSpec h{{{0.0, 0.3}, {1.5, 0.05}, {4.0, 0.9}}};
    Xoshiro256 rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.uniform_open01();
        const double t = sample_piecewise_exp(h, v);
        CHECK(h.cumulative(t) == doctest::Approx(-std::log(v)).epsilon(1e-10));
    }
}

TEST_CASE("true_survival closed form")
{
    const HazardSpec h{{{0.0, 0.2}, {2.0, 0.8}}};
    CHECK(true_survival(h, 0.0) == 1.0);
    CHECK(true_survival(HazardSpec::constant(1.0), 1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(true_survival(h, 3.0) == doctest::Approx(std::exp(-1.2)).epsilon(1e-14));
    CHECK(true_survival(h, 3.0) == doctest::Approx(0.3012).epsilon(1e-4));
    CHECK_THROWS_AS(true_survival(h, -1.0), std::invalid_argument);
}

TEST_CASE("hazard validation")
{
    CHECK_THROWS_AS(HazardSpec{{}}.validate(), std::invalid_argument);
    CHECK_THROWS_AS((HazardSpec{{{1.0, 0.1}}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((HazardSpec{{{0.0, 0.1}, {0.0, 0.2}}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((HazardSpec{{{0.0, -0.1}}}.validate()), std::invalid_argument);
    CHECK_NOTHROW((HazardSpec{{{0.0, 0.1}, {2.0, 0.0}}}.validate()));
}

TEST_CASE("generate_cohort is deterministic and seed-sensitive")
{
    const auto spec = testing::mixed_cohort(42, 300);
    const auto a = generate_cohort(spec);
    const auto b = generate_cohort(spec);
    CHECK(as_csv(a) == as_csv(b));
    auto other = spec;
    other.seed = 43;
    CHECK(as_csv(generate_cohort(other)) != as_csv(a));

    // students are generated from their own sub-streams: a larger cohort
    // starts with the same students
    auto bigger = spec;
    bigger.n_students = 400;
    const auto big = generate_cohort_with_truth(bigger);
    const auto small = generate_cohort_with_truth(spec);
    for (std::size_t i = 0; i < small.truth.size(); ++i) {
        CHECK(big.truth[i].entry_date == small.truth[i].entry_date);
        CHECK(big.truth[i].dropout_time == small.truth[i].dropout_time);
    }
}

TEST_CASE("generated events respect the ingest schema and the observation window")
{
    const auto spec = testing::mixed_cohort(5, 500);
    const auto cohort = generate_cohort_with_truth(spec);
    const auto parsed = testing::parse_text(as_csv(cohort.events));
    CHECK(parsed.errors.empty());
    CHECK(parsed.events.size() == cohort.events.size());
    for (const auto& e : cohort.events) CHECK(e.date <= spec.observation_end);
    const auto hs = build_histories(cohort.events);
    CHECK(hs.skipped.empty());
    CHECK(hs.histories.size() == spec.n_students);
    std::size_t total = 0;
    for (const auto& t : cohort.truth) total += t.event_count;
    CHECK(total == cohort.events.size());
}

TEST_CASE("terminal causes are exclusive and match the emitted events")
{
    const auto spec = testing::mixed_cohort(9, 800);
    const auto cohort = generate_cohort_with_truth(spec);
    const auto hs = build_histories(cohort.events).histories;
    REQUIRE(hs.size() == cohort.truth.size());
    std::set<TerminalCause> seen;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const auto& t = cohort.truth[i];
        const auto& h = hs[i];
        REQUIRE(h.student_id == t.student_id);
        seen.insert(t.terminal);
        const auto grads = std::count_if(h.events.begin(), h.events.end(),
                                         [](const EventRecord& e) { return e.kind == EventKind::graduation; });
        const auto drops = std::count_if(h.events.begin(), h.events.end(),
                                         [](const EventRecord& e) { return e.kind == EventKind::status_update; });
        CHECK(grads == (t.terminal == TerminalCause::graduation ? 1 : 0));
        CHECK(drops == (t.terminal == TerminalCause::dropout ? 1 : 0));
        CHECK(grads + drops <= 1);
        if (t.terminal != TerminalCause::censored) CHECK(h.events.back().kind != EventKind::enrolment);
    }
    CHECK(seen.size() == 3);
}

TEST_CASE("zero switch hazard yields no major switches after reconstruction")
{
    auto spec = testing::mixed_cohort(12, 500);
    spec.switch_hazard = HazardSpec::zero();
    const auto cohort = generate_cohort_with_truth(spec);
    for (const auto& h : build_histories(cohort.events).histories) {
        const auto t = reconstruct(h, gap2(spec));
        CHECK_FALSE(first_major_switch(t.transitions).has_value());
    }
    for (const auto& t : cohort.truth) CHECK_FALSE(t.switch_date.has_value());
}

TEST_CASE("recorded switch dates are recovered by the pipeline")
{
    auto spec = testing::mixed_cohort(13, 600);
    spec.stopout_probability = 0.0;
    spec.plan_change_hazard = HazardSpec::zero();
    const auto cohort = generate_cohort_with_truth(spec);
    const auto hs = build_histories(cohort.events).histories;
    std::size_t switches = 0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const auto t = reconstruct(hs[i], gap2(spec));
        CHECK(first_major_switch(t.transitions) == cohort.truth[i].switch_date);
        switches += cohort.truth[i].switch_date.has_value();
    }
    CHECK(switches > 0);
}

TEST_CASE("cohort spec JSON")
{
    const auto spec = cohort_spec_from_json(R"({
        "n_students": 50,
        "entry_years": [1990, 1995],
        "dropout_hazard": [[0, 0.3], [2, 0.1]],
        "switch_hazard": 0.05,
        "graduation_hazard": {"segments": [{"start": 0, "rate": 0}, {"start": 4, "rate": 0.5}]},
        "observation_end": "2010-06-30",
        "seed": 7,
        "stopout_probability": 0.2,
        "stopout_years": [1, 2]
    })");
    CHECK(spec.n_students == 50);
    CHECK(spec.entry_year_first == 1990);
    CHECK(spec.entry_year_last == 1995);
    REQUIRE(spec.dropout_hazard.segments.size() == 2);
    CHECK(spec.dropout_hazard.segments[1].start == 2.0);
    CHECK(spec.switch_hazard.segments[0].rate == 0.05);
    CHECK(spec.graduation_hazard.segments[1].rate == 0.5);
    CHECK(spec.observation_end == d("2010-06-30"));
    CHECK(spec.seed == 7);
    CHECK(spec.stopout_max_years == 2.0);
    CHECK(spec.events_per_year == 2);

    const auto back = cohort_spec_from_json(to_json(spec));
    CHECK(to_json(back) == to_json(spec));
    CHECK(as_csv(generate_cohort(back)) == as_csv(generate_cohort(spec)));

    CHECK_THROWS_AS(cohort_spec_from_json("{not json"), InputError);
    CHECK_THROWS_AS(cohort_spec_from_json(R"({"n_students": 0})"), ValidationError);
    CHECK_THROWS_AS(cohort_spec_from_json(R"({"events_per_year": 0})"), ValidationError);
    CHECK_THROWS_AS(cohort_spec_from_json(R"({"entry_years": [1970, 1975]})"), ValidationError);
    CHECK_THROWS_AS(cohort_spec_from_file("/nonexistent/spec.json"), InputError);
}
