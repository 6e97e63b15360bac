#include "trajsurv/synth.hpp"

#include "trajsurv/error.hpp"
#include "trajsurv/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace trajsurv {

using nlohmann::json;

void HazardSpec::validate() const
{
    if (segments.empty()) throw std::invalid_argument("hazard has no segments");
    if (segments.front().start != 0.0) throw std::invalid_argument("first hazard segment must start at 0");
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& s = segments[i];
        if (!std::isfinite(s.rate) || s.rate < 0.0) {
            throw std::invalid_argument("hazard rates must be finite and non-negative");
        }
        if (!std::isfinite(s.start) || (i > 0 && s.start <= segments[i - 1].start)) {
            throw std::invalid_argument("hazard segment starts must be strictly increasing");
        }
    }
}

double HazardSpec::cumulative(double t) const
{
    double total = 0.0;
    for (std::size_t i = 0; i < segments.size() && segments[i].start < t; ++i) {
        const double end = i + 1 < segments.size() ? std::min(t, segments[i + 1].start) : t;
        total += segments[i].rate * (end - segments[i].start);
    }
    return total;
}

double sample_piecewise_exp(const HazardSpec& hazard, double u)
{
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("sample_piecewise_exp: u must lie in (0, 1)");
    hazard.validate();
    double remaining = -std::log(u);
    for (std::size_t i = 0; i < hazard.segments.size(); ++i) {
        const auto& seg = hazard.segments[i];
        const bool last = i + 1 == hazard.segments.size();
        if (seg.rate == 0.0) continue;
        if (last) return seg.start + remaining / seg.rate;
        const double mass = seg.rate * (hazard.segments[i + 1].start - seg.start);
        if (remaining <= mass) return seg.start + remaining / seg.rate;
        remaining -= mass;
    }
    return std::numeric_limits<double>::infinity();
}

double true_survival(const HazardSpec& hazard, double t)
{
    if (!(t >= 0.0)) throw std::invalid_argument("true_survival: t must be non-negative");
    return std::exp(-hazard.cumulative(t));
}

void CohortSpec::validate() const
{
    if (n_students == 0) throw std::invalid_argument("n_students must be positive");
    if (events_per_year < 1) throw std::invalid_argument("events_per_year must be at least 1");
    if (entry_year_first > entry_year_last) throw std::invalid_argument("entry year range is empty");
    if (entry_year_first < kFirstSupportedEntryYear) {
        throw std::invalid_argument("entry years must be 1980 or later");
    }
    if (entry_year_first > observation_end.year()) {
        throw std::invalid_argument("entry years start after the observation end");
    }
    if (!(stopout_probability >= 0.0 && stopout_probability <= 1.0)) {
        throw std::invalid_argument("stopout_probability must lie in [0, 1]");
    }
    if (!(stopout_min_years > 0.0 && stopout_min_years <= stopout_max_years)) {
        throw std::invalid_argument("stopout length range is invalid");
    }
    if (majors.size() < 2) throw std::invalid_argument("at least two majors are required");
    for (const auto* h : {&dropout_hazard, &switch_hazard, &graduation_hazard, &plan_change_hazard}) {
        h->validate();
    }
}

namespace {

HazardSpec hazard_from_json(const json& j)
{
    if (j.is_number()) return HazardSpec::constant(j.get<double>());
    const json& segs = j.is_object() ? j.at("segments") : j;
    HazardSpec h{{}};
    for (const auto& s : segs) {
        if (s.is_array()) {
            h.segments.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
        } else {
            h.segments.push_back({s.at("start").get<double>(), s.at("rate").get<double>()});
        }
    }
    return h;
}

json hazard_to_json(const HazardSpec& h)
{
    json segs = json::array();
    for (const auto& s : h.segments) segs.push_back(json::array({s.start, s.rate}));
    return segs;
}

}  // namespace

CohortSpec cohort_spec_from_json(const std::string& json_text)
{
    CohortSpec spec;
    try {
        const json j = json::parse(json_text);
        if (j.contains("n_students")) spec.n_students = j["n_students"].get<std::size_t>();
        if (j.contains("entry_years")) {
            spec.entry_year_first = j["entry_years"].at(0).get<int>();
            spec.entry_year_last = j["entry_years"].at(1).get<int>();
        }
        if (j.contains("dropout_hazard")) spec.dropout_hazard = hazard_from_json(j["dropout_hazard"]);
        if (j.contains("switch_hazard")) spec.switch_hazard = hazard_from_json(j["switch_hazard"]);
        if (j.contains("graduation_hazard")) spec.graduation_hazard = hazard_from_json(j["graduation_hazard"]);
        if (j.contains("plan_change_hazard")) spec.plan_change_hazard = hazard_from_json(j["plan_change_hazard"]);
        if (j.contains("events_per_year")) spec.events_per_year = j["events_per_year"].get<int>();
        if (j.contains("observation_end")) {
            spec.observation_end = Date::parse_or_throw(j["observation_end"].get<std::string>());
        }
        if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("stopout_probability")) spec.stopout_probability = j["stopout_probability"].get<double>();
        if (j.contains("stopout_years")) {
            spec.stopout_min_years = j["stopout_years"].at(0).get<double>();
            spec.stopout_max_years = j["stopout_years"].at(1).get<double>();
        }
        if (j.contains("majors")) spec.majors = j["majors"].get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw InputError(std::string("cohort spec: ") + e.what());
    }
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("cohort spec: ") + e.what());
    }
    return spec;
}

CohortSpec cohort_spec_from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return cohort_spec_from_json(ss.str());
}

std::string to_json(const CohortSpec& spec)
{
    nlohmann::ordered_json j;
    j["n_students"] = spec.n_students;
    j["entry_years"] = {spec.entry_year_first, spec.entry_year_last};
    j["dropout_hazard"] = hazard_to_json(spec.dropout_hazard);
    j["switch_hazard"] = hazard_to_json(spec.switch_hazard);
    j["graduation_hazard"] = hazard_to_json(spec.graduation_hazard);
    j["plan_change_hazard"] = hazard_to_json(spec.plan_change_hazard);
    j["events_per_year"] = spec.events_per_year;
    j["observation_end"] = spec.observation_end.to_string();
    j["seed"] = spec.seed;
    j["stopout_probability"] = spec.stopout_probability;
    j["stopout_years"] = {spec.stopout_min_years, spec.stopout_max_years};
    j["majors"] = spec.majors;
    return j.dump(2);
}

namespace {

struct Pending {
    double time;  ///< years since entry
    long day;     ///< days since entry
    EventKind kind;
    std::string major;
    std::string plan;
    bool regular;  ///< periodic event (may be removed by an interruption)
};

std::string student_label(std::size_t index, std::size_t n)
{
    const std::size_t width = std::max<std::size_t>(6, std::to_string(n).size());
    std::string digits = std::to_string(index + 1);
    return "s" + std::string(width - digits.size(), '0') + digits;
}

long to_days(double years) { return std::lround(years * kDaysPerYear); }

}  // namespace

Cohort generate_cohort_with_truth(const CohortSpec& spec)
{
    spec.validate();
    Cohort cohort;
    cohort.truth.reserve(spec.n_students);

    for (std::size_t i = 0; i < spec.n_students; ++i) {
        Xoshiro256 rng(substream_seed(spec.seed, i));

        const int year = static_cast<int>(rng.uniform_int(spec.entry_year_first, spec.entry_year_last));
        const Date jan1 = *Date::from_ymd(year, 1, 1);
        const long year_days = *Date::from_ymd(year + 1, 1, 1) - jan1;
        const Date entry = std::min(jan1.plus_days(rng.uniform_int(0, year_days - 1)), spec.observation_end);
        const auto major_idx = static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(spec.majors.size()) - 1));

        StudentTruth truth;
        truth.student_id = student_label(i, spec.n_students);
        truth.entry_date = entry;
        truth.dropout_time = sample_piecewise_exp(spec.dropout_hazard, rng.uniform_open01());
        truth.switch_time = sample_piecewise_exp(spec.switch_hazard, rng.uniform_open01());
        truth.graduation_time = sample_piecewise_exp(spec.graduation_hazard, rng.uniform_open01());
        truth.plan_change_time = sample_piecewise_exp(spec.plan_change_hazard, rng.uniform_open01());
        const double u_stop = rng.uniform_open01();
        const double u_stop_pos = rng.uniform_open01();
        const double u_stop_len = rng.uniform_open01();

        const double horizon = years_between(entry, spec.observation_end);
        const double terminal_time = std::min(truth.dropout_time, truth.graduation_time);
        const double end_time = std::min(terminal_time, horizon);
        if (terminal_time <= horizon) {
            truth.terminal = truth.dropout_time < truth.graduation_time ? TerminalCause::dropout
                                                                        : TerminalCause::graduation;
        }

        const std::string first_major = spec.majors[major_idx];
        const std::string second_major = spec.majors[(major_idx + 1) % spec.majors.size()];
        const std::string base_plan = std::to_string(year - year % 10);
        auto codes_at = [&](double t) {
            std::pair<std::string, std::string> c{t >= truth.switch_time ? second_major : first_major,
                                                  base_plan};
            if (t >= truth.plan_change_time) c.second += "R";
            return c;
        };
        auto make = [&](double t, EventKind kind, bool regular) {
            auto [major, plan] = codes_at(t);
            if (kind == EventKind::graduation) major.clear(), plan.clear();
            return Pending{t, to_days(t), kind, std::move(major), std::move(plan), regular};
        };

        std::vector<Pending> pending;
        const double step = 1.0 / spec.events_per_year;
        for (long k = 0; static_cast<double>(k) * step <= end_time; ++k) {
            const EventKind kind = k % spec.events_per_year == 0 ? EventKind::enrolment : EventKind::exam;
            pending.push_back(make(static_cast<double>(k) * step, kind, true));
        }
        if (truth.switch_time <= end_time) pending.push_back(make(truth.switch_time, EventKind::enrolment, true));
        if (truth.plan_change_time <= end_time) {
            pending.push_back(make(truth.plan_change_time, EventKind::plan_change, true));
        }
        if (truth.terminal == TerminalCause::dropout) {
            pending.push_back(make(truth.dropout_time, EventKind::status_update, false));
        } else if (truth.terminal == TerminalCause::graduation) {
            pending.push_back(make(truth.graduation_time, EventKind::graduation, false));
        }

        std::optional<std::pair<double, double>> interruption;
        if (u_stop < spec.stopout_probability) {
            const double start = u_stop_pos * end_time;
            const double length = spec.stopout_min_years +
                                  (spec.stopout_max_years - spec.stopout_min_years) * u_stop_len;
            if (start + length < end_time) {
                interruption.emplace(start, start + length);
                std::erase_if(pending, [&](const Pending& p) {
                    return p.regular && p.time > start && p.time < start + length;
                });
            }
        }
        std::stable_sort(pending.begin(), pending.end(),
                         [](const Pending& a, const Pending& b) { return a.day < b.day; });

        for (std::size_t e = 0; e < pending.size(); ++e) {
            const auto& p = pending[e];
            const Date date = entry.plus_days(p.day);
            if (p.kind != EventKind::graduation) {
                if (!truth.switch_date && p.major != first_major) truth.switch_date = date;
                if (!truth.plan_change_date && p.plan != base_plan) truth.plan_change_date = date;
            }
            if (interruption && e > 0 && !truth.stopout_gap && p.time >= interruption->second) {
                truth.stopout_gap = std::make_pair(entry.plus_days(pending[e - 1].day), date);
            }
            cohort.events.push_back(EventRecord{truth.student_id, date, p.kind, p.major, p.plan,
                                                cohort.events.size()});
        }
        truth.event_count = pending.size();
        cohort.truth.push_back(std::move(truth));
    }
    return cohort;
}

std::vector<EventRecord> generate_cohort(const CohortSpec& spec)
{
    return generate_cohort_with_truth(spec).events;
}

}  // namespace trajsurv
