#pragma once

// Helpers shared by the unit and acceptance tests.

#include "trajsurv/ingest.hpp"
#include "trajsurv/outcomes.hpp"
#include "trajsurv/synth.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace trajsurv::testing {

inline Date d(const char* iso) { return Date::parse_or_throw(iso); }

inline EventRecord ev(const std::string& sid, const char* date, EventKind kind, const std::string& major,
                      const std::string& plan, std::size_t seq = 0)
{
    return EventRecord{sid, d(date), kind, major, plan, seq};
}

inline StudentHistory history_of(std::vector<EventRecord> events)
{
    for (std::size_t i = 0; i < events.size(); ++i) events[i].seq = i;
    auto res = build_histories(std::move(events));
    if (res.histories.size() != 1) throw std::runtime_error("fixture must describe exactly one student");
    return res.histories.front();
}

inline std::vector<SubjectRecord> records(std::initializer_list<std::pair<double, bool>> items,
                                          const std::string& stratum = "All")
{
    std::vector<SubjectRecord> out;
    int i = 0;
    for (const auto& [t, e] : items) {
        out.push_back({"r" + std::to_string(i++), t, e ? Status::event : Status::censored, stratum});
    }
    return out;
}

inline ParseResult parse_text(const std::string& text)
{
    std::istringstream in(text);
    return parse_events(in);
}

inline std::vector<StudentHistory> histories_from(const std::vector<EventRecord>& events)
{
    return build_histories(events).histories;
}

/// Cohort with interruptions, switches, plan changes and graduation.
inline CohortSpec mixed_cohort(std::uint64_t seed, std::size_t n = 400)
{
    CohortSpec spec;
    spec.n_students = n;
    spec.entry_year_first = 1985;
    spec.entry_year_last = 2016;
    spec.dropout_hazard = HazardSpec{{{0.0, 0.22}, {3.0, 0.08}}};
    spec.switch_hazard = HazardSpec{{{0.0, 0.2}, {2.0, 0.03}}};
    spec.graduation_hazard = HazardSpec{{{0.0, 0.0}, {5.0, 0.25}}};
    spec.plan_change_hazard = HazardSpec::constant(0.03);
    spec.stopout_probability = 0.35;
    spec.stopout_min_years = 0.6;
    spec.stopout_max_years = 4.0;
    spec.observation_end = *Date::from_ymd(2019, 12, 31);
    spec.seed = seed;
    return spec;
}

class TempDir {
public:
    TempDir()
    {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("trajsurv_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace trajsurv::testing
