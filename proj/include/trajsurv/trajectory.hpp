#pragma once

#include "trajsurv/date.hpp"
#include "trajsurv/ingest.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trajsurv {

struct GapConfig {
    double inactivity_window_years = 2.0;
    Date observation_end = *Date::from_ymd(2019, 12, 31);

    /// Throws std::invalid_argument unless the window is finite and positive.
    void validate() const;
};

/// Contiguous enrolment segment in one major-plan combination.
struct Spell {
    std::string student_id;
    std::string major_code;
    std::string plan_code;
    Date start_date;
    Date end_date;
    std::size_t index = 0;
    std::size_t event_count = 0;

    friend bool operator==(const Spell&, const Spell&) = default;
};

enum class TransitionKind { major_switch, plan_change_same_title, reentry_same_plan };

std::string_view to_string(TransitionKind kind);

struct Transition {
    std::string student_id;
    TransitionKind kind = TransitionKind::major_switch;
    Date date;  ///< start of the destination spell
    std::string from_major;
    std::string from_plan;
    std::string to_major;
    std::string to_plan;

    friend bool operator==(const Transition&, const Transition&) = default;
};

/// The events that spell construction consumes: from the first enrolment up
/// to and including the first graduation. Earlier and later records are
/// outside the trajectory.
std::span<const EventRecord> spell_scope(const StudentHistory& history);

/// Single pass over spell_scope(history). A spell extends while the next
/// event keeps the same (major, plan) and follows the previous event by no
/// more than the inactivity window; a graduation event closes the current
/// spell and ends the scan.
std::vector<Spell> build_spells(const StudentHistory& history, const GapConfig& config);

TransitionKind classify_pair(const Spell& from, const Spell& to);

/// One transition per consecutive spell pair, dated at the destination start.
std::vector<Transition> classify_transitions(std::span<const Spell> spells);

std::optional<Date> first_major_switch(std::span<const Transition> transitions);

struct Trajectory {
    std::string student_id;
    std::vector<Spell> spells;
    std::vector<Transition> transitions;
};

Trajectory reconstruct(const StudentHistory& history, const GapConfig& config);
std::vector<Trajectory> reconstruct_all(std::span<const StudentHistory> histories,
                                        const GapConfig& config);

void write_spells_csv(std::ostream& out, std::span<const Trajectory> trajectories);
void write_transitions_csv(std::ostream& out, std::span<const Trajectory> trajectories);

}  // namespace trajsurv
