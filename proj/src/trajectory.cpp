#include "trajsurv/trajectory.hpp"

#include "trajsurv/csv.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace trajsurv {

void GapConfig::validate() const
{
    if (!std::isfinite(inactivity_window_years) || inactivity_window_years <= 0.0) {
        throw std::invalid_argument("inactivity window must be a positive number of years");
    }
}

std::string_view to_string(TransitionKind kind)
{
    switch (kind) {
    case TransitionKind::major_switch: return "major_switch";
    case TransitionKind::plan_change_same_title: return "plan_change_same_title";
    case TransitionKind::reentry_same_plan: return "reentry_same_plan";
    }
    return "unknown";
}

std::span<const EventRecord> spell_scope(const StudentHistory& history)
{
    const auto& evs = history.events;
    const auto begin = std::find_if(evs.begin(), evs.end(), [](const EventRecord& e) {
        return e.kind == EventKind::enrolment;
    });
    if (begin == evs.end()) return {};
    auto end = std::find_if(begin, evs.end(), [](const EventRecord& e) {
        return e.kind == EventKind::graduation;
    });
    if (end != evs.end()) ++end;
    return {&*begin, static_cast<std::size_t>(end - begin)};
}

std::vector<Spell> build_spells(const StudentHistory& history, const GapConfig& config)
{
    config.validate();
    std::vector<Spell> spells;
    Spell* current = nullptr;

    for (const auto& e : spell_scope(history)) {
        if (e.kind == EventKind::graduation) {
            // Graduation inherits the enclosing spell's codes; it never opens one.
            if (current) {
                current->end_date = e.date;
                ++current->event_count;
            }
            break;
        }
        const bool continues = current && current->major_code == e.major_code &&
                               current->plan_code == e.plan_code &&
                               !gap_exceeds(current->end_date, e.date,
                                            config.inactivity_window_years);
        if (continues) {
            current->end_date = e.date;
            ++current->event_count;
            continue;
        }
        spells.push_back(Spell{history.student_id, e.major_code, e.plan_code, e.date, e.date,
                               spells.size(), 1});
        current = &spells.back();
    }
    return spells;
}

TransitionKind classify_pair(const Spell& from, const Spell& to)
{
    if (from.major_code != to.major_code) return TransitionKind::major_switch;
    if (from.plan_code != to.plan_code) return TransitionKind::plan_change_same_title;
    return TransitionKind::reentry_same_plan;
}

std::vector<Transition> classify_transitions(std::span<const Spell> spells)
{
    std::vector<Transition> out;
    if (spells.size() < 2) return out;
    out.reserve(spells.size() - 1);
    for (std::size_t i = 1; i < spells.size(); ++i) {
        const auto& a = spells[i - 1];
        const auto& b = spells[i];
        out.push_back(Transition{b.student_id, classify_pair(a, b), b.start_date, a.major_code,
                                 a.plan_code, b.major_code, b.plan_code});
    }
    return out;
}

std::optional<Date> first_major_switch(std::span<const Transition> transitions)
{
    std::optional<Date> first;
    for (const auto& t : transitions) {
        if (t.kind == TransitionKind::major_switch && (!first || t.date < *first)) first = t.date;
    }
    return first;
}

Trajectory reconstruct(const StudentHistory& history, const GapConfig& config)
{
    Trajectory t;
    t.student_id = history.student_id;
    t.spells = build_spells(history, config);
    t.transitions = classify_transitions(t.spells);
    return t;
}

std::vector<Trajectory> reconstruct_all(std::span<const StudentHistory> histories,
                                        const GapConfig& config)
{
    std::vector<Trajectory> out;
    out.reserve(histories.size());
    for (const auto& h : histories) out.push_back(reconstruct(h, config));
    return out;
}

void write_spells_csv(std::ostream& out, std::span<const Trajectory> trajectories)
{
    out << "student_id,index,major,plan,start,end,events\n";
    for (const auto& t : trajectories) {
        for (const auto& s : t.spells) {
            out << csv::escape(s.student_id) << ',' << s.index << ',' << csv::escape(s.major_code)
                << ',' << csv::escape(s.plan_code) << ',' << s.start_date.to_string() << ','
                << s.end_date.to_string() << ',' << s.event_count << '\n';
        }
    }
}

void write_transitions_csv(std::ostream& out, std::span<const Trajectory> trajectories)
{
    out << "student_id,kind,date,from_major,from_plan,to_major,to_plan\n";
    for (const auto& t : trajectories) {
        for (const auto& tr : t.transitions) {
            out << csv::escape(tr.student_id) << ',' << to_string(tr.kind) << ','
                << tr.date.to_string() << ',' << csv::escape(tr.from_major) << ','
                << csv::escape(tr.from_plan) << ',' << csv::escape(tr.to_major) << ','
                << csv::escape(tr.to_plan) << '\n';
        }
    }
}

}  // namespace trajsurv
