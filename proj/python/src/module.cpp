#include "trajsurv/cli.hpp"
#include "trajsurv/error.hpp"
#include "trajsurv/estimator.hpp"
#include "trajsurv/ingest.hpp"
#include "trajsurv/pipeline.hpp"
#include "trajsurv/synth.hpp"
#include "trajsurv/version.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <memory>
#include <sstream>

namespace py = pybind11;
using namespace trajsurv;

namespace {

HazardSpec hazard_of(const std::vector<std::pair<double, double>>& segments)
{
    HazardSpec h{{}};
    for (const auto& [start, rate] : segments) h.segments.push_back({start, rate});
    h.validate();
    return h;
}

std::vector<SubjectRecord> records_of(const std::vector<double>& durations, const std::vector<bool>& events,
                                      const std::string& stratum)
{
    if (durations.size() != events.size()) throw std::invalid_argument("durations and events differ in length");
    std::vector<SubjectRecord> out;
    out.reserve(durations.size());
    for (std::size_t i = 0; i < durations.size(); ++i) {
        out.push_back({std::to_string(i), durations[i], events[i] ? Status::event : Status::censored, stratum});
    }
    return out;
}

py::dict summary_dict(const StratumFit& fit)
{
    py::dict d;
    d["n_total"] = fit.summary.n_total;
    d["n_events"] = fit.summary.n_events;
    d["n_censored"] = fit.summary.n_censored;
    d["median"] = fit.summary.median;
    py::dict probes;
    for (const auto& [t, s] : fit.summary.probes) probes[py::float_(t)] = s;
    d["probes"] = probes;
    return d;
}

py::dict outcome_dict(const OutcomeAnalysis& oa)
{
    py::dict strata;
    strata["All"] = summary_dict(oa.global);
    for (const auto& s : oa.strata) strata[py::str(s.label)] = summary_dict(s);
    py::dict d;
    d["strata"] = strata;
    if (oa.log_rank) {
        d["log_rank"] = py::dict(py::arg("statistic") = oa.log_rank->statistic, py::arg("df") = oa.log_rank->df,
                                 py::arg("p_value") = oa.log_rank->p_value);
    } else {
        d["log_rank"] = py::none();
    }
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Kaplan-Meier, log-rank and trajectory pipeline bindings";
    m.attr("__version__") = std::string(kVersion);

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<InputError>(m, "InputError", PyExc_OSError);

    py::class_<SurvivalCurve>(m, "SurvivalCurve")
        .def_readonly("times", &SurvivalCurve::times)
        .def_readonly("n_risk", &SurvivalCurve::n_risk)
        .def_readonly("n_event", &SurvivalCurve::n_event)
        .def_readonly("n_censored", &SurvivalCurve::n_censored)
        .def_readonly("survival", &SurvivalCurve::survival)
        .def_readonly("variance", &SurvivalCurve::variance)
        .def_readonly("n_subjects", &SurvivalCurve::n_subjects)
        .def("__len__", &SurvivalCurve::size)
        .def("confidence_band", [](const SurvivalCurve& c, double level) {
            std::vector<std::pair<double, double>> out;
            for (const auto& b : greenwood_ci(c, level)) out.emplace_back(b.lower, b.upper);
            return out;
        }, py::arg("level") = 0.95);

    m.def("km_fit", [](const std::vector<double>& durations, const std::vector<bool>& events) {
        return km_fit(records_of(durations, events, "All"));
    }, py::arg("durations"), py::arg("events"), "Product-limit estimate; events are processed before censorings at ties.");
    m.def("median_survival", &median_survival, py::arg("curve"));
    m.def("survival_at", &survival_at, py::arg("curve"), py::arg("t"));

    m.def("log_rank", [](const std::map<std::string, std::pair<std::vector<double>, std::vector<bool>>>& groups) {
        std::map<std::string, std::vector<SubjectRecord>> g;
        for (const auto& [label, data] : groups) g[label] = records_of(data.first, data.second, label);
        const auto r = log_rank(g);
        return py::dict(py::arg("statistic") = r.statistic, py::arg("df") = r.df, py::arg("p_value") = r.p_value,
                        py::arg("labels") = r.labels, py::arg("observed") = r.observed,
                        py::arg("expected") = r.expected);
    }, py::arg("groups"), "groups maps a label to (durations, events).");
    m.def("chi_square_sf", &chi_square_sf, py::arg("x"), py::arg("df"));

    m.def("sample_piecewise_exp", [](const std::vector<std::pair<double, double>>& segments, double u) {
        return sample_piecewise_exp(hazard_of(segments), u);
    }, py::arg("segments"), py::arg("u"));
    m.def("true_survival", [](const std::vector<std::pair<double, double>>& segments, double t) {
        return true_survival(hazard_of(segments), t);
    }, py::arg("segments"), py::arg("t"));

    m.def("generate_cohort_csv", [](const std::string& spec_json, std::optional<std::uint64_t> seed) {
        auto spec = cohort_spec_from_json(spec_json);
        if (seed) spec.seed = *seed;
        std::ostringstream out;
        write_events_csv(out, generate_cohort(spec));
        return out.str();
    }, py::arg("spec_json") = "{}", py::arg("seed") = py::none(),
          "Synthetic cohort in the event CSV schema.");

    m.def("analyze_csv", [](const std::string& path, double window, std::optional<std::string> obs_end,
                            const std::string& origin, int exclude_last) {
        const auto parsed = parse_events_file(path);
        const auto histories = build_histories(parsed.events).histories;
        AnalysisConfig cfg;
        cfg.gap.inactivity_window_years = window;
        if (obs_end) {
            cfg.gap.observation_end = Date::parse_or_throw(*obs_end);
        } else if (!parsed.events.empty()) {
            cfg.gap.observation_end = std::max_element(parsed.events.begin(), parsed.events.end(),
                                                       [](const auto& a, const auto& b) { return a.date < b.date; })
                                          ->date;
        }
        const auto o = parse_time_origin(origin);
        if (!o) throw std::invalid_argument("origin must be 'exact' or 'academic-year'");
        cfg.outcome.origin = *o;
        cfg.exclude_last_k = exclude_last;
        const auto an = run_analysis(histories, cfg);
        py::dict d;
        d["record_errors"] = parsed.errors.size();
        d["students"] = an.histories.size();
        d["A"] = outcome_dict(an.a);
        d["B"] = outcome_dict(an.b);
        return d;
    }, py::arg("path"), py::arg("window") = 2.0, py::arg("obs_end") = py::none(), py::arg("origin") = "exact",
          py::arg("exclude_last") = 0);

    m.def("cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli_main(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Run the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
