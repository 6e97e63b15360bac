#include "trajsurv/cli.hpp"

#include "trajsurv/csv.hpp"
#include "trajsurv/error.hpp"
#include "trajsurv/pipeline.hpp"
#include "trajsurv/report.hpp"
#include "trajsurv/sensitivity.hpp"
#include "trajsurv/synth.hpp"
#include "trajsurv/version.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace trajsurv {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct CommonOptions {
    std::string input;
    std::string out_dir = ".";
    std::string format = "csv";
    double window = 2.0;
    std::string obs_end;
    std::string origin = "exact";
    unsigned academic_month = 1;
    int exclude_last = 0;
    std::string probes;
    double threshold = kDefaultStabilityThreshold;
};

std::vector<double> parse_probe_list(const std::string& text)
{
    std::vector<double> out;
    for (const auto& field : csv::split_line(text)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(field, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != field.size() || !(v >= 0.0) || !std::isfinite(v)) {
            throw CLI::ValidationError("--probes", "'" + field + "' is not a non-negative number");
        }
        out.push_back(v);
    }
    return out;
}

class OutputDir {
public:
    explicit OutputDir(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

    void write(const std::string& name, const std::string& content)
    {
        const fs::path p = dir_ / name;
        std::ofstream f(p, std::ios::binary);
        if (!f) throw InputError("cannot write '" + p.string() + "'");
        f << content;
        if (!f) throw InputError("write failed for '" + p.string() + "'");
        written_.push_back(name);
    }

    template <typename Fn>
    void write_with(const std::string& name, Fn&& fn)
    {
        std::ostringstream ss;
        fn(ss);
        write(name, ss.str());
    }

    [[nodiscard]] std::vector<std::string> files() const
    {
        auto f = written_;
        std::sort(f.begin(), f.end());
        return f;
    }

private:
    fs::path dir_;
    std::vector<std::string> written_;
};

struct LoadedInput {
    ParseResult parsed;
    HistoriesResult histories;
    std::string sha256;
};

LoadedInput load_input(const std::string& path, std::ostream& err)
{
    LoadedInput in;
    in.parsed = parse_events_file(path);
    in.sha256 = sha256_file(path);
    for (const auto& w : in.parsed.warnings) err << "warning: " << w << '\n';
    in.histories = build_histories(in.parsed.events);
    return in;
}

std::string error_lines(const LoadedInput& in)
{
    std::string s;
    for (const auto& e : in.parsed.errors) s += to_json_line(e) + "\n";
    for (const auto& e : in.histories.skipped) s += to_json_line(e) + "\n";
    return s;
}

AnalysisConfig make_config(const CommonOptions& o, const LoadedInput& in)
{
    AnalysisConfig cfg;
    cfg.gap.inactivity_window_years = o.window;
    if (!o.obs_end.empty()) {
        cfg.gap.observation_end = Date::parse_or_throw(o.obs_end);
    } else {
        // Default: the latest event date in the input.
        Date latest = in.parsed.events.empty() ? *Date::from_ymd(2019, 12, 31) : in.parsed.events.front().date;
        for (const auto& e : in.parsed.events) latest = std::max(latest, e.date);
        cfg.gap.observation_end = latest;
    }
    cfg.outcome.origin = *parse_time_origin(o.origin);
    cfg.outcome.academic_year_start_month = o.academic_month;
    cfg.exclude_last_k = o.exclude_last;
    if (!o.probes.empty()) cfg.probes_a = cfg.probes_b = parse_probe_list(o.probes);
    return cfg;
}

ojson config_json(const AnalysisConfig& cfg)
{
    return ojson{{"inactivity_window_years", cfg.gap.inactivity_window_years},
                 {"observation_end", cfg.gap.observation_end.to_string()},
                 {"time_origin", std::string(to_string(cfg.outcome.origin))},
                 {"academic_year_start_month", cfg.outcome.academic_year_start_month},
                 {"exclude_last_k", cfg.exclude_last_k},
                 {"probes_a", cfg.probes_a},
                 {"probes_b", cfg.probes_b},
                 {"ci_level", cfg.ci_level}};
}

ojson counts_json(const OutcomeDataset& d)
{
    return ojson{{"n_total", d.n_total()}, {"n_events", d.n_events()}, {"n_censored", d.n_censored()}};
}

std::vector<SummaryRow> rows_for(const OutcomeAnalysis& oa)
{
    std::vector<StratumSummary> periods;
    for (const auto& s : oa.strata) {
        if (auto p = parse_entry_period(s.label)) periods.push_back({*p, s.summary});
    }
    return summary_table(oa.dataset.outcome, oa.global.summary, periods);
}

ojson log_rank_json(const std::optional<LogRankResult>& lr)
{
    if (!lr) return nullptr;
    ojson groups = ojson::array();
    for (std::size_t i = 0; i < lr->labels.size(); ++i) {
        groups.push_back({{"stratum", lr->labels[i]}, {"observed", lr->observed[i]}, {"expected", lr->expected[i]}});
    }
    return ojson{{"statistic", lr->statistic}, {"df", lr->df}, {"p_value", lr->p_value}, {"groups", groups}};
}

void emit_outcome(OutputDir& out, const OutcomeAnalysis& oa, const AnalysisConfig& cfg,
                  const std::string& format, std::string& text)
{
    const std::string id(to_string(oa.dataset.outcome));
    out.write_with("outcome_" + id + ".csv", [&](std::ostream& o) { write_outcome_csv(o, oa.dataset); });

    const auto rows = rows_for(oa);
    if (format == "json") {
        out.write("summary_" + id + ".json", summary_json(rows) + "\n");
    } else {
        out.write_with("summary_" + id + ".csv", [&](std::ostream& o) { write_summary_csv(o, rows); });
    }
    text += summary_text(rows) + "\n" + narrative_summary(rows, oa.log_rank) + "\n";

    std::vector<PlotSeries> by_period;
    out.write_with("curve_" + id + "_All.csv",
                   [&](std::ostream& o) { write_curve_csv(o, oa.global.curve, cfg.ci_level); });
    for (const auto& s : oa.strata) {
        out.write_with("curve_" + id + "_" + s.label + ".csv",
                       [&](std::ostream& o) { write_curve_csv(o, s.curve, cfg.ci_level); });
        by_period.push_back(plot_series(s.label, s.curve, std::nullopt));
    }

    const bool dropout = oa.dataset.outcome == OutcomeId::A;
    SvgOptions opt;
    opt.y_label = dropout ? "Probability of remaining enrolled" : "Probability of remaining in first major";
    opt.title = dropout ? "Time to definitive dropout" : "Time to first major switch";
    const std::vector<PlotSeries> global{plot_series("All", oa.global.curve, cfg.ci_level)};
    out.write("km_" + id + ".svg", render_svg(global, opt));
    if (!by_period.empty()) {
        opt.title += " by entry period";
        opt.show_ci = false;
        out.write("km_" + id + "_by_period.svg", render_svg(by_period, opt));
    }
}

int run_ingest(const CommonOptions& o, std::ostream& out, std::ostream& err)
{
    const auto in = load_input(o.input, err);
    OutputDir dir(o.out_dir);
    if (o.format == "json") {
        ojson arr = ojson::array();
        for (const auto& h : in.histories.histories) {
            arr.push_back({{"student_id", h.student_id},
                           {"first_enrolment_date", h.first_enrolment_date.to_string()},
                           {"entry_year", h.entry_year},
                           {"entry_period", std::string(to_string(h.entry_period))},
                           {"first_major", h.first_major},
                           {"graduated_on", h.graduated_on ? ojson(h.graduated_on->to_string()) : ojson(nullptr)},
                           {"n_events", h.events.size()}});
        }
        dir.write("histories.json", arr.dump(2) + "\n");
    } else {
        dir.write_with("histories.csv", [&](std::ostream& f) {
            f << "student_id,first_enrolment_date,entry_year,entry_period,first_major,graduated_on,n_events\n";
            for (const auto& h : in.histories.histories) {
                f << csv::escape(h.student_id) << ',' << h.first_enrolment_date.to_string() << ','
                  << h.entry_year << ',' << to_string(h.entry_period) << ',' << csv::escape(h.first_major)
                  << ',' << (h.graduated_on ? h.graduated_on->to_string() : "") << ',' << h.events.size()
                  << '\n';
            }
        });
    }
    dir.write("errors.jsonl", error_lines(in));

    out << "rows: " << in.parsed.data_rows << ", events: " << in.parsed.events.size()
        << ", record errors: " << in.parsed.errors.size() << '\n'
        << "students: " << in.histories.histories.size() << ", skipped: " << in.histories.skipped.size()
        << '\n';
    const bool clean = in.parsed.errors.empty() && in.histories.skipped.empty();
    if (!clean) err << "validation problems written to " << (fs::path(o.out_dir) / "errors.jsonl").string() << '\n';
    return clean ? kExitOk : kExitValidation;
}

int run_analyze(const CommonOptions& o, const std::string& command, std::ostream& out, std::ostream& err)
{
    const auto in = load_input(o.input, err);
    const AnalysisConfig cfg = make_config(o, in);
    const Analysis an = run_analysis(in.histories.histories, cfg);

    OutputDir dir(o.out_dir);
    dir.write("errors.jsonl", error_lines(in));
    dir.write_with("spells.csv", [&](std::ostream& f) { write_spells_csv(f, an.trajectories); });
    dir.write_with("transitions.csv", [&](std::ostream& f) { write_transitions_csv(f, an.trajectories); });

    const auto mobility = mobility_table(an.trajectories);
    if (o.format == "json") {
        dir.write("mobility.json", mobility_json(mobility) + "\n");
    } else {
        dir.write_with("mobility.csv", [&](std::ostream& f) { write_mobility_csv(f, mobility); });
    }
    dir.write_with("mobility_by_period.csv", [&](std::ostream& f) {
        f << "entry_period,major_switch,plan_change_same_title,reentry_same_plan,total\n";
        for (const auto& r : mobility_by_period(mobility)) {
            f << period_display_name(r.period) << ',' << r.major_switch << ',' << r.plan_change_same_title
              << ',' << r.reentry_same_plan << ',' << r.total << '\n';
        }
    });

    std::string text;
    emit_outcome(dir, an.a, cfg, o.format, text);
    emit_outcome(dir, an.b, cfg, o.format, text);
    dir.write("summary.txt", text);
    dir.write("logrank.json",
              ojson{{"A", log_rank_json(an.a.log_rank)}, {"B", log_rank_json(an.b.log_rank)}}.dump(2) + "\n");

    std::size_t spells = 0, transitions = 0;
    for (const auto& t : an.trajectories) spells += t.spells.size(), transitions += t.transitions.size();
    ojson manifest{{"tool", "trajsurv"},
                   {"version", kVersion},
                   {"command", command},
                   {"config", config_json(cfg)},
                   {"input", {{"path", o.input},
                              {"sha256", in.sha256},
                              {"data_rows", in.parsed.data_rows},
                              {"events", in.parsed.events.size()},
                              {"record_errors", in.parsed.errors.size()}}},
                   {"counts", {{"students", in.histories.histories.size()},
                               {"skipped", in.histories.skipped.size()},
                               {"excluded_late_entrants", an.excluded_late_entrants},
                               {"analysed", an.histories.size()},
                               {"spells", spells},
                               {"transitions", transitions},
                               {"outcome_A", counts_json(an.a.dataset)},
                               {"outcome_B", counts_json(an.b.dataset)}}}};
    auto files = dir.files();
    files.push_back("manifest.json");
    std::sort(files.begin(), files.end());
    manifest["outputs"] = files;
    dir.write("manifest.json", manifest.dump(2) + "\n");

    out << text;
    return kExitOk;
}

int run_sensitivity(const CommonOptions& o, std::ostream& out, std::ostream& err)
{
    const auto in = load_input(o.input, err);
    const AnalysisConfig cfg = make_config(o, in);
    const auto report = run_standard_suite(in.histories.histories, cfg, o.threshold);

    OutputDir dir(o.out_dir);
    dir.write("sensitivity.json", report.to_json() + "\n");
    std::ostringstream text;
    text << "variant                  outcome  stratum  n_events  median  delta_median  delta_events  sup_dist  stable\n";
    for (const auto& r : report.rows) {
        char line[256];
        std::snprintf(line, sizeof line, "%-24s %-8s %-8s %9zu %7s %13s %13lld %9s  %s\n", r.variant.c_str(),
                      std::string(to_string(r.outcome)).c_str(), r.stratum.c_str(), r.summary.n_events,
                      format_median(r.summary.median, 2).c_str(), format_median(r.delta_median, 2).c_str(),
                      static_cast<long long>(r.delta_events), csv::fixed(r.sup_distance, 4).c_str(),
                      r.stable ? "yes" : "no");
        text << line;
    }
    dir.write("sensitivity.txt", text.str());
    out << text.str();
    return kExitOk;
}

int run_simulate(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<std::size_t> n,
                 const std::string& out_path, std::ostream& out)
{
    CohortSpec spec = config_path.empty() ? CohortSpec{} : cohort_spec_from_file(config_path);
    if (seed) spec.seed = *seed;
    if (n) spec.n_students = *n;
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
    const auto events = generate_cohort(spec);
    const fs::path p(out_path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw InputError("cannot write '" + out_path + "'");
    write_events_csv(f, events);
    out << "wrote " << events.size() << " events for " << spec.n_students << " students to " << out_path << '\n';
    return kExitOk;
}

int run_report(const std::vector<std::string>& curves, const std::string& labels_text, const CommonOptions& o,
               const std::string& title, std::ostream& out)
{
    std::vector<std::string> labels = labels_text.empty() ? std::vector<std::string>{} : csv::split_line(labels_text);
    if (!labels.empty() && labels.size() != curves.size()) {
        throw CLI::ValidationError("--labels", "needs one label per curve file");
    }
    const auto probes = o.probes.empty() ? kDefaultProbesA : parse_probe_list(o.probes);

    std::vector<PlotSeries> series;
    std::ostringstream text;
    text << "curve";
    for (double t : probes) text << "  S(" << t << ")";
    text << "  median\n";
    for (std::size_t i = 0; i < curves.size(); ++i) {
        std::ifstream f(curves[i]);
        if (!f) throw InputError("cannot open '" + curves[i] + "'");
        const auto rows = read_curve_csv(f);
        const std::string label = labels.empty() ? fs::path(curves[i]).stem().string() : labels[i];
        series.push_back(plot_series(label, rows));

        double median = std::numeric_limits<double>::infinity();
        for (const auto& r : rows) {
            if (r.survival <= 0.5) {
                median = r.time;
                break;
            }
        }
        text << label;
        for (double t : probes) {
            double s = 1.0;
            for (const auto& r : rows) {
                if (r.time <= t) s = r.survival;
            }
            text << "  " << csv::fixed(s, 4);
        }
        text << "  " << format_median(median, 2) << '\n';
    }
    OutputDir dir(o.out_dir);
    SvgOptions opt;
    opt.title = title;
    opt.show_ci = series.size() == 1;
    dir.write("report.svg", render_svg(series, opt));
    dir.write("report.txt", text.str());
    out << text.str();
    return kExitOk;
}

void add_analysis_options(CLI::App* sub, CommonOptions& o)
{
    sub->add_option("input", o.input, "Event CSV (student_id,date,kind,major_code,plan_code)")->required();
    sub->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--format", o.format, "Table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--window", o.window, "Inactivity window in years")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_option("--obs-end", o.obs_end, "Observation end YYYY-MM-DD (default: latest event date)")
        ->check([](const std::string& s) { return Date::parse(s) ? std::string{} : "invalid date '" + s + "'"; });
    sub->add_option("--origin", o.origin, "Time origin")
        ->check(CLI::IsMember({"exact", "academic-year"}))
        ->capture_default_str();
    sub->add_option("--academic-year-start-month", o.academic_month, "First month of the academic year")
        ->check(CLI::Range(1u, 12u))
        ->capture_default_str();
    sub->add_option("--exclude-last", o.exclude_last, "Drop entrants from the last k entry years")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub->add_option("--probes", o.probes, "Comma-separated probe times in years (both outcomes)");
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Student trajectory reconstruction and survival analysis", "trajsurv"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    CommonOptions o;
    auto* ingest = app.add_subcommand("ingest", "Validate an event CSV and emit per-student histories");
    ingest->add_option("input", o.input, "Event CSV")->required();
    ingest->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    ingest->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    auto* analyze = app.add_subcommand("analyze", "Full pipeline: spells, transitions, outcomes, curves, tables");
    add_analysis_options(analyze, o);

    auto* sensitivity = app.add_subcommand("sensitivity", "Window, time-origin and late-entrant variants");
    add_analysis_options(sensitivity, o);
    sensitivity->add_option("--threshold", o.threshold, "Median difference (years) below which a variant is stable")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    std::string config_path, sim_out = "cohort.csv";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_students;
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic cohort as an event CSV");
    simulate->add_option("--config", config_path, "Cohort spec JSON")->check(CLI::ExistingFile);
    simulate->add_option("--seed", seed, "64-bit seed (overrides the config)");
    simulate->add_option("--n", n_students, "Number of students (overrides the config)")->check(CLI::PositiveNumber);
    simulate->add_option("--out", sim_out, "Output CSV path")->capture_default_str();

    std::vector<std::string> curve_files;
    std::string labels, title;
    auto* report = app.add_subcommand("report", "Render SVG and a probe table from saved curve CSVs");
    report->add_option("curves", curve_files, "Curve CSV files")->required();
    report->add_option("--labels", labels, "Comma-separated legend labels");
    report->add_option("--title", title, "Plot title");
    report->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
    report->add_option("--probes", o.probes, "Comma-separated probe times in years");

    std::vector<std::string> argv_store{"trajsurv"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (ingest->parsed()) return run_ingest(o, out, err);
        if (analyze->parsed()) return run_analyze(o, "analyze", out, err);
        if (sensitivity->parsed()) return run_sensitivity(o, out, err);
        if (simulate->parsed()) return run_simulate(config_path, seed, n_students, sim_out, out);
        if (report->parsed()) return run_report(curve_files, labels, o, title, out);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ReportConsistencyError& e) {
        err << "inconsistent report, nothing further written: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitUsage;
}

}  // namespace trajsurv
