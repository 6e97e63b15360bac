#include "trajsurv/report.hpp"

#include "trajsurv/csv.hpp"
#include "trajsurv/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

namespace trajsurv {

// ---------------------------------------------------------------- mobility

void MobilityTable::check() const
{
    for (const auto& r : rows) {
        if (r.major_switch + r.plan_change_same_title + r.reentry_same_plan != r.total) {
            throw ReportConsistencyError("mobility row " + std::to_string(r.year) +
                                         ": total does not equal the sum of its kinds");
        }
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i - 1].year >= rows[i].year) throw ReportConsistencyError("mobility rows out of order");
    }
}

MobilityTable mobility_table(std::span<const Transition> transitions)
{
    std::map<int, MobilityRow> by_year;
    for (const auto& t : transitions) {
        auto& row = by_year[t.date.year()];
        row.year = t.date.year();
        switch (t.kind) {
        case TransitionKind::major_switch: ++row.major_switch; break;
        case TransitionKind::plan_change_same_title: ++row.plan_change_same_title; break;
        case TransitionKind::reentry_same_plan: ++row.reentry_same_plan; break;
        }
        ++row.total;
    }
    MobilityTable table;
    for (auto& [year, row] : by_year) table.rows.push_back(row);
    return table;
}

MobilityTable mobility_table(std::span<const Trajectory> trajectories)
{
    std::vector<Transition> all;
    for (const auto& t : trajectories) all.insert(all.end(), t.transitions.begin(), t.transitions.end());
    return mobility_table(all);
}

std::vector<PeriodMobilityRow> mobility_by_period(const MobilityTable& table)
{
    std::map<EntryPeriod, PeriodMobilityRow> acc;
    for (const auto& r : table.rows) {
        const EntryPeriod p = assign_entry_period(r.year);
        auto& row = acc[p];
        row.period = p;
        row.major_switch += r.major_switch;
        row.plan_change_same_title += r.plan_change_same_title;
        row.reentry_same_plan += r.reentry_same_plan;
        row.total += r.total;
    }
    std::vector<PeriodMobilityRow> out;
    for (auto& [p, row] : acc) out.push_back(row);
    return out;
}

void write_mobility_csv(std::ostream& out, const MobilityTable& table)
{
    table.check();
    out << "transition_year,major_switch,plan_change_same_title,reentry_same_plan,total\n";
    for (const auto& r : table.rows) {
        out << r.year << ',' << r.major_switch << ',' << r.plan_change_same_title << ','
            << r.reentry_same_plan << ',' << r.total << '\n';
    }
}

std::string mobility_json(const MobilityTable& table)
{
    table.check();
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : table.rows) {
        rows.push_back({{"transition_year", r.year},
                        {"major_switch", r.major_switch},
                        {"plan_change_same_title", r.plan_change_same_title},
                        {"reentry_same_plan", r.reentry_same_plan},
                        {"total", r.total}});
    }
    return rows.dump(2);
}

// ----------------------------------------------------------------- summary

namespace {

std::string probe_header(double t)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "S_%gy", t);
    return buf;
}

}  // namespace

std::string format_median(double median, int digits) { return csv::fixed(median, digits); }

std::string format_percent(std::size_t part, std::size_t total)
{
    if (total == 0) return "n/a";
    return csv::fixed(100.0 * static_cast<double>(part) / static_cast<double>(total), 1) + "%";
}

void check_summary_rows(std::span<const SummaryRow> rows)
{
    const SummaryRow* global = nullptr;
    std::size_t strata_total = 0;
    bool has_strata = false;
    for (const auto& r : rows) {
        if (r.n_events + r.n_censored != r.n_total) {
            throw ReportConsistencyError("summary row " + std::string(to_string(r.outcome)) + " " +
                                         r.stratum_value + ": n_events + n_censored != n_total");
        }
        if (r.stratum == "Global") {
            global = &r;
        } else {
            strata_total += r.n_total;
            has_strata = true;
        }
    }
    if (global && has_strata && strata_total != global->n_total) {
        throw ReportConsistencyError("strata totals (" + std::to_string(strata_total) +
                                     ") do not sum to the Global total (" +
                                     std::to_string(global->n_total) + ")");
    }
}

std::vector<SummaryRow> summary_table(OutcomeId outcome, const SurvivalSummary& global,
                                      std::span<const StratumSummary> periods)
{
    std::vector<SummaryRow> rows;
    auto make = [&](std::string stratum, std::string value, const SurvivalSummary& s) {
        return SummaryRow{outcome, std::move(stratum), std::move(value), s.n_total, s.n_events,
                          s.n_censored, s.median, s.probes};
    };
    rows.push_back(make("Global", std::string(kGlobalStratum), global));
    for (const auto& p : periods) {
        rows.push_back(make("Entry Period", std::string(period_display_name(p.period)), p.summary));
    }
    check_summary_rows(rows);
    return rows;
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows)
{
    check_summary_rows(rows);
    out << "outcome,stratum,stratum_value,n_total,n_events,n_censored,median_survival_time";
    if (!rows.empty()) {
        for (const auto& [t, s] : rows.front().probes) out << ',' << probe_header(t);
    }
    out << '\n';
    for (const auto& r : rows) {
        out << to_string(r.outcome) << ',' << csv::escape(r.stratum) << ',' << csv::escape(r.stratum_value)
            << ',' << r.n_total << ',' << r.n_events << ',' << r.n_censored << ','
            << format_median(r.median, 6);
        for (const auto& [t, s] : r.probes) out << ',' << csv::fixed(s, 6);
        out << '\n';
    }
}

std::string summary_text(std::span<const SummaryRow> rows)
{
    check_summary_rows(rows);
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header{"outcome",  "stratum",    "stratum_value",       "n_total",
                                    "n_events", "n_censored", "median_survival_time"};
    if (!rows.empty()) {
        for (const auto& [t, s] : rows.front().probes) header.push_back(probe_header(t));
    }
    cells.push_back(header);
    for (const auto& r : rows) {
        std::vector<std::string> line{std::string(to_string(r.outcome)), r.stratum, r.stratum_value,
                                      std::to_string(r.n_total), std::to_string(r.n_events),
                                      std::to_string(r.n_censored), format_median(r.median, 2)};
        for (const auto& [t, s] : r.probes) line.push_back(csv::fixed(s, 4));
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size() && c < width.size(); ++c) width[c] = std::max(width[c], line[c].size());
    }
    std::string out;
    for (const auto& line : cells) {
        std::string text;
        for (std::size_t c = 0; c < line.size(); ++c) {
            if (c > 0) text += "  ";
            text += line[c];
            if (c + 1 < line.size()) text.append(width[c] - line[c].size(), ' ');
        }
        out += text + "\n";
    }
    return out;
}

std::string summary_json(std::span<const SummaryRow> rows)
{
    check_summary_rows(rows);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json probes = nlohmann::ordered_json::object();
        for (const auto& [t, s] : r.probes) probes[probe_header(t)] = s;
        nlohmann::ordered_json median =
            std::isinf(r.median) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(r.median);
        arr.push_back({{"outcome", std::string(to_string(r.outcome))},
                       {"stratum", r.stratum},
                       {"stratum_value", r.stratum_value},
                       {"n_total", r.n_total},
                       {"n_events", r.n_events},
                       {"n_censored", r.n_censored},
                       {"median_survival_time", median},
                       {"probes", probes}});
    }
    return arr.dump(2);
}

std::string narrative_summary(std::span<const SummaryRow> rows, const std::optional<LogRankResult>& test)
{
    check_summary_rows(rows);
    const SummaryRow* global = nullptr;
    for (const auto& r : rows) {
        if (r.stratum == "Global") global = &r;
    }
    std::ostringstream out;
    for (const auto& r : rows) {
        out << to_string(r.outcome) << ' ' << r.stratum_value << ": events "
            << format_percent(r.n_events, r.n_total) << " (" << r.n_events << '/' << r.n_total
            << "), censored " << format_percent(r.n_censored, r.n_total) << " (" << r.n_censored << '/'
            << r.n_total << "), median " << format_median(r.median, 2);
        if (global && &r != global) {
            out << ", median difference vs Global ";
            if (std::isinf(r.median) || std::isinf(global->median)) {
                out << (std::isinf(r.median) && std::isinf(global->median) ? "0.00" : "n/a");
            } else {
                const double d = r.median - global->median;
                out << (d >= 0 ? "+" : "") << csv::fixed(d, 2);
            }
        }
        out << '\n';
    }
    if (test) {
        out << "log-rank across strata (secondary): chi2 = " << csv::fixed(test->statistic, 3)
            << ", df = " << test->df << ", p = ";
        if (test->p_value < 1e-4) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2e", test->p_value);
            out << buf;
        } else {
            out << csv::fixed(test->p_value, 4);
        }
        out << '\n';
    }
    return out.str();
}

// --------------------------------------------------------------------- svg

PlotSeries plot_series(std::string label, const SurvivalCurve& curve, std::optional<double> ci_level)
{
    PlotSeries s{std::move(label), curve.times, curve.survival, {}, {}};
    if (ci_level) {
        for (const auto& b : greenwood_ci(curve, *ci_level)) {
            s.lower.push_back(b.lower);
            s.upper.push_back(b.upper);
        }
    }
    return s;
}

PlotSeries plot_series(std::string label, std::span<const CurveRow> rows)
{
    PlotSeries s;
    s.label = std::move(label);
    for (const auto& r : rows) {
        s.times.push_back(r.time);
        s.survival.push_back(r.survival);
        s.lower.push_back(r.ci_lower);
        s.upper.push_back(r.ci_upper);
    }
    return s;
}

std::vector<std::pair<double, double>> step_vertices(std::span<const double> times,
                                                     std::span<const double> values, double x_max)
{
    std::vector<std::pair<double, double>> v{{0.0, 1.0}};
    double prev = 1.0;
    for (std::size_t i = 0; i < times.size() && times[i] <= x_max; ++i) {
        v.emplace_back(times[i], prev);
        v.emplace_back(times[i], values[i]);
        prev = values[i];
    }
    v.emplace_back(x_max, prev);
    return v;
}

namespace {

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string xml_escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string num(double v) { return csv::fixed(v, 2); }

double tick_step(double range)
{
    for (double step : {0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
        if (range / step <= 12.0) return step;
    }
    return std::ceil(range / 10.0);
}

}  // namespace

std::string render_svg(std::span<const PlotSeries> series, const SvgOptions& options)
{
    if (series.empty()) throw std::invalid_argument("render_svg: no curves");

    double x_max = 1.0;
    if (options.x_max) {
        x_max = *options.x_max;
    } else {
        for (const auto& s : series) {
            if (!s.times.empty()) x_max = std::max(x_max, s.times.back());
        }
        x_max = std::ceil(x_max);
    }
    const double left = 70, right = 170, top = options.title.empty() ? 20 : 40, bottom = 60;
    const double pw = options.width - left - right;
    const double ph = options.height - top - bottom;
    auto sx = [&](double x) { return left + pw * x / x_max; };
    auto sy = [&](double y) { return top + ph * (1.0 - y); };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << options.width
      << "\" height=\"" << options.height << "\" viewBox=\"0 0 " << options.width << ' '
      << options.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << options.width << "\" height=\"" << options.height
      << "\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        o << "<text x=\"" << num(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
          << xml_escape(options.title) << "</text>\n";
    }

    // axes and grid
    o << "<g class=\"axes\" stroke=\"#000\" stroke-width=\"1\">\n"
      << "<line x1=\"" << num(left) << "\" y1=\"" << num(sy(0)) << "\" x2=\"" << num(left + pw)
      << "\" y2=\"" << num(sy(0)) << "\"/>\n"
      << "<line x1=\"" << num(left) << "\" y1=\"" << num(sy(0)) << "\" x2=\"" << num(left)
      << "\" y2=\"" << num(sy(1)) << "\"/>\n</g>\n";
    o << "<g class=\"ticks\">\n";
    const double step = tick_step(x_max);
    for (int i = 0; i * step <= x_max + 1e-9; ++i) {
        const double x = i * step;
        char label[32];
        std::snprintf(label, sizeof label, "%g", x);
        o << "<line x1=\"" << num(sx(x)) << "\" y1=\"" << num(sy(0)) << "\" x2=\"" << num(sx(x))
          << "\" y2=\"" << num(sy(0) + 5) << "\" stroke=\"#000\"/>"
          << "<text x=\"" << num(sx(x)) << "\" y=\"" << num(sy(0) + 18)
          << "\" text-anchor=\"middle\">" << label << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const double y = i * 0.25;
        o << "<line x1=\"" << num(left) << "\" y1=\"" << num(sy(y)) << "\" x2=\"" << num(left + pw)
          << "\" y2=\"" << num(sy(y)) << "\" stroke=\"#ddd\"/>"
          << "<text x=\"" << num(left - 8) << "\" y=\"" << num(sy(y) + 4) << "\" text-anchor=\"end\">"
          << csv::fixed(y, 2) << "</text>\n";
    }
    o << "</g>\n"
      << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(options.height - 15)
      << "\" text-anchor=\"middle\">" << xml_escape(options.x_label) << "</text>\n"
      << "<text x=\"18\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << num(top + ph / 2) << ")\">" << xml_escape(options.y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* colour = kPalette[k % kPalette.size()];
        o << "<g class=\"series\" data-label=\"" << xml_escape(s.label) << "\">\n";
        if (options.show_ci && s.lower.size() == s.times.size() && !s.times.empty()) {
            const auto up = step_vertices(s.times, s.upper, x_max);
            const auto lo = step_vertices(s.times, s.lower, x_max);
            o << "<path class=\"ci\" fill=\"" << colour << "\" fill-opacity=\"0.15\" stroke=\"none\" d=\"M";
            for (const auto& [x, y] : up) o << ' ' << num(sx(x)) << ' ' << num(sy(y));
            for (auto it = lo.rbegin(); it != lo.rend(); ++it) o << " L " << num(sx(it->first)) << ' ' << num(sy(it->second));
            o << " Z\"/>\n";
        }
        const auto v = step_vertices(s.times, s.survival, x_max);
        o << "<path class=\"km\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.8\" d=\"M "
          << num(sx(v.front().first)) << ' ' << num(sy(v.front().second));
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (v[i].second == v[i - 1].second) {
                if (v[i].first != v[i - 1].first) o << " H " << num(sx(v[i].first));
            } else {
                o << " V " << num(sy(v[i].second));
            }
        }
        o << "\"/>\n";
        const double ly = top + 10 + 20.0 * static_cast<double>(k);
        o << "<rect class=\"legend\" x=\"" << num(left + pw + 15) << "\" y=\"" << num(ly - 8)
          << "\" width=\"14\" height=\"3\" fill=\"" << colour << "\"/>"
          << "<text x=\"" << num(left + pw + 35) << "\" y=\"" << num(ly) << "\">" << xml_escape(s.label)
          << "</text>\n</g>\n";
    }
    o << "</svg>\n";
    return o.str();
}

// ---------------------------------------------------------------- manifest

std::string sha256_hex(std::string_view bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string sha256_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(bytes);
}

}  // namespace trajsurv
