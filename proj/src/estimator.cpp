#include "trajsurv/estimator.hpp"

#include "trajsurv/csv.hpp"
#include "trajsurv/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <istream>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

namespace trajsurv {

namespace {

struct Obs {
    double time;
    bool event;
};

SurvivalCurve fit_sorted(std::vector<Obs> obs)
{
    if (obs.empty()) throw std::invalid_argument("km_fit: no records");
    for (const auto& o : obs) {
        if (!std::isfinite(o.time) || o.time < 0.0) {
            throw std::invalid_argument("km_fit: durations must be finite and non-negative");
        }
    }
    // Events sort ahead of censorings at equal times.
    std::sort(obs.begin(), obs.end(), [](const Obs& a, const Obs& b) {
        return a.time != b.time ? a.time < b.time : (a.event && !b.event);
    });

    SurvivalCurve c;
    c.n_subjects = obs.size();
    std::size_t at_risk = obs.size();
    double s = 1.0;
    double gw = 0.0;
    // Between censorings the product telescopes to a ratio of risk-set sizes;
    // evaluating it that way keeps uncensored data exactly equal to 1 - ECDF.
    double anchor_s = 1.0;
    std::size_t anchor_n = obs.size();

    for (std::size_t i = 0; i < obs.size();) {
        const double t = obs[i].time;
        std::size_t d = 0, cens = 0;
        for (; i < obs.size() && obs[i].time == t; ++i) (obs[i].event ? d : cens) += 1;

        if (d > 0) {
            const auto n = static_cast<double>(at_risk);
            const auto dd = static_cast<double>(d);
            s = anchor_s * static_cast<double>(at_risk - d) / static_cast<double>(anchor_n);
            gw = d < at_risk ? gw + dd / (n * (n - dd)) : std::numeric_limits<double>::infinity();
            c.times.push_back(t);
            c.n_risk.push_back(at_risk);
            c.n_event.push_back(d);
            c.n_censored.push_back(cens);
            c.survival.push_back(s);
            c.greenwood_sum.push_back(gw);
            c.variance.push_back(s > 0.0 ? s * s * gw : 0.0);
        } else if (c.times.empty()) {
            c.n_censored_before_first += cens;
        } else {
            c.n_censored.back() += cens;
        }
        at_risk -= d + cens;
        if (cens > 0) anchor_s = s, anchor_n = at_risk;
    }
    return c;
}

}  // namespace

std::size_t SurvivalCurve::total_events() const
{
    return std::accumulate(n_event.begin(), n_event.end(), std::size_t{0});
}

std::size_t SurvivalCurve::total_censored() const
{
    return std::accumulate(n_censored.begin(), n_censored.end(), n_censored_before_first);
}

SurvivalCurve km_fit(std::span<const SubjectRecord> records)
{
    std::vector<Obs> obs;
    obs.reserve(records.size());
    for (const auto& r : records) obs.push_back({r.duration_years, r.is_event()});
    return fit_sorted(std::move(obs));
}

SurvivalCurve km_fit(std::span<const double> durations, std::span<const bool> events)
{
    if (durations.size() != events.size()) {
        throw std::invalid_argument("km_fit: durations and events differ in length");
    }
    std::vector<Obs> obs;
    obs.reserve(durations.size());
    for (std::size_t i = 0; i < durations.size(); ++i) obs.push_back({durations[i], events[i]});
    return fit_sorted(std::move(obs));
}

double median_survival(const SurvivalCurve& curve)
{
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve.survival[i] <= 0.5) return curve.times[i];
    }
    return std::numeric_limits<double>::infinity();
}

double survival_at(const SurvivalCurve& curve, double t)
{
    if (!(t >= 0.0)) throw std::invalid_argument("survival_at: time must be non-negative");
    const auto it = std::upper_bound(curve.times.begin(), curve.times.end(), t);
    if (it == curve.times.begin()) return 1.0;
    return curve.survival[static_cast<std::size_t>(it - curve.times.begin()) - 1];
}

std::vector<ConfidenceBand> greenwood_ci(const SurvivalCurve& curve, double level)
{
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("greenwood_ci: level must lie in (0, 1)");
    }
    const double z = boost::math::quantile(boost::math::normal{}, 0.5 + level / 2.0);

    std::vector<ConfidenceBand> bands;
    bands.reserve(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double s = curve.survival[i];
        if (s <= 0.0 || s >= 1.0 || !std::isfinite(curve.greenwood_sum[i])) {
            bands.push_back({s, s});
            continue;
        }
        const double log_s = std::log(s);
        const double se = std::sqrt(curve.greenwood_sum[i]) / std::abs(log_s);
        // Larger log(-log S) means smaller S, so +z gives the lower bound.
        const double lower = std::pow(s, std::exp(z * se));
        const double upper = std::pow(s, std::exp(-z * se));
        bands.push_back({std::clamp(lower, 0.0, 1.0), std::clamp(upper, 0.0, 1.0)});
    }
    return bands;
}

SurvivalSummary summarize(const SurvivalCurve& curve, std::span<const double> probe_times)
{
    SurvivalSummary s;
    s.n_total = curve.n_subjects;
    s.n_events = curve.total_events();
    s.n_censored = curve.total_censored();
    s.median = median_survival(curve);
    for (double t : probe_times) s.probes.emplace_back(t, survival_at(curve, t));
    return s;
}

LogRankResult log_rank(const std::map<std::string, std::vector<SubjectRecord>>& groups)
{
    if (groups.size() < 2) throw std::invalid_argument("log_rank: need at least two groups");

    LogRankResult res;
    const std::size_t k = groups.size();
    std::vector<std::size_t> at_risk;
    struct Tagged {
        double time;
        bool event;
        std::size_t group;
    };
    std::vector<Tagged> all;
    for (const auto& [label, recs] : groups) {
        if (recs.empty()) throw std::invalid_argument("log_rank: group '" + label + "' is empty");
        const std::size_t g = res.labels.size();
        res.labels.push_back(label);
        at_risk.push_back(recs.size());
        for (const auto& r : recs) {
            if (!std::isfinite(r.duration_years) || r.duration_years < 0.0) {
                throw std::invalid_argument("log_rank: durations must be finite and non-negative");
            }
            all.push_back({r.duration_years, r.is_event(), g});
        }
    }
    std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) { return a.time < b.time; });

    res.observed.assign(k, 0.0);
    res.expected.assign(k, 0.0);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                                static_cast<Eigen::Index>(k));
    std::vector<std::size_t> d(k), leaving(k);

    for (std::size_t i = 0; i < all.size();) {
        const double t = all[i].time;
        std::fill(d.begin(), d.end(), 0);
        std::fill(leaving.begin(), leaving.end(), 0);
        for (; i < all.size() && all[i].time == t; ++i) {
            if (all[i].event) ++d[all[i].group];
            ++leaving[all[i].group];
        }
        const double n_total = static_cast<double>(std::accumulate(at_risk.begin(), at_risk.end(), std::size_t{0}));
        const double d_total = static_cast<double>(std::accumulate(d.begin(), d.end(), std::size_t{0}));
        if (d_total > 0.0) {
            const double spread = n_total > 1.0 ? d_total * (n_total - d_total) / (n_total - 1.0) : 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                const double pj = static_cast<double>(at_risk[j]) / n_total;
                res.observed[j] += static_cast<double>(d[j]);
                res.expected[j] += d_total * pj;
                for (std::size_t l = 0; l < k; ++l) {
                    const double pl = static_cast<double>(at_risk[l]) / n_total;
                    cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) +=
                        spread * pj * ((j == l ? 1.0 : 0.0) - pl);
                }
            }
        }
        for (std::size_t j = 0; j < k; ++j) at_risk[j] -= leaving[j];
    }

    const auto m = static_cast<Eigen::Index>(k - 1);
    Eigen::VectorXd diff(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        diff(j) = res.observed[static_cast<std::size_t>(j)] - res.expected[static_cast<std::size_t>(j)];
    }
    const Eigen::MatrixXd v = cov.topLeftCorner(m, m);

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(v);
    cod.setThreshold(1e-12);
    const auto rank = cod.rank();
    if (rank == 0) {
        res.statistic = 0.0;
        res.df = static_cast<int>(m);
        res.p_value = 1.0;
        return res;
    }
    res.statistic = std::max(0.0, diff.dot(cod.solve(diff)));
    res.df = static_cast<int>(rank);
    res.p_value = chi_square_sf(res.statistic, res.df);
    return res;
}

double regularized_gamma_q(double a, double x)
{
    if (!(a > 0.0)) throw std::invalid_argument("regularized_gamma_q: a must be positive");
    if (!(x >= 0.0)) throw std::invalid_argument("regularized_gamma_q: x must be non-negative");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;

    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-16;
    const double log_prefix = a * std::log(x) - x - std::lgamma(a);

    if (x < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        for (int n = 1; n < kMaxIter; ++n) {
            term *= x / (a + n);
            sum += term;
            if (std::abs(term) < std::abs(sum) * kEps) break;
        }
        return std::clamp(1.0 - sum * std::exp(log_prefix), 0.0, 1.0);
    }

    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double dd = 1.0 / b;
    double h = dd;
    for (int n = 1; n < kMaxIter; ++n) {
        const double an = -n * (n - a);
        b += 2.0;
        dd = an * dd + b;
        if (std::abs(dd) < kTiny) dd = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        dd = 1.0 / dd;
        const double delta = dd * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return std::clamp(std::exp(log_prefix) * h, 0.0, 1.0);
}

double chi_square_sf(double x, double df)
{
    if (!(df > 0.0)) throw std::invalid_argument("chi_square_sf: df must be positive");
    if (!(x >= 0.0)) throw std::invalid_argument("chi_square_sf: x must be non-negative");
    return regularized_gamma_q(df / 2.0, x / 2.0);
}

void write_curve_csv(std::ostream& out, const SurvivalCurve& curve, double level)
{
    const auto bands = greenwood_ci(curve, level);
    out << "time,n_risk,n_events,n_censored,survival,ci_lower,ci_upper\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        out << csv::fixed(curve.times[i]) << ',' << curve.n_risk[i] << ',' << curve.n_event[i]
            << ',' << curve.n_censored[i] << ',' << csv::fixed(curve.survival[i]) << ','
            << csv::fixed(bands[i].lower) << ',' << csv::fixed(bands[i].upper) << '\n';
    }
}

std::vector<CurveRow> read_curve_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw InputError("curve file is empty");
    const auto header = csv::split_line(line);
    const std::vector<std::string> expected{"time",     "n_risk",   "n_events", "n_censored",
                                            "survival", "ci_lower", "ci_upper"};
    if (header != expected) throw InputError("unexpected curve header '" + line + "'");

    std::vector<CurveRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = csv::split_line(line);
        if (f.size() != expected.size()) {
            throw InputError("curve line " + std::to_string(lineno) + ": expected 7 fields");
        }
        try {
            rows.push_back(CurveRow{std::stod(f[0]), std::stoul(f[1]), std::stoul(f[2]),
                                    std::stoul(f[3]), std::stod(f[4]), std::stod(f[5]),
                                    std::stod(f[6])});
        } catch (const std::exception&) {
            throw InputError("curve line " + std::to_string(lineno) + ": malformed number");
        }
    }
    return rows;
}

}  // namespace trajsurv
