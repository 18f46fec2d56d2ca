#include "mecheff/cli/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "mecheff/analysis.hpp"
#include "mecheff/format.hpp"

namespace mecheff::cli {

namespace {

using nlohmann::json;

constexpr std::pair<ExperimentKind, std::string_view> kNames[] = {
    {ExperimentKind::reserve, "reserve"}, {ExperimentKind::gainloss, "gainloss"},
    {ExperimentKind::bounds, "bounds"},   {ExperimentKind::thm1, "thm1"},
    {ExperimentKind::thm2, "thm2"},       {ExperimentKind::thm3, "thm3"},
    {ExperimentKind::regular_cx, "regular_cx"}, {ExperimentKind::ratio, "ratio"},
    {ExperimentKind::bk, "bk"},
};

int parse_positive(std::string_view s)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v < 1)
        throw ConfigError("expected a positive integer, got '" + std::string(s) + "'");
    return v;
}

// One CSV row, mirrored as a JSON object for the summary.
class Row {
public:
    explicit Row(std::string_view header)
    {
        std::size_t start = 0;
        for (;;) {
            const auto pos = header.find(',', start);
            names_.emplace_back(header.substr(start, pos - start));
            if (pos == std::string_view::npos) break;
            start = pos + 1;
        }
    }

    Row& add(double v) { return push(format_double(v), v); }
    Row& add(int v) { return push(std::to_string(v), v); }
    Row& add(std::int64_t v) { return push(std::to_string(v), v); }
    Row& add(std::uint64_t v) { return push(std::to_string(v), v); }
    Row& add(bool v) { return push(v ? "true" : "false", v); }
    Row& add(const std::string& v) { return push(v, v); }

    std::string line() const
    {
        std::string out;
        for (std::size_t i = 0; i < cells_.size(); ++i) {
            if (i) out += ',';
            out += cells_[i];
        }
        return out + '\n';
    }

    json object() const
    {
        json o = json::object();
        for (std::size_t i = 0; i < values_.size(); ++i) o[names_[i]] = values_[i];
        return o;
    }

private:
    Row& push(std::string text, json value)
    {
        if (cells_.size() >= names_.size()) throw std::logic_error("too many CSV cells");
        cells_.push_back(std::move(text));
        values_.push_back(std::move(value));
        return *this;
    }

    std::vector<std::string> names_;
    std::vector<std::string> cells_;
    std::vector<json> values_;
};

class ReportBuilder {
public:
    explicit ReportBuilder(ExperimentKind kind) : kind_(kind) { csv_ << csv_header(kind) << '\n'; }

    Row row() const { return Row(csv_header(kind_)); }

    void commit(const Row& r, bool pass)
    {
        csv_ << r.line();
        details_.push_back(r.object());
        pass_ = pass_ && pass;
    }

    ExperimentReport finish(json params)
    {
        ExperimentReport rep;
        rep.csv = csv_.str();
        rep.pass = pass_;
        rep.summary = {{"experiment", std::string(experiment_name(kind_))},
                       {"pass", pass_},
                       {"parameters", std::move(params)},
                       {"details", details_}};
        return rep;
    }

private:
    ExperimentKind kind_;
    std::ostringstream csv_;
    json details_ = json::array();
    bool pass_ = true;
};

json default_distribution(ExperimentKind kind)
{
    if (kind == ExperimentKind::thm2) return {{"family", "g"}, {"phi", kAlpha}, {"r", 1.0}, {"eps", 1e-6}};
    return {{"family", "exponential"}, {"rate", 1.0}};
}

int resolve_m(const ExperimentConfig& c, int k, bool lower)
{
    if (c.m) return *c.m;
    return lower ? lower_bound_m(k) : upper_bound_m(k);
}

// max of q(x, k, m) over an evenly spaced grid of [0, 1 - 1/e].
double q_grid_max(int k, int m, int points)
{
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) best = std::max(best, q_poly(kAlpha * i / (points - 1), k, m));
    return best;
}

}  // namespace

ExperimentKind parse_experiment_kind(std::string_view name)
{
    for (const auto& [kind, n] : kNames)
        if (n == name) return kind;
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

std::string_view experiment_name(ExperimentKind kind)
{
    for (const auto& [k, n] : kNames)
        if (k == kind) return n;
    return "?";
}

std::vector<int> parse_int_range(std::string_view text)
{
    std::vector<int> out;
    if (const auto dots = text.find(".."); dots != std::string_view::npos) {
        const int lo = parse_positive(text.substr(0, dots));
        const int hi = parse_positive(text.substr(dots + 2));
        if (hi < lo) throw ConfigError("empty range '" + std::string(text) + "'");
        for (int k = lo; k <= hi; ++k) out.push_back(k);
        return out;
    }
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(',', start);
        out.push_back(parse_positive(text.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

ExperimentConfig ExperimentConfig::from_json(const json& j)
{
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "experiment") {
                c.experiment = parse_experiment_kind(v.get<std::string>());
            } else if (key == "distribution") {
                c.distribution = v.is_string() ? distribution_record(v.get<std::string>()) : v;
            } else if (key == "k") {
                c.ks = v.is_number_integer() ? std::vector<int>{parse_positive(std::to_string(v.get<int>()))}
                                             : parse_int_range(v.get<std::string>());
            } else if (key == "t") {
                c.t = parse_positive(std::to_string(v.get<int>()));
            } else if (key == "m") {
                if (v.is_string() && v.get<std::string>() == "auto")
                    c.m.reset();
                else if (v.is_number_integer() && v.get<int>() >= 0)
                    c.m = v.get<int>();
                else
                    throw ConfigError("m must be a nonnegative integer or \"auto\"");
            } else if (key == "n_trials") {
                c.n_trials = v.get<std::int64_t>();
                if (c.n_trials < 1) throw ConfigError("n_trials must be at least 1");
            } else if (key == "seed") {
                c.seed = v.get<std::uint64_t>();
            } else if (key == "output_path") {
                c.output_path = v.get<std::string>();
            } else if (key == "epsilon_slack") {
                c.epsilon_slack = v.get<double>();
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    return c;
}

std::string_view csv_header(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::reserve:
        return "distribution,reserve,cdf_at_reserve,is_mhr,lemma1,pass";
    case ExperimentKind::gainloss:
        return "k,m,phi,r,gain,loss_g,loss_numeric,diff_g,pass";
    case ExperimentKind::bounds:
        return "k,m_upper,m_lower,gap,pass";
    case ExperimentKind::thm1:
        return "k,m,t,n,seed,eff_ema,eff_rma,diff_mean,diff_std_err,q_max,pass";
    case ExperimentKind::thm2:
        return "k,m,t,n,seed,eff_ema,eff_rma,diff_mean,diff_std_err,q_at_alpha,pass";
    case ExperimentKind::thm3:
        return "k,t,m,s,n,seed,eff_ema,eff_rma,diff_mean,diff_std_err,multi_gain_margin,pass";
    case ExperimentKind::regular_cx:
        return "k,m,r,eps_star,loss,gain,margin,regular,mhr,pass";
    case ExperimentKind::ratio:
        return "k,n,seed,eff_ratio,eff_ratio_se,eff_bound,rev_ratio,rev_ratio_se,rev_bound,pass";
    case ExperimentKind::bk:
        return "k,n,seed,rev_ema_k_plus_1,rev_rma_k,diff_mean,diff_std_err,pass";
    }
    return "";
}

ExperimentReport run_experiment(const ExperimentConfig& c, SimOptions opts)
{
    if (c.ks.empty()) throw ConfigError("k range is empty");
    if (c.t < 1) throw ConfigError("t must be at least 1");
    if (c.n_trials < 1) throw ConfigError("n_trials must be at least 1");
    if (!(c.epsilon_slack > 0.0)) throw ConfigError("epsilon_slack must be positive");

    const json dist_record = c.distribution.value_or(default_distribution(c.experiment));
    const DistributionPtr dist = parse_distribution(dist_record);
    const auto& d = *dist;

    ReportBuilder out(c.experiment);
    json params = {{"distribution", d.describe()}, {"k", c.ks},     {"t", c.t},
                   {"n_trials", c.n_trials},       {"seed", c.seed}, {"epsilon_slack", c.epsilon_slack}};
    if (c.m)
        params["m"] = *c.m;
    else
        params["m"] = "auto";

    switch (c.experiment) {
    case ExperimentKind::reserve: {
        const double r = reserve_price(d);
        const bool is_mhr = mhr_check(d, 1024).is_mhr;
        const bool lemma1 = lemma1_check(d);
        const bool pass = !is_mhr || lemma1;
        auto row = out.row();
        row.add(d.describe()).add(r).add(d.cdf(r)).add(is_mhr).add(lemma1).add(pass);
        out.commit(row, pass);
        params["reserve"] = r;
        break;
    }
    case ExperimentKind::gainloss: {
        const double r = reserve_price(d);
        const double phi = d.cdf(r);
        for (int k : c.ks) {
            const int m = resolve_m(c, k, false);
            const bool degenerate = phi < 1e-12;
            const double g = gain(phi, r, m);
            const double loss_g = degenerate ? 0.0 : loss_closed_form_g(phi, r, k);
            const double loss_n = degenerate ? 0.0 : loss_numeric(d, k);
            const double diff = g - loss_g;
            bool pass = loss_n <= loss_g + 1e-8;
            if (m >= upper_bound_m(k)) pass = pass && diff >= -1e-12;
            auto row = out.row();
            row.add(k).add(m).add(phi).add(r).add(g).add(loss_g).add(loss_n).add(diff).add(pass);
            out.commit(row, pass);
        }
        break;
    }
    case ExperimentKind::bounds: {
        for (int k : c.ks) {
            const int up = upper_bound_m(k);
            const int lo = lower_bound_m(k);
            const bool pass = up >= lo;
            auto row = out.row();
            row.add(k).add(up).add(lo).add(up - lo).add(pass);
            out.commit(row, pass);
        }
        break;
    }
    case ExperimentKind::thm1:
    case ExperimentKind::thm2: {
        const bool upper = c.experiment == ExperimentKind::thm1;
        for (int k : c.ks) {
            const int m = resolve_m(c, k, !upper);
            const auto est = paired_compare(d, k, m, c.t, c.n_trials, c.seed, opts);
            auto row = out.row();
            row.add(k).add(m).add(c.t).add(c.n_trials).add(c.seed).add(est.baseline.mean).add(est.treatment.mean)
                .add(est.diff_mean).add(est.diff_std_err);
            bool pass = false;
            if (upper) {
                const double qmax = m >= 1 ? q_grid_max(k, m, 1000) : 0.0;
                const bool analytic = m < upper_bound_m(k) || qmax <= 1e-12;
                pass = analytic && est.diff_mean >= -3.0 * est.diff_std_err;
                row.add(qmax);
            } else {
                const double qa = q_poly(kAlpha, k, m);
                pass = est.diff_mean < 0.0 && std::abs(est.diff_mean) > 3.0 * est.diff_std_err;
                row.add(qa);
            }
            row.add(pass);
            out.commit(row, pass);
        }
        break;
    }
    case ExperimentKind::thm3: {
        const double r = reserve_price(d);
        const double phi = d.cdf(r);
        for (int k : c.ks) {
            const int m = resolve_m(c, k, false);
            if (m < 2) throw ConfigError("thm3 needs m >= 2");
            const int s = multi_item_s(c.t, m, c.epsilon_slack);
            double margin = std::numeric_limits<double>::infinity();
            for (int tr = 1; tr <= c.t; ++tr)
                margin = std::min(margin, multi_gain_exact(phi, r, m, s, tr) - r * tr * (1.0 - std::pow(phi, m)));
            const auto est = paired_compare(d, k, m + s, c.t, c.n_trials, c.seed, opts);
            const bool pass = margin >= -1e-12 && est.diff_mean >= -3.0 * est.diff_std_err;
            auto row = out.row();
            row.add(k).add(c.t).add(m).add(s).add(c.n_trials).add(c.seed).add(est.baseline.mean)
                .add(est.treatment.mean).add(est.diff_mean).add(est.diff_std_err).add(margin).add(pass);
            out.commit(row, pass);
        }
        break;
    }
    case ExperimentKind::regular_cx: {
        double r = 1.0;
        if (dist_record.value("family", "") == "p") r = static_cast<const PFamily&>(d).params().r;
        params["r"] = r;
        std::vector<int> ms;
        if (c.m)
            ms.push_back(*c.m);
        else
            for (int m = 1; m <= 10; ++m) ms.push_back(m);
        for (int k : c.ks) {
            for (int m : ms) {
                auto row = out.row();
                try {
                    const auto cx = regular_counterexample_search(k, m, r);
                    const PFamily p(cx.eps, r);
                    const bool regular = regularity_check(p, 1024).is_mhr;
                    const bool mhr = mhr_check(p, 1024).is_mhr;
                    const double margin = cx.loss - cx.gain;
                    const bool pass = margin > 1e-6 * r && regular && !mhr;
                    row.add(k).add(m).add(r).add(cx.eps).add(cx.loss).add(cx.gain).add(margin).add(regular)
                        .add(mhr).add(pass);
                    out.commit(row, pass);
                } catch (const SearchExhausted&) {
                    const double nan = std::nan("");
                    row.add(k).add(m).add(r).add(nan).add(nan).add(nan).add(nan).add(false).add(false).add(false);
                    out.commit(row, false);
                }
            }
        }
        break;
    }
    case ExperimentKind::ratio: {
        for (int k : c.ks) {
            const auto est = efficiency_ratio(d, k, c.n_trials, c.seed, opts);
            const double eff_bound = 1.0 - std::pow(kAlpha, k);
            const double rev_bound = 1.0 - std::pow(kAlpha, k - 1);
            const bool pass = est.efficiency_ratio >= eff_bound - 3.0 * est.efficiency_ratio_se &&
                              est.revenue_ratio >= rev_bound - 3.0 * est.revenue_ratio_se;
            auto row = out.row();
            row.add(k).add(c.n_trials).add(c.seed).add(est.efficiency_ratio).add(est.efficiency_ratio_se)
                .add(eff_bound).add(est.revenue_ratio).add(est.revenue_ratio_se).add(rev_bound).add(pass);
            out.commit(row, pass);
        }
        break;
    }
    case ExperimentKind::bk: {
        for (int k : c.ks) {
            const auto est = revenue_compare_bk(d, k, c.n_trials, c.seed, opts);
            const bool pass = est.diff_mean >= -3.0 * est.diff_std_err;
            auto row = out.row();
            row.add(k).add(c.n_trials).add(c.seed).add(est.treatment.mean).add(est.baseline.mean)
                .add(est.diff_mean).add(est.diff_std_err).add(pass);
            out.commit(row, pass);
        }
        break;
    }
    }
    return out.finish(std::move(params));
}

}  // namespace mecheff::cli
