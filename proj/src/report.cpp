#include "wna/report.hpp"

#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "wna/asymptotics.hpp"
#include "wna/boundslab.hpp"
#include "wna/sharp.hpp"
#include "wna/specfun.hpp"

namespace wna {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    return parts;
}

double parse_double(const std::string& s, const char* key, int line) {
    if (s == "inf" || s == "infinity") return kInf;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string(key) + ": cannot parse '" + s + "'", line);
    }
}

std::int64_t parse_int(const std::string& s, const char* key, int line) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError(std::string(key) + ": cannot parse '" + s + "'", line);
    return v;
}

}  // namespace

std::string task_name(Task t) {
    switch (t) {
        case Task::eval_c: return "evalC";
        case Task::eval_l: return "evalL";
        case Task::lemma1: return "lemma1";
        case Task::thm1: return "thm1";
        case Task::thm2: return "thm2";
        case Task::thm3: return "thm3";
        case Task::thm4: return "thm4";
        case Task::identities: return "identities";
        case Task::stechkin_sum: return "stechkin_sum";
    }
    return "?";
}

SweepSpec parse_config(std::string_view text) {
    SweepSpec spec;
    bool have_task = false;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string body = trim(raw);
        if (body.empty()) continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key=value, got '" + body + "'", line);
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (value.empty()) throw ConfigError(key + ": empty value", line);

        if (key == "task") {
            static const std::pair<const char*, Task> names[] = {
                {"evalC", Task::eval_c},   {"evalL", Task::eval_l},
                {"lemma1", Task::lemma1},  {"thm1", Task::thm1},
                {"thm2", Task::thm2},      {"thm3", Task::thm3},
                {"thm4", Task::thm4},      {"identities", Task::identities},
                {"stechkin_sum", Task::stechkin_sum}};
            bool found = false;
            for (const auto& [name, task] : names) {
                if (value == name) {
                    spec.task = task;
                    found = true;
                }
            }
            if (!found) throw ConfigError("task: unknown task '" + value + "'", line);
            have_task = true;
        } else if (key == "n") {
            spec.n_values.clear();
            for (const auto& part : split_commas(value)) {
                const std::int64_t n = parse_int(part, "n", line);
                if (n < 1) throw ConfigError("n: must be >= 1 (got " + part + ")", line);
                spec.n_values.push_back(n);
            }
        } else if (key == "r") {
            if (value.rfind("band:", 0) == 0) {
                const std::int64_t count = parse_int(value.substr(5), "r", line);
                if (count < 1) throw ConfigError("r: band sample count must be >= 1", line);
                spec.r_rule = RRule{true, static_cast<int>(count), {}};
            } else {
                RRule rule{false, 0, {}};
                for (const auto& part : split_commas(value)) {
                    const double r = parse_double(part, "r", line);
                    if (!(r > 0.0)) throw ConfigError("r: must be positive (got " + part + ")", line);
                    rule.values.push_back(r);
                }
                spec.r_rule = rule;
            }
        } else if (key == "p") {
            spec.p_values.clear();
            for (const auto& part : split_commas(value)) {
                const double p = parse_double(part, "p", line);
                if (!std::isinf(p) && !(p >= 1.0))
                    throw ConfigError("p: must be >= 1 or inf (got " + part + ")", line);
                spec.p_values.push_back(p);
            }
        } else if (key == "beta") {
            spec.phase = PhaseRule::constant(parse_double(value, "beta", line));
        } else if (key == "tol") {
            const double tol = parse_double(value, "tol", line);
            if (!(tol > 0.0)) throw ConfigError("tol: must be positive", line);
            spec.accuracy.tol = tol;
        } else if (key == "oversample") {
            const std::int64_t ov = parse_int(value, "oversample", line);
            if (ov < 1) throw ConfigError("oversample: must be >= 1", line);
            spec.oversample = static_cast<int>(ov);
        } else if (key == "parallel") {
            if (value == "true" || value == "1")
                spec.parallel = true;
            else if (value == "false" || value == "0")
                spec.parallel = false;
            else
                throw ConfigError("parallel: expected true/false", line);
        } else if (key == "out") {
            spec.out = value;
        } else {
            throw ConfigError("unknown key '" + key + "'", line);
        }
    }
    if (!have_task) throw ConfigError("missing required key 'task'", 0);
    if (spec.task != Task::identities && spec.n_values.empty())
        throw ConfigError("missing required key 'n'", 0);
    return spec;
}

namespace {

bool metric_is_uniform(Task t) {
    return t == Task::eval_c || t == Task::thm1 || t == Task::thm2;
}

bool band2_task(Task t) { return t == Task::thm2 || t == Task::thm4 || t == Task::stechkin_sum; }

std::vector<double> r_samples_for(const SweepSpec& spec, std::int64_t n) {
    if (!spec.r_rule.band_samples) return spec.r_rule.values;
    const double nd = static_cast<double>(n);
    const int count = spec.r_rule.count;
    std::vector<double> rs;
    rs.reserve(static_cast<std::size_t>(count));
    if (band2_task(spec.task)) {
        // log-spaced samples of [n+1, n^2]
        const double lo = std::log(nd + 1.0);
        const double hi = std::log(nd * nd);
        for (int i = 0; i < count; ++i) {
            const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
            rs.push_back(std::exp(lo + f * (hi - lo)));
        }
    } else {
        // linear samples of [sqrt(n)+1, n+1]
        const double lo = std::sqrt(nd) + 1.0;
        const double hi = nd + 1.0;
        for (int i = 0; i < count; ++i) {
            const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
            rs.push_back(lo + f * (hi - lo));
        }
    }
    return rs;
}

struct Point {
    std::int64_t n = 0;
    double r = 0.0;
    double p = 2.0;
};

ReportRow error_row(const SweepSpec& spec, const Point& pt) {
    ReportRow row;
    row.task = task_name(spec.task);
    row.p = pt.p;
    row.r = pt.r;
    row.n = pt.n;
    row.beta = spec.phase.description();
    row.computed_mantissa = kNan;
    row.log10_scale = kNan;
    row.main_mantissa = kNan;
    row.remainder_mantissa = kNan;
    row.gap = kNan;
    row.normalized_gap = kNan;
    row.regime = "error";
    row.quad_err = kNan;
    return row;
}

ReportRow eval_point(const SweepSpec& spec, const Point& pt) {
    ReportRow row;
    row.task = task_name(spec.task);
    row.p = pt.p;
    row.r = pt.r;
    row.n = pt.n;
    row.beta = spec.phase.description();

    const bool uniform = metric_is_uniform(spec.task);
    const bool poisson = spec.poisson_q > 0.0;
    const KernelSpec kernel =
        poisson ? KernelSpec::poisson(spec.poisson_q, spec.phase, pt.n)
                : KernelSpec::weyl_nagy(pt.r, spec.phase, pt.n);

    TruncationBudget budget = spec.accuracy;
    if (!spec.mains_only) {
        const EValue ev = uniform ? e_value_C(kernel, pt.p, budget)
                                  : e_value_L(kernel, pt.p, budget);
        row.computed_mantissa = ev.value.mantissa;
        row.log10_scale = ev.value.log_scale / std::numbers::ln10;
        row.quad_err = ev.quad_error_gauge;
    } else {
        row.computed_mantissa = kNan;
        row.log10_scale = kernel.decay_log_scale() / std::numbers::ln10;
        row.quad_err = kNan;
    }

    if (!poisson) {
        const RegimeTag tag = regime_classify(pt.r, pt.n);
        row.regime = tag.label();
        const bool is_thm = spec.task != Task::eval_c && spec.task != Task::eval_l;
        if (!tag.outside()) {
            const MainTermResult mt = uniform ? main_term_C(pt.p, pt.r, pt.n)
                                              : main_term_L(pt.p, pt.r, pt.n);
            row.main_mantissa = mt.main.mantissa;
            row.remainder_mantissa = mt.remainder_scale.mantissa;
            row.formula_id = mt.formula_id;
            row.gap = row.computed_mantissa - row.main_mantissa;
            row.normalized_gap = row.gap / row.remainder_mantissa;
        } else if (is_thm) {
            throw RegimeError("theorem task point outside both bands");
        } else {
            row.main_mantissa = kNan;
            row.remainder_mantissa = kNan;
            row.gap = kNan;
            row.normalized_gap = kNan;
        }
    } else {
        row.regime = "poisson";
        row.main_mantissa = kNan;
        row.remainder_mantissa = kNan;
        row.gap = kNan;
        row.normalized_gap = kNan;
    }
    return row;
}

ReportRow lemma_point(const SweepSpec& spec, const Point& pt) {
    ReportRow row;
    row.task = task_name(spec.task);
    row.p = kNan;
    row.r = pt.r;
    row.n = pt.n;
    row.beta = spec.phase.description();
    const Lemma1Report rep = lemma1_split_check(pt.r, pt.n);
    row.computed_mantissa = rep.total;
    row.log10_scale = 0.0;
    row.main_mantissa = rep.total_bound;
    row.remainder_mantissa = rep.total_bound;
    row.gap = rep.total - rep.total_bound;
    row.normalized_gap = rep.total / rep.total_bound;
    row.regime = rep.ok() ? "band1" : "violation";
    row.formula_id = "lemma1";
    row.quad_err = 0.0;
    return row;
}

ReportRow stechkin_point(const SweepSpec& spec, const Point& pt) {
    ReportRow row;
    row.task = task_name(spec.task);
    row.p = kNan;
    row.r = pt.r;
    row.n = pt.n;
    row.beta = spec.phase.description();
    const double nd = static_cast<double>(pt.n);
    const PhiSumResult ps = phi_sum(pt.r, pt.n, spec.accuracy);
    const double scale = pt.r * std::exp(-pt.r / nd) / (nd * nd);
    row.computed_mantissa = ps.value;
    row.log10_scale = 0.0;
    row.main_mantissa = scale;
    row.remainder_mantissa = scale;
    row.gap = ps.value - scale;
    row.normalized_gap = stechkin_sum_ratio(pt.r, pt.n);
    row.regime = "band2";
    row.formula_id = "stechkin_sum";
    row.quad_err = ps.residual_bound;
    return row;
}

std::vector<ReportRow> identity_rows(const SweepSpec& spec) {
    std::vector<ReportRow> rows;
    auto push = [&](const std::string& id, double worst, double tol) {
        ReportRow row;
        row.task = task_name(Task::identities);
        row.p = kNan;
        row.r = kNan;
        row.n = 0;
        row.beta = spec.phase.description();
        row.computed_mantissa = worst;
        row.log10_scale = 0.0;
        row.main_mantissa = tol;
        row.remainder_mantissa = tol;
        row.gap = worst - tol;
        row.normalized_gap = worst / tol;
        row.regime = "identity";
        row.formula_id = id;
        row.quad_err = 0.0;
        rows.push_back(row);
    };

    {  // F(1,1;1;z) (1-z) = 1
        double worst = 0.0;
        for (double z = 0.05; z <= 0.951; z += 0.05)
            worst = std::max(worst, std::fabs(hyp2f1_unit_c(1.0, 1.0, z) * (1.0 - z) - 1.0));
        push("f_closed", worst, 1e-12);
    }
    {  // (2/pi) K(q) = F(1/2,1/2;1;q^2)
        double worst = 0.0;
        for (double q = 0.05; q <= 0.951; q += 0.05) {
            const double lhs = 2.0 / std::numbers::pi * elliptic_k(q);
            const double rhs = hyp2f1_unit_c(0.5, 0.5, q * q);
            worst = std::max(worst, std::fabs(lhs - rhs) / rhs);
        }
        push("k_agm", worst, 1e-9);
    }
    {  // series vs integral representation of F^{1/s}
        double worst = 0.0;
        for (double s : {1.0, 1.5, 2.0, 3.0, 6.0}) {
            for (double q = 0.1; q <= 0.901; q += 0.1) {
                const double integral = f_power_via_integral(s, q, 4096);
                const double series =
                    std::pow(hyp2f1_unit_c(s / 2.0, s / 2.0, q * q), 1.0 / s);
                worst = std::max(worst, std::fabs(integral - series) / series);
            }
        }
        push("f_integral", worst, 1e-8);
    }
    {  // cos_norm closed form vs direct quadrature
        double worst = 0.0;
        for (double p : {1.0, 1.5, 2.0, 3.0, 10.0, kInf}) {
            NormRequest req;
            req.evaluator = [](double t) { return std::cos(t); };
            req.bandwidth_hint = 1;
            req.p = p;
            req.tol = 1e-11;
            req.oversample = spec.oversample;
            const double quad = periodic_lp_norm(req);
            const double closed = cos_norm(p);
            worst = std::max(worst, std::fabs(quad - closed) / closed);
        }
        push("cos_norm", worst, 1e-10);
    }
    {  // sum q^k k^2 identity
        double worst = 0.0;
        for (double q = 0.1; q <= 0.951; q += 0.05) {
            double sum = 0.0, qk = 1.0;
            for (int k = 1; k < 100000; ++k) {
                qk *= q;
                const double term = qk * k * k;
                sum += term;
                if (term < 1e-18 * sum && k > 8) break;
            }
            const double closed = q * (1.0 + q) / std::pow(1.0 - q, 3.0);
            worst = std::max(worst, std::fabs(sum - closed) / closed);
        }
        push("nabla", worst, 1e-12);
    }
    return rows;
}

int requested_jobs(const SweepSpec& spec) {
    if (!spec.parallel) return 1;
    if (const char* env = std::getenv("WNA_JOBS")) {
        const int jobs = std::atoi(env);
        if (jobs >= 1) return jobs;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 4 : static_cast<int>(hw);
}

}  // namespace

std::vector<ReportRow> run_sweep(const SweepSpec& spec) {
    if (spec.task == Task::identities) return identity_rows(spec);

    std::vector<Point> points;
    const bool has_p = spec.task != Task::lemma1 && spec.task != Task::stechkin_sum;
    for (const std::int64_t n : spec.n_values) {
        for (const double r : r_samples_for(spec, n)) {
            if (has_p) {
                for (const double p : spec.p_values) points.push_back({n, r, p});
            } else {
                points.push_back({n, r, kNan});
            }
        }
    }

    std::vector<ReportRow> rows(points.size());
    auto compute = [&](std::size_t i) {
        const Point& pt = points[i];
        try {
            switch (spec.task) {
                case Task::lemma1: rows[i] = lemma_point(spec, pt); break;
                case Task::stechkin_sum: rows[i] = stechkin_point(spec, pt); break;
                default: rows[i] = eval_point(spec, pt); break;
            }
        } catch (const std::exception&) {
            rows[i] = error_row(spec, pt);
        }
    };

    const int jobs = std::min<int>(requested_jobs(spec), static_cast<int>(points.size()));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < points.size(); ++i) compute(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(jobs));
        for (int w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < points.size();
                     i = next.fetch_add(1)) {
                    compute(i);
                }
            });
        }
        for (auto& th : workers) th.join();
    }
    return rows;
}

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::ordered_json json_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double number_from_json(const nlohmann::ordered_json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "nan") return kNan;
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        throw std::runtime_error("rows_from_json: bad numeric string '" + s + "'");
    }
    return j.get<double>();
}

}  // namespace

void emit(const std::vector<ReportRow>& rows, Format format, std::ostream& out) {
    if (rows.empty()) throw std::invalid_argument("emit: no rows");
    if (format == Format::csv) {
        out << "task,p,r,n,beta,computed_mantissa,log10_scale,main_mantissa,"
               "remainder_mantissa,gap,normalized_gap,regime,formula_id,quad_err\n";
        for (const auto& row : rows) {
            out << row.task << ',' << format_double(row.p) << ',' << format_double(row.r)
                << ',' << row.n << ',' << row.beta << ','
                << format_double(row.computed_mantissa) << ','
                << format_double(row.log10_scale) << ','
                << format_double(row.main_mantissa) << ','
                << format_double(row.remainder_mantissa) << ',' << format_double(row.gap)
                << ',' << format_double(row.normalized_gap) << ',' << row.regime << ','
                << row.formula_id << ',' << format_double(row.quad_err) << '\n';
        }
        return;
    }
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        nlohmann::ordered_json j;
        j["task"] = row.task;
        j["p"] = json_number(row.p);
        j["r"] = json_number(row.r);
        j["n"] = row.n;
        j["beta"] = row.beta;
        j["computed_mantissa"] = json_number(row.computed_mantissa);
        j["log10_scale"] = json_number(row.log10_scale);
        j["main_mantissa"] = json_number(row.main_mantissa);
        j["remainder_mantissa"] = json_number(row.remainder_mantissa);
        j["gap"] = json_number(row.gap);
        j["normalized_gap"] = json_number(row.normalized_gap);
        j["regime"] = row.regime;
        j["formula_id"] = row.formula_id;
        j["quad_err"] = json_number(row.quad_err);
        arr.push_back(std::move(j));
    }
    out << arr.dump(2) << '\n';
}

void emit_to_file(const std::vector<ReportRow>& rows, Format format,
                  const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit: cannot open '" + path + "' for writing");
    emit(rows, format, out);
    if (!out.good()) throw std::runtime_error("emit: write failed for '" + path + "'");
}

std::vector<ReportRow> rows_from_json(const std::string& text) {
    const auto arr = nlohmann::ordered_json::parse(text);
    std::vector<ReportRow> rows;
    rows.reserve(arr.size());
    for (const auto& j : arr) {
        ReportRow row;
        row.task = j.at("task").get<std::string>();
        row.p = number_from_json(j.at("p"));
        row.r = number_from_json(j.at("r"));
        row.n = j.at("n").get<std::int64_t>();
        row.beta = j.at("beta").get<std::string>();
        row.computed_mantissa = number_from_json(j.at("computed_mantissa"));
        row.log10_scale = number_from_json(j.at("log10_scale"));
        row.main_mantissa = number_from_json(j.at("main_mantissa"));
        row.remainder_mantissa = number_from_json(j.at("remainder_mantissa"));
        row.gap = number_from_json(j.at("gap"));
        row.normalized_gap = number_from_json(j.at("normalized_gap"));
        row.regime = j.at("regime").get<std::string>();
        row.formula_id = j.at("formula_id").get<std::string>();
        row.quad_err = number_from_json(j.at("quad_err"));
        rows.push_back(std::move(row));
    }
    return rows;
}

bool all_assertions_passed(const std::vector<ReportRow>& rows) {
    for (const auto& row : rows) {
        if (row.regime == "error" || row.regime == "violation") return false;
        if (row.task == "lemma1" || row.task == "identities") {
            if (!(row.normalized_gap < 1.0)) return false;
        }
        if (row.task == "stechkin_sum" && !std::isfinite(row.normalized_gap)) return false;
        if ((row.task.rfind("thm", 0) == 0) && !std::isfinite(row.normalized_gap) &&
            !std::isnan(row.computed_mantissa)) {
            return false;
        }
    }
    return true;
}

}  // namespace wna
