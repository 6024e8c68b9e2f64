// levalarm: command-line front end.
//
// Exit codes: 0 success, 2 bad input or arguments, 3 numerical non-convergence,
// 1 anything unexpected.

#include "levalarm/calibration.hpp"
#include "levalarm/diffusion.hpp"
#include "levalarm/errors.hpp"
#include "levalarm/last_passage.hpp"
#include "levalarm/numeric.hpp"
#include "levalarm/occupation.hpp"
#include "levalarm/simulation.hpp"
#include "levalarm/time_reversal.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace levalarm;
using nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- JSON out

std::string number_text(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// nlohmann prints the shortest round-trip form; reports use a fixed 17
// significant digits so fixtures diff cleanly regardless of library version.
void write_json(std::ostream& os, const ordered_json& j, int depth = 0) {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(depth + 1) * 2, ' ');
    switch (j.type()) {
        case ordered_json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << inner << ordered_json(it.key()).dump() << ": ";
                write_json(os, it.value(), depth + 1);
            }
            os << "\n" << pad << "}";
            return;
        }
        case ordered_json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            const bool flat = std::all_of(j.begin(), j.end(), [](const ordered_json& e) { return e.is_number(); });
            if (flat) {
                os << "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) os << ", ";
                    write_json(os, j[i], depth + 1);
                }
                os << "]";
                return;
            }
            os << "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) os << ",\n";
                os << inner;
                write_json(os, j[i], depth + 1);
            }
            os << "\n" << pad << "]";
            return;
        }
        case ordered_json::value_t::number_float:
            os << number_text(j.get<double>());
            return;
        default:
            os << j.dump();
    }
}

void emit_json(const ordered_json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        write_json(std::cout, j);
        std::cout << "\n";
        return;
    }
    std::ofstream f(path);
    if (!f) throw InputError("cannot write " + path);
    write_json(f, j);
    f << "\n";
}

// ---------------------------------------------------------------- CSV in

struct CsvTable {
    std::string path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> lines;  // 1-based source line of each row

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw InputError(path + ": missing column '" + name + "'");
    }
    std::string where(std::size_t row) const { return path + ":" + std::to_string(lines[row]); }
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') quoted = !quoted;
        else if (ch == ',' && !quoted) {
            out.push_back(trim(cell));
            cell.clear();
        } else cell += ch;
    }
    out.push_back(trim(cell));
    return out;
}

CsvTable read_csv(const std::string& path, const std::vector<std::string>& required) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open " + path);
    CsvTable t;
    t.path = path;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (t.header.empty()) {
            t.header = cells;
            continue;
        }
        if (cells.size() != t.header.size())
            throw InputError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                             " fields, found " + std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
        t.lines.push_back(lineno);
    }
    if (t.header.empty()) throw InputError(path + ": missing header row");
    for (const auto& r : required) t.column(r);
    return t;
}

// Whole-string decimal parse; strtod rather than stod so subnormals are accepted.
bool parse_double(const std::string& s, double& v) {
    if (s.empty()) return false;
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(v);
}

double parse_number(const CsvTable& t, std::size_t row, std::size_t col) {
    const std::string& s = t.rows[row][col];
    double v = 0.0;
    if (!parse_double(s, v))
        throw InputError(t.where(row) + ": column '" + t.header[col] + "' is not a number: '" + s + "'");
    return v;
}

Date parse_date(const CsvTable& t, std::size_t row, std::size_t col) {
    const std::string& s = t.rows[row][col];
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    const int got = std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail);
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (got != 3 || s.size() != 10 || !ymd.ok())
        throw InputError(t.where(row) + ": column '" + t.header[col] + "' is not an ISO-8601 date: '" + s + "'");
    return std::chrono::sys_days{ymd};
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

DatedSeries read_series(const std::string& path, const std::string& value_column) {
    const CsvTable t = read_csv(path, {"date", value_column});
    const std::size_t dc = t.column("date"), vc = t.column(value_column);
    DatedSeries out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        out.push_back({parse_date(t, i, dc), parse_number(t, i, vc)});
        if (i > 0 && !(out[i - 1].date < out[i].date))
            throw InputError(t.where(i) + ": dates must be strictly increasing");
    }
    return out;
}

// ---------------------------------------------------------------- model I/O

struct LoadedModel {
    FirmModel model;
    std::string firm;
    std::string reference_date;
};

double json_number(const ordered_json& j, const char* key, const std::string& path) {
    if (!j.contains(key) || !j[key].is_number())
        throw InputError(path + ": field '" + std::string(key) + "' is missing or not a number");
    return j[key].get<double>();
}

LoadedModel load_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open " + path);
    ordered_json j;
    try {
        j = ordered_json::parse(f);
    } catch (const ordered_json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
    if (!j.is_object()) throw InputError(path + ": expected a JSON object");
    LoadedModel m;
    m.model = derive_model(json_number(j, "nu", path), json_number(j, "sigma", path), json_number(j, "r", path),
                           json_number(j, "A0", path), json_number(j, "D0", path));
    if (j.contains("firm") && j["firm"].is_string()) m.firm = j["firm"].get<std::string>();
    if (j.contains("reference_date") && j["reference_date"].is_string())
        m.reference_date = j["reference_date"].get<std::string>();
    return m;
}

ordered_json model_json(const FirmModel& m) {
    return {{"nu", m.nu}, {"sigma", m.sigma}, {"r", m.r}, {"A0", m.A0}, {"D0", m.D0}, {"R0", m.R0},
            {"mu", m.spec.mu}, {"c", m.spec.c}, {"y", m.spec.y}};
}

ordered_json report_metadata(const LoadedModel& lm, const std::string& command) {
    return {{"command", command}, {"firm", lm.firm}, {"reference_date", lm.reference_date},
            {"parameters", model_json(lm.model)}};
}

ordered_json curve_json(const std::string& name, const DensityCurve& c) {
    return {{"name", name}, {"kind", c.kind == CurveKind::cdf ? "cdf" : "density"}, {"grid", c.grid},
            {"values", c.values}};
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!path.empty() && path != "-") {
        file.open(path);
        if (!file) throw InputError("cannot write " + path);
        os = &file;
    }
    for (std::size_t i = 0; i < header.size(); ++i) *os << (i ? "," : "") << header[i];
    *os << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) *os << (i ? "," : "") << number_text(r[i]);
        *os << "\n";
    }
}

// ---------------------------------------------------------------- WACC

WaccInputs read_wacc_csv(const std::string& path) {
    const CsvTable t = read_csv(path, {"field", "value"});
    const std::size_t fc = t.column("field"), vc = t.column("value");
    std::map<std::string, double> kv;
    for (std::size_t i = 0; i < t.rows.size(); ++i) kv[t.rows[i][fc]] = parse_number(t, i, vc);
    auto get = [&](const char* k) {
        auto it = kv.find(k);
        if (it == kv.end()) throw InputError(path + ": missing field '" + std::string(k) + "'");
        return it->second;
    };
    WaccInputs in;
    in.equity_value = get("equity_value");
    in.debt_value = get("debt_value");
    in.prior_debt_value = get("prior_debt_value");
    in.interest_paid = get("interest_paid");
    in.index_annual_return = get("index_annual_return");
    in.risk_free = get("risk_free");
    in.beta = get("beta");
    if (kv.count("tax_rate")) in.tax_rate = kv["tax_rate"];
    return in;
}

ordered_json wacc_json(const WaccBreakdown& b) {
    return {{"q", b.q}, {"beta", b.beta}, {"cost_equity", b.cost_equity}, {"cost_debt", b.cost_debt},
            {"w_equity", b.w_equity}, {"w_debt", b.w_debt}};
}

// ---------------------------------------------------------------- helpers

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        double v = 0.0;
        if (!parse_double(item, v)) throw InputError(std::string("bad value in ") + what + ": '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw InputError(std::string(what) + " is empty");
    return out;
}

std::vector<double> parse_range(const std::string& s) {
    std::vector<double> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_list(item, "--gamma-sweep").front());
    require(parts.size() == 3, "--gamma-sweep expects start:stop:step");
    require(parts[2] > 0.0 && parts[1] >= parts[0], "--gamma-sweep needs step > 0 and stop >= start");
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(std::min(parts[1], parts[0] + parts[2] * static_cast<double>(i)));
    return out;
}

// ---------------------------------------------------------------- commands

struct CalibrateArgs {
    std::string equity, debt, index, out, firm;
    double risk_free = 0.0;
    int window = 252;
    int max_iter = 500;
};

void cmd_calibrate(const CalibrateArgs& a) {
    MarketData data;
    data.equity = read_series(a.equity, "equity_value");
    data.debt_points = read_series(a.debt, "debt_value");
    if (!a.index.empty()) data.index_returns = read_series(a.index, "return");
    data.risk_free = a.risk_free;
    require(a.window >= 60, "--window must be at least 60");
    const ParamEstimate est = estimate_params(data, a.window, a.max_iter);
    const FirmModel m = derive_model(est.nu, est.sigma, a.risk_free, est.last_asset, est.last_debt);

    ordered_json j;
    j["firm"] = a.firm;
    j["reference_date"] = format_date(data.equity.back().date);
    const ordered_json params = model_json(m);
    for (const auto& [k, v] : params.items()) j[k] = v;
    j["se_nu"] = est.se_nu;
    j["se_sigma"] = est.se_sigma;
    j["iterations"] = est.iterations;
    j["window"] = a.window;

    if (!data.index_returns.empty()) {
        // Equity simple returns against index returns on matching dates.
        std::map<Date, double> idx;
        for (const auto& p : data.index_returns) idx[p.date] = p.value;
        std::vector<double> xs, ys;
        const std::size_t start = data.equity.size() - static_cast<std::size_t>(a.window);
        for (std::size_t i = start + 1; i < data.equity.size(); ++i) {
            auto it = idx.find(data.equity[i].date);
            if (it == idx.end()) continue;
            ys.push_back(data.equity[i].value / data.equity[i - 1].value - 1.0);
            xs.push_back(it->second);
        }
        if (xs.size() >= 2) j["beta"] = beta_regress(ys, xs);
    }
    emit_json(j, a.out);
}

struct AnalyzeArgs {
    std::string model, out, csv, rstar = "1.25,1.67", t = "1";
};

void cmd_analyze(const AnalyzeArgs& a) {
    const LoadedModel lm = load_model(a.model);
    const FirmModel& m = lm.model;
    const auto rstars = parse_list(a.rstar, "--rstar");
    const auto ts = parse_list(a.t, "--t");
    for (double r : rstars) require(r > 1.0, "--rstar values must exceed 1");
    for (double t : ts) require(t > 0.0, "--t values must be positive");

    ordered_json rows = ordered_json::array();
    std::vector<std::vector<double>> csv_rows;
    const double dp = default_probability_analytic(m);
    for (double r : rstars) {
        const AlarmQuery q{m.alpha_of_rstar(r), m.spec};
        const double atom = lp_atom(q);
        for (double t : ts) {
            const double within = lp_interval(0.0, t, q);
            const double fp = first_passage_cdf(t, m.spec);
            const double qj = q_joint_prob(t, q), occ = occupancy_prob(t, q);
            rows.push_back({{"rstar", r}, {"alpha", q.alpha}, {"t", t}, {"lp_interval", within},
                            {"lp_atom", atom}, {"lp_within", std::min(1.0, atom + within)},
                            {"first_passage_cdf", fp}, {"default_probability", dp}, {"q_joint_prob", qj},
                            {"occupancy_prob", occ}});
            csv_rows.push_back({r, q.alpha, t, within, atom, std::min(1.0, atom + within), fp, dp, qj, occ});
        }
    }
    ordered_json report;
    report["metadata"] = report_metadata(lm, "analyze");
    report["tables"] = ordered_json::array({{{"name", "last_passage"}, {"rows", rows}}});
    report["curves"] = ordered_json::array();
    emit_json(report, a.out);
    if (!a.csv.empty())
        write_csv(a.csv, {"rstar", "alpha", "t", "lp_interval", "lp_atom", "lp_within", "first_passage_cdf",
                          "default_probability", "q_joint_prob", "occupancy_prob"},
                  csv_rows);
}

struct DensityArgs {
    std::string model, out, kind = "last-passage";
    std::optional<double> alpha, rstar;
    int points = 400;
    double t_min = 1e-4, t_max = 10.0;
};

void cmd_density(const DensityArgs& a) {
    const LoadedModel lm = load_model(a.model);
    const FirmModel& m = lm.model;
    require(a.alpha.has_value() != a.rstar.has_value(), "give exactly one of --alpha and --rstar");
    const double alpha = a.alpha ? *a.alpha : m.alpha_of_rstar(*a.rstar);
    require(alpha > m.spec.c, "alarm level must lie above the killing level");
    require(a.points >= 2 && a.t_min > 0.0 && a.t_max > a.t_min, "invalid time grid");
    const auto grid = geometric_grid(a.t_min, a.t_max, static_cast<std::size_t>(a.points));
    DensityCurve curve;
    if (a.kind == "last-passage") {
        curve = lp_density_curve({alpha, m.spec}, grid);
    } else if (a.kind == "time-to-default") {
        const auto r = time_to_default_density(alpha, ReversedSpec{m.spec}, grid);
        curve = r.curve;
        if (r.min_before_clip < 0.0)
            std::cerr << "note: clipped inversion values down to " << number_text(r.min_before_clip) << "\n";
    } else {
        throw InputError("--kind must be last-passage or time-to-default");
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < curve.grid.size(); ++i) rows.push_back({curve.grid[i], curve.values[i]});
    write_csv(a.out, {"t", "value"}, rows);
}

struct OptimizeArgs {
    std::string model, out, csv, wacc_inputs, gamma_sweep, mode = "global", strategy = "no_change";
    double gamma = 0.4, t = 1.0;
    std::optional<double> q, initial_alpha;
    bool simulate = false, floor_drift = false, floor_sigma = false;
    double d_nu = 0.0, d_sigma = 0.0, dt = 1.0 / 252.0, long_horizon = 30.0;
    std::size_t paths = 50000, grid_n = 91;
    std::uint64_t seed = 20131231;
    unsigned threads = 0;
};

void cmd_optimize(const OptimizeArgs& a) {
    const LoadedModel lm = load_model(a.model);
    const FirmModel& m = lm.model;
    require(a.q.has_value() != !a.wacc_inputs.empty(), "give exactly one of --q and --wacc-inputs");
    OptimizerConfig cfg;
    cfg.gamma = a.gamma;
    cfg.q = a.q ? *a.q : wacc(read_wacc_csv(a.wacc_inputs)).q;
    cfg.horizon_t = a.t;
    if (a.mode == "local") {
        cfg.mode = SearchMode::local_climb;
        cfg.initial_alpha = a.initial_alpha.value_or(0.5 * m.spec.c);
    } else if (a.mode != "global") {
        throw InputError("--mode must be global or local");
    }
    validate(cfg);

    ordered_json report;
    report["metadata"] = report_metadata(lm, "optimize");
    report["metadata"]["config"] = {{"gamma", cfg.gamma}, {"q", cfg.q}, {"t", cfg.horizon_t}, {"mode", a.mode}};
    ordered_json tables = ordered_json::array();
    ordered_json curves = ordered_json::array();

    if (!a.gamma_sweep.empty()) {
        const auto sweep = gamma_sweep(m.spec, cfg, parse_range(a.gamma_sweep));
        ordered_json rows = ordered_json::array();
        std::vector<std::vector<double>> csv_rows;
        for (const auto& p : sweep) {
            const auto& r = p.result;
            rows.push_back({{"gamma", p.gamma}, {"alpha_star", r.alpha_star}, {"rstar", m.rstar_of_alpha(r.alpha_star)},
                            {"objective", r.value.total}, {"alarm_term", r.value.alarm_term},
                            {"distress_term", r.value.distress_term}});
            csv_rows.push_back({p.gamma, r.alpha_star, m.rstar_of_alpha(r.alpha_star), r.value.total,
                                r.value.alarm_term, r.value.distress_term});
        }
        tables.push_back({{"name", "gamma_sweep"}, {"rows", rows}});
        if (!a.csv.empty())
            write_csv(a.csv, {"gamma", "alpha_star", "rstar", "objective", "alarm_term", "distress_term"}, csv_rows);
    } else if (a.simulate) {
        StrategySpec s;
        s.mode = parse_strategy(a.strategy.c_str());
        s.d_nu = a.d_nu;
        s.d_sigma = a.d_sigma;
        s.keep_excess_drift_nonnegative = a.floor_drift;
        s.keep_sigma_positive = a.floor_sigma;
        SimConfig sc;
        sc.n_paths = a.paths;
        sc.dt = a.dt;
        sc.horizon = a.t;
        sc.seed = a.seed;
        sc.threads = a.threads;
        RstarSearchOptions so;
        so.grid_n = a.grid_n;
        so.long_horizon = a.long_horizon;
        const auto r = optimize_rstar_by_simulation(m, s, sc, cfg, so);
        tables.push_back({{"name", "simulated_optimum"},
                          {"rows", ordered_json::array({{{"strategy", strategy_name(s.mode)},
                                                         {"d_nu", s.d_nu},
                                                         {"d_sigma", s.d_sigma},
                                                         {"rstar", r.rstar_opt},
                                                         {"alpha_star", m.alpha_of_rstar(r.rstar_opt)},
                                                         {"objective", r.objective},
                                                         {"insolvency_prob", r.insolvency_prob},
                                                         {"time_above_frac", r.time_above_frac}}})}});
        curves.push_back({{"name", "objective_by_rstar"}, {"kind", "objective"}, {"grid", r.grid}, {"values", r.values}});
        report["metadata"]["simulation"] = {{"paths", sc.n_paths}, {"dt", sc.dt}, {"seed", sc.seed},
                                            {"grid_n", so.grid_n}, {"long_horizon", so.long_horizon}};
    } else {
        const auto r = optimize_alpha(m.spec, cfg);
        tables.push_back({{"name", "optimum"},
                          {"rows", ordered_json::array({{{"gamma", cfg.gamma},
                                                         {"alpha_star", r.alpha_star},
                                                         {"rstar", m.rstar_of_alpha(r.alpha_star)},
                                                         {"objective", r.value.total},
                                                         {"alarm_term", r.value.alarm_term},
                                                         {"distress_term", r.value.distress_term}}})}});
    }
    report["tables"] = tables;
    report["curves"] = curves;
    emit_json(report, a.out);
}

struct SimulateArgs {
    std::string model, out, rstar = "1.25,1.67", strategy = "no_change";
    double d_nu = 0.0, d_sigma = 0.0, dt = 1.0 / 252.0, horizon = 1.0;
    bool floor_drift = false, floor_sigma = false;
    std::size_t paths = 50000;
    std::uint64_t seed = 20131231;
    unsigned threads = 0;
};

void cmd_simulate(const SimulateArgs& a) {
    const LoadedModel lm = load_model(a.model);
    const FirmModel& m = lm.model;
    StrategySpec s;
    s.mode = parse_strategy(a.strategy.c_str());
    s.d_nu = a.d_nu;
    s.d_sigma = a.d_sigma;
    s.keep_excess_drift_nonnegative = a.floor_drift;
    s.keep_sigma_positive = a.floor_sigma;
    SimConfig sc;
    sc.n_paths = a.paths;
    sc.dt = a.dt;
    sc.horizon = a.horizon;
    sc.seed = a.seed;
    sc.threads = a.threads;
    ordered_json rows = ordered_json::array();
    for (double r : parse_list(a.rstar, "--rstar")) {
        const auto res = simulate_strategy(m, r, s, sc);
        rows.push_back({{"rstar", r}, {"strategy", strategy_name(s.mode)}, {"insolvency_prob", res.insolvency_prob},
                        {"insolvency_se", res.insolvency_se}, {"time_above_frac", res.time_above_frac}});
    }
    ordered_json report;
    report["metadata"] = report_metadata(lm, "simulate");
    report["metadata"]["simulation"] = {{"paths", sc.n_paths}, {"dt", sc.dt}, {"horizon", sc.horizon}, {"seed", sc.seed}};
    ordered_json tables = ordered_json::array({{{"name", "strategy"}, {"rows", rows}}});
    if (sc.horizon == 1.0) {
        const auto dp = default_probability(m, sc);
        tables.push_back({{"name", "default_probability"},
                          {"rows", ordered_json::array({{{"default_probability", dp.p},
                                                         {"default_probability_se", dp.se},
                                                         {"default_probability_analytic",
                                                          default_probability_analytic(m)}}})}});
    }
    report["tables"] = tables;
    report["curves"] = ordered_json::array();
    emit_json(report, a.out);
}

struct WaccArgs {
    std::string inputs, out;
    std::optional<double> equity, debt, prior_debt, interest, rf, rm, beta;
    double tax = 0.35;
};

void cmd_wacc(const WaccArgs& a) {
    WaccInputs in;
    if (!a.inputs.empty()) {
        in = read_wacc_csv(a.inputs);
    } else {
        require(a.equity && a.debt && a.prior_debt && a.interest && a.rf && a.rm && a.beta,
                "wacc needs --inputs or all of --equity --debt --prior-debt --interest --rf --rm --beta");
        in.equity_value = *a.equity;
        in.debt_value = *a.debt;
        in.prior_debt_value = *a.prior_debt;
        in.interest_paid = *a.interest;
        in.risk_free = *a.rf;
        in.index_annual_return = *a.rm;
        in.beta = *a.beta;
        in.tax_rate = a.tax;
    }
    emit_json(wacc_json(wacc(in)), a.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Alarm levels and last passage times for structural credit models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "levalarm 1.0");

    CalibrateArgs ca;
    auto* cal = app.add_subcommand("calibrate", "Estimate asset drift and volatility from equity and debt data");
    cal->add_option("--equity", ca.equity, "equity.csv (date,equity_value)")->required();
    cal->add_option("--debt", ca.debt, "debt.csv (date,debt_value)")->required();
    cal->add_option("--index", ca.index, "index.csv (date,return), used for beta");
    cal->add_option("--risk-free", ca.risk_free, "annual risk-free rate")->required();
    cal->add_option("--window", ca.window, "trading days used")->capture_default_str();
    cal->add_option("--max-iter", ca.max_iter, "iteration cap of the volatility fixed point")->capture_default_str();
    cal->add_option("--firm", ca.firm, "firm identifier echoed into the model");
    cal->add_option("--out", ca.out, "model.json (default stdout)");

    AnalyzeArgs aa;
    auto* ana = app.add_subcommand("analyze", "Last passage, first passage and occupancy probabilities");
    ana->add_option("--model", aa.model, "model.json")->required();
    ana->add_option("--rstar", aa.rstar, "comma-separated alarm ratios")->capture_default_str();
    ana->add_option("--t", aa.t, "comma-separated horizons in years")->capture_default_str();
    ana->add_option("--out", aa.out, "report.json (default stdout)");
    ana->add_option("--csv", aa.csv, "also write the rows as CSV");

    DensityArgs da;
    auto* den = app.add_subcommand("density", "Density curve of the last passage time or the time to default");
    den->add_option("--model", da.model, "model.json")->required();
    auto* d_alpha = den->add_option("--alpha", da.alpha, "alarm level in log units");
    auto* d_rstar = den->add_option("--rstar", da.rstar, "alarm ratio");
    d_alpha->excludes(d_rstar);
    den->add_option("--kind", da.kind, "last-passage or time-to-default")
        ->check(CLI::IsMember({"last-passage", "time-to-default"}))
        ->capture_default_str();
    den->add_option("--points", da.points, "grid points")->capture_default_str();
    den->add_option("--t-min", da.t_min, "first grid point")->capture_default_str();
    den->add_option("--t-max", da.t_max, "last grid point")->capture_default_str();
    den->add_option("--out", da.out, "curve.csv (default stdout)");

    OptimizeArgs oa;
    auto* opt = app.add_subcommand("optimize", "Optimal alarm level");
    opt->add_option("--model", oa.model, "model.json")->required();
    opt->add_option("--gamma", oa.gamma, "weight of the alarm term")->capture_default_str();
    auto* o_q = opt->add_option("--q", oa.q, "discount rate for time in distress");
    auto* o_w = opt->add_option("--wacc-inputs", oa.wacc_inputs, "CSV of WACC inputs (field,value)");
    o_q->excludes(o_w);
    opt->add_option("--t", oa.t, "horizon in years")->capture_default_str();
    opt->add_option("--mode", oa.mode, "global or local")->check(CLI::IsMember({"global", "local"}))->capture_default_str();
    opt->add_option("--initial-alpha", oa.initial_alpha, "start of the local search");
    opt->add_option("--gamma-sweep", oa.gamma_sweep, "start:stop:step");
    opt->add_option("--csv", oa.csv, "CSV output for --gamma-sweep");
    opt->add_flag("--simulate", oa.simulate, "search R* on simulated paths");
    opt->add_option("--strategy", oa.strategy, "no_change, creditors or shareholders")->capture_default_str();
    opt->add_option("--d-nu", oa.d_nu, "drift change per step below R*");
    opt->add_option("--d-sigma", oa.d_sigma, "volatility change per step below R*");
    opt->add_flag("--floor-drift", oa.floor_drift, "keep nu - r >= 0");
    opt->add_flag("--floor-sigma", oa.floor_sigma, "keep sigma > 0");
    opt->add_option("--paths", oa.paths, "simulated paths")->capture_default_str();
    opt->add_option("--dt", oa.dt, "step in years");
    opt->add_option("--grid-n", oa.grid_n, "R* grid points")->capture_default_str();
    opt->add_option("--long-horizon", oa.long_horizon, "years simulated for eventual insolvency")->capture_default_str();
    opt->add_option("--seed", oa.seed, "random seed")->capture_default_str();
    opt->add_option("--threads", oa.threads, "worker threads (0: LEVALARM_THREADS or all cores)");
    opt->add_option("--out", oa.out, "alpha_star.json (default stdout)");

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Insolvency and time above R* under a management strategy");
    sim->add_option("--model", sa.model, "model.json")->required();
    sim->add_option("--rstar", sa.rstar, "comma-separated alarm ratios")->capture_default_str();
    sim->add_option("--strategy", sa.strategy, "no_change, creditors or shareholders")->capture_default_str();
    sim->add_option("--d-nu", sa.d_nu, "drift change per step below R*");
    sim->add_option("--d-sigma", sa.d_sigma, "volatility change per step below R*");
    sim->add_flag("--floor-drift", sa.floor_drift, "keep nu - r >= 0");
    sim->add_flag("--floor-sigma", sa.floor_sigma, "keep sigma > 0");
    sim->add_option("--paths", sa.paths, "simulated paths")->capture_default_str();
    sim->add_option("--dt", sa.dt, "step in years");
    sim->add_option("--horizon", sa.horizon, "years")->capture_default_str();
    sim->add_option("--seed", sa.seed, "random seed")->capture_default_str();
    sim->add_option("--threads", sa.threads, "worker threads (0: LEVALARM_THREADS or all cores)");
    sim->add_option("--out", sa.out, "report.json (default stdout)");

    WaccArgs wa;
    auto* wac = app.add_subcommand("wacc", "Weighted average cost of capital");
    wac->add_option("--inputs", wa.inputs, "CSV of WACC inputs (field,value)");
    wac->add_option("--equity", wa.equity, "market value of equity");
    wac->add_option("--debt", wa.debt, "debt at the reference date");
    wac->add_option("--prior-debt", wa.prior_debt, "debt one year earlier");
    wac->add_option("--interest", wa.interest, "interest paid over the year");
    wac->add_option("--rf", wa.rf, "risk-free rate");
    wac->add_option("--rm", wa.rm, "annual index return");
    wac->add_option("--beta", wa.beta, "equity beta");
    wac->add_option("--tax", wa.tax, "tax rate")->capture_default_str();
    wac->add_option("--out", wa.out, "output JSON (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*cal) cmd_calibrate(ca);
        else if (*ana) cmd_analyze(aa);
        else if (*den) cmd_density(da);
        else if (*opt) cmd_optimize(oa);
        else if (*sim) cmd_simulate(sa);
        else if (*wac) cmd_wacc(wa);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
