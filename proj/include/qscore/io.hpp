#pragma once

// JSON/CSV/TSV forms of the toolkit's data:
//   QUBO          {"n", "constant", "terms": [[i, j, c], ...]} with i <= j
//   oracle table  {"meta": {...}, "cmax": {"<n>": number}}
//   sweep report  report.json (full) and report.csv (one row per size)
//   plot data     beta.tsv (n, beta, lower, upper) and time.tsv (n, mean, min, max)

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qscore/error.hpp"
#include "qscore/protocol.hpp"
#include "qscore/qubo.hpp"
#include "qscore/solver.hpp"

namespace qscore {

using json = nlohmann::json;

// ---- QUBO -------------------------------------------------------------------

template <typename Coeff>
json qubo_to_json(const BasicQubo<Coeff>& q) {
    json terms = json::array();
    for (const auto& t : q.terms()) terms.push_back({t.i, t.j, t.coeff});
    return {{"n", q.n()}, {"constant", q.constant()}, {"terms", std::move(terms)}};
}

/// Reads the wire QUBO form into a floating QUBO.
inline RealQubo qubo_from_json(const json& j) {
    try {
        const auto n = j.at("n").get<std::int64_t>();
        if (n < 0) throw DomainError("QUBO n must be non-negative");
        const double constant = j.value("constant", 0.0);
        std::vector<RealQubo::term_type> terms;
        for (const auto& t : j.at("terms")) {
            if (!t.is_array() || t.size() != 3) throw DomainError("QUBO term must be [i, j, coeff]");
            const auto i = t[0].get<std::int64_t>();
            const auto k = t[1].get<std::int64_t>();
            if (i < 0 || k < 0 || i >= n || k >= n) throw DomainError("QUBO term index out of range");
            if (i > k) throw DomainError("QUBO terms must have i <= j");
            terms.push_back({static_cast<Variable>(i), static_cast<Variable>(k), t[2].get<double>()});
        }
        return RealQubo(static_cast<std::size_t>(n), std::move(terms), constant);
    } catch (const json::exception& e) {
        throw DomainError(std::string("malformed QUBO JSON: ") + e.what());
    }
}

// ---- single runs --------------------------------------------------------------

inline json run_to_json(const SolverRun& r) {
    json j = {{"solver_id", r.solver_id},
              {"status", to_string(r.status)},
              {"best_cut", r.best_cut},
              {"elapsed_ms", r.elapsed_ms},
              {"iterations", r.iterations}};
    if (r.has_result()) {
        std::string bits;
        for (const auto b : r.best_assignment) bits.push_back(b ? '1' : '0');
        j["best_assignment"] = bits;
    }
    if (!r.reason.empty()) j["reason"] = r.reason;
    return j;
}

// ---- budgets ----------------------------------------------------------------------

inline json budget_to_json(const SolverBudget& b) {
    json j;
    if (b.is_wall_clock()) {
        j = {{"mode", "wallclock"}, {"limit_ms", static_cast<std::int64_t>(b.limit_ms())}};
    } else {
        j = {{"mode", "deterministic"}, {"quota", b.quota()}};
    }
    j["seed"] = b.seed;
    return j;
}

inline SolverBudget budget_from_json(const json& j) {
    const auto seed = j.value("seed", std::uint64_t{0});
    if (j.at("mode") == "wallclock") {
        return SolverBudget::wall_clock(std::chrono::milliseconds(j.at("limit_ms").get<std::int64_t>()), seed);
    }
    return SolverBudget::deterministic(j.at("quota").get<std::uint64_t>(), seed);
}

// ---- oracle tables ----------------------------------------------------------------

inline json oracle_to_json(const OracleTable& t) {
    json cmax = json::object();
    for (const auto& [n, v] : t.values()) cmax[std::to_string(n)] = v;
    return {{"meta", {{"source", t.source()}, {"seed_base", t.seed_base()}, {"m", t.m()}}},
            {"cmax", std::move(cmax)}};
}

inline OracleTable oracle_from_json(const json& j) {
    try {
        const auto& meta = j.at("meta");
        OracleTable t(meta.value("source", std::string{}), meta.at("seed_base").get<std::uint64_t>(),
                      meta.at("m").get<std::size_t>());
        for (const auto& [key, v] : j.at("cmax").items()) {
            std::size_t used = 0;
            const auto n = std::stoull(key, &used);
            if (used != key.size() || n == 0) throw DomainError("bad size key '" + key + "'");
            t.set(n, v.get<double>());
        }
        return t;
    } catch (const json::exception& e) {
        throw DomainError(std::string("malformed oracle table: ") + e.what());
    } catch (const std::logic_error& e) {
        throw DomainError(std::string("malformed oracle table: ") + e.what());
    }
}

// ---- sweep reports ------------------------------------------------------------------

/// Extra context embedded verbatim in report.json.
struct ReportContext {
    std::map<std::string, std::string> config;   ///< full effective run configuration
    std::map<std::string, std::string> machine;  ///< host description
};

namespace detail {

inline json time_or_null(double ms, bool timed) { return timed ? json(ms) : json(nullptr); }

inline double time_from(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::numeric_limits<double>::quiet_NaN();
    return it->get<double>();
}

}  // namespace detail

/// Wall-clock timings are written only for wall-clock budgets; under a
/// deterministic budget they are null so the report is a pure function of
/// its configuration.
inline json report_to_json(const SweepReport& rep, const ReportContext& ctx = {}) {
    const bool timed = rep.budget.is_wall_clock();
    json records = json::array();
    for (const auto& r : rep.records) {
        json inst = json::array();
        for (const auto& o : r.instances) {
            json e = {{"graph_seed", o.graph_seed},
                      {"best_cut", o.best_cut},
                      {"status", to_string(o.status)},
                      {"elapsed_ms", detail::time_or_null(o.elapsed_ms, timed)}};
            if (!o.reason.empty()) e["reason"] = o.reason;
            inst.push_back(std::move(e));
        }
        records.push_back({{"n", r.n},
                           {"m", r.m},
                           {"seed_base", r.seed_base},
                           {"mean_cut", r.mean_cut},
                           {"std_cut", r.std_cut},
                           {"baseline", r.baseline},
                           {"cmax", r.cmax},
                           {"beta", r.beta},
                           {"beta_stderr", r.beta_stderr},
                           {"beta_approx", r.beta_approx},
                           {"beta_oracle", r.beta_oracle ? json(*r.beta_oracle) : json(nullptr)},
                           {"mean_time_ms", detail::time_or_null(r.mean_time_ms, timed)},
                           {"min_time_ms", detail::time_or_null(r.min_time_ms, timed)},
                           {"max_time_ms", detail::time_or_null(r.max_time_ms, timed)},
                           {"no_result_count", r.no_result_count},
                           {"instances", std::move(inst)}});
    }
    json j = {{"solver_id", rep.solver_id},
              {"beta_params",
               {{"beta_star", rep.params.beta_star},
                {"m", rep.params.m_instances},
                {"cmax_mode", to_string(rep.params.cmax_mode)},
                {"baseline", to_string(rep.params.baseline)}}},
              {"budget", budget_to_json(rep.budget)},
              {"schedule", {{"start", rep.schedule.start}, {"step", rep.schedule.step}, {"max", rep.schedule.max}}},
              {"seed_base", rep.seed_base},
              {"time_cap_ms", rep.time_cap_ms},
              {"workers", rep.workers},
              {"oracle_source", rep.oracle_source},
              {"records", std::move(records)},
              {"qscore", rep.qscore ? json(*rep.qscore) : json(nullptr)},
              {"qscore_text", rep.qscore ? std::to_string(*rep.qscore)
                                         : "below start n (" + std::to_string(rep.schedule.start) + ")"},
              {"stop_reason", to_string(rep.stop_reason)}};
    if (!ctx.config.empty()) j["config"] = ctx.config;
    if (!ctx.machine.empty()) j["machine"] = ctx.machine;
    return j;
}

inline SweepReport report_from_json(const json& j) {
    try {
        SweepReport rep;
        rep.solver_id = j.at("solver_id").get<std::string>();
        const auto& bp = j.at("beta_params");
        rep.params.beta_star = bp.at("beta_star").get<double>();
        rep.params.m_instances = bp.at("m").get<std::size_t>();
        rep.params.cmax_mode = parse_cmax_mode(bp.at("cmax_mode").get<std::string>());
        rep.params.baseline = parse_baseline(bp.at("baseline").get<std::string>());
        rep.budget = budget_from_json(j.at("budget"));
        const auto& s = j.at("schedule");
        rep.schedule = {s.at("start").get<std::size_t>(), s.at("step").get<std::size_t>(),
                        s.at("max").get<std::size_t>()};
        rep.seed_base = j.at("seed_base").get<std::uint64_t>();
        rep.time_cap_ms = j.at("time_cap_ms").get<double>();
        rep.workers = j.at("workers").get<std::size_t>();
        rep.oracle_source = j.value("oracle_source", std::string{});
        for (const auto& r : j.at("records")) {
            SizeRecord rec;
            rec.n = r.at("n").get<std::size_t>();
            rec.m = r.at("m").get<std::size_t>();
            rec.seed_base = r.at("seed_base").get<std::uint64_t>();
            rec.mean_cut = r.at("mean_cut").get<double>();
            rec.std_cut = r.at("std_cut").get<double>();
            rec.baseline = r.at("baseline").get<double>();
            rec.cmax = r.at("cmax").get<double>();
            rec.beta = r.at("beta").get<double>();
            rec.beta_stderr = r.at("beta_stderr").get<double>();
            rec.beta_approx = r.at("beta_approx").get<double>();
            if (!r.at("beta_oracle").is_null()) rec.beta_oracle = r.at("beta_oracle").get<double>();
            rec.mean_time_ms = detail::time_from(r, "mean_time_ms");
            rec.min_time_ms = detail::time_from(r, "min_time_ms");
            rec.max_time_ms = detail::time_from(r, "max_time_ms");
            rec.no_result_count = r.at("no_result_count").get<std::size_t>();
            for (const auto& o : r.at("instances")) {
                InstanceOutcome out;
                out.graph_seed = o.at("graph_seed").get<std::uint64_t>();
                out.best_cut = o.at("best_cut").get<std::uint64_t>();
                out.status = parse_status(o.at("status").get<std::string>());
                out.elapsed_ms = detail::time_from(o, "elapsed_ms");
                out.reason = o.value("reason", std::string{});
                rec.instances.push_back(std::move(out));
            }
            rep.records.push_back(std::move(rec));
        }
        if (!j.at("qscore").is_null()) rep.qscore = j.at("qscore").get<std::size_t>();
        rep.stop_reason = parse_stop_reason(j.at("stop_reason").get<std::string>());
        return rep;
    } catch (const json::exception& e) {
        throw ParseError(0, std::string("malformed report: ") + e.what());
    }
}

namespace detail {

inline std::string num(double x) {
    if (std::isnan(x)) return "";
    return params::format_double(x);
}

}  // namespace detail

inline constexpr const char* report_csv_header =
    "n,mean_cut,std_cut,beta,beta_stderr,mean_time_ms,min_time_ms,max_time_ms,no_result_count";

/// One row per size. Time columns are empty for deterministic budgets.
inline void write_report_csv(std::ostream& out, const SweepReport& rep) {
    const bool timed = rep.budget.is_wall_clock();
    out << report_csv_header << '\n';
    for (const auto& r : rep.records) {
        out << r.n << ',' << detail::num(r.mean_cut) << ',' << detail::num(r.std_cut) << ','
            << detail::num(r.beta) << ',' << detail::num(r.beta_stderr) << ','
            << (timed ? detail::num(r.mean_time_ms) : "") << ','
            << (timed ? detail::num(r.min_time_ms) : "") << ','
            << (timed ? detail::num(r.max_time_ms) : "") << ',' << r.no_result_count << '\n';
    }
}

/// beta.tsv rows: n, beta, beta - stderr, beta + stderr.
inline void write_beta_plot(std::ostream& out, const SweepReport& rep) {
    out << "# n\tbeta\tlower_error\tupper_error\n";
    for (const auto& r : rep.records) {
        out << r.n << '\t' << detail::num(r.beta) << '\t' << detail::num(r.beta - r.beta_stderr) << '\t'
            << detail::num(r.beta + r.beta_stderr) << '\n';
    }
}

/// time.tsv rows: n, mean, min, max (ms). Sizes without timings are skipped.
inline void write_time_plot(std::ostream& out, const SweepReport& rep) {
    out << "# n\tmean_ms\tmin_ms\tmax_ms\n";
    for (const auto& r : rep.records) {
        if (!rep.budget.is_wall_clock() || std::isnan(r.mean_time_ms)) continue;
        out << r.n << '\t' << detail::num(r.mean_time_ms) << '\t' << detail::num(r.min_time_ms) << '\t'
            << detail::num(r.max_time_ms) << '\n';
    }
}

// ---- files ----------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "': file not found or unreadable");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace qscore
