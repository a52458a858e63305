#pragma once

// Run configuration. The config file is plain "key = value" lines; '#'
// starts a comment line, blank lines are ignored, and later keys override
// earlier ones. Command-line flags use the same keys and override the file.
//
//   solver         exact | random | sa | tabu | remote
//   solver.<name>  solver parameter, e.g. solver.cooling = 0.995
//   start, step, max           size schedule
//   m, beta_star               instances per size, threshold
//   cmax           approx | oracle
//   baseline       n2_8 | exact
//   oracle_table   path to an oracle table (oracle mode)
//   oracle_solver  default | exact | random | sa | tabu  (oracle mode, no table)
//   oracle.<name>  oracle solver parameter
//   budget_ms      wall-clock budget per instance  } exactly one of these
//   quota          deterministic work quota        }
//   seed           solver seed base (instance k uses seed + k)
//   seed_base      graph seed base (instance k uses seed_base + k)
//   time_cap_ms    stop once a size's mean runtime exceeds this
//   workers        parallel instances per size
//   out            output directory
//   remote_url, remote_timeout_ms   endpoint for solver = remote

#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "qscore/error.hpp"
#include "qscore/protocol.hpp"
#include "qscore/remote.hpp"
#include "qscore/solver.hpp"
#include "qscore/solvers/annealing.hpp"
#include "qscore/solvers/exact.hpp"
#include "qscore/solvers/random.hpp"
#include "qscore/solvers/tabu.hpp"

namespace qscore {

using KeyValues = std::map<std::string, std::string>;

/// Parses config text; errors name the offending line.
inline KeyValues parse_config_text(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string{};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value', got '" + line + "'");
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "empty key");
        kv[key] = value;
    }
    return kv;
}

struct RunConfig {
    std::string solver = "sa";
    ParamMap solver_params;
    SweepSchedule schedule;
    BetaParams beta;
    std::string oracle_table;
    std::string oracle_solver = "default";
    ParamMap oracle_params;
    std::optional<std::int64_t> budget_ms;
    std::optional<std::uint64_t> quota;
    std::uint64_t seed = 0;
    std::uint64_t seed_base = 0;
    double time_cap_ms = 100000.0;
    std::size_t workers = 1;
    std::string out = "runs";
    std::string remote_url;
    std::int64_t remote_timeout_ms = 0;  ///< 0 = budget + margin + 5 s

    SolverBudget budget() const {
        if (budget_ms) return SolverBudget::wall_clock(std::chrono::milliseconds(*budget_ms), seed);
        return SolverBudget::deterministic(*quota, seed);
    }

    RemoteEndpoint endpoint() const {
        RemoteEndpoint ep;
        ep.base_url = remote_url;
        ep.token = RemoteEndpoint::token_from_env();
        const std::int64_t timeout = remote_timeout_ms > 0
                                         ? remote_timeout_ms
                                         : budget_ms.value_or(0) + RemoteEndpoint::margin.count() + 5000;
        ep.request_timeout = std::chrono::milliseconds(timeout);
        return ep;
    }

    /// Throws ConfigError naming the first invalid field.
    void validate() const {
        static const char* solvers[] = {"exact", "random", "sa", "tabu", "remote"};
        if (std::find(std::begin(solvers), std::end(solvers), solver) == std::end(solvers)) {
            throw ConfigError("unknown solver '" + solver + "'");
        }
        if (schedule.start == 0) throw ConfigError("start must be >= 1");
        if (schedule.step == 0) throw ConfigError("step must be >= 1");
        if (schedule.max < schedule.start) throw ConfigError("max must be >= start");
        beta.validate();
        if (budget_ms.has_value() == quota.has_value()) {
            throw ConfigError("exactly one of budget_ms and quota must be set");
        }
        if (budget_ms && *budget_ms <= 0) throw ConfigError("budget_ms must be > 0");
        if (workers == 0) throw ConfigError("workers must be >= 1");
        if (!(time_cap_ms > 0)) throw ConfigError("time_cap_ms must be > 0");
        if (solver == "remote") {
            if (remote_url.empty()) throw ConfigError("solver 'remote' needs remote_url");
            endpoint().check_against(budget());
        }
        if (beta.cmax_mode == CmaxMode::Oracle && oracle_table.empty()) {
            static const char* oracles[] = {"default", "exact", "random", "sa", "tabu"};
            if (std::find(std::begin(oracles), std::end(oracles), oracle_solver) == std::end(oracles)) {
                throw ConfigError("unknown oracle_solver '" + oracle_solver + "'");
            }
        }
    }

    /// Every effective setting, defaults included, as key-value pairs.
    KeyValues to_kv() const {
        KeyValues kv = {{"solver", solver},
                        {"start", std::to_string(schedule.start)},
                        {"step", std::to_string(schedule.step)},
                        {"max", std::to_string(schedule.max)},
                        {"m", std::to_string(beta.m_instances)},
                        {"beta_star", params::format_double(beta.beta_star)},
                        {"cmax", to_string(beta.cmax_mode)},
                        {"baseline", to_string(beta.baseline)},
                        {"seed", std::to_string(seed)},
                        {"seed_base", std::to_string(seed_base)},
                        {"time_cap_ms", params::format_double(time_cap_ms)},
                        {"workers", std::to_string(workers)},
                        {"out", out}};
        if (budget_ms) kv["budget_ms"] = std::to_string(*budget_ms);
        if (quota) kv["quota"] = std::to_string(*quota);
        if (beta.cmax_mode == CmaxMode::Oracle) {
            if (!oracle_table.empty()) {
                kv["oracle_table"] = oracle_table;
            } else {
                kv["oracle_solver"] = oracle_solver;
                for (const auto& [k, v] : oracle_params) kv["oracle." + k] = v;
            }
        }
        if (solver == "remote") {
            kv["remote_url"] = remote_url;
            kv["remote_timeout_ms"] = std::to_string(endpoint().request_timeout.count());
        }
        for (const auto& [k, v] : solver_params) kv["solver." + k] = v;
        return kv;
    }

    static RunConfig from_kv(const KeyValues& kv) {
        RunConfig c;
        auto u64 = [](const std::string& key, const std::string& v) {
            ParamMap m{{key, v}};
            return params::get_u64(m, key, 0);
        };
        auto dbl = [](const std::string& key, const std::string& v) {
            ParamMap m{{key, v}};
            return params::get_double(m, key, 0);
        };
        for (const auto& [key, v] : kv) {
            if (key.rfind("solver.", 0) == 0) {
                c.solver_params[key.substr(7)] = v;
            } else if (key.rfind("oracle.", 0) == 0) {
                c.oracle_params[key.substr(7)] = v;
            } else if (key == "solver") {
                c.solver = v;
            } else if (key == "start") {
                c.schedule.start = u64(key, v);
            } else if (key == "step") {
                c.schedule.step = u64(key, v);
            } else if (key == "max") {
                c.schedule.max = u64(key, v);
            } else if (key == "m") {
                c.beta.m_instances = u64(key, v);
            } else if (key == "beta_star") {
                c.beta.beta_star = dbl(key, v);
            } else if (key == "cmax") {
                c.beta.cmax_mode = parse_cmax_mode(v);
            } else if (key == "baseline") {
                c.beta.baseline = parse_baseline(v);
            } else if (key == "oracle_table") {
                c.oracle_table = v;
            } else if (key == "oracle_solver") {
                c.oracle_solver = v;
            } else if (key == "budget_ms") {
                c.budget_ms = static_cast<std::int64_t>(u64(key, v));
            } else if (key == "quota") {
                c.quota = u64(key, v);
            } else if (key == "seed") {
                c.seed = u64(key, v);
            } else if (key == "seed_base") {
                c.seed_base = u64(key, v);
            } else if (key == "time_cap_ms") {
                c.time_cap_ms = dbl(key, v);
            } else if (key == "workers") {
                c.workers = u64(key, v);
            } else if (key == "out") {
                c.out = v;
            } else if (key == "remote_url") {
                c.remote_url = v;
            } else if (key == "remote_timeout_ms") {
                c.remote_timeout_ms = static_cast<std::int64_t>(u64(key, v));
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        }
        if (!c.budget_ms && !c.quota) c.budget_ms = 60000;
        c.validate();
        return c;
    }
};

/// Builds a solver by name; parameters are validated by the solver.
inline std::unique_ptr<Solver> make_solver(const std::string& name, const ParamMap& p,
                                           const std::optional<RemoteEndpoint>& remote = std::nullopt) {
    if (name == "exact") return std::make_unique<ExactSolver>(ExactParams::parse(p));
    if (name == "random") return std::make_unique<RandomSolver>(RandomSolver::parse(p));
    if (name == "sa") return std::make_unique<AnnealingSolver>(AnnealingParams::parse(p));
    if (name == "tabu") return std::make_unique<TabuDecompositionSolver>(TabuParams::parse(p));
    if (name == "remote") {
        params::reject_unknown("remote", p, {});
        if (!remote) throw ConfigError("solver 'remote' needs an endpoint");
        return std::make_unique<RemoteSolver>(*remote);
    }
    throw ConfigError("unknown solver '" + name + "'");
}

/// Exact enumeration up to `exact_limit` vertices, a stronger heuristic
/// above it, on the same seeded instances as the solver being scored.
class DefaultOracle final : public OracleProvider {
public:
    static constexpr std::size_t exact_limit = 24;

    DefaultOracle(const Solver& heuristic, SolverBudget budget, std::size_t workers = 1)
        : heuristic_(heuristic, budget, workers), workers_(workers) {}

    std::string source() const override {
        return "exact(n<=" + std::to_string(exact_limit) + ")+" + heuristic_.source();
    }

    double cmax(const InstanceSetKey& key) override {
        if (key.n <= exact_limit) {
            // a quota covering the whole space always completes
            SolverOracle exact(exact_, SolverBudget::deterministic(std::uint64_t{1} << (key.n - 1)), workers_);
            return exact.cmax(key);
        }
        return heuristic_.cmax(key);
    }

private:
    ExactSolver exact_;
    SolverOracle heuristic_;
    std::size_t workers_;
};

}  // namespace qscore
