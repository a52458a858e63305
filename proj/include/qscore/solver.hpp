#pragma once

#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qscore/budget.hpp"
#include "qscore/error.hpp"
#include "qscore/graph.hpp"
#include "qscore/qubo.hpp"

namespace qscore {

enum class SolverStatus {
    Solved,                    ///< finished by its own stopping rule
    BudgetExceededWithResult,  ///< stopped by the budget, best-so-far returned
    NoResult,                  ///< no cut to report; scored as a random cut
};

inline std::string to_string(SolverStatus s) {
    switch (s) {
        case SolverStatus::Solved: return "solved";
        case SolverStatus::BudgetExceededWithResult: return "budget_exceeded";
        case SolverStatus::NoResult: return "no_result";
    }
    return "unknown";
}

inline SolverStatus parse_status(const std::string& s) {
    if (s == "solved") return SolverStatus::Solved;
    if (s == "budget_exceeded") return SolverStatus::BudgetExceededWithResult;
    if (s == "no_result") return SolverStatus::NoResult;
    throw ParseError(0, "unknown solver status '" + s + "'");
}

/// Outcome of one solver execution on one instance.
struct SolverRun {
    Assignment best_assignment;
    std::uint64_t best_cut = 0;
    double elapsed_ms = 0.0;
    SolverStatus status = SolverStatus::NoResult;
    std::string solver_id;
    std::uint64_t iterations = 0;
    std::string reason;  ///< why there is no result; empty otherwise

    bool has_result() const noexcept { return status != SolverStatus::NoResult; }
};

/// Called whenever a run's incumbent strictly improves.
using IncumbentTrace =
    std::function<void(std::uint64_t iteration, std::uint64_t best_cut, double elapsed_ms)>;

/// Solver parameters as given on the command line or in a config file.
using ParamMap = std::map<std::string, std::string>;

class Solver {
public:
    virtual ~Solver() = default;

    virtual std::string name() const = 0;

    /// Every effective parameter, defaults included.
    virtual ParamMap effective_params() const = 0;

    /// name(k=v,...) over the effective parameters.
    std::string id() const {
        std::string out = name() + "(";
        bool first = true;
        for (const auto& [k, v] : effective_params()) {
            if (!first) out += ",";
            out += k + "=" + v;
            first = false;
        }
        return out + ")";
    }

    /// Solves Max-Cut on g. Timing covers the graph-to-QUBO conversion and
    /// stops when the search returns. Never throws for budget reasons.
    virtual SolverRun solve(const GraphInstance& g, const SolverBudget& budget,
                            const IncumbentTrace& trace = {}) const = 0;
};

/// Result of a search over a QUBO; energy is meaningful iff has_result.
template <typename Coeff>
struct QuboResult {
    Assignment x;
    Coeff energy{};
    bool has_result = false;
    bool complete = false;  ///< search ended by its own rule rather than the budget
    std::uint64_t iterations = 0;
    std::string reason;
};

template <typename Coeff>
using EnergyTrace = std::function<void(std::uint64_t iteration, Coeff best_energy)>;

namespace detail {

/// Shared by every solver: clock start, conversion, search, packaging. The
/// reported cut is recomputed on the graph, never taken from the search.
template <typename Search>
SolverRun run_on_maxcut(const Solver& solver, const GraphInstance& g, const SolverBudget& budget,
                        const IncumbentTrace& trace, Search&& search) {
    BudgetTracker tracker(budget);
    const Qubo q = maxcut_to_qubo(g);
    const Adjacency<std::int64_t> adj(q);
    EnergyTrace<std::int64_t> energy_trace;
    if (trace) {
        energy_trace = [&](std::uint64_t it, std::int64_t e) {
            trace(it, static_cast<std::uint64_t>(-e), tracker.elapsed_ms());
        };
    }
    QuboResult<std::int64_t> res = search(adj, tracker, energy_trace);
    SolverRun run;
    run.elapsed_ms = tracker.elapsed_ms();
    run.solver_id = solver.id();
    run.iterations = res.iterations;
    if (!res.has_result) {
        run.status = SolverStatus::NoResult;
        run.reason = res.reason.empty() ? "no assignment scored within budget" : res.reason;
        return run;
    }
    run.status = res.complete ? SolverStatus::Solved : SolverStatus::BudgetExceededWithResult;
    run.best_cut = cut_cost(g, res.x);
    if (static_cast<std::int64_t>(run.best_cut) != -res.energy) {
        throw std::logic_error("solver " + run.solver_id + " reported energy " +
                               std::to_string(res.energy) + " for a cut of " +
                               std::to_string(run.best_cut));
    }
    run.best_assignment = std::move(res.x);
    return run;
}

}  // namespace detail

// Random stream conventions (mt19937_64 throughout):
//   bit      = r >> 63
//   index<n> = ((r >> 32) * n) >> 32        (n < 2^32)
//   unit     = (r >> 11) * 2^-53            in [0, 1)
using Rng = std::mt19937_64;

inline Assignment random_assignment(Rng& rng, std::size_t n) {
    Assignment x(n);
    for (auto& b : x) b = static_cast<std::uint8_t>(rng() >> 63);
    return x;
}

inline Variable uniform_index(Rng& rng, std::size_t n) {
    return static_cast<Variable>(((rng() >> 32) * static_cast<std::uint64_t>(n)) >> 32);
}

inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// ---- parameter parsing ----------------------------------------------------

namespace params {

inline void reject_unknown(const std::string& solver, const ParamMap& given,
                           std::initializer_list<const char*> known) {
    for (const auto& [k, v] : given) {
        bool ok = false;
        for (const char* name : known) ok = ok || k == name;
        if (!ok) throw ConfigError("solver '" + solver + "' has no parameter '" + k + "'");
    }
}

inline const std::string* find(const ParamMap& m, const std::string& key) {
    const auto it = m.find(key);
    return it == m.end() ? nullptr : &it->second;
}

inline std::uint64_t get_u64(const ParamMap& m, const std::string& key, std::uint64_t fallback) {
    const auto* v = find(m, key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || p != v->data() + v->size()) {
        throw ConfigError("parameter '" + key + "' expects a non-negative integer, got '" + *v + "'");
    }
    return out;
}

inline double get_double(const ParamMap& m, const std::string& key, double fallback) {
    const auto* v = find(m, key);
    if (!v) return fallback;
    if (*v == "inf") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double out = std::stod(*v, &used);
        if (used != v->size()) throw std::invalid_argument(*v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("parameter '" + key + "' expects a number, got '" + *v + "'");
    }
}

inline bool get_bool(const ParamMap& m, const std::string& key, bool fallback) {
    const auto* v = find(m, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError("parameter '" + key + "' expects true/false, got '" + *v + "'");
}

/// Shortest text that reads back to the same double.
inline std::string format_double(double x) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

}  // namespace params

}  // namespace qscore
