#pragma once

// The Q-score protocol: beta(N), the two C_max modes, per-size aggregation
// over M seeded instances, and the size sweep with its stopping and scoring
// rules.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qscore/error.hpp"
#include "qscore/graph.hpp"
#include "qscore/solver.hpp"

namespace qscore {

/// Expected cost of a random cut. The protocol's own convention is N^2/8;
/// the exact expectation on G(N, 1/2) is N(N-1)/8.
enum class Baseline { HalfSquare, Exact };

inline std::string to_string(Baseline b) { return b == Baseline::HalfSquare ? "n2_8" : "exact"; }

inline Baseline parse_baseline(const std::string& s) {
    if (s == "n2_8") return Baseline::HalfSquare;
    if (s == "exact") return Baseline::Exact;
    throw ConfigError("baseline must be 'n2_8' or 'exact', got '" + s + "'");
}

inline double random_cut_baseline(std::size_t n, Baseline b) {
    const double x = static_cast<double>(n);
    return b == Baseline::HalfSquare ? x * x / 8.0 : x * (x - 1.0) / 8.0;
}

/// C_max(N) ~ N^2/8 + 0.178 N^(3/2), a fit of optimal cuts for N in [5, 40].
inline double cmax_approx(std::size_t n) {
    if (n == 0) throw DomainError("cmax_approx: n must be >= 1");
    const double x = static_cast<double>(n);
    return x * x / 8.0 + 0.178 * std::pow(x, 1.5);
}

/// (mean_cut - baseline) / (cmax - baseline): 0 for a random cut, 1 for C_max.
inline double beta(std::size_t n, double mean_cut, double cmax, double baseline) {
    if (!(cmax > baseline)) {
        throw ScoringError("beta undefined at n=" + std::to_string(n) + ": C_max " +
                           params::format_double(cmax) + " does not exceed the random baseline " +
                           params::format_double(baseline));
    }
    return (mean_cut - baseline) / (cmax - baseline);
}

enum class CmaxMode { Approximation, Oracle };

inline std::string to_string(CmaxMode m) { return m == CmaxMode::Approximation ? "approx" : "oracle"; }

inline CmaxMode parse_cmax_mode(const std::string& s) {
    if (s == "approx") return CmaxMode::Approximation;
    if (s == "oracle") return CmaxMode::Oracle;
    throw ConfigError("cmax mode must be 'approx' or 'oracle', got '" + s + "'");
}

struct BetaParams {
    double beta_star = 0.2;
    std::size_t m_instances = 100;
    CmaxMode cmax_mode = CmaxMode::Approximation;
    Baseline baseline = Baseline::HalfSquare;

    void validate() const {
        if (!(beta_star > 0.0 && beta_star < 1.0)) throw ConfigError("beta_star must be in (0, 1)");
        if (m_instances == 0) throw ConfigError("m must be >= 1");
    }
};

/// Identifies one seeded instance set; oracle values are only valid for the
/// exact set they were computed on.
struct InstanceSetKey {
    std::size_t n;
    std::uint64_t seed_base;
    std::size_t m;

    auto operator<=>(const InstanceSetKey&) const = default;
};

/// Mean best cut of a reference solver per instance set, used as C_max.
class OracleTable {
public:
    OracleTable() = default;
    OracleTable(std::string source, std::uint64_t seed_base, std::size_t m)
        : source_(std::move(source)), seed_base_(seed_base), m_(m) {}

    const std::string& source() const noexcept { return source_; }
    std::uint64_t seed_base() const noexcept { return seed_base_; }
    std::size_t m() const noexcept { return m_; }
    const std::map<std::size_t, double>& values() const noexcept { return cmax_; }

    void set(std::size_t n, double cmax) { cmax_[n] = cmax; }

    std::optional<double> lookup(const InstanceSetKey& key) const {
        if (key.seed_base != seed_base_ || key.m != m_) return std::nullopt;
        const auto it = cmax_.find(key.n);
        if (it == cmax_.end()) return std::nullopt;
        return it->second;
    }

    friend bool operator==(const OracleTable&, const OracleTable&) = default;

private:
    std::string source_;
    std::uint64_t seed_base_ = 0;
    std::size_t m_ = 0;
    std::map<std::size_t, double> cmax_;
};

/// Supplies C_max for oracle mode.
class OracleProvider {
public:
    virtual ~OracleProvider() = default;
    virtual std::string source() const = 0;
    virtual double cmax(const InstanceSetKey& key) = 0;
};

class TableOracle final : public OracleProvider {
public:
    explicit TableOracle(OracleTable table) : table_(std::move(table)) {}

    std::string source() const override { return table_.source(); }

    double cmax(const InstanceSetKey& key) override {
        if (const auto v = table_.lookup(key)) return *v;
        throw ScoringError("oracle table '" + table_.source() + "' has no entry for n=" +
                           std::to_string(key.n) + " seed_base=" + std::to_string(key.seed_base) +
                           " m=" + std::to_string(key.m));
    }

private:
    OracleTable table_;
};

/// One instance's contribution to a SizeRecord.
struct InstanceOutcome {
    std::uint64_t graph_seed = 0;
    std::uint64_t best_cut = 0;  ///< 0 when status is NoResult
    double elapsed_ms = 0.0;
    SolverStatus status = SolverStatus::NoResult;
    std::string reason;
};

struct SizeRecord {
    std::size_t n = 0;
    std::size_t m = 0;
    std::uint64_t seed_base = 0;
    double mean_cut = 0.0;
    double std_cut = 0.0;  ///< sample standard deviation over the m instances
    double baseline = 0.0;
    double cmax = 0.0;     ///< C_max used for `beta`
    double beta = 0.0;     ///< under the selected C_max mode
    double beta_stderr = 0.0;
    double beta_approx = 0.0;
    std::optional<double> beta_oracle;
    double mean_time_ms = 0.0;
    double min_time_ms = 0.0;
    double max_time_ms = 0.0;
    std::size_t no_result_count = 0;
    std::vector<InstanceOutcome> instances;
};

struct EvaluationOptions {
    std::size_t workers = 1;
    OracleProvider* oracle = nullptr;  ///< required for CmaxMode::Oracle
};

namespace detail {

/// Solver seed for instance k: budget seed + k, so instance k sees the same
/// stream regardless of worker scheduling.
inline SolverBudget instance_budget(const SolverBudget& b, std::size_t k) {
    return b.with_seed(b.seed + k);
}

inline std::vector<SolverRun> run_instances(const Solver& solver, std::size_t n, std::size_t m,
                                            const SolverBudget& budget, std::uint64_t seed_base,
                                            std::size_t workers) {
    std::vector<SolverRun> runs(m);
    auto one = [&](std::size_t k) {
        const auto g = generate_er_graph(n, EdgeProbability{1, 2}, seed_base + k);
        try {
            runs[k] = solver.solve(g, instance_budget(budget, k));
        } catch (const std::exception& e) {
            runs[k] = SolverRun{};
            runs[k].status = SolverStatus::NoResult;
            runs[k].solver_id = solver.id();
            runs[k].reason = std::string("solver error: ") + e.what();
        }
    };
    workers = std::max<std::size_t>(1, std::min(workers, m));
    if (workers == 1) {
        for (std::size_t k = 0; k < m; ++k) one(k);
        return runs;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t k; (k = next.fetch_add(1)) < m;) one(k);
        });
    }
    pool.clear();  // joins
    return runs;
}

}  // namespace detail

/// Aggregates per-instance runs into a SizeRecord. NoResult instances
/// contribute exactly the random baseline to C(N), i.e. beta 0 each.
inline SizeRecord aggregate_size(std::size_t n, std::uint64_t seed_base, const std::vector<SolverRun>& runs,
                                 const BetaParams& params, OracleProvider* oracle) {
    params.validate();
    if (runs.empty()) throw DomainError("aggregate_size: no runs");
    SizeRecord r;
    r.n = n;
    r.m = runs.size();
    r.seed_base = seed_base;
    r.baseline = random_cut_baseline(n, params.baseline);
    double sum = 0, t_sum = 0;
    r.min_time_ms = runs.front().elapsed_ms;
    r.max_time_ms = runs.front().elapsed_ms;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const auto& run = runs[k];
        const double c = run.has_result() ? static_cast<double>(run.best_cut) : r.baseline;
        if (!run.has_result()) ++r.no_result_count;
        r.instances.push_back({seed_base + k, run.has_result() ? run.best_cut : 0, run.elapsed_ms,
                               run.status, run.reason});
        sum += c;
        t_sum += run.elapsed_ms;
        r.min_time_ms = std::min(r.min_time_ms, run.elapsed_ms);
        r.max_time_ms = std::max(r.max_time_ms, run.elapsed_ms);
    }
    const double m = static_cast<double>(r.m);
    r.mean_cut = sum / m;
    r.mean_time_ms = t_sum / m;
    if (r.m > 1) {
        double ss = 0;
        for (const auto& run : runs) {
            const double c = run.has_result() ? static_cast<double>(run.best_cut) : r.baseline;
            ss += (c - r.mean_cut) * (c - r.mean_cut);
        }
        r.std_cut = std::sqrt(ss / (m - 1.0));
    }

    const double approx = cmax_approx(n);
    r.beta_approx = beta(n, r.mean_cut, approx, r.baseline);
    if (oracle != nullptr) {
        const double oc = oracle->cmax({n, seed_base, r.m});
        r.beta_oracle = beta(n, r.mean_cut, oc, r.baseline);
        if (params.cmax_mode == CmaxMode::Oracle) r.cmax = oc;
    }
    if (params.cmax_mode == CmaxMode::Oracle) {
        if (oracle == nullptr) throw ScoringError("oracle mode requested without an oracle");
        r.beta = *r.beta_oracle;
    } else {
        r.cmax = approx;
        r.beta = r.beta_approx;
    }
    r.beta_stderr = r.std_cut / std::sqrt(m) / (r.cmax - r.baseline);
    return r;
}

/// Generates instances seed_base + 0 .. m-1, solves each under `budget`
/// (instance k uses solver seed budget.seed + k) and aggregates.
inline SizeRecord evaluate_size(const Solver& solver, std::size_t n, const BetaParams& params,
                                const SolverBudget& budget, std::uint64_t seed_base,
                                const EvaluationOptions& opts = {}) {
    params.validate();
    if (n == 0) throw DomainError("evaluate_size: n must be >= 1");
    const auto runs = detail::run_instances(solver, n, params.m_instances, budget, seed_base, opts.workers);
    return aggregate_size(n, seed_base, runs, params, opts.oracle);
}

/// Oracle that runs a reference solver on the same instance set on demand
/// and memoises the mean best cut; the table can be persisted and reused.
class SolverOracle final : public OracleProvider {
public:
    SolverOracle(const Solver& solver, SolverBudget budget, std::size_t workers = 1)
        : solver_(&solver), budget_(budget), workers_(workers) {}

    std::string source() const override { return solver_->id() + "@" + budget_.describe(); }

    double cmax(const InstanceSetKey& key) override {
        if (!table_ || table_->seed_base() != key.seed_base || table_->m() != key.m) {
            table_ = OracleTable(source(), key.seed_base, key.m);
        }
        if (const auto v = table_->lookup(key)) return *v;
        BetaParams p;
        p.m_instances = key.m;
        const auto record = evaluate_size(*solver_, key.n, p, budget_, key.seed_base, {workers_, nullptr});
        table_->set(key.n, record.mean_cut);
        return record.mean_cut;
    }

    const std::optional<OracleTable>& table() const noexcept { return table_; }

private:
    const Solver* solver_;
    SolverBudget budget_;
    std::size_t workers_;
    std::optional<OracleTable> table_;
};

/// Mean best cut of `solver` for each size over the seeded instance set.
inline OracleTable build_oracle(const Solver& solver, const std::vector<std::size_t>& sizes, std::size_t m,
                                const SolverBudget& budget, std::uint64_t seed_base,
                                std::size_t workers = 1) {
    SolverOracle oracle(solver, budget, workers);
    OracleTable table(oracle.source(), seed_base, m);
    for (const auto n : sizes) table.set(n, oracle.cmax({n, seed_base, m}));
    return table;
}

/// Oracle table whose C_max is each record's own mean cut: the solver acts
/// as its own oracle and scores beta = 1 by construction.
inline OracleTable self_oracle(const std::string& source, const std::vector<SizeRecord>& records) {
    if (records.empty()) throw DomainError("self_oracle: no records");
    OracleTable table(source, records.front().seed_base, records.front().m);
    for (const auto& r : records) table.set(r.n, r.mean_cut);
    return table;
}

struct SweepSchedule {
    std::size_t start = 100;
    std::size_t step = 100;
    std::size_t max = 10000;

    void validate() const {
        if (start == 0) throw ConfigError("schedule start must be >= 1");
        if (step == 0) throw ConfigError("schedule step must be >= 1");
        if (max < start) throw ConfigError("schedule max must be >= start");
    }
};

enum class StopReason { BetaBelowThreshold, MeanTimeExceeded, SizeLimit };

inline std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::BetaBelowThreshold: return "beta_below_threshold";
        case StopReason::MeanTimeExceeded: return "mean_time_exceeded";
        case StopReason::SizeLimit: return "size_limit";
    }
    return "unknown";
}

inline StopReason parse_stop_reason(const std::string& s) {
    if (s == "beta_below_threshold") return StopReason::BetaBelowThreshold;
    if (s == "mean_time_exceeded") return StopReason::MeanTimeExceeded;
    if (s == "size_limit") return StopReason::SizeLimit;
    throw ParseError(0, "unknown stop reason '" + s + "'");
}

struct SweepOptions {
    double time_cap_ms = 100000.0;  ///< stop once a size's mean runtime exceeds this
    std::size_t workers = 1;
    OracleProvider* oracle = nullptr;
    /// Called after each size; for progress output.
    std::function<void(const SizeRecord&)> on_size;
};

struct SweepReport {
    std::string solver_id;
    BetaParams params;
    SolverBudget budget = SolverBudget::deterministic(1);
    SweepSchedule schedule;
    std::uint64_t seed_base = 0;
    double time_cap_ms = 100000.0;
    std::size_t workers = 1;
    std::string oracle_source;
    std::vector<SizeRecord> records;
    std::optional<std::size_t> qscore;  ///< empty: no size qualified ("below start n")
    StopReason stop_reason = StopReason::SizeLimit;
};

/// Whether a size counts towards the Q-score: beta above threshold and, for
/// wall-clock budgets, a mean runtime within the budget.
inline bool qualifies(const SizeRecord& r, const BetaParams& params, const SolverBudget& budget) {
    if (!(r.beta > params.beta_star)) return false;
    return !budget.is_wall_clock() || r.mean_time_ms <= budget.limit_ms();
}

inline std::optional<std::size_t> compute_qscore(const std::vector<SizeRecord>& records,
                                                 const BetaParams& params, const SolverBudget& budget) {
    std::optional<std::size_t> best;
    for (const auto& r : records) {
        if (qualifies(r, params, budget) && (!best || r.n > *best)) best = r.n;
    }
    return best;
}

/// Evaluates start, start+step, ... until beta <= beta_star, the mean
/// runtime exceeds the time cap, or the next size would pass schedule.max.
inline SweepReport run_sweep(const Solver& solver, const SweepSchedule& schedule, const BetaParams& params,
                             const SolverBudget& budget, std::uint64_t seed_base,
                             const SweepOptions& opts = {}) {
    schedule.validate();
    params.validate();
    SweepReport rep;
    rep.solver_id = solver.id();
    rep.params = params;
    rep.budget = budget;
    rep.schedule = schedule;
    rep.seed_base = seed_base;
    rep.time_cap_ms = opts.time_cap_ms;
    rep.workers = opts.workers;
    if (opts.oracle) rep.oracle_source = opts.oracle->source();
    if (params.cmax_mode == CmaxMode::Oracle && !opts.oracle) {
        throw ScoringError("oracle mode requested without an oracle");
    }
    rep.stop_reason = StopReason::SizeLimit;
    for (std::size_t n = schedule.start; n <= schedule.max; n += schedule.step) {
        auto record = evaluate_size(solver, n, params, budget, seed_base, {opts.workers, opts.oracle});
        rep.records.push_back(std::move(record));
        const auto& r = rep.records.back();
        if (opts.on_size) opts.on_size(r);
        if (!(r.beta > params.beta_star)) {
            rep.stop_reason = StopReason::BetaBelowThreshold;
            break;
        }
        if (r.mean_time_ms > opts.time_cap_ms) {
            rep.stop_reason = StopReason::MeanTimeExceeded;
            break;
        }
        if (schedule.max - n < schedule.step) break;
    }
    rep.qscore = compute_qscore(rep.records, params, budget);
    return rep;
}

}  // namespace qscore
