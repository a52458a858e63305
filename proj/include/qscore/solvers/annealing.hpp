#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

#include "qscore/solver.hpp"

namespace qscore {

struct AnnealingParams {
    double t_initial = 0.0;  ///< 0 = auto: max |delta| over `probes` random flips
    std::uint64_t probes = 1000;
    double cooling = 0.99;
    double t_final = 0.01;
    std::uint64_t sweeps_per_temperature = 1;
    bool restart = true;

    static AnnealingParams parse(const ParamMap& m) {
        params::reject_unknown("sa", m, {"t_initial", "probes", "cooling", "t_final",
                                         "sweeps_per_temperature", "restart"});
        AnnealingParams p;
        if (const auto* t = params::find(m, "t_initial"); !t || *t != "auto") {
            p.t_initial = params::get_double(m, "t_initial", p.t_initial);
        }
        p.probes = params::get_u64(m, "probes", p.probes);
        p.cooling = params::get_double(m, "cooling", p.cooling);
        p.t_final = params::get_double(m, "t_final", p.t_final);
        p.sweeps_per_temperature = params::get_u64(m, "sweeps_per_temperature", p.sweeps_per_temperature);
        p.restart = params::get_bool(m, "restart", p.restart);
        p.validate();
        return p;
    }

    void validate() const {
        if (!(t_initial >= 0.0)) throw ConfigError("sa: t_initial must be >= 0 (0 = auto)");
        if (t_initial == 0.0 && probes == 0) throw ConfigError("sa: auto t_initial needs probes > 0");
        if (!(cooling > 0.0 && cooling <= 1.0)) throw ConfigError("sa: cooling must be in (0, 1]");
        if (!(t_final > 0.0)) throw ConfigError("sa: t_final must be > 0");
        if (sweeps_per_temperature == 0) throw ConfigError("sa: sweeps_per_temperature must be >= 1");
    }
};

/// Metropolis single-flip simulated annealing with geometric cooling.
///
/// One sweep is n proposals of a uniformly drawn variable; a move is accepted
/// if it does not raise the energy, else with probability exp(-delta / T).
/// T is multiplied by `cooling` every `sweeps_per_temperature` sweeps. Once
/// T < t_final the schedule restarts from a fresh random assignment (when
/// `restart`), keeping the global incumbent, which is updated after every
/// accepted move.
///
/// Budgets: a deterministic quota counts sweeps. Under a wall clock the
/// deadline is checked before every sweep, and a sweep is not started if the
/// previous sweep's duration would carry it past the deadline.
class AnnealingSolver final : public Solver {
public:
    /// Observes the current energy at the end of every sweep.
    using SweepObserver = std::function<void(double energy)>;

    explicit AnnealingSolver(AnnealingParams p = {}) : p_(p) { p_.validate(); }

    std::string name() const override { return "sa"; }

    ParamMap effective_params() const override {
        return {{"t_initial", p_.t_initial == 0.0 ? "auto" : params::format_double(p_.t_initial)},
                {"probes", std::to_string(p_.probes)},
                {"cooling", params::format_double(p_.cooling)},
                {"t_final", params::format_double(p_.t_final)},
                {"sweeps_per_temperature", std::to_string(p_.sweeps_per_temperature)},
                {"restart", p_.restart ? "true" : "false"}};
    }

    void set_sweep_observer(SweepObserver obs) { observer_ = std::move(obs); }

    SolverRun solve(const GraphInstance& g, const SolverBudget& budget,
                    const IncumbentTrace& trace = {}) const override {
        return detail::run_on_maxcut(*this, g, budget, trace, [&](const auto& adj, const auto& tracker,
                                                                  const auto& energy_trace) {
            return anneal(adj, tracker, energy_trace);
        });
    }

    template <typename Coeff>
    QuboResult<Coeff> anneal(const Adjacency<Coeff>& adj, const BudgetTracker& tracker,
                             const EnergyTrace<Coeff>& trace = {}) const {
        const std::size_t n = adj.n();
        Rng rng(tracker.budget().seed);
        FlipState<Coeff> state(adj, random_assignment(rng, n));

        QuboResult<Coeff> res;
        res.x = state.assignment();
        res.energy = state.energy();
        res.has_result = true;
        if (trace) trace(0, res.energy);

        double t0 = p_.t_initial;
        if (t0 == 0.0) {
            for (std::uint64_t k = 0; k < p_.probes; ++k) {
                const double d = std::abs(static_cast<double>(state.delta(uniform_index(rng, n))));
                t0 = std::max(t0, d);
            }
            if (t0 == 0.0) t0 = 1.0;  // flat landscape: any temperature will do
        }

        double t = t0;
        std::uint64_t sweeps = 0;
        std::uint64_t sweeps_at_t = 0;
        std::chrono::nanoseconds last_sweep{0};
        for (;;) {
            if (tracker.would_exceed(sweeps, last_sweep)) break;
            if (t < p_.t_final) {
                if (!p_.restart) {
                    res.complete = true;
                    break;
                }
                state.reset(random_assignment(rng, n));
                consider(state, res, sweeps, trace);
                t = t0;
                sweeps_at_t = 0;
            }
            const auto sweep_start = Clock::now();
            for (std::size_t k = 0; k < n; ++k) {
                const Variable i = uniform_index(rng, n);
                const Coeff d = state.delta(i);
                if (d <= Coeff{0} || uniform_unit(rng) < std::exp(-static_cast<double>(d) / t)) {
                    state.flip(i);
                    if (d < Coeff{0}) consider(state, res, sweeps, trace);
                }
            }
            ++sweeps;
            if (++sweeps_at_t == p_.sweeps_per_temperature) {
                t *= p_.cooling;
                sweeps_at_t = 0;
            }
            if (observer_) observer_(static_cast<double>(state.energy()));
            if (tracker.is_wall_clock()) last_sweep = Clock::now() - sweep_start;
        }
        res.iterations = sweeps;
        return res;
    }

private:
    template <typename Coeff>
    static void consider(const FlipState<Coeff>& state, QuboResult<Coeff>& res, std::uint64_t sweep,
                         const EnergyTrace<Coeff>& trace) {
        if (state.energy() < res.energy) {
            res.energy = state.energy();
            res.x = state.assignment();
            if (trace) trace(sweep, res.energy);
        }
    }

    AnnealingParams p_;
    SweepObserver observer_;
};

}  // namespace qscore
