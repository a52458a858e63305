#pragma once

#include "qscore/solver.hpp"

namespace qscore {

/// The protocol's zero point: one uniformly random assignment per run.
/// Always answers, whatever the budget.
class RandomSolver final : public Solver {
public:
    static RandomSolver parse(const ParamMap& m) {
        params::reject_unknown("random", m, {});
        return {};
    }

    std::string name() const override { return "random"; }
    ParamMap effective_params() const override { return {}; }

    SolverRun solve(const GraphInstance& g, const SolverBudget& budget,
                    const IncumbentTrace& trace = {}) const override {
        return detail::run_on_maxcut(*this, g, budget, trace, [&](const auto& adj, const auto&,
                                                                  const auto& energy_trace) {
            return draw(adj, budget.seed, energy_trace);
        });
    }

    template <typename Coeff>
    static QuboResult<Coeff> draw(const Adjacency<Coeff>& adj, std::uint64_t seed,
                                  const EnergyTrace<Coeff>& trace = {}) {
        Rng rng(seed);
        FlipState<Coeff> state(adj, random_assignment(rng, adj.n()));
        QuboResult<Coeff> res;
        res.energy = state.energy();
        res.x = state.assignment();
        res.has_result = true;
        res.complete = true;
        res.iterations = 1;
        if (trace) trace(1, res.energy);
        return res;
    }
};

}  // namespace qscore
