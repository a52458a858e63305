#pragma once

#include <bit>
#include <cstdint>
#include <limits>

#include "qscore/solver.hpp"

namespace qscore {

struct ExactParams {
    /// Report the best-so-far when enumeration cannot finish. Off by default:
    /// an unfinished enumeration certifies nothing and is scored as NoResult.
    bool partial = false;

    static ExactParams parse(const ParamMap& m) {
        params::reject_unknown("exact", m, {"partial"});
        ExactParams p;
        p.partial = params::get_bool(m, "partial", p.partial);
        return p;
    }
};

/// Brute-force Max-Cut. Vertex 0 stays on side 0 (a cut and its complement
/// have equal cost); the remaining n-1 bits run through a reflected Gray code
/// so consecutive assignments differ in one flip. The clock is read once per
/// block of 4096 assignments. Deterministic quotas count scored assignments.
class ExactSolver final : public Solver {
public:
    static constexpr std::uint64_t block = 4096;

    explicit ExactSolver(ExactParams p = {}) : p_(p) {}

    std::string name() const override { return "exact"; }

    ParamMap effective_params() const override { return {{"partial", p_.partial ? "true" : "false"}}; }

    SolverRun solve(const GraphInstance& g, const SolverBudget& budget,
                    const IncumbentTrace& trace = {}) const override {
        return detail::run_on_maxcut(*this, g, budget, trace, [&](const auto& adj, const auto& tracker,
                                                                  const auto& energy_trace) {
            return enumerate(adj, tracker, energy_trace);
        });
    }

    /// Only valid for QUBOs whose energy is invariant under complementing
    /// every bit, as Max-Cut QUBOs are.
    template <typename Coeff>
    QuboResult<Coeff> enumerate(const Adjacency<Coeff>& adj, const BudgetTracker& tracker,
                                const EnergyTrace<Coeff>& trace = {}) const {
        const std::size_t n = adj.n();
        const std::uint64_t total = (n - 1) >= 64 ? std::numeric_limits<std::uint64_t>::max()
                                                  : (std::uint64_t{1} << (n - 1));
        QuboResult<Coeff> res;
        if (tracker.exhausted(0)) {
            res.reason = "budget exhausted before enumeration";
            return res;
        }
        FlipState<Coeff> state(adj, Assignment(n, 0));
        Assignment best = state.assignment();
        Coeff best_e = state.energy();
        std::uint64_t scored = 1;
        if (trace) trace(scored, best_e);
        bool stopped = false;
        while (scored < total) {
            if (scored % block == 0 && tracker.exhausted(scored)) {
                stopped = true;
                break;
            }
            if (!tracker.is_wall_clock() && tracker.exhausted(scored)) {
                stopped = true;
                break;
            }
            // step k flips bit ctz(k) of the Gray code over variables 1..n-1
            const auto bit = static_cast<Variable>(std::countr_zero(scored) + 1);
            state.flip(bit);
            ++scored;
            if (state.energy() < best_e) {
                best_e = state.energy();
                best = state.assignment();
                if (trace) trace(scored, best_e);
            }
        }
        res.iterations = scored;
        if (stopped && !p_.partial) {
            res.reason = "enumeration incomplete: " + std::to_string(scored) + " of " +
                         std::to_string(total) + " assignments";
            return res;
        }
        res.has_result = true;
        res.complete = !stopped;
        res.x = std::move(best);
        res.energy = best_e;
        return res;
    }

private:
    ExactParams p_;
};

}  // namespace qscore
