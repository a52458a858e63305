#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "qscore/solver.hpp"

namespace qscore {

struct TabuParams {
    std::uint64_t subproblem_size = 48;
    std::uint64_t tenure = 10;
    std::uint64_t inner_iterations = 0;  ///< 0 = 50 * subproblem_size
    double improvement_threshold = 0.0;  ///< stop once a pass improves by no more than this

    static TabuParams parse(const ParamMap& m) {
        params::reject_unknown("tabu", m, {"subproblem_size", "tenure", "inner_iterations",
                                           "improvement_threshold"});
        TabuParams p;
        p.subproblem_size = params::get_u64(m, "subproblem_size", p.subproblem_size);
        p.tenure = params::get_u64(m, "tenure", p.tenure);
        p.inner_iterations = params::get_u64(m, "inner_iterations", p.inner_iterations);
        p.improvement_threshold = params::get_double(m, "improvement_threshold", p.improvement_threshold);
        p.validate();
        return p;
    }

    void validate() const {
        if (subproblem_size == 0) throw ConfigError("tabu: subproblem_size must be >= 1");
        if (!(improvement_threshold >= 0.0)) throw ConfigError("tabu: improvement_threshold must be >= 0");
    }

    std::uint64_t effective_inner() const {
        return inner_iterations == 0 ? 50 * subproblem_size : inner_iterations;
    }
};

template <typename Coeff>
struct TabuOutcome {
    Assignment best;
    Coeff best_energy{};
    std::uint64_t moves = 0;
};

/// Single-flip tabu search on a small dense QUBO, starting from y0.
///
/// Every iteration makes the best admissible flip, even if it raises the
/// energy. A flipped variable is tabu for `tenure` iterations unless the
/// move would beat the best energy seen (aspiration). Small problems cap the
/// tenure at n/4 + 1, otherwise most of the neighbourhood stays locked.
/// Ties go to the lowest index, so the search is deterministic.
template <typename Coeff>
TabuOutcome<Coeff> tabu_search(const DenseQubo<Coeff>& q, Assignment y0, std::uint64_t iterations,
                               std::uint64_t tenure) {
    const std::size_t n = q.n;
    const std::uint64_t eff_tenure = std::min<std::uint64_t>({tenure, n / 4 + 1, n - 1});
    Assignment y = std::move(y0);
    std::vector<Coeff> field(q.linear);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (y[b]) field[a] += q.weights[a * n + b];
        }
    }
    Coeff e = q.energy(y);
    TabuOutcome<Coeff> out{y, e, 0};
    std::vector<std::uint64_t> tabu_until(n, 0);

    for (std::uint64_t it = 1; it <= iterations; ++it) {
        std::size_t pick = n;
        Coeff pick_delta{};
        for (std::size_t a = 0; a < n; ++a) {
            const Coeff d = y[a] ? -field[a] : field[a];
            const bool admissible = tabu_until[a] < it || e + d < out.best_energy;
            if (admissible && (pick == n || d < pick_delta)) {
                pick = a;
                pick_delta = d;
            }
        }
        if (pick == n) break;
        const Coeff* row = q.weights.data() + pick * n;
        if (y[pick]) {
            for (std::size_t b = 0; b < n; ++b) field[b] -= row[b];
        } else {
            for (std::size_t b = 0; b < n; ++b) field[b] += row[b];
        }
        y[pick] ^= 1;
        e += pick_delta;
        tabu_until[pick] = it + eff_tenure;
        ++out.moves;
        if (e < out.best_energy) {
            out.best_energy = e;
            out.best = y;
        }
    }
    return out;
}

/// Decomposition tabu search in the style of subproblem-splitting QUBO
/// solvers.
///
/// If n <= subproblem_size the whole problem gets one tabu search. Otherwise
/// each outer pass ranks all variables by |flip delta| (largest first, ties
/// by index), cuts the ranking into consecutive blocks of subproblem_size,
/// and for each block clamps everything else, runs tabu_search on the
/// block's sub-QUBO and writes the result back if it lowers the energy.
/// Passes repeat until one improves the energy by no more than
/// improvement_threshold (status Solved) or the budget is found exhausted
/// at the end of a pass. Deterministic quotas count passes.
class TabuDecompositionSolver final : public Solver {
public:
    explicit TabuDecompositionSolver(TabuParams p = {}) : p_(p) { p_.validate(); }

    std::string name() const override { return "tabu"; }

    ParamMap effective_params() const override {
        return {{"subproblem_size", std::to_string(p_.subproblem_size)},
                {"tenure", std::to_string(p_.tenure)},
                {"inner_iterations", std::to_string(p_.effective_inner())},
                {"improvement_threshold", params::format_double(p_.improvement_threshold)}};
    }

    SolverRun solve(const GraphInstance& g, const SolverBudget& budget,
                    const IncumbentTrace& trace = {}) const override {
        return detail::run_on_maxcut(*this, g, budget, trace, [&](const auto& adj, const auto& tracker,
                                                                  const auto& energy_trace) {
            return search(adj, tracker, energy_trace);
        });
    }

    template <typename Coeff>
    QuboResult<Coeff> search(const Adjacency<Coeff>& adj, const BudgetTracker& tracker,
                             const EnergyTrace<Coeff>& trace = {}) const {
        const std::size_t n = adj.n();
        Rng rng(tracker.budget().seed);
        FlipState<Coeff> state(adj, random_assignment(rng, n));
        QuboResult<Coeff> res;
        res.has_result = true;
        res.x = state.assignment();
        res.energy = state.energy();
        if (trace) trace(0, res.energy);

        std::vector<Variable> all(n);
        std::iota(all.begin(), all.end(), Variable{0});

        if (n <= p_.subproblem_size) {
            const auto sub = extract_dense_subqubo(state, all);
            auto out = tabu_search(sub, state.assignment(), p_.effective_inner(), p_.tenure);
            if (out.best_energy < res.energy) {
                res.x = std::move(out.best);
                res.energy = out.best_energy;
                if (trace) trace(1, res.energy);
            }
            res.iterations = 1;
            res.complete = true;
            return res;
        }

        std::vector<Variable> order(n);
        std::vector<Coeff> magnitude(n);
        std::uint64_t passes = 0;
        for (;;) {
            const Coeff before = state.energy();
            for (Variable i = 0; i < n; ++i) {
                const Coeff d = state.delta(i);
                magnitude[i] = d < Coeff{0} ? -d : d;
            }
            order = all;
            std::stable_sort(order.begin(), order.end(),
                             [&](Variable a, Variable b) { return magnitude[a] > magnitude[b]; });

            for (std::size_t lo = 0; lo < n; lo += p_.subproblem_size) {
                const std::size_t hi = std::min<std::size_t>(n, lo + p_.subproblem_size);
                const std::span<const Variable> block(order.data() + lo, hi - lo);
                const auto sub = extract_dense_subqubo(state, block);
                Assignment y(block.size());
                for (std::size_t a = 0; a < block.size(); ++a) y[a] = state.bit(block[a]);
                auto out = tabu_search(sub, std::move(y), p_.effective_inner(), p_.tenure);
                if (out.best_energy < state.energy()) {
                    for (std::size_t a = 0; a < block.size(); ++a) {
                        if (out.best[a] != state.bit(block[a])) state.flip(block[a]);
                    }
                }
            }
            ++passes;
            if (state.energy() < res.energy) {
                res.energy = state.energy();
                res.x = state.assignment();
                if (trace) trace(passes, res.energy);
            }
            const double improvement = static_cast<double>(before - state.energy());
            if (improvement <= p_.improvement_threshold) {
                res.complete = true;
                break;
            }
            if (tracker.exhausted(passes)) break;
        }
        res.iterations = passes;
        return res;
    }

private:
    TabuParams p_;
};

}  // namespace qscore
