#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qscore/solvers/annealing.hpp"
#include "qscore/solvers/exact.hpp"
#include "qscore/solvers/random.hpp"
#include "qscore/solvers/tabu.hpp"

using namespace qscore;
using namespace std::chrono_literals;

namespace {

SolverBudget generous() { return SolverBudget::wall_clock(10s); }

void expect_valid(const GraphInstance& g, const SolverRun& run) {
    ASSERT_TRUE(run.has_result());
    ASSERT_EQ(run.best_assignment.size(), g.n());
    for (auto b : run.best_assignment) ASSERT_LE(b, 1);
    ASSERT_EQ(run.best_cut, oracle::cut(g, run.best_assignment));
    ASSERT_GE(run.elapsed_ms, 0.0);
}

}  // namespace

// ---- exact ------------------------------------------------------------------

TEST(ExactSolver, SmallGraphs) {
    const ExactSolver s;
    auto run = s.solve(oracle::triangle(), generous());
    EXPECT_EQ(run.best_cut, 2U);
    EXPECT_EQ(run.status, SolverStatus::Solved);
    EXPECT_EQ(s.solve(oracle::complete(4), generous()).best_cut, 4U);
    run = s.solve(GraphInstance(6, {}), generous());
    EXPECT_EQ(run.best_cut, 0U);
    EXPECT_EQ(run.status, SolverStatus::Solved);
    EXPECT_EQ(s.solve(GraphInstance(1, {}), generous()).best_cut, 0U);
}

TEST(ExactSolver, MatchesFullEnumerationOnG12) {
    const ExactSolver s;
    for (std::uint64_t k = 0; k < 50; ++k) {
        const auto g = generate_er_graph(12, EdgeProbability{1, 2}, 500 + k);
        const auto run = s.solve(g, generous());
        expect_valid(g, run);
        EXPECT_EQ(run.best_cut, oracle::max_cut(g)) << "seed " << 500 + k;
        EXPECT_EQ(run.iterations, 1U << 11);
    }
}

TEST(ExactSolver, HugeInstanceUnderTinyBudgetIsNoResult) {
    const auto g = generate_er_graph(40, 0.5, 1);
    const auto run = ExactSolver().solve(g, SolverBudget::wall_clock(1ms));
    EXPECT_EQ(run.status, SolverStatus::NoResult);
    EXPECT_FALSE(run.reason.empty());
    EXPECT_TRUE(run.best_assignment.empty());
}

TEST(ExactSolver, PartialModeReturnsBestSoFar) {
    const auto g = generate_er_graph(40, 0.5, 1);
    const ExactSolver s(ExactParams{true});
    const auto run = s.solve(g, SolverBudget::wall_clock(1ms));
    EXPECT_EQ(run.status, SolverStatus::BudgetExceededWithResult);
    expect_valid(g, run);
    EXPECT_EQ(s.id(), "exact(partial=true)");
}

TEST(ExactSolver, QuotaCountsAssignments) {
    const auto g = generate_er_graph(14, 0.5, 2);
    const auto stopped = ExactSolver().solve(g, SolverBudget::deterministic(100));
    EXPECT_EQ(stopped.status, SolverStatus::NoResult);
    const auto partial = ExactSolver(ExactParams{true}).solve(g, SolverBudget::deterministic(100));
    EXPECT_EQ(partial.iterations, 100U);
    const auto full = ExactSolver().solve(g, SolverBudget::deterministic(1U << 13));
    EXPECT_EQ(full.status, SolverStatus::Solved);
    EXPECT_EQ(full.best_cut, oracle::max_cut(g));
}

// ---- random -----------------------------------------------------------------

TEST(RandomSolver, EmptyGraphAndStatus) {
    const auto run = RandomSolver().solve(GraphInstance(5, {}), generous());
    EXPECT_EQ(run.best_cut, 0U);
    EXPECT_EQ(run.status, SolverStatus::Solved);
}

TEST(RandomSolver, SingleEdgeIsCutHalfTheTime) {
    const GraphInstance k2(2, {{0, 1}});
    double sum = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        sum += static_cast<double>(RandomSolver().solve(k2, SolverBudget::deterministic(0, s)).best_cut);
    }
    EXPECT_NEAR(sum / 1000, 0.5, 0.05);
}

TEST(RandomSolver, MeanCutIsQuarterOfPairs) {
    const std::size_t n = 200;
    const int m = 100;
    double sum = 0, sum_sq = 0;
    for (int k = 0; k < m; ++k) {
        const auto g = generate_er_graph(n, EdgeProbability{1, 2}, k);
        const auto run = RandomSolver().solve(g, SolverBudget::deterministic(0, k));
        expect_valid(g, run);
        const double c = static_cast<double>(run.best_cut);
        sum += c;
        sum_sq += c * c;
    }
    const double mean = sum / m;
    const double se = std::sqrt((sum_sq - m * mean * mean) / (m - 1) / m);
    EXPECT_LT(std::abs(mean - n * (n - 1) / 8.0), 3 * se);
}

// ---- simulated annealing ----------------------------------------------------

TEST(Annealing, CompleteGraphK4) {
    const auto k4 = oracle::complete(4);
    int hits = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto run = AnnealingSolver().solve(k4, SolverBudget::wall_clock(100ms, s));
        expect_valid(k4, run);
        EXPECT_LE(run.elapsed_ms, 100.0 + 50.0);
        hits += run.best_cut == 4;
    }
    EXPECT_GE(hits, 99);
}

TEST(Annealing, ZeroQuotaEqualsRandomSolver) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto g = generate_er_graph(50, 0.5, s);
        const auto sa = AnnealingSolver().solve(g, SolverBudget::deterministic(0, s));
        const auto rnd = RandomSolver().solve(g, SolverBudget::deterministic(0, s));
        EXPECT_EQ(sa.best_assignment, rnd.best_assignment);
        EXPECT_EQ(sa.best_cut, rnd.best_cut);
        EXPECT_EQ(sa.iterations, 0U);
    }
}

TEST(Annealing, FindsOptimumOnG16UnderSweepQuota) {
    int hits = 0;
    for (std::uint64_t k = 0; k < 30; ++k) {
        const auto g = generate_er_graph(16, EdgeProbability{1, 2}, 900 + k);
        hits += AnnealingSolver().solve(g, SolverBudget::deterministic(5000, k)).best_cut == oracle::max_cut(g);
    }
    EXPECT_GE(hits, 29);
}

TEST(Annealing, InfiniteTemperatureIsUnbiasedWalk) {
    // every proposal is accepted, so the walk samples assignments uniformly
    // and the visited cut averages |E|/2
    const auto g = generate_er_graph(40, EdgeProbability{1, 2}, 77);
    AnnealingSolver sa(AnnealingParams::parse({{"t_initial", "inf"}}));
    std::vector<double> cuts;
    sa.set_sweep_observer([&](double e) { cuts.push_back(-e); });
    sa.solve(g, SolverBudget::deterministic(20000, 3));
    ASSERT_EQ(cuts.size(), 20000U);
    // batch means absorb the correlation between consecutive sweeps
    const std::size_t batches = 40, len = cuts.size() / batches;
    double sum = 0, sum_sq = 0;
    for (std::size_t b = 0; b < batches; ++b) {
        double bm = 0;
        for (std::size_t i = 0; i < len; ++i) bm += cuts[b * len + i];
        bm /= static_cast<double>(len);
        sum += bm;
        sum_sq += bm * bm;
    }
    const double mean = sum / batches;
    const double se = std::sqrt((sum_sq - batches * mean * mean) / (batches - 1) / batches);
    EXPECT_LT(std::abs(mean - static_cast<double>(g.edge_count()) / 2.0), 4 * se + 1e-9);
    EXPECT_NEAR(static_cast<double>(g.edge_count()), 40 * 39 / 4.0, 4 * std::sqrt(780 * 0.25));
}

TEST(Annealing, QuotaIsMonotoneOnIdenticalSeeds) {
    for (std::uint64_t k = 0; k < 10; ++k) {
        const auto g = generate_er_graph(60, 0.5, k);
        std::uint64_t prev = 0;
        for (std::uint64_t q : {0, 1, 10, 100, 1000}) {
            const auto run = AnnealingSolver().solve(g, SolverBudget::deterministic(q, k));
            EXPECT_GE(run.best_cut, prev);
            EXPECT_EQ(run.iterations, q);
            prev = run.best_cut;
        }
    }
}

TEST(Annealing, WallClockStopsBeforeDeadline) {
    const auto g = generate_er_graph(300, 0.5, 4);
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto run = AnnealingSolver().solve(g, SolverBudget::wall_clock(200ms, s));
        expect_valid(g, run);
        EXPECT_EQ(run.status, SolverStatus::BudgetExceededWithResult);
        EXPECT_LE(run.elapsed_ms, 200.0 + 20.0);
        EXPECT_GT(run.iterations, 0U);
    }
}

TEST(Annealing, NoRestartEndsSolved) {
    const auto g = generate_er_graph(30, 0.5, 5);
    AnnealingSolver sa(AnnealingParams::parse({{"restart", "false"}, {"t_initial", "10"}}));
    const auto run = sa.solve(g, generous());
    EXPECT_EQ(run.status, SolverStatus::Solved);
    // 10 * 0.99^k < 0.01 first at k = 688
    EXPECT_EQ(run.iterations, 688U);
}

TEST(Annealing, Parameters) {
    EXPECT_EQ(AnnealingSolver().id(),
              "sa(cooling=0.99,probes=1000,restart=true,sweeps_per_temperature=1,t_final=0.01,t_initial=auto)");
    EXPECT_THROW(AnnealingParams::parse({{"colling", "0.9"}}), ConfigError);
    EXPECT_THROW(AnnealingParams::parse({{"cooling", "1.5"}}), ConfigError);
    EXPECT_THROW(AnnealingParams::parse({{"cooling", "x"}}), ConfigError);
    EXPECT_THROW(AnnealingParams::parse({{"t_final", "0"}}), ConfigError);
    EXPECT_THROW(AnnealingParams::parse({{"restart", "maybe"}}), ConfigError);
}

// ---- tabu -------------------------------------------------------------------

TEST(TabuSearch, ReturnedEnergyMatchesAssignment) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 200; ++t) {
        const auto q = oracle::random_qubo(1 + rng() % 10, rng);
        const auto d = DenseQubo<std::int64_t>::from(q);
        const auto out = tabu_search(d, oracle::random_bits(q.n(), rng), 200, 3);
        ASSERT_EQ(out.best_energy, oracle::energy(q, out.best));
        ASSERT_GE(out.best_energy, oracle::min_energy(q));
    }
}

TEST(TabuSearch, FindsGroundStateOfSmallQubos) {
    std::mt19937_64 rng(13);
    int hits = 0;
    for (int t = 0; t < 100; ++t) {
        const auto q = oracle::random_qubo(10, rng);
        const auto out = tabu_search(DenseQubo<std::int64_t>::from(q), oracle::random_bits(10, rng), 500, 4);
        hits += out.best_energy == oracle::min_energy(q);
    }
    EXPECT_GE(hits, 95);
}

TEST(TabuDecomposition, PureTabuMatchesExactOnG12) {
    const TabuDecompositionSolver s(TabuParams::parse({{"subproblem_size", "12"}}));
    int hits = 0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        const auto g = generate_er_graph(12, EdgeProbability{1, 2}, 300 + k);
        const auto run = s.solve(g, SolverBudget::wall_clock(1s, k));
        expect_valid(g, run);
        EXPECT_EQ(run.status, SolverStatus::Solved);
        hits += run.best_cut == oracle::max_cut(g);
    }
    EXPECT_GE(hits, 95);
}

TEST(TabuDecomposition, BothPathsGiveValidCuts) {
    const TabuDecompositionSolver whole(TabuParams::parse({{"subproblem_size", "12"}}));
    const TabuDecompositionSolver split(TabuParams::parse({{"subproblem_size", "6"}}));
    for (std::uint64_t k = 0; k < 20; ++k) {
        const auto g = generate_er_graph(12, 0.5, k);
        expect_valid(g, whole.solve(g, generous().with_seed(k)));
        const auto run = split.solve(g, generous().with_seed(k));
        expect_valid(g, run);
        EXPECT_EQ(run.status, SolverStatus::Solved);
        EXPECT_GE(run.iterations, 1U);
    }
}

TEST(TabuDecomposition, EmptyGraph) {
    for (std::size_t n : {3, 100}) {
        const auto run = TabuDecompositionSolver().solve(GraphInstance(n, {}), generous());
        EXPECT_EQ(run.best_cut, 0U);
        EXPECT_EQ(run.status, SolverStatus::Solved);
    }
}

TEST(TabuDecomposition, QuotaCountsPasses) {
    const auto g = generate_er_graph(200, 0.5, 6);
    const TabuDecompositionSolver s(TabuParams::parse({{"inner_iterations", "50"}}));
    const auto one = s.solve(g, SolverBudget::deterministic(1, 1));
    EXPECT_EQ(one.iterations, 1U);
    const auto many = s.solve(g, SolverBudget::deterministic(1000, 1));
    EXPECT_EQ(many.status, SolverStatus::Solved);
    EXPECT_GE(many.best_cut, one.best_cut);
}

TEST(TabuDecomposition, DecompositionImprovesOnRandomCut) {
    const auto g = generate_er_graph(300, 0.5, 7);
    const auto tabu = TabuDecompositionSolver().solve(g, SolverBudget::wall_clock(5s, 1));
    expect_valid(g, tabu);
    const double baseline = 300.0 * 300.0 / 8.0;
    const double beta = (static_cast<double>(tabu.best_cut) - baseline) / (0.178 * std::pow(300.0, 1.5));
    EXPECT_GT(beta, 0.8);
}

TEST(TabuDecomposition, Parameters) {
    EXPECT_EQ(TabuDecompositionSolver().id(),
              "tabu(improvement_threshold=0,inner_iterations=2400,subproblem_size=48,tenure=10)");
    EXPECT_THROW(TabuParams::parse({{"subproblem_size", "0"}}), ConfigError);
    EXPECT_THROW(TabuParams::parse({{"tenure", "-1"}}), ConfigError);
    EXPECT_THROW(TabuParams::parse({{"depth", "3"}}), ConfigError);
}

// ---- shared properties ------------------------------------------------------

namespace {

std::vector<const Solver*> all_solvers() {
    static const ExactSolver exact;
    static const RandomSolver random;
    static const AnnealingSolver sa;
    static const TabuDecompositionSolver tabu(TabuParams::parse({{"subproblem_size", "8"}}));
    return {&exact, &random, &sa, &tabu};
}

}  // namespace

TEST(Solvers, IncumbentTraceIsMonotone) {
    const auto g = generate_er_graph(18, 0.5, 8);
    for (const Solver* s : all_solvers()) {
        std::vector<std::uint64_t> seen;
        const auto run = s->solve(g, SolverBudget::deterministic(1 << 17, 2),
                                  [&](std::uint64_t, std::uint64_t cut, double) { seen.push_back(cut); });
        ASSERT_FALSE(seen.empty()) << s->name();
        for (std::size_t i = 1; i < seen.size(); ++i) EXPECT_GT(seen[i], seen[i - 1]) << s->name();
        EXPECT_EQ(seen.back(), run.best_cut) << s->name();
    }
}

TEST(Solvers, DeterministicBudgetIsReproducible) {
    const auto g = generate_er_graph(70, 0.5, 9);
    for (const Solver* s : all_solvers()) {
        if (s->name() == "exact") continue;
        const auto budget = SolverBudget::deterministic(50, 4);
        const auto a = s->solve(g, budget);
        const auto b = s->solve(g, budget);
        EXPECT_EQ(a.best_assignment, b.best_assignment) << s->name();
        EXPECT_EQ(a.iterations, b.iterations) << s->name();
        EXPECT_EQ(a.status, b.status) << s->name();
    }
}

TEST(Solvers, SeedChangesOutcome) {
    const auto g = generate_er_graph(70, 0.5, 10);
    for (const Solver* s : {all_solvers()[1], all_solvers()[2]}) {
        const auto a = s->solve(g, SolverBudget::deterministic(3, 1));
        const auto b = s->solve(g, SolverBudget::deterministic(3, 2));
        EXPECT_NE(a.best_assignment, b.best_assignment) << s->name();
    }
}
