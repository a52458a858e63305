#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "qscore/qubo.hpp"

using namespace qscore;

TEST(MaxcutToQubo, TriangleCoefficients) {
    const auto q = maxcut_to_qubo(oracle::triangle());
    for (Variable i = 0; i < 3; ++i) EXPECT_EQ(q.coefficient(i, i), -2);
    EXPECT_EQ(q.coefficient(0, 1), 2);
    EXPECT_EQ(q.coefficient(0, 2), 2);
    EXPECT_EQ(q.coefficient(1, 2), 2);
    EXPECT_EQ(q.coefficient(2, 1), 2);
    EXPECT_EQ(q.constant(), 0);
    EXPECT_EQ(oracle::min_energy(q), -2);
}

TEST(MaxcutToQubo, SingleEdge) {
    const auto q = maxcut_to_qubo(GraphInstance(2, {{0, 1}}));
    EXPECT_EQ(q.coefficient(0, 0), -1);
    EXPECT_EQ(q.coefficient(1, 1), -1);
    EXPECT_EQ(q.coefficient(0, 1), 2);
    EXPECT_EQ(energy(q, Assignment{1, 0}), -1);
}

TEST(MaxcutToQubo, EmptyGraphIsZero) {
    const auto q = maxcut_to_qubo(GraphInstance(3, {}));
    EXPECT_TRUE(q.terms().empty());
    for (std::uint64_t mask = 0; mask < 8; ++mask) EXPECT_EQ(energy(q, oracle::bits_of(mask, 3)), 0);
}

TEST(MaxcutToQubo, EnergyIsNegatedCutExhaustively) {
    std::mt19937_64 rng(1);
    for (std::size_t n = 1; n <= 8; ++n) {
        for (int t = 0; t < 5; ++t) {
            const auto g = generate_er_graph(n, 0.5, rng());
            const auto q = maxcut_to_qubo(g);
            for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
                const auto x = oracle::bits_of(mask, n);
                ASSERT_EQ(energy(q, x), -static_cast<std::int64_t>(oracle::cut(g, x)));
            }
            EXPECT_EQ(oracle::min_energy(q), -static_cast<std::int64_t>(oracle::max_cut(g)));
        }
    }
}

TEST(MaxcutToQubo, GlobalFlipSymmetry) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 200; ++t) {
        const auto g = generate_er_graph(1 + rng() % 20, 0.5, rng());
        const auto q = maxcut_to_qubo(g);
        auto x = oracle::random_bits(g.n(), rng);
        const auto e = energy(q, x);
        for (auto& b : x) b ^= 1;
        EXPECT_EQ(energy(q, x), e);
    }
}

TEST(Energy, Examples) {
    const auto q = maxcut_to_qubo(oracle::triangle());
    EXPECT_EQ(energy(q, Assignment{1, 0, 0}), -2);
    EXPECT_EQ(energy(q, Assignment{1, 1, 1}), 0);
    std::mt19937_64 rng(3);
    const auto r = oracle::random_qubo(7, rng);
    EXPECT_EQ(energy(r, Assignment(7, 0)), r.constant());
}

TEST(Energy, MatchesDenseExpansionOnRandomQubos) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 300; ++t) {
        const auto q = oracle::random_qubo(1 + rng() % 16, rng);
        const auto x = oracle::random_bits(q.n(), rng);
        ASSERT_EQ(energy(q, x), oracle::energy(q, x));
    }
}

TEST(Energy, DimensionMismatchIsDomainError) {
    const auto q = maxcut_to_qubo(oracle::triangle());
    EXPECT_THROW(energy(q, Assignment{1, 0}), DomainError);
    EXPECT_THROW(energy(q, Assignment{1, 0, 3}), DomainError);
}

TEST(Qubo, MergesAndNormalisesTerms) {
    const Qubo q(3, {{1, 0, 2}, {0, 1, 3}, {2, 2, -1}, {2, 2, -1}, {0, 2, 4}, {0, 2, -4}}, 7);
    EXPECT_EQ(q.coefficient(0, 1), 5);
    EXPECT_EQ(q.coefficient(2, 2), -2);
    EXPECT_EQ(q.coefficient(0, 2), 0);
    EXPECT_EQ(q.quadratic().size(), 1U);
    EXPECT_THROW(Qubo(2, {{0, 2, 1}}), DomainError);
}

TEST(FlipDelta, TriangleExample) {
    const auto q = maxcut_to_qubo(oracle::triangle());
    const Adjacency<std::int64_t> adj(q);
    FlipState<std::int64_t> s(adj, Assignment{0, 0, 0});
    EXPECT_EQ(flip_delta(s, 0), -2);
    EXPECT_EQ(s.flip(0), -2);
    EXPECT_EQ(s.energy(), -2);
}

TEST(FlipDelta, DoubleFlipCancels) {
    std::mt19937_64 rng(5);
    const auto q = oracle::random_qubo(10, rng);
    const Adjacency<std::int64_t> adj(q);
    FlipState<std::int64_t> s(adj, oracle::random_bits(10, rng));
    for (Variable i = 0; i < 10; ++i) {
        const auto a = s.flip(i);
        const auto b = s.flip(i);
        EXPECT_EQ(a + b, 0);
    }
    EXPECT_NO_THROW(s.validate());
}

TEST(FlipDelta, RandomWalkMatchesReevaluation) {
    std::mt19937_64 rng(6);
    const auto q = oracle::random_qubo(12, rng);
    const Adjacency<std::int64_t> adj(q);
    FlipState<std::int64_t> s(adj, oracle::random_bits(12, rng));
    for (int step = 0; step < 1000; ++step) {
        const auto i = static_cast<Variable>(rng() % 12);
        const auto before = oracle::energy(q, s.assignment());
        auto flipped = s.assignment();
        flipped[i] ^= 1;
        ASSERT_EQ(flip_delta(s, i), oracle::energy(q, flipped) - before);
        s.flip(i);
        ASSERT_EQ(s.energy(), oracle::energy(q, flipped));
    }
    EXPECT_NO_THROW(s.validate());
}

TEST(FlipDelta, ExhaustiveSmallCases) {
    std::mt19937_64 rng(7);
    for (std::size_t n = 1; n <= 8; ++n) {
        const auto q = oracle::random_qubo(n, rng);
        const Adjacency<std::int64_t> adj(q);
        for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
            const auto x = oracle::bits_of(mask, n);
            FlipState<std::int64_t> s(adj, x);
            ASSERT_EQ(s.energy(), oracle::energy(q, x));
            for (Variable i = 0; i < n; ++i) {
                auto y = x;
                y[i] ^= 1;
                ASSERT_EQ(s.delta(i), oracle::energy(q, y) - oracle::energy(q, x));
            }
        }
    }
}

TEST(FlipState, FloatingPathMatchesIntegerPath) {
    std::mt19937_64 rng(8);
    const auto q = oracle::random_qubo(14, rng);
    const auto r = q.cast<double>();
    const Adjacency<std::int64_t> ai(q);
    const Adjacency<double> ad(r);
    const auto x = oracle::random_bits(14, rng);
    FlipState<std::int64_t> si(ai, x);
    FlipState<double> sd(ad, x);
    for (int step = 0; step < 200; ++step) {
        const auto i = static_cast<Variable>(rng() % 14);
        ASSERT_EQ(static_cast<double>(si.flip(i)), sd.flip(i));
        ASSERT_EQ(static_cast<double>(si.energy()), sd.energy());
    }
}

TEST(ExtractSubqubo, NothingFixedIsIdentity) {
    std::mt19937_64 rng(9);
    const auto q = oracle::random_qubo(3, rng);
    const std::vector<Variable> vars{0, 1, 2};
    EXPECT_EQ(extract_subqubo(q, vars, oracle::random_bits(3, rng)), q);
}

TEST(ExtractSubqubo, TriangleWithTwoClamped) {
    // x1 = 1, x2 = 0 clamped: lin'_0 = -2 + 2*1 + 2*0 = 0, constant = lin_1 = -2
    const auto q = maxcut_to_qubo(oracle::triangle());
    const std::vector<Variable> vars{0};
    const auto sub = extract_subqubo(q, vars, Assignment{0, 1, 0});
    EXPECT_EQ(sub.n(), 1U);
    EXPECT_EQ(sub.coefficient(0, 0), 0);
    EXPECT_EQ(sub.constant(), -2);
    EXPECT_EQ(energy(sub, Assignment{0}), energy(q, Assignment{0, 1, 0}));
    EXPECT_EQ(energy(sub, Assignment{1}), energy(q, Assignment{1, 1, 0}));
    EXPECT_EQ(energy(sub, Assignment{0}), -2);
    EXPECT_EQ(energy(sub, Assignment{1}), -2);
}

namespace {

void expect_energy_identity(const Qubo& q, const std::vector<Variable>& vars, const Assignment& fixed) {
    const auto sub = extract_subqubo(q, vars, fixed);
    const Adjacency<std::int64_t> adj(q);
    const FlipState<std::int64_t> state(adj, fixed);
    const auto dense = extract_dense_subqubo(state, vars);
    for (std::uint64_t mask = 0; mask < (1ULL << vars.size()); ++mask) {
        const auto y = oracle::bits_of(mask, vars.size());
        auto full = fixed;
        for (std::size_t a = 0; a < vars.size(); ++a) full[vars[a]] = y[a];
        const auto want = oracle::energy(q, full);
        ASSERT_EQ(energy(sub, y), want);
        ASSERT_EQ(dense.energy(y), want);
    }
}

}  // namespace

TEST(ExtractSubqubo, RandomFourOfTen) {
    std::mt19937_64 rng(10);
    for (int t = 0; t < 50; ++t) {
        const auto q = oracle::random_qubo(10, rng);
        std::vector<Variable> all(10);
        std::iota(all.begin(), all.end(), 0);
        std::shuffle(all.begin(), all.end(), rng);
        expect_energy_identity(q, {all.begin(), all.begin() + 4}, oracle::random_bits(10, rng));
    }
}

TEST(ExtractSubqubo, ExhaustiveSubsetsSmallN) {
    std::mt19937_64 rng(11);
    for (std::size_t n = 1; n <= 6; ++n) {
        const auto q = oracle::random_qubo(n, rng);
        for (std::uint64_t subset = 1; subset < (1ULL << n); ++subset) {
            std::vector<Variable> vars;
            for (Variable i = 0; i < n; ++i) {
                if ((subset >> i) & 1U) vars.push_back(i);
            }
            expect_energy_identity(q, vars, oracle::random_bits(n, rng));
        }
    }
}

TEST(ExtractSubqubo, Errors) {
    const auto q = maxcut_to_qubo(oracle::triangle());
    const Assignment x{0, 0, 0};
    EXPECT_THROW(extract_subqubo(q, std::vector<Variable>{}, x), DomainError);
    EXPECT_THROW(extract_subqubo(q, std::vector<Variable>{3}, x), DomainError);
    EXPECT_THROW(extract_subqubo(q, std::vector<Variable>{1, 1}, x), DomainError);
    EXPECT_THROW(extract_subqubo(q, std::vector<Variable>{0}, Assignment{0, 0}), DomainError);
}
