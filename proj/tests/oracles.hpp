#pragma once

// Reference computations for tests. Deliberately naive and independent of the
// library's evaluation paths: no Gray codes, no caches, no symmetry tricks.

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "qscore/graph.hpp"
#include "qscore/qubo.hpp"

namespace oracle {

inline std::vector<std::uint8_t> bits_of(std::uint64_t mask, std::size_t n) {
    std::vector<std::uint8_t> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((mask >> i) & 1U);
    return x;
}

/// Counts crossing edges straight from the edge list.
inline std::uint64_t cut(const qscore::GraphInstance& g, const std::vector<std::uint8_t>& x) {
    std::uint64_t c = 0;
    for (const auto& e : g.edges()) {
        if (x[e.first] != x[e.second]) ++c;
    }
    return c;
}

/// Maximum cut over all 2^n assignments.
inline std::uint64_t max_cut(const qscore::GraphInstance& g) {
    std::uint64_t best = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g.n()); ++mask) {
        best = std::max(best, cut(g, bits_of(mask, g.n())));
    }
    return best;
}

/// Energy by expanding sum_{i<=j} Q_ij x_i x_j over the dense coefficient grid.
template <typename Coeff>
Coeff energy(const qscore::BasicQubo<Coeff>& q, const std::vector<std::uint8_t>& x) {
    Coeff e = q.constant();
    for (qscore::Variable i = 0; i < q.n(); ++i) {
        for (qscore::Variable j = i; j < q.n(); ++j) {
            e += q.coefficient(i, j) * static_cast<Coeff>(x[i] * x[j]);
        }
    }
    return e;
}

template <typename Coeff>
Coeff min_energy(const qscore::BasicQubo<Coeff>& q) {
    Coeff best = std::numeric_limits<Coeff>::max();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << q.n()); ++mask) {
        best = std::min(best, energy(q, bits_of(mask, q.n())));
    }
    return best;
}

/// Random integer QUBO with roughly `density` of the pairs populated.
inline qscore::Qubo random_qubo(std::size_t n, std::mt19937_64& rng, double density = 0.6) {
    std::uniform_int_distribution<std::int64_t> coeff(-9, 9);
    std::bernoulli_distribution keep(density);
    std::vector<qscore::Qubo::term_type> terms;
    for (qscore::Variable i = 0; i < n; ++i) {
        for (qscore::Variable j = i; j < n; ++j) {
            if (i == j || keep(rng)) terms.push_back({i, j, coeff(rng)});
        }
    }
    return qscore::Qubo(n, std::move(terms), coeff(rng));
}

inline std::vector<std::uint8_t> random_bits(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::uint8_t> x(n);
    for (auto& b : x) b = static_cast<std::uint8_t>(rng() & 1U);
    return x;
}

inline qscore::GraphInstance triangle() { return qscore::GraphInstance(3, {{0, 1}, {0, 2}, {1, 2}}); }

inline qscore::GraphInstance complete(std::size_t n) {
    std::vector<qscore::Edge> e;
    for (qscore::Vertex i = 0; i < n; ++i) {
        for (qscore::Vertex j = i + 1; j < n; ++j) e.emplace_back(i, j);
    }
    return qscore::GraphInstance(n, std::move(e));
}

}  // namespace oracle
