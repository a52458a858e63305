#pragma once

// Quadratic unconstrained binary optimisation problems.
//
// A QUBO over n binary variables is stored upper-triangular: one linear
// coefficient per variable (the i == j entries) and one coefficient per
// unordered pair i < j carrying the full weight (no symmetric halving).
//
//   energy(x) = constant + sum_i lin_i x_i + sum_{i<j} w_ij x_i x_j

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "qscore/error.hpp"
#include "qscore/graph.hpp"

namespace qscore {

using Variable = std::uint32_t;

/// Binary values x_i in {0, 1}, one per QUBO variable.
using Assignment = std::vector<std::uint8_t>;

template <typename Coeff>
struct QuboTerm {
    Variable i;
    Variable j;
    Coeff coeff;

    friend bool operator==(const QuboTerm&, const QuboTerm&) = default;
};

template <typename Coeff>
class BasicQubo {
    static_assert(std::is_arithmetic_v<Coeff> && std::is_signed_v<Coeff>);

public:
    using coeff_type = Coeff;
    using term_type = QuboTerm<Coeff>;

    /// Builds a QUBO from arbitrary (i, j, c) triples. (j, i) is folded onto
    /// (i, j), repeated keys are summed and zero coefficients are dropped.
    BasicQubo(std::size_t n, std::vector<term_type> terms, Coeff constant = Coeff{0})
        : n_(n), constant_(constant), linear_(n, Coeff{0}) {
        if (n_ > std::numeric_limits<Variable>::max()) throw DomainError("QUBO too large");
        std::vector<term_type> quad;
        quad.reserve(terms.size());
        for (auto t : terms) {
            if (t.i >= n_ || t.j >= n_) {
                throw DomainError("QUBO term (" + std::to_string(t.i) + "," + std::to_string(t.j) +
                                  ") out of range for n=" + std::to_string(n_));
            }
            if (t.i == t.j) {
                linear_[t.i] += t.coeff;
            } else {
                if (t.i > t.j) std::swap(t.i, t.j);
                quad.push_back(t);
            }
        }
        auto key_less = [](const term_type& a, const term_type& b) {
            return a.i != b.i ? a.i < b.i : a.j < b.j;
        };
        if (!std::is_sorted(quad.begin(), quad.end(), key_less)) {
            std::sort(quad.begin(), quad.end(), key_less);
        }
        for (const auto& t : quad) {
            if (!quadratic_.empty() && quadratic_.back().i == t.i && quadratic_.back().j == t.j) {
                quadratic_.back().coeff += t.coeff;
            } else {
                quadratic_.push_back(t);
            }
        }
        std::erase_if(quadratic_, [](const term_type& t) { return t.coeff == Coeff{0}; });
    }

    std::size_t n() const noexcept { return n_; }
    Coeff constant() const noexcept { return constant_; }
    std::span<const Coeff> linear() const noexcept { return linear_; }
    /// Off-diagonal terms, i < j, sorted by (i, j), no zeros.
    std::span<const term_type> quadratic() const noexcept { return quadratic_; }

    Coeff coefficient(Variable i, Variable j) const {
        if (i >= n_ || j >= n_) throw DomainError("QUBO index out of range");
        if (i == j) return linear_[i];
        if (i > j) std::swap(i, j);
        const auto it = std::lower_bound(
            quadratic_.begin(), quadratic_.end(), std::pair{i, j},
            [](const term_type& t, const std::pair<Variable, Variable>& k) {
                return t.i != k.first ? t.i < k.first : t.j < k.second;
            });
        return (it != quadratic_.end() && it->i == i && it->j == j) ? it->coeff : Coeff{0};
    }

    /// All non-zero terms in (i <= j) order, linear terms included as (i, i).
    std::vector<term_type> terms() const {
        std::vector<term_type> out;
        out.reserve(quadratic_.size() + n_);
        auto q = quadratic_.begin();
        for (Variable i = 0; i < n_; ++i) {
            if (linear_[i] != Coeff{0}) out.push_back({i, i, linear_[i]});
            for (; q != quadratic_.end() && q->i == i; ++q) out.push_back(*q);
        }
        return out;
    }

    template <typename Other>
    BasicQubo<Other> cast() const {
        std::vector<QuboTerm<Other>> out;
        for (const auto& t : terms()) out.push_back({t.i, t.j, static_cast<Other>(t.coeff)});
        return BasicQubo<Other>(n_, std::move(out), static_cast<Other>(constant_));
    }

    friend bool operator==(const BasicQubo&, const BasicQubo&) = default;

private:
    std::size_t n_;
    Coeff constant_;
    std::vector<Coeff> linear_;
    std::vector<term_type> quadratic_;
};

/// Exact integer QUBO; every Max-Cut instance maps onto one.
using Qubo = BasicQubo<std::int64_t>;
/// Floating QUBO for general problems arriving over the wire.
using RealQubo = BasicQubo<double>;

namespace detail {

inline void check_binary(std::span<const std::uint8_t> x, std::size_t n, const char* what) {
    if (x.size() != n) {
        throw DomainError(std::string(what) + ": assignment has " + std::to_string(x.size()) +
                          " entries, expected " + std::to_string(n));
    }
    if (std::any_of(x.begin(), x.end(), [](std::uint8_t b) { return b > 1; })) {
        throw DomainError(std::string(what) + ": assignment entries must be 0 or 1");
    }
}

}  // namespace detail

/// Minimising -cut(x) = sum_{(i,j) in E} (2 x_i x_j - x_i - x_j):
/// lin_i = -deg(i), w_ij = +2 per edge, constant 0.
inline Qubo maxcut_to_qubo(const GraphInstance& g) {
    std::vector<Qubo::term_type> terms;
    terms.reserve(g.edge_count() + g.n());
    const auto deg = g.degrees();
    for (Variable i = 0; i < g.n(); ++i) {
        terms.push_back({i, i, -static_cast<std::int64_t>(deg[i])});
    }
    // lexicographic edge order keeps the off-diagonal part pre-sorted
    for (const auto& [i, j] : g.edges()) terms.push_back({i, j, 2});
    return Qubo(g.n(), std::move(terms), 0);
}

template <typename Coeff>
Coeff energy(const BasicQubo<Coeff>& q, std::span<const std::uint8_t> x) {
    detail::check_binary(x, q.n(), "energy");
    Coeff e = q.constant();
    const auto lin = q.linear();
    for (std::size_t i = 0; i < q.n(); ++i) {
        if (x[i]) e += lin[i];
    }
    for (const auto& t : q.quadratic()) {
        if (x[t.i] && x[t.j]) e += t.coeff;
    }
    return e;
}

/// Symmetric compressed-row view of a QUBO's off-diagonal part. Row i lists
/// every j with w_ij != 0, sorted by j. Built once per solver run.
template <typename Coeff>
class Adjacency {
public:
    explicit Adjacency(const BasicQubo<Coeff>& q)
        : n_(q.n()), linear_(q.linear().begin(), q.linear().end()), constant_(q.constant()),
          offsets_(q.n() + 1, 0) {
        for (const auto& t : q.quadratic()) {
            ++offsets_[t.i + 1];
            ++offsets_[t.j + 1];
        }
        for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
        neighbors_.resize(offsets_[n_]);
        weights_.resize(offsets_[n_]);
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        // terms sorted by (i, j): row r receives its j < r entries (as t.j == r)
        // before its j > r entries, each in increasing order
        for (const auto& t : q.quadratic()) {
            neighbors_[fill[t.i]] = t.j;
            weights_[fill[t.i]++] = t.coeff;
            neighbors_[fill[t.j]] = t.i;
            weights_[fill[t.j]++] = t.coeff;
        }
    }

    std::size_t n() const noexcept { return n_; }
    Coeff constant() const noexcept { return constant_; }
    Coeff linear(Variable i) const noexcept { return linear_[i]; }
    std::span<const Variable> neighbors(Variable i) const noexcept {
        return {neighbors_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    std::span<const Coeff> weights(Variable i) const noexcept {
        return {weights_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    std::size_t degree(Variable i) const noexcept { return offsets_[i + 1] - offsets_[i]; }

    Coeff weight(Variable i, Variable j) const noexcept {
        const auto nb = neighbors(i);
        const auto it = std::lower_bound(nb.begin(), nb.end(), j);
        return (it != nb.end() && *it == j) ? weights_[offsets_[i] + (it - nb.begin())] : Coeff{0};
    }

private:
    std::size_t n_;
    std::vector<Coeff> linear_;
    Coeff constant_;
    std::vector<std::size_t> offsets_;
    std::vector<Variable> neighbors_;
    std::vector<Coeff> weights_;
};

/// Per-run incremental evaluator (the neighbourhood cache). Keeps the current
/// assignment, its energy and every variable's local field
///   field_i = lin_i + sum_j w_ij x_j,
/// so that flipping x_i changes the energy by (1 - 2 x_i) * field_i.
/// delta() is O(1); flip() is O(degree).
template <typename Coeff>
class FlipState {
public:
    FlipState(const Adjacency<Coeff>& adj, Assignment x) : adj_(&adj) { reset(std::move(x)); }

    void reset(Assignment x) {
        detail::check_binary(x, adj_->n(), "FlipState");
        x_ = std::move(x);
        field_.assign(adj_->n(), Coeff{0});
        energy_ = adj_->constant();
        for (Variable i = 0; i < adj_->n(); ++i) {
            Coeff f = adj_->linear(i);
            const auto nb = adj_->neighbors(i);
            const auto w = adj_->weights(i);
            for (std::size_t k = 0; k < nb.size(); ++k) {
                if (x_[nb[k]]) f += w[k];
            }
            field_[i] = f;
        }
        // E = c + sum_i x_i (lin_i + field_i) / 2 counts each pair once
        Coeff twice = Coeff{0};
        for (Variable i = 0; i < adj_->n(); ++i) {
            if (x_[i]) twice += adj_->linear(i) + field_[i];
        }
        energy_ += twice / Coeff{2};
    }

    std::size_t n() const noexcept { return x_.size(); }
    const Assignment& assignment() const noexcept { return x_; }
    std::uint8_t bit(Variable i) const noexcept { return x_[i]; }
    Coeff energy() const noexcept { return energy_; }
    Coeff field(Variable i) const noexcept { return field_[i]; }
    const Adjacency<Coeff>& adjacency() const noexcept { return *adj_; }

    Coeff delta(Variable i) const noexcept { return x_[i] ? -field_[i] : field_[i]; }

    /// Flips x_i and returns the energy change.
    Coeff flip(Variable i) noexcept {
        const Coeff d = delta(i);
        const auto nb = adj_->neighbors(i);
        const auto w = adj_->weights(i);
        if (x_[i]) {
            for (std::size_t k = 0; k < nb.size(); ++k) field_[nb[k]] -= w[k];
        } else {
            for (std::size_t k = 0; k < nb.size(); ++k) field_[nb[k]] += w[k];
        }
        x_[i] ^= 1;
        energy_ += d;
        return d;
    }

    /// Recomputes everything from scratch and throws std::logic_error if the
    /// cached fields or energy disagree. O(n + nnz); for tests and debug runs.
    void validate() const {
        FlipState fresh(*adj_, x_);
        if (fresh.energy_ != energy_ || fresh.field_ != field_) {
            throw std::logic_error("stale neighbourhood cache");
        }
    }

private:
    const Adjacency<Coeff>* adj_;
    Assignment x_;
    std::vector<Coeff> field_;
    Coeff energy_{};
};

template <typename Coeff>
Coeff flip_delta(const FlipState<Coeff>& cache, Variable i) {
    if (i >= cache.n()) throw DomainError("flip_delta: variable out of range");
    return cache.delta(i);
}

namespace detail {

inline std::vector<std::int64_t> subproblem_positions(std::size_t n, std::span<const Variable> vars) {
    if (vars.empty()) throw DomainError("extract_subqubo: empty variable set");
    std::vector<std::int64_t> pos(n, -1);
    for (std::size_t k = 0; k < vars.size(); ++k) {
        if (vars[k] >= n) throw DomainError("extract_subqubo: variable out of range");
        if (pos[vars[k]] >= 0) throw DomainError("extract_subqubo: repeated variable");
        pos[vars[k]] = static_cast<std::int64_t>(k);
    }
    return pos;
}

}  // namespace detail

/// Clamps every variable outside `vars` to its value in `fixed` and returns
/// the QUBO over vars[0..k) (re-indexed 0..k) with
///   energy(sub, y) == energy(q, fixed with vars[a] := y[a]).
/// Cross terms with clamped variables fold into the linear terms and
/// clamped-clamped terms into the constant.
template <typename Coeff>
BasicQubo<Coeff> extract_subqubo(const BasicQubo<Coeff>& q, std::span<const Variable> vars,
                                 std::span<const std::uint8_t> fixed) {
    detail::check_binary(fixed, q.n(), "extract_subqubo");
    const auto pos = detail::subproblem_positions(q.n(), vars);
    Coeff constant = q.constant();
    std::vector<QuboTerm<Coeff>> terms;
    const auto lin = q.linear();
    for (Variable i = 0; i < q.n(); ++i) {
        if (pos[i] >= 0) {
            const auto a = static_cast<Variable>(pos[i]);
            terms.push_back({a, a, lin[i]});
        } else if (fixed[i]) {
            constant += lin[i];
        }
    }
    for (const auto& t : q.quadratic()) {
        const auto pi = pos[t.i], pj = pos[t.j];
        if (pi >= 0 && pj >= 0) {
            terms.push_back({static_cast<Variable>(pi), static_cast<Variable>(pj), t.coeff});
        } else if (pi >= 0) {
            if (fixed[t.j]) terms.push_back({static_cast<Variable>(pi), static_cast<Variable>(pi), t.coeff});
        } else if (pj >= 0) {
            if (fixed[t.i]) terms.push_back({static_cast<Variable>(pj), static_cast<Variable>(pj), t.coeff});
        } else if (fixed[t.i] && fixed[t.j]) {
            constant += t.coeff;
        }
    }
    return BasicQubo<Coeff>(vars.size(), std::move(terms), constant);
}

/// Small dense QUBO used by the tabu inner search. weight(a, b) is symmetric
/// with zero diagonal; linear terms live separately.
template <typename Coeff>
struct DenseQubo {
    std::size_t n = 0;
    Coeff constant{};
    std::vector<Coeff> linear;
    std::vector<Coeff> weights;  // row-major n x n

    Coeff weight(std::size_t a, std::size_t b) const noexcept { return weights[a * n + b]; }

    static DenseQubo from(const BasicQubo<Coeff>& q) {
        DenseQubo d;
        d.n = q.n();
        d.constant = q.constant();
        d.linear.assign(q.linear().begin(), q.linear().end());
        d.weights.assign(d.n * d.n, Coeff{0});
        for (const auto& t : q.quadratic()) {
            d.weights[t.i * d.n + t.j] = t.coeff;
            d.weights[t.j * d.n + t.i] = t.coeff;
        }
        return d;
    }

    Coeff energy(std::span<const std::uint8_t> y) const {
        Coeff e = constant;
        for (std::size_t a = 0; a < n; ++a) {
            if (!y[a]) continue;
            e += linear[a];
            for (std::size_t b = a + 1; b < n; ++b) {
                if (y[b]) e += weights[a * n + b];
            }
        }
        return e;
    }
};

/// The same clamping as extract_subqubo, computed from a live cache in
/// O(k^2 log degree) instead of a pass over the whole QUBO.
template <typename Coeff>
DenseQubo<Coeff> extract_dense_subqubo(const FlipState<Coeff>& state, std::span<const Variable> vars) {
    const auto& adj = state.adjacency();
    const std::size_t k = vars.size();
    if (k == 0) throw DomainError("extract_subqubo: empty variable set");
    DenseQubo<Coeff> d;
    d.n = k;
    d.linear.resize(k);
    d.weights.assign(k * k, Coeff{0});
    for (std::size_t a = 0; a < k; ++a) {
        if (vars[a] >= state.n()) throw DomainError("extract_subqubo: variable out of range");
        for (std::size_t b = a + 1; b < k; ++b) {
            if (vars[a] == vars[b]) throw DomainError("extract_subqubo: repeated variable");
            const Coeff w = adj.weight(vars[a], vars[b]);
            d.weights[a * k + b] = w;
            d.weights[b * k + a] = w;
        }
    }
    // lin'_a = field_a - sum_{b in sub} w_ab x_b ; constant = E - (sub's share of E)
    Coeff inside = Coeff{0};
    for (std::size_t a = 0; a < k; ++a) {
        Coeff f = state.field(vars[a]);
        for (std::size_t b = 0; b < k; ++b) {
            if (state.bit(vars[b])) f -= d.weights[a * k + b];
        }
        d.linear[a] = f;
        if (state.bit(vars[a])) {
            inside += f;
            for (std::size_t b = a + 1; b < k; ++b) {
                if (state.bit(vars[b])) inside += d.weights[a * k + b];
            }
        }
    }
    d.constant = state.energy() - inside;
    return d;
}

}  // namespace qscore
