#pragma once

// Erdős–Rényi Max-Cut instances: generation, cut evaluation, text format.
//
// Generator: std::mt19937_64 (the 64-bit Mersenne Twister with the parameters
// fixed by ISO C++ [rand.predef]), seeded directly with the 64-bit instance
// seed. Candidate edges (i, j), i < j, are visited in lexicographic order and
// each consumes exactly one 64-bit draw r. The edge is kept iff
// r / 2^64 < num / den, evaluated exactly in 128-bit integer arithmetic, so
// instances are bit-reproducible on any conforming implementation.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qscore/error.hpp"

namespace qscore {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Side of each vertex in a two-set partition (0 or 1).
using Cut = std::vector<std::uint8_t>;

/// Edge probability as an exact rational num/den with 0 <= num <= den.
struct EdgeProbability {
    std::uint64_t num = 1;
    std::uint64_t den = 2;

    constexpr double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const EdgeProbability& a, const EdgeProbability& b) {
        // compare as rationals: 1/2 == 2/4
        return static_cast<unsigned __int128>(a.num) * b.den ==
               static_cast<unsigned __int128>(b.num) * a.den;
    }
};

inline EdgeProbability make_probability(std::uint64_t num, std::uint64_t den) {
    if (den == 0 || num > den) {
        throw DomainError("edge probability must be a fraction in [0, 1], got " +
                          std::to_string(num) + "/" + std::to_string(den));
    }
    const auto g = std::gcd(num, den);
    return {num / g, den / g};
}

/// Parses "a/b" or a decimal such as "0.5" / "1" into an exact fraction.
inline EdgeProbability parse_probability(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            std::size_t used_num = 0, used_den = 0;
            const auto num_text = text.substr(0, slash);
            const auto den_text = text.substr(slash + 1);
            const auto num = std::stoull(num_text, &used_num);
            const auto den = std::stoull(den_text, &used_den);
            if (used_num != num_text.size() || used_den != den_text.size()) {
                throw DomainError("bad probability '" + text + "'");
            }
            return make_probability(num, den);
        }
        const auto dot = text.find('.');
        std::string digits = text;
        std::uint64_t den = 1;
        if (dot != std::string::npos) {
            const auto frac = text.substr(dot + 1);
            if (frac.size() > 18) {
                throw DomainError("probability '" + text + "' has too many decimals");
            }
            digits = text.substr(0, dot) + frac;
            for (std::size_t k = 0; k < frac.size(); ++k) den *= 10;
        }
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(),
                                           [](char c) { return c >= '0' && c <= '9'; })) {
            throw DomainError("bad probability '" + text + "'");
        }
        return make_probability(std::stoull(digits), den);
    } catch (const std::logic_error& e) {
        if (dynamic_cast<const DomainError*>(&e) != nullptr) throw;
        throw DomainError("bad probability '" + text + "'");
    }
}

inline std::string to_string(const EdgeProbability& p) {
    return std::to_string(p.num) + "/" + std::to_string(p.den);
}

/// An undirected simple graph on vertices 0..n-1 plus the parameters it was
/// generated from. Edges are kept sorted lexicographically with i < j.
class GraphInstance {
public:
    GraphInstance(std::size_t n, std::vector<Edge> edges, std::uint64_t seed = 0,
                  EdgeProbability p = {1, 2})
        : n_(n), edges_(std::move(edges)), seed_(seed), p_(p) {
        if (n_ == 0) throw DomainError("graph must have at least one vertex");
        if (n_ > std::numeric_limits<Vertex>::max()) throw DomainError("graph too large");
        for (auto& [i, j] : edges_) {
            if (i == j) throw DomainError("self-loop on vertex " + std::to_string(i));
            if (i > j) std::swap(i, j);
            if (j >= n_) {
                throw DomainError("edge (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") out of range for n=" + std::to_string(n_));
            }
        }
        if (!std::is_sorted(edges_.begin(), edges_.end())) std::sort(edges_.begin(), edges_.end());
        if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
            throw DomainError("duplicate edge");
        }
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::span<const Edge> edges() const noexcept { return edges_; }
    std::uint64_t seed() const noexcept { return seed_; }
    EdgeProbability edge_probability() const noexcept { return p_; }

    std::vector<std::size_t> degrees() const {
        std::vector<std::size_t> deg(n_, 0);
        for (const auto& [i, j] : edges_) {
            ++deg[i];
            ++deg[j];
        }
        return deg;
    }

    friend bool operator==(const GraphInstance& a, const GraphInstance& b) {
        return a.n_ == b.n_ && a.seed_ == b.seed_ && a.p_ == b.p_ && a.edges_ == b.edges_;
    }

private:
    std::size_t n_;
    std::vector<Edge> edges_;
    std::uint64_t seed_;
    EdgeProbability p_;
};

/// G(n, p) with a fixed visitation order; see the header comment for the exact stream.
inline GraphInstance generate_er_graph(std::size_t n, EdgeProbability p, std::uint64_t seed) {
    if (n == 0) throw DomainError("generate_er_graph: n must be >= 1");
    if (p.den == 0 || p.num > p.den) throw DomainError("generate_er_graph: p outside [0, 1]");

    std::mt19937_64 rng(seed);
    const auto threshold = static_cast<unsigned __int128>(p.num) << 64;
    std::vector<Edge> edges;
    const double expected = p.value() * static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    edges.reserve(static_cast<std::size_t>(expected * 1.01) + 16);
    for (Vertex i = 0; i < n; ++i) {
        for (Vertex j = i + 1; j < n; ++j) {
            const auto r = static_cast<unsigned __int128>(rng());
            if (r * p.den < threshold) edges.emplace_back(i, j);
        }
    }
    return GraphInstance(n, std::move(edges), seed, p);
}

inline GraphInstance generate_er_graph(std::size_t n, double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("generate_er_graph: p outside [0, 1]");
    // exact for dyadic p such as 0.5; otherwise rounded to 2^-52
    constexpr std::uint64_t den = std::uint64_t{1} << 52;
    return generate_er_graph(n, make_probability(static_cast<std::uint64_t>(p * den), den), seed);
}

inline std::uint64_t cut_cost(const GraphInstance& g, std::span<const std::uint8_t> side) {
    if (side.size() != g.n()) {
        throw DomainError("cut has " + std::to_string(side.size()) + " entries, graph has " +
                          std::to_string(g.n()) + " vertices");
    }
    if (std::any_of(side.begin(), side.end(), [](std::uint8_t b) { return b > 1; })) {
        throw DomainError("cut entries must be 0 or 1");
    }
    std::uint64_t crossing = 0;
    for (const auto& [i, j] : g.edges()) crossing += (side[i] != side[j]) ? 1 : 0;
    return crossing;
}

/// Canonical text form: "n m", then m lines "i j" with i < j in lexicographic
/// order, then a "# seed=<u64> p=<num>/<den>" metadata line. Lines starting
/// with '#' are metadata or comments wherever they appear.
inline void write_graph(std::ostream& out, const GraphInstance& g) {
    out << g.n() << ' ' << g.edge_count() << '\n';
    for (const auto& [i, j] : g.edges()) out << i << ' ' << j << '\n';
    out << "# seed=" << g.seed() << " p=" << to_string(g.edge_probability()) << '\n';
}

inline std::string serialize_graph(const GraphInstance& g) {
    std::ostringstream out;
    write_graph(out, g);
    return out.str();
}

namespace detail {

inline bool parse_u64(const std::string& token, std::uint64_t& out) {
    if (token.empty() || token.size() > 20) return false;
    if (!std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return false;
    }
    try {
        out = std::stoull(token);
    } catch (const std::out_of_range&) {
        return false;
    }
    return true;
}

inline std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> tokens;
    for (std::string t; in >> t;) tokens.push_back(std::move(t));
    return tokens;
}

}  // namespace detail

inline GraphInstance read_graph(std::istream& in) {
    std::uint64_t seed = 0;
    EdgeProbability p{1, 2};
    std::size_t line_no = 0;
    std::string line;

    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            if (line[0] == '#') {
                for (const auto& tok : detail::split_ws(line.substr(1))) {
                    if (tok.rfind("seed=", 0) == 0) {
                        if (!detail::parse_u64(tok.substr(5), seed)) {
                            throw ParseError(line_no, "bad seed '" + tok + "'");
                        }
                    } else if (tok.rfind("p=", 0) == 0) {
                        try {
                            p = parse_probability(tok.substr(2));
                        } catch (const DomainError& e) {
                            throw ParseError(line_no, e.what());
                        }
                    }
                }
                continue;
            }
            return true;
        }
        return false;
    };

    if (!next_line()) throw ParseError(line_no, "missing header line 'n m'");
    const auto header = detail::split_ws(line);
    std::uint64_t n = 0, m = 0;
    if (header.size() != 2 || !detail::parse_u64(header[0], n) || !detail::parse_u64(header[1], m)) {
        throw ParseError(line_no, "expected header 'n m', got '" + line + "'");
    }
    if (n == 0) throw ParseError(line_no, "vertex count must be positive");

    std::vector<Edge> edges;
    edges.reserve(m);
    bool sorted = true;
    for (std::uint64_t k = 0; k < m; ++k) {
        if (!next_line()) {
            throw ParseError(line_no, "expected " + std::to_string(m) + " edges, found " +
                                          std::to_string(k));
        }
        const auto tok = detail::split_ws(line);
        std::uint64_t i = 0, j = 0;
        if (tok.size() != 2 || !detail::parse_u64(tok[0], i) || !detail::parse_u64(tok[1], j)) {
            throw ParseError(line_no, "expected edge 'i j', got '" + line + "'");
        }
        if (i == j) throw ParseError(line_no, "self-loop " + line);
        if (i > j) throw ParseError(line_no, "edge must be written with i < j: " + line);
        if (j >= n) throw ParseError(line_no, "vertex out of range: " + line);
        const Edge e{static_cast<Vertex>(i), static_cast<Vertex>(j)};
        if (!edges.empty() && edges.back() >= e) {
            if (edges.back() == e) throw ParseError(line_no, "duplicate edge " + line);
            sorted = false;
        }
        edges.push_back(e);
    }
    const auto last_edge_line = line_no;
    if (next_line()) throw ParseError(line_no, "trailing content after " + std::to_string(m) + " edges");
    if (!sorted) {
        std::sort(edges.begin(), edges.end());
        const auto dup = std::adjacent_find(edges.begin(), edges.end());
        if (dup != edges.end()) {
            throw ParseError(last_edge_line, "duplicate edge " + std::to_string(dup->first) + " " +
                                                 std::to_string(dup->second));
        }
    }
    return GraphInstance(n, std::move(edges), seed, p);
}

inline GraphInstance parse_graph(const std::string& text) {
    std::istringstream in(text);
    return read_graph(in);
}

}  // namespace qscore
