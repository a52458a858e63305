#pragma once

// JSON-over-HTTP bridge to out-of-process QUBO solvers.
//
// Request  (POST <base>/solve, application/json):
//   {"n": int, "constant": number, "terms": [[i, j, c], ...],
//    "time_limit_ms": int, "seed": u64, "iteration_quota": u64 (deterministic budgets only)}
// Response:
//   {"assignment": [0/1, ...], "energy": number}
//   or {"status": "no_result", "reason": string}
//
// Every returned assignment is re-evaluated locally; the cut that enters the
// protocol is always computed here, never taken from the remote side. Any
// failure becomes a NoResult run with a reason, never an exception.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "httplib.h"
#include "qscore/io.hpp"
#include "qscore/solver.hpp"

namespace qscore {

struct RemoteEndpoint {
    std::string base_url;                         ///< e.g. http://127.0.0.1:8080 or http://host/prefix
    std::optional<std::string> token;             ///< sent as "Authorization: Bearer <token>"
    std::chrono::milliseconds request_timeout{70000};

    static constexpr std::chrono::milliseconds margin{5000};

    /// Environment variable read for the auth token.
    static constexpr const char* token_env = "QSCORE_REMOTE_TOKEN";

    /// The request timeout must leave room for the solver's wall-clock budget.
    void check_against(const SolverBudget& budget) const {
        if (budget.is_wall_clock() &&
            request_timeout < std::chrono::milliseconds(static_cast<std::int64_t>(budget.limit_ms())) + margin) {
            throw ConfigError("remote request timeout " + std::to_string(request_timeout.count()) +
                              " ms must be at least the budget plus " + std::to_string(margin.count()) + " ms");
        }
    }

    static std::optional<std::string> token_from_env() {
        if (const char* t = std::getenv(token_env); t != nullptr && *t != '\0') return std::string(t);
        return std::nullopt;
    }
};

namespace detail {

struct SplitUrl {
    std::string origin;  ///< scheme://host[:port]
    std::string path;    ///< request path
};

inline SplitUrl split_url(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw ConfigError("remote URL needs a scheme: '" + url + "'");
    if (url.compare(0, scheme, "http") != 0) throw ConfigError("only http:// endpoints are supported");
    const auto slash = url.find('/', scheme + 3);
    SplitUrl out;
    out.origin = url.substr(0, slash);
    std::string prefix = slash == std::string::npos ? "" : url.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    out.path = prefix + "/solve";
    return out;
}

template <typename Coeff>
bool energies_match(double claimed, Coeff local) {
    const double l = static_cast<double>(local);
    return std::abs(claimed - l) <= 1e-9 * std::max(1.0, std::abs(l));
}

}  // namespace detail

/// Outcome of one remote call at the QUBO level.
struct RemoteReply {
    std::optional<Assignment> assignment;  ///< set iff the call succeeded and validated
    double energy = 0.0;
    std::string reason;                    ///< failure category and detail
};

/// Sends q to the endpoint and validates the answer against q.
template <typename Coeff>
RemoteReply remote_solve_qubo(const RemoteEndpoint& ep, const BasicQubo<Coeff>& q, const SolverBudget& budget) {
    RemoteReply reply;
    detail::SplitUrl url;
    try {
        url = detail::split_url(ep.base_url);
    } catch (const ConfigError& e) {
        reply.reason = std::string("transport: ") + e.what();
        return reply;
    }
    json body = qubo_to_json(q);
    body["seed"] = budget.seed;
    if (budget.is_wall_clock()) {
        body["time_limit_ms"] = static_cast<std::int64_t>(budget.limit_ms());
    } else {
        body["time_limit_ms"] = ep.request_timeout.count();
        body["iteration_quota"] = budget.quota();
    }

    httplib::Client client(url.origin);
    const auto timeout = ep.request_timeout;
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    httplib::Headers headers;
    if (ep.token) headers.emplace("Authorization", "Bearer " + *ep.token);

    const auto sent = Clock::now();
    const auto res = client.Post(url.path, headers, body.dump(), "application/json");
    if (!res) {
        const auto err = res.error();
        const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                               (err == httplib::Error::Read && Clock::now() - sent >= timeout);
        reply.reason = std::string(timed_out ? "timeout" : "transport") + ": " + httplib::to_string(err);
        return reply;
    }
    if (res->status != 200) {
        reply.reason = "transport: HTTP " + std::to_string(res->status);
        return reply;
    }

    json answer;
    try {
        answer = json::parse(res->body);
    } catch (const json::exception& e) {
        reply.reason = std::string("invalid response: ") + e.what();
        return reply;
    }
    try {
        if (answer.value("status", std::string{}) == "no_result") {
            reply.reason = "no_result: " + answer.value("reason", std::string{"unspecified"});
            return reply;
        }
        const auto& bits = answer.at("assignment");
        if (!bits.is_array() || bits.size() != q.n()) {
            reply.reason = "invalid response: assignment length " + std::to_string(bits.size()) +
                           ", expected " + std::to_string(q.n());
            return reply;
        }
        Assignment x;
        x.reserve(q.n());
        for (const auto& b : bits) {
            const auto v = b.get<std::int64_t>();
            if (v != 0 && v != 1) {
                reply.reason = "invalid response: assignment entries must be 0 or 1";
                return reply;
            }
            x.push_back(static_cast<std::uint8_t>(v));
        }
        const double claimed = answer.at("energy").get<double>();
        const Coeff local = energy(q, x);
        if (!detail::energies_match(claimed, local)) {
            reply.reason = "energy mismatch: claimed " + params::format_double(claimed) + ", recomputed " +
                           params::format_double(static_cast<double>(local));
            return reply;
        }
        reply.energy = static_cast<double>(local);
        reply.assignment = std::move(x);
    } catch (const json::exception& e) {
        reply.reason = std::string("invalid response: ") + e.what();
    }
    return reply;
}

/// Max-Cut through a remote QUBO solver, scored like any local solver.
class RemoteSolver final : public Solver {
public:
    explicit RemoteSolver(RemoteEndpoint ep) : ep_(std::move(ep)) {}

    std::string name() const override { return "remote"; }

    ParamMap effective_params() const override {
        return {{"url", ep_.base_url}, {"timeout_ms", std::to_string(ep_.request_timeout.count())}};
    }

    const RemoteEndpoint& endpoint() const noexcept { return ep_; }

    SolverRun solve(const GraphInstance& g, const SolverBudget& budget,
                    const IncumbentTrace& trace = {}) const override {
        BudgetTracker tracker(budget);
        const Qubo q = maxcut_to_qubo(g);
        auto reply = remote_solve_qubo(ep_, q, budget);
        SolverRun run;
        run.elapsed_ms = tracker.elapsed_ms();
        run.solver_id = id();
        run.iterations = 1;
        if (!reply.assignment) {
            run.status = SolverStatus::NoResult;
            run.reason = reply.reason;
            return run;
        }
        run.status = SolverStatus::Solved;
        run.best_cut = cut_cost(g, *reply.assignment);
        run.best_assignment = std::move(*reply.assignment);
        if (trace) trace(1, run.best_cut, run.elapsed_ms);
        return run;
    }

private:
    RemoteEndpoint ep_;
};

/// Solves a QUBO arriving over the wire: (problem, budget) -> result.
using QuboHandler = std::function<QuboResult<double>(const RealQubo&, const SolverBudget&)>;

/// Registers POST <prefix>/solve on `server`, answering with `handler`.
/// Used by the loopback tests and as a template for vendor adapters.
inline void install_solver_service(httplib::Server& server, QuboHandler handler,
                                   const std::string& prefix = "") {
    server.Post(prefix + "/solve", [handler = std::move(handler)](const httplib::Request& req,
                                                                  httplib::Response& res) {
        json out;
        try {
            const auto body = json::parse(req.body);
            const auto q = qubo_from_json(body);
            const auto seed = body.value("seed", std::uint64_t{0});
            SolverBudget budget = body.contains("iteration_quota")
                                      ? SolverBudget::deterministic(body.at("iteration_quota").get<std::uint64_t>(), seed)
                                      : SolverBudget::wall_clock(std::chrono::milliseconds(
                                                                     body.at("time_limit_ms").get<std::int64_t>()),
                                                                 seed);
            const auto result = handler(q, budget);
            if (result.has_result) {
                out = {{"assignment", result.x}, {"energy", result.energy}};
            } else {
                out = {{"status", "no_result"}, {"reason", result.reason}};
            }
        } catch (const std::exception& e) {
            res.status = 400;
            out = {{"status", "no_result"}, {"reason", e.what()}};
        }
        res.set_content(out.dump(), "application/json");
    });
}

}  // namespace qscore
