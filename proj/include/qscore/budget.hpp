#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <variant>

#include "qscore/error.hpp"

namespace qscore {

using Clock = std::chrono::steady_clock;

struct WallClock {
    std::chrono::milliseconds limit;
};

/// Fixed amount of solver-specific work (sweeps, passes, enumerated
/// assignments, ...). Makes runs reproducible bit for bit.
struct Deterministic {
    std::uint64_t quota;
};

struct SolverBudget {
    std::variant<WallClock, Deterministic> mode;
    std::uint64_t seed = 0;

    static SolverBudget wall_clock(std::chrono::milliseconds limit, std::uint64_t seed = 0) {
        if (limit.count() <= 0) throw DomainError("wall-clock budget must be positive");
        return {WallClock{limit}, seed};
    }

    /// A zero quota is accepted: it runs a solver's initialisation only.
    static SolverBudget deterministic(std::uint64_t quota, std::uint64_t seed = 0) {
        return {Deterministic{quota}, seed};
    }

    bool is_wall_clock() const noexcept { return std::holds_alternative<WallClock>(mode); }

    /// Milliseconds for wall-clock budgets, 0 otherwise.
    double limit_ms() const noexcept {
        if (const auto* w = std::get_if<WallClock>(&mode)) return static_cast<double>(w->limit.count());
        return 0.0;
    }

    std::uint64_t quota() const noexcept {
        if (const auto* d = std::get_if<Deterministic>(&mode)) return d->quota;
        return 0;
    }

    SolverBudget with_seed(std::uint64_t s) const { return {mode, s}; }

    std::string describe() const {
        if (is_wall_clock()) return "wallclock:" + std::to_string(static_cast<long long>(limit_ms())) + "ms";
        return "deterministic:" + std::to_string(quota());
    }
};

/// Tracks one run's consumption of a budget. `spent` counts the caller's
/// work units; it only matters for deterministic budgets.
class BudgetTracker {
public:
    explicit BudgetTracker(const SolverBudget& budget, Clock::time_point start = Clock::now())
        : budget_(budget), start_(start) {}

    Clock::time_point start() const noexcept { return start_; }
    const SolverBudget& budget() const noexcept { return budget_; }
    bool is_wall_clock() const noexcept { return budget_.is_wall_clock(); }

    std::chrono::nanoseconds elapsed() const { return Clock::now() - start_; }

    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(elapsed()).count();
    }

    bool exhausted(std::uint64_t spent) const {
        if (const auto* w = std::get_if<WallClock>(&budget_.mode)) return elapsed() >= w->limit;
        return spent >= std::get<Deterministic>(budget_.mode).quota;
    }

    /// Whether starting another unit of work expected to take `next` would
    /// run past the deadline (wall clock), or past the quota (deterministic).
    bool would_exceed(std::uint64_t spent, std::chrono::nanoseconds next) const {
        if (const auto* w = std::get_if<WallClock>(&budget_.mode)) return elapsed() + next > w->limit;
        return spent >= std::get<Deterministic>(budget_.mode).quota;
    }

private:
    SolverBudget budget_;
    Clock::time_point start_;
};

}  // namespace qscore
