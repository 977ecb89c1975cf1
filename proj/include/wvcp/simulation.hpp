#pragma once

#include <optional>
#include <stdexcept>

#include "wvcp/coloring.hpp"
#include "wvcp/local_search.hpp"
#include "wvcp/rng.hpp"

namespace wvcp {

// Uniform choice over the full legal move set at every step.
inline void simulate_random(PartialSolution& s, Rng& rng) {
    std::vector<Move> moves;
    while (!s.complete()) {
        s.legal_moves(moves);
        s.apply(moves[rng.below(moves.size())]);
    }
}

// Uniform choice among moves into existing groups; opens a new group only
// when no existing group admits the vertex.
inline void simulate_greedy_random(PartialSolution& s, Rng& rng) {
    std::vector<Move> moves;
    while (!s.complete()) {
        s.greedy_moves(moves);
        s.apply(moves[rng.below(moves.size())]);
    }
}

// Deterministic first fit: always the lowest admissible color index.
inline void simulate_greedy(PartialSolution& s) {
    std::vector<Move> moves;
    while (!s.complete()) {
        s.legal_moves(moves);
        s.apply(moves.front());
    }
}

struct LsContractViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Completes the partial solution with the deterministic greedy, then lets the
// improver run within its wall-clock budget. The returned solution is the
// best legal one the improver saw; backpropagation uses its score. An
// improver that hands back an illegal or worse-than-greedy solution broke its
// contract, which is surfaced rather than absorbed.
template <typename ImproverFn>
Coloring simulate_with_ls(PartialSolution& s, ImproverFn&& improver, LsBudget budget, Rng& rng) {
    simulate_greedy(s);
    Weight greedy_score = s.score();
    LsSolution start(s.graph(), s.to_coloring().color_of);
    LsSolution improved = improver(std::move(start), budget, rng);
    if (!improved.complete() || !improved.legal() || improved.score() > greedy_score)
        throw LsContractViolation("local search returned an illegal or worse solution on " +
                                  s.graph().name());
    return improved.to_coloring();
}

template <typename ImproverFn>
Coloring simulate_with_ls(PartialSolution& s, ImproverFn&& improver, double budget_seconds,
                          Rng& rng, Weight target = std::numeric_limits<Weight>::min()) {
    return simulate_with_ls(s, std::forward<ImproverFn>(improver),
                            LsBudget(budget_seconds, target), rng);
}

inline Coloring simulate_with_ls(PartialSolution& s, LsKind improver, const LsParams& params,
                                 double budget_seconds, Rng& rng,
                                 Weight target = std::numeric_limits<Weight>::min()) {
    return simulate_with_ls(
        s,
        [&](LsSolution start, LsBudget budget, Rng& r) {
            return improve(improver, std::move(start), budget, params, r);
        },
        budget_seconds, rng, target);
}

// Per-simulation time budget from the instance size; the 0.02 factor is the
// solver default and is exposed in the config.
inline double ls_budget_seconds(double factor, int n) { return factor * n; }

struct SimulationStrategy {
    enum class Kind { Random, GreedyRandom, Greedy, GreedyThenLs } kind = Kind::Greedy;
    LsKind improver = LsKind::TabuWeight;
    LsParams ls_params{};
    double ls_budget_factor = 0.02;
    long long ls_budget_steps = 0;  // > 0: deterministic step budget instead of the clock

    // Completes s and returns the score to backpropagate along the branch.
    Coloring run(PartialSolution& s, Rng& rng,
                 Weight target = std::numeric_limits<Weight>::min()) const {
        switch (kind) {
            case Kind::Random:
                simulate_random(s, rng);
                return s.to_coloring();
            case Kind::GreedyRandom:
                simulate_greedy_random(s, rng);
                return s.to_coloring();
            case Kind::Greedy:
                simulate_greedy(s);
                return s.to_coloring();
            case Kind::GreedyThenLs: {
                LsBudget budget(ls_budget_seconds(ls_budget_factor, s.graph().n()), target);
                if (ls_budget_steps > 0)
                    budget.with_max_steps(static_cast<std::uint64_t>(ls_budget_steps));
                return simulate_with_ls(
                    s,
                    [&](LsSolution start, LsBudget b, Rng& r) {
                        return improve(improver, std::move(start), b, ls_params, r);
                    },
                    budget, rng);
            }
        }
        throw std::logic_error("unknown simulation kind");
    }
};

}  // namespace wvcp
