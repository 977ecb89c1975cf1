#pragma once

#include <limits>
#include <stdexcept>

#include "wvcp/coloring.hpp"
#include "wvcp/graph.hpp"

namespace wvcp::harness {

// Exact optimum by exhaustive sequential coloring over the canonical order
// with the symmetry-reduced move set (existing groups plus one new group).
// The partial score is monotone, so branches at or above the incumbent are
// cut; this cannot change the returned minimum.
inline Weight brute_force_optimum(const WeightedGraph& g) {
    if (g.n() > 12)
        throw std::invalid_argument("brute_force_optimum is limited to n <= 12, got n=" +
                                    std::to_string(g.n()));
    if (g.n() == 0) return 0;

    PartialSolution s(g);
    Weight best = std::numeric_limits<Weight>::max();
    std::vector<std::vector<Move>> stack(g.n() + 1);

    auto dfs = [&](auto&& self, int depth) -> void {
        if (s.complete()) {
            best = std::min(best, s.score());
            return;
        }
        if (s.score() >= best) return;
        auto& moves = stack[depth];
        s.legal_moves(moves);
        for (const Move& m : moves) {
            s.apply(m);
            self(self, depth + 1);
            s.undo_last();
        }
    };
    dfs(dfs, 0);
    return best;
}

}  // namespace wvcp::harness
