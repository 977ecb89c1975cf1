#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "wvcp/coloring.hpp"
#include "wvcp/graph.hpp"

namespace wvcp {

enum class ReductionRule { CLIQUE_RULE, DOMINATION_RULE };

inline const char* rule_name(ReductionRule r) {
    return r == ReductionRule::CLIQUE_RULE ? "CLIQUE_RULE" : "DOMINATION_RULE";
}

struct ReductionReport {
    struct Removal {
        int vertex;  // original id
        ReductionRule rule;
    };
    std::vector<Removal> removed;       // in removal order
    std::vector<int> kept_to_original;  // reduced id -> original id
};

namespace detail {

// Live-filtered view over the original graph during reduction.
struct LiveView {
    const WeightedGraph* g;
    std::vector<char> live;

    explicit LiveView(const WeightedGraph& graph) : g(&graph), live(graph.n(), 1) {}

    int degree(int v) const {
        int d = 0;
        for (int u : g->neighbors(v)) d += live[u];
        return d;
    }

    std::vector<int> neighbors(int v) const {
        std::vector<int> out;
        for (int u : g->neighbors(v))
            if (live[u]) out.push_back(u);
        return out;
    }

    // N(v1) subset of N(v2) over live vertices
    bool neighborhood_contained(int v1, int v2) const {
        for (int u : g->neighbors(v1))
            if (live[u] && !g->adjacent(u, v2)) return false;
        return true;
    }

    // Greedy clique seeded at x: repeatedly add the heaviest live vertex
    // adjacent to everything chosen so far (ties to the lowest id).
    std::vector<int> greedy_clique(int x) const {
        std::vector<int> clique{x};
        std::vector<int> cand = neighbors(x);
        while (!cand.empty()) {
            int pick = cand.front();
            for (int u : cand)
                if (g->weight(u) > g->weight(pick)) pick = u;
            clique.push_back(pick);
            std::vector<int> next;
            for (int u : cand)
                if (u != pick && g->adjacent(u, pick)) next.push_back(u);
            cand = std::move(next);
        }
        return clique;
    }
};

}  // namespace detail

// Two optimum-preserving reductions applied alternately to fixpoint:
// a vertex dominated by a heavier-or-equal vertex whose neighborhood covers
// its own can always take that vertex's color; and a vertex of degree d
// whose weight is below the (d+1)-th heaviest weight of some clique always
// fits in one of the d+1 groups that clique forces, without raising any max.
inline std::pair<WeightedGraph, ReductionReport> reduce(const WeightedGraph& g) {
    detail::LiveView view(g);
    ReductionReport report;

    bool changed = true;
    while (changed) {
        changed = false;

        // domination rule, rescanning after every removal
        bool removed_one = true;
        while (removed_one) {
            removed_one = false;
            for (int v1 = 0; v1 < g.n() && !removed_one; ++v1) {
                if (!view.live[v1]) continue;
                for (int v2 = 0; v2 < g.n(); ++v2) {
                    if (v2 == v1 || !view.live[v2]) continue;
                    if (g.weight(v2) < g.weight(v1)) continue;
                    if (g.adjacent(v1, v2)) continue;
                    if (!view.neighborhood_contained(v1, v2)) continue;
                    view.live[v1] = 0;
                    report.removed.push_back({v1, ReductionRule::DOMINATION_RULE});
                    removed_one = true;
                    changed = true;
                    break;
                }
            }
        }

        // clique rule: one greedy clique per live vertex, sorted weights once
        std::vector<std::vector<Weight>> clique_weights;
        for (int x = 0; x < g.n(); ++x) {
            if (!view.live[x]) continue;
            auto clique = view.greedy_clique(x);
            std::vector<Weight> ws;
            ws.reserve(clique.size());
            for (int u : clique) ws.push_back(g.weight(u));
            std::sort(ws.rbegin(), ws.rend());
            clique_weights.push_back(std::move(ws));
        }
        for (int v = 0; v < g.n(); ++v) {
            if (!view.live[v]) continue;
            int d = view.degree(v);
            bool removable = false;
            for (const auto& ws : clique_weights) {
                if (static_cast<int>(ws.size()) > d && ws[d] > g.weight(v)) {
                    removable = true;
                    break;
                }
            }
            if (removable) {
                view.live[v] = 0;
                report.removed.push_back({v, ReductionRule::CLIQUE_RULE});
                changed = true;
                break;  // degrees and cliques are stale now; redo the pass
            }
        }
    }

    std::vector<int> new_id(g.n(), -1);
    for (int v = 0; v < g.n(); ++v) {
        if (view.live[v]) {
            new_id[v] = static_cast<int>(report.kept_to_original.size());
            report.kept_to_original.push_back(v);
        }
    }
    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : g.edges())
        if (new_id[u] >= 0 && new_id[v] >= 0) edges.emplace_back(new_id[u], new_id[v]);
    std::vector<Weight> weights;
    weights.reserve(report.kept_to_original.size());
    for (int v : report.kept_to_original) weights.push_back(g.weight(v));
    WeightedGraph reduced(g.name(), static_cast<int>(report.kept_to_original.size()),
                          std::move(edges), std::move(weights));
    return {std::move(reduced), std::move(report)};
}

// Lifts a coloring of the reduced graph back to the original. Removed
// vertices re-enter in reverse removal order; both rules guarantee a
// conflict-free group whose max weight already covers the vertex, so the
// score is unchanged.
inline Coloring expand_solution(const WeightedGraph& original, const ReductionReport& report,
                                const Coloring& reduced_solution) {
    std::vector<int> color_of(original.n(), -1);
    int k = 0;
    for (std::size_t i = 0; i < report.kept_to_original.size(); ++i) {
        int c = reduced_solution.color_of[i];
        color_of[report.kept_to_original[i]] = c;
        k = std::max(k, c + 1);
    }
    std::vector<Weight> group_max(k, 0);
    for (int v = 0; v < original.n(); ++v)
        if (color_of[v] >= 0) group_max[color_of[v]] = std::max(group_max[color_of[v]], original.weight(v));

    for (auto it = report.removed.rbegin(); it != report.removed.rend(); ++it) {
        int v = it->vertex;
        int placed = -1;
        for (int c = 0; c < k && placed < 0; ++c) {
            if (group_max[c] < original.weight(v)) continue;
            bool conflict = false;
            for (int u : original.neighbors(v))
                if (color_of[u] == c) {
                    conflict = true;
                    break;
                }
            if (!conflict) placed = c;
        }
        if (placed < 0)
            throw std::logic_error("reduction invariant violated: no group can host vertex " +
                                   std::to_string(v));
        color_of[v] = placed;
    }
    return Coloring{std::move(color_of), reduced_solution.score};
}

}  // namespace wvcp
