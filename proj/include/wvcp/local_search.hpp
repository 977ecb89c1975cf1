#pragma once

#include <cassert>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "wvcp/coloring.hpp"
#include "wvcp/graph.hpp"
#include "wvcp/rng.hpp"

namespace wvcp {

// Mutable solution state for the improvers. Unlike construction-order partial
// solutions, vertices move arbitrarily here, so per-group weight multisets
// handle max decreases on removal, and monochromatic edges are tracked for
// the searches that cross into the illegal space.
class LsSolution {
public:
    LsSolution(const WeightedGraph& g, const std::vector<int>& color_of) : g_(&g) {
        int k = 0;
        for (int c : color_of) k = std::max(k, c + 1);
        cap_ = k + 1;
        color_of_.assign(g.n(), -1);
        group_size_.assign(cap_, 0);
        group_weights_.assign(cap_, {});
        conflicts_of_.assign(g.n(), 0);
        nc_.assign(static_cast<std::size_t>(g.n()) * cap_, 0);
        uncolored_ = g.n();
        for (int v = 0; v < g.n(); ++v)
            if (color_of[v] >= 0) place(v, color_of[v]);
    }

    const WeightedGraph& graph() const { return *g_; }
    int color_of(int v) const { return color_of_[v]; }
    Weight score() const { return score_; }
    int conflict_count() const { return conflict_count_; }
    bool legal() const { return conflict_count_ == 0; }
    int num_groups() const { return cap_; }
    int group_size(int c) const { return group_size_[c]; }
    int uncolored_count() const { return uncolored_; }
    bool complete() const { return uncolored_ == 0; }
    int conflicts_of(int v) const { return conflicts_of_[v]; }

    Weight group_max(int c) const {
        return group_weights_[c].empty() ? 0 : *group_weights_[c].rbegin();
    }

    // neighbors of v currently colored c
    int neighbors_in(int v, int c) const { return nc_[static_cast<std::size_t>(v) * cap_ + c]; }
    bool legal_target(int v, int c) const { return neighbors_in(v, c) == 0; }

    int heaviest_in_group(int c) const {
        int best = -1;
        for (int v = 0; v < g_->n(); ++v)
            if (color_of_[v] == c && (best == -1 || g_->weight(v) > g_->weight(best))) best = v;
        return best;
    }

    int first_empty_group() {
        for (int c = 0; c < cap_; ++c)
            if (group_size_[c] == 0) return c;
        grow(cap_ + 4);
        return cap_ - 4;
    }

    Weight delta_score(int v, int c_to) const {
        int c_from = color_of_[v];
        Weight w = g_->weight(v);
        Weight d = 0;
        if (c_from >= 0) {
            Weight mx = group_max(c_from);
            if (w == mx && group_weights_[c_from].count(mx) == 1) {
                auto it = group_weights_[c_from].rbegin();
                ++it;
                Weight next = it == group_weights_[c_from].rend() ? 0 : *it;
                d += next - mx;
            }
        }
        Weight mxb = group_max(c_to);
        if (w > mxb) d += w - mxb;
        return d;
    }

    int delta_conflicts(int v, int c_to) const {
        int c_from = color_of_[v];
        return neighbors_in(v, c_to) - (c_from >= 0 ? neighbors_in(v, c_from) : 0);
    }

    void place(int v, int c) {
        assert(color_of_[v] == -1);
        if (c >= cap_) grow(c + 1);
        color_of_[v] = c;
        ++group_size_[c];
        insert_weight(c, g_->weight(v));
        for (int u : g_->neighbors(v)) ++nc_at(u, c);
        int confl = neighbors_in(v, c);
        conflicts_of_[v] = confl;
        conflict_count_ += confl;
        for (int u : g_->neighbors(v))
            if (color_of_[u] == c) ++conflicts_of_[u];
        --uncolored_;
    }

    void uncolor(int v) {
        int c = color_of_[v];
        conflict_count_ -= conflicts_of_[v];
        for (int u : g_->neighbors(v)) {
            --nc_at(u, c);
            if (color_of_[u] == c) --conflicts_of_[u];
        }
        conflicts_of_[v] = 0;
        color_of_[v] = -1;
        --group_size_[c];
        remove_weight(c, g_->weight(v));
        ++uncolored_;
    }

    void move(int v, int c_to) {
        uncolor(v);
        place(v, c_to);
    }

    Coloring to_coloring() const { return Coloring{color_of_, score_}; }

    std::vector<std::pair<int, int>> conflict_edges() const {
        std::vector<std::pair<int, int>> es;
        for (int v = 0; v < g_->n(); ++v) {
            if (conflicts_of_[v] == 0 || color_of_[v] < 0) continue;
            for (int u : g_->neighbors(v))
                if (u > v && color_of_[u] == color_of_[v]) es.emplace_back(v, u);
        }
        return es;
    }

private:
    void grow(int new_cap) {
        std::vector<int> nc2(static_cast<std::size_t>(g_->n()) * new_cap, 0);
        for (int v = 0; v < g_->n(); ++v)
            for (int c = 0; c < cap_; ++c)
                nc2[static_cast<std::size_t>(v) * new_cap + c] = nc_[static_cast<std::size_t>(v) * cap_ + c];
        nc_ = std::move(nc2);
        cap_ = new_cap;
        group_size_.resize(cap_, 0);
        group_weights_.resize(cap_);
    }

    int& nc_at(int v, int c) { return nc_[static_cast<std::size_t>(v) * cap_ + c]; }

    void insert_weight(int c, Weight w) {
        Weight old = group_max(c);
        group_weights_[c].insert(w);
        if (w > old) score_ += w - old;
    }

    void remove_weight(int c, Weight w) {
        Weight old = group_max(c);
        group_weights_[c].erase(group_weights_[c].find(w));
        Weight now = group_max(c);
        score_ -= old - now;
    }

    const WeightedGraph* g_;
    int cap_ = 0;
    std::vector<int> color_of_;
    std::vector<int> group_size_;
    std::vector<std::multiset<Weight>> group_weights_;
    std::vector<int> nc_;
    std::vector<int> conflicts_of_;
    Weight score_ = 0;
    int conflict_count_ = 0;
    int uncolored_ = 0;
};

struct OneMove {
    int vertex;
    int target;
    Weight score_delta;
    int conflict_delta;
};

// One-move neighborhood: recolor a vertex into any other nonempty group or
// the first empty one. legal_only drops moves that would create conflicts.
template <typename Fn>
void for_each_one_move(LsSolution& s, bool legal_only, Fn&& fn) {
    int empty = s.first_empty_group();
    for (int v = 0; v < s.graph().n(); ++v) {
        if (s.color_of(v) < 0) continue;
        int from = s.color_of(v);
        for (int c = 0; c < s.num_groups(); ++c) {
            if (c == from) continue;
            if (s.group_size(c) == 0 && c != empty) continue;
            if (legal_only && !s.legal_target(v, c)) continue;
            fn(OneMove{v, c, s.delta_score(v, c), s.delta_conflicts(v, c)});
        }
    }
}

inline std::vector<OneMove> one_move_neighbors(LsSolution& s, bool legal_only) {
    std::vector<OneMove> out;
    for_each_one_move(s, legal_only, [&](const OneMove& m) { out.push_back(m); });
    return out;
}

// Wall-clock budget with a coarse check cadence, plus an optional target
// score that ends the search early once the best legal solution reaches it.
class LsBudget {
public:
    LsBudget(double seconds, Weight target = std::numeric_limits<Weight>::min())
        : deadline_(std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(seconds))),
          target_(target) {
        expired_ = std::chrono::steady_clock::now() >= deadline_;
    }

    static LsBudget at_deadline(std::chrono::steady_clock::time_point deadline,
                                Weight target = std::numeric_limits<Weight>::min()) {
        LsBudget b(0.0, target);
        b.deadline_ = deadline;
        b.expired_ = std::chrono::steady_clock::now() >= deadline;
        return b;
    }

    // deterministic alternative to the wall clock: at most `steps` expired()
    // polls succeed
    LsBudget& with_max_steps(std::uint64_t steps) {
        max_steps_ = steps;
        return *this;
    }

    bool expired() {
        ++calls_;
        if (max_steps_ && calls_ > *max_steps_) expired_ = true;
        else if ((calls_ & 63) == 0 && !expired_)
            expired_ = std::chrono::steady_clock::now() >= deadline_;
        return expired_;
    }

    bool reached(Weight best) const { return best <= target_; }

private:
    std::chrono::steady_clock::time_point deadline_;
    Weight target_;
    std::optional<std::uint64_t> max_steps_;
    std::uint64_t calls_ = 0;
    bool expired_ = false;
};

struct LsParams {
    int tenure_base = 10;
    int tenure_div = 10;  // tt = base + uniform(0, |moves|/div)
    long long afisa_phi_init = 1;
    long long afisa_phi_max = 1LL << 40;
    int afisa_streak = 5;
    bool afisa_adapt = true;
    long long redls_penalty_base = 1;
    int ilsts_max_groups = 3;
    int ilsts_repair_cap_factor = 10;
};

// Test instrumentation: every applied move is recorded.
struct LsTrace {
    struct Step {
        int vertex, from, to;
        long long iteration;
        bool tabu, aspiration;
        Weight score_after;
        int conflicts_after;
        int uncolored_after;
    };
    std::vector<Step> steps;
};

struct LsHooks {
    LsTrace* trace = nullptr;
    std::function<void(Weight)> on_best;  // fires on every new best legal score
};

namespace detail {

struct BestLegal {
    Coloring best;
    Weight score = std::numeric_limits<Weight>::max();
    const std::function<void(Weight)>* on_best = nullptr;

    void consider(const LsSolution& s) {
        if (s.complete() && s.legal() && s.score() < score) {
            best = s.to_coloring();
            score = s.score();
            if (on_best && *on_best) (*on_best)(score);
        }
    }
};

inline int tenure(const LsParams& p, std::size_t move_count, Rng& rng) {
    long long span = static_cast<long long>(move_count) / std::max(1, p.tenure_div);
    return p.tenure_base + static_cast<int>(rng.uniform_int(0, span));
}

// tabu_until grows with the group capacity on demand
class TabuList {
public:
    explicit TabuList(int n) : n_(n), until_(n) {}

    bool is_tabu(int v, int c, long long iter) const {
        const auto& row = until_[v];
        return c < static_cast<int>(row.size()) && iter < row[c];
    }

    void forbid(int v, int c, long long until) {
        auto& row = until_[v];
        if (c >= static_cast<int>(row.size())) row.resize(c + 1, 0);
        row[c] = until;
    }

private:
    int n_;
    std::vector<std::vector<long long>> until_;
};

}  // namespace detail

// Basic tabu search over legal one-moves: best non-tabu move each iteration
// (ties broken at random), reverse move forbidden for the tenure, tabu
// overridden when a move beats the best solution found so far.
inline LsSolution tabu_weight(LsSolution s, LsBudget budget, const LsParams& p, Rng& rng,
                              const LsHooks& hooks = {}) {
    detail::BestLegal best;
    best.on_best = &hooks.on_best;
    best.consider(s);
    detail::TabuList tabu(s.graph().n());
    long long iter = 0;
    std::vector<OneMove> moves;
    while (!budget.expired() && !budget.reached(best.score)) {
        ++iter;
        moves.clear();
        for_each_one_move(s, true, [&](const OneMove& m) { moves.push_back(m); });
        if (moves.empty()) break;

        const OneMove* chosen = nullptr;
        bool chosen_tabu = false, chosen_asp = false;
        Weight best_delta = 0;
        int ties = 0;
        for (const auto& m : moves) {
            bool is_tabu = tabu.is_tabu(m.vertex, m.target, iter);
            bool aspires = is_tabu && s.score() + m.score_delta < best.score;
            if (is_tabu && !aspires) continue;
            if (!chosen || m.score_delta < best_delta) {
                chosen = &m;
                best_delta = m.score_delta;
                chosen_tabu = is_tabu;
                chosen_asp = aspires;
                ties = 1;
            } else if (m.score_delta == best_delta && rng.below(++ties) == 0) {
                chosen = &m;
                chosen_tabu = is_tabu;
                chosen_asp = aspires;
            }
        }
        if (!chosen) {  // everything tabu: take the overall best move
            for (const auto& m : moves)
                if (!chosen || m.score_delta < best_delta) {
                    chosen = &m;
                    best_delta = m.score_delta;
                }
            chosen_tabu = true;
            chosen_asp = false;
        }

        int from = s.color_of(chosen->vertex);
        s.move(chosen->vertex, chosen->target);
        tabu.forbid(chosen->vertex, from, iter + detail::tenure(p, moves.size(), rng));
        best.consider(s);
        if (hooks.trace)
            hooks.trace->steps.push_back({chosen->vertex, from, chosen->target, iter, chosen_tabu,
                                    chosen_asp, s.score(), s.conflict_count(), s.uncolored_count()});
    }
    return LsSolution(s.graph(), best.best.color_of);
}

// Tabu search oscillating between legal and conflicting solutions, minimizing
// score + phi * conflicts. phi doubles after sustained infeasibility and
// decays after sustained feasibility, steering the search back and forth
// across the legality boundary.
inline LsSolution afisa_like(LsSolution s, LsBudget budget, const LsParams& p, Rng& rng,
                             const LsHooks& hooks = {}) {
    detail::BestLegal best;
    best.on_best = &hooks.on_best;
    best.consider(s);
    detail::TabuList tabu(s.graph().n());
    long long iter = 0;
    long long phi = p.afisa_phi_init;
    int illegal_streak = 0, legal_streak = 0;
    std::vector<OneMove> moves;
    while (!budget.expired() && !budget.reached(best.score)) {
        ++iter;
        moves.clear();
        for_each_one_move(s, false, [&](const OneMove& m) { moves.push_back(m); });
        if (moves.empty()) break;

        const OneMove* chosen = nullptr;
        bool chosen_tabu = false, chosen_asp = false;
        long long best_delta = 0;
        int ties = 0;
        for (const auto& m : moves) {
            long long delta = m.score_delta + phi * m.conflict_delta;
            bool is_tabu = tabu.is_tabu(m.vertex, m.target, iter);
            bool aspires = is_tabu && s.conflict_count() + m.conflict_delta == 0 &&
                           s.score() + m.score_delta < best.score;
            if (is_tabu && !aspires) continue;
            if (!chosen || delta < best_delta) {
                chosen = &m;
                best_delta = delta;
                chosen_tabu = is_tabu;
                chosen_asp = aspires;
                ties = 1;
            } else if (delta == best_delta && rng.below(++ties) == 0) {
                chosen = &m;
                chosen_tabu = is_tabu;
                chosen_asp = aspires;
            }
        }
        if (!chosen) {
            for (const auto& m : moves) {
                long long delta = m.score_delta + phi * m.conflict_delta;
                if (!chosen || delta < best_delta) {
                    chosen = &m;
                    best_delta = delta;
                }
            }
            chosen_tabu = true;
            chosen_asp = false;
        }

        int from = s.color_of(chosen->vertex);
        s.move(chosen->vertex, chosen->target);
        tabu.forbid(chosen->vertex, from, iter + detail::tenure(p, moves.size(), rng));
        best.consider(s);
        if (hooks.trace)
            hooks.trace->steps.push_back({chosen->vertex, from, chosen->target, iter, chosen_tabu,
                                    chosen_asp, s.score(), s.conflict_count(), s.uncolored_count()});

        if (p.afisa_adapt) {
            if (s.conflict_count() > 0) {
                legal_streak = 0;
                if (++illegal_streak >= p.afisa_streak) {
                    phi = std::min(p.afisa_phi_max, phi * 2);
                    illegal_streak = 0;
                }
            } else {
                illegal_streak = 0;
                if (++legal_streak >= p.afisa_streak) {
                    phi = std::max(1LL, phi - 1);
                    legal_streak = 0;
                }
            }
        }
    }
    return LsSolution(s.graph(), best.best.color_of);
}

// Dynamic penalties on conflicting edges, keyed by endpoint pair.
class EdgePenalties {
public:
    EdgePenalties(const WeightedGraph& g, long long base) : n_(g.n()), base_(base) {}

    long long of(int u, int v) const {
        auto it = extra_.find(key(u, v));
        return base_ + (it == extra_.end() ? 0 : it->second);
    }

    void bump(int u, int v) { ++extra_[key(u, v)]; }

private:
    long long key(int u, int v) const {
        if (u > v) std::swap(u, v);
        return static_cast<long long>(u) * n_ + v;
    }

    int n_;
    long long base_;
    std::unordered_map<long long, long long> extra_;
};

// Every still-monochromatic edge gains one penalty unit, prioritizing its
// resolution in later passes.
inline void bump_conflict_penalties(const LsSolution& s, EdgePenalties& pen) {
    for (auto [u, v] : s.conflict_edges()) pen.bump(u, v);
}

namespace detail {

inline long long penalty_delta(const LsSolution& s, const EdgePenalties& pen, int v, int c_to) {
    long long d = 0;
    int c_from = s.color_of(v);
    for (int u : s.graph().neighbors(v)) {
        int cu = s.color_of(u);
        if (cu == c_from) d -= pen.of(v, u);
        if (cu == c_to) d += pen.of(v, u);
    }
    return d;
}

}  // namespace detail

// Perturbation-driven search in the penalty-weighted space: each round moves
// every group's heaviest vertex elsewhere (conflicts allowed), then repairs
// conflicts with one-moves of conflicting vertices under configuration
// checking; stuck repairs raise the penalties of the unresolved edges.
inline LsSolution redls_like(LsSolution s, LsBudget budget, const LsParams& p, Rng& rng,
                             const LsHooks& hooks = {}) {
    const WeightedGraph& g = s.graph();
    detail::BestLegal best;
    best.on_best = &hooks.on_best;
    best.consider(s);
    EdgePenalties pen(g, p.redls_penalty_base);
    std::vector<char> conf_change(g.n(), 1);
    long long iter = 0;

    auto apply_move = [&](int v, int c) {
        int from = s.color_of(v);
        s.move(v, c);
        conf_change[v] = 0;
        for (int u : g.neighbors(v)) conf_change[u] = 1;
        best.consider(s);
        if (hooks.trace)
            hooks.trace->steps.push_back(
                {v, from, c, ++iter, false, false, s.score(), s.conflict_count(), s.uncolored_count()});
    };

    while (!budget.expired() && !budget.reached(best.score)) {
        if (s.legal()) {
            // perturb: relocate each nonempty group's heaviest vertex
            std::vector<int> movers;
            for (int c = 0; c < s.num_groups(); ++c)
                if (s.group_size(c) > 0) movers.push_back(s.heaviest_in_group(c));
            for (int v : movers) {
                if (budget.expired()) break;
                int from = s.color_of(v);
                int target = -1;
                long long best_delta = 0;
                int ties = 0;
                int empty = s.first_empty_group();
                for (int c = 0; c < s.num_groups(); ++c) {
                    if (c == from || (s.group_size(c) == 0 && c != empty)) continue;
                    long long delta = s.delta_score(v, c) + detail::penalty_delta(s, pen, v, c);
                    if (target < 0 || delta < best_delta) {
                        target = c;
                        best_delta = delta;
                        ties = 1;
                    } else if (delta == best_delta && rng.below(++ties) == 0) {
                        target = c;
                    }
                }
                if (target >= 0) apply_move(v, target);
            }
        } else {
            // repair: best penalty-improving move of a conflicting vertex
            int bv = -1, bc = -1;
            long long best_delta = 0;
            int ties = 0;
            bool any_candidate = false;
            for (int pass = 0; pass < 2 && !any_candidate; ++pass) {
                // second pass ignores configuration checking to avoid deadlock
                for (int v = 0; v < g.n(); ++v) {
                    if (s.conflicts_of(v) == 0) continue;
                    if (pass == 0 && !conf_change[v]) continue;
                    int from = s.color_of(v);
                    int empty = s.first_empty_group();
                    for (int c = 0; c < s.num_groups(); ++c) {
                        if (c == from || (s.group_size(c) == 0 && c != empty)) continue;
                        long long delta = s.delta_score(v, c) + detail::penalty_delta(s, pen, v, c);
                        if (!any_candidate || delta < best_delta) {
                            any_candidate = true;
                            bv = v;
                            bc = c;
                            best_delta = delta;
                            ties = 1;
                        } else if (delta == best_delta && rng.below(++ties) == 0) {
                            bv = v;
                            bc = c;
                        }
                    }
                }
            }
            if (!any_candidate) break;
            if (best_delta >= 0) bump_conflict_penalties(s, pen);
            apply_move(bv, bc);
        }
    }
    return LsSolution(g, best.best.color_of);
}

// Places u into group c after relocating u's neighbors inside c to their best
// conflict-free group, or uncoloring them when none exists. Equivalent to a
// plain move when c holds no neighbor of u.
inline void grenade(LsSolution& s, int u, int c, Rng& rng, std::vector<int>* uncolored_out = nullptr) {
    std::vector<int> inside;
    for (int x : s.graph().neighbors(u))
        if (s.color_of(x) == c) inside.push_back(x);
    for (int x : inside) {
        int target = -1;
        Weight best_delta = 0;
        int ties = 0;
        int empty = s.first_empty_group();
        for (int t = 0; t < s.num_groups(); ++t) {
            if (t == c || (s.group_size(t) == 0 && t != empty)) continue;
            if (!s.legal_target(x, t)) continue;
            Weight delta = s.delta_score(x, t);
            if (target < 0 || delta < best_delta) {
                target = t;
                best_delta = delta;
                ties = 1;
            } else if (delta == best_delta && rng.below(++ties) == 0) {
                target = t;
            }
        }
        if (target >= 0) {
            s.move(x, target);
        } else {
            s.uncolor(x);
            if (uncolored_out) uncolored_out->push_back(x);
        }
    }
    if (s.color_of(u) >= 0) s.move(u, c);
    else s.place(u, c);
}

// Iterated search in the legal-and-partial space: uncolor the heaviest vertex
// of 1..3 random groups, then rebuild with one-moves and the grenade operator
// until no vertex is left uncolored, rolling back when a repair stalls.
inline LsSolution ilsts_like(LsSolution s, LsBudget budget, const LsParams& p, Rng& rng,
                             const LsHooks& hooks = {}) {
    const WeightedGraph& g = s.graph();
    detail::BestLegal best;
    best.on_best = &hooks.on_best;
    best.consider(s);
    detail::TabuList tabu(g.n());
    long long iter = 0;

    while (!budget.expired() && !budget.reached(best.score)) {
        Coloring saved = s.to_coloring();

        // perturbation: drop the heaviest vertex of r nonempty groups, chosen
        // by roulette on the group maxima (heavy groups define the score)
        std::vector<int> nonempty;
        Weight max_sum = 0;
        for (int c = 0; c < s.num_groups(); ++c)
            if (s.group_size(c) > 0) {
                nonempty.push_back(c);
                max_sum += s.group_max(c);
            }
        if (nonempty.empty()) break;
        int r = 1 + static_cast<int>(rng.below(
                        std::min<std::size_t>(p.ilsts_max_groups, nonempty.size())));
        for (int j = 0; j < r; ++j) {
            std::size_t pick = rng.below(nonempty.size());
            int c = nonempty[pick];
            nonempty.erase(nonempty.begin() + static_cast<long>(pick));
            int v = s.heaviest_in_group(c);
            s.uncolor(v);
            tabu.forbid(v, c, iter + detail::tenure(p, g.n(), rng));
        }

        // repair: place uncolored vertices back, heaviest first
        long long cap = static_cast<long long>(p.ilsts_repair_cap_factor) * std::max(1, g.n());
        long long steps = 0;
        while (s.uncolored_count() > 0 && steps < cap && !budget.expired()) {
            ++steps;
            ++iter;
            int u = -1;
            for (int v = 0; v < g.n(); ++v)
                if (s.color_of(v) < 0 && (u == -1 || g.weight(v) > g.weight(u))) u = v;

            // best conflict-free placement, tabu-filtered
            int target = -1;
            Weight best_delta = 0;
            int ties = 0;
            int empty = s.first_empty_group();
            for (int c = 0; c < s.num_groups(); ++c) {
                if (s.group_size(c) == 0 && c != empty) continue;
                if (!s.legal_target(u, c)) continue;
                bool is_tabu = tabu.is_tabu(u, c, iter);
                Weight delta = s.delta_score(u, c);
                bool aspires = is_tabu && s.score() + delta < best.score;
                if (is_tabu && !aspires) continue;
                if (target < 0 || delta < best_delta) {
                    target = c;
                    best_delta = delta;
                    ties = 1;
                } else if (delta == best_delta && rng.below(++ties) == 0) {
                    target = c;
                }
            }

            // grenade candidate: evict u's neighbors from a conflicting group,
            // costed by the actual cheapest relocation of each evictee
            int gc = -1;
            Weight gcost = 0;
            int gties = 0;
            for (int c = 0; c < s.num_groups(); ++c) {
                if (s.group_size(c) == 0 || !s.neighbors_in(u, c)) continue;
                if (tabu.is_tabu(u, c, iter)) continue;
                Weight cost = s.group_max(c) < g.weight(u) ? g.weight(u) - s.group_max(c) : 0;
                bool feasible = true;
                for (int x : g.neighbors(u)) {
                    if (s.color_of(x) != c) continue;
                    Weight best_move = std::numeric_limits<Weight>::max();
                    int empty2 = s.first_empty_group();
                    for (int t = 0; t < s.num_groups(); ++t) {
                        if (t == c || (s.group_size(t) == 0 && t != empty2)) continue;
                        if (!s.legal_target(x, t)) continue;
                        best_move = std::min(best_move, s.delta_score(x, t));
                    }
                    if (best_move == std::numeric_limits<Weight>::max()) {
                        feasible = false;  // x would land in U; avoid cascades
                        break;
                    }
                    cost += best_move;
                }
                if (!feasible) continue;
                if (gc < 0 || cost < gcost) {
                    gc = c;
                    gcost = cost;
                    gties = 1;
                } else if (cost == gcost && rng.below(++gties) == 0) {
                    gc = c;
                }
            }

            if (gc >= 0 && (target < 0 || gcost < best_delta)) {
                std::vector<int> evicted;
                grenade(s, u, gc, rng, &evicted);
                for (int x : evicted)
                    tabu.forbid(x, gc, iter + detail::tenure(p, g.n(), rng));
            } else if (target >= 0) {
                s.place(u, target);
            } else {
                s.place(u, s.first_empty_group());
            }
            if (hooks.trace)
                hooks.trace->steps.push_back({u, -1, s.color_of(u), iter, false, false, s.score(),
                                        s.conflict_count(), s.uncolored_count()});
            best.consider(s);
        }

        if (s.uncolored_count() == 0) {
            // descend with strictly improving one-moves until a local optimum
            bool moved = true;
            while (moved && !budget.expired()) {
                ++iter;
                moved = false;
                int bv = -1, bc = -1;
                Weight bd = 0;
                int ties = 0;
                for_each_one_move(s, true, [&](const OneMove& m) {
                    if (m.score_delta < bd) {
                        bv = m.vertex;
                        bc = m.target;
                        bd = m.score_delta;
                        ties = 1;
                    } else if (m.score_delta == bd && bd < 0 && rng.below(++ties) == 0) {
                        bv = m.vertex;
                        bc = m.target;
                    }
                });
                if (bv >= 0 && bd < 0) {
                    int from = s.color_of(bv);
                    s.move(bv, bc);
                    tabu.forbid(bv, from, iter + detail::tenure(p, g.n(), rng));
                    if (hooks.trace)
                        hooks.trace->steps.push_back({bv, from, bc, iter, false, false, s.score(),
                                                      s.conflict_count(), s.uncolored_count()});
                    best.consider(s);
                    moved = true;
                }
            }
        }

        if (s.uncolored_count() > 0 || s.score() > saved.score) {
            // deadlock or worse round: roll back to the pre-perturbation solution
            s = LsSolution(g, saved.score > best.score ? best.best.color_of : saved.color_of);
        }
        best.consider(s);
    }
    return LsSolution(g, best.best.color_of);
}

enum class LsKind { TabuWeight, Afisa, Redls, Ilsts };

inline const char* ls_kind_name(LsKind k) {
    switch (k) {
        case LsKind::TabuWeight: return "tw";
        case LsKind::Afisa: return "afisa";
        case LsKind::Redls: return "redls";
        case LsKind::Ilsts: return "ilsts";
    }
    return "?";
}

inline LsSolution improve(LsKind kind, LsSolution s, LsBudget budget, const LsParams& p, Rng& rng,
                          const LsHooks& hooks = {}) {
    switch (kind) {
        case LsKind::TabuWeight: return tabu_weight(std::move(s), budget, p, rng, hooks);
        case LsKind::Afisa: return afisa_like(std::move(s), budget, p, rng, hooks);
        case LsKind::Redls: return redls_like(std::move(s), budget, p, rng, hooks);
        case LsKind::Ilsts: return ilsts_like(std::move(s), budget, p, rng, hooks);
    }
    throw std::logic_error("unknown local search kind");
}

}  // namespace wvcp
