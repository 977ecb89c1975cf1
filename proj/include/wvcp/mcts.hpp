#pragma once

#include <cassert>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wvcp/coloring.hpp"
#include "wvcp/graph.hpp"
#include "wvcp/rng.hpp"
#include "wvcp/simulation.hpp"

namespace wvcp::mcts {

struct SelectionParams {
    double c = 1.0;  // exploration coefficient
};

// Rank-normalized exploitation term plus the visit-count exploration term.
// Selection takes the child with the maximum value.
inline double uct_value(int child_rank, int rank_sum, long long parent_visits,
                        long long child_visits, double c) {
    if (child_visits < 1)
        throw std::invalid_argument("uct_value on an unvisited child; expansion handles those");
    if (parent_visits < 1) throw std::invalid_argument("uct_value with unvisited parent");
    return static_cast<double>(child_rank) / rank_sum +
           c * std::sqrt(2.0 * std::log(static_cast<double>(parent_visits)) /
                         static_cast<double>(child_visits));
}

// Ranks 1..l from worst (highest average, rank 1) to best (lowest average,
// rank l). Ties resolve by child index: the lower index gets the higher rank.
inline void rank_children(const std::vector<double>& avg_scores, std::vector<int>& ranks) {
    int l = static_cast<int>(avg_scores.size());
    std::vector<int> idx(l);
    for (int i = 0; i < l; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (avg_scores[a] != avg_scores[b]) return avg_scores[a] > avg_scores[b];
        return a > b;
    });
    ranks.assign(l, 0);
    for (int p = 0; p < l; ++p) ranks[idx[p]] = p + 1;
}

inline std::vector<int> rank_children(const std::vector<double>& avg_scores) {
    std::vector<int> ranks;
    rank_children(avg_scores, ranks);
    return ranks;
}

struct TreeNode {
    enum class SlotState : std::uint8_t { Unopened, Open, Pruned };

    struct Slot {
        int color;            // target color of the child move
        Weight child_score;   // partial score after the move
        SlotState state = SlotState::Unopened;
        std::unique_ptr<TreeNode> node;
    };

    TreeNode* parent = nullptr;
    int slot_in_parent = -1;
    Move move{};
    Weight partial_score = 0;
    long long nb_visits = 0;
    long long score_sum = 0;  // exact integer sum alongside the running mean
    double avg_score = 0.0;
    std::vector<Slot> slots;
    int live = 0;      // slots not pruned
    int unopened = 0;  // slots still unopened (and not pruned)

    bool terminal() const { return slots.empty(); }
};

// Running-mean update applied to every node from `node` up to and including
// the root.
inline void backpropagate(TreeNode* node, Weight final_score) {
    for (TreeNode* p = node; p; p = p->parent) {
        p->avg_score = (p->avg_score * static_cast<double>(p->nb_visits) +
                        static_cast<double>(final_score)) /
                       static_cast<double>(p->nb_visits + 1);
        p->score_sum += final_score;
        ++p->nb_visits;
    }
}

struct StopCondition {
    double time_limit_s = std::numeric_limits<double>::infinity();
    std::optional<Weight> target;   // stop as soon as best_score <= target
    long long max_iterations = -1;  // < 0 means unlimited
};

enum class StopReason { Exhausted, Target, TimeLimit, IterationCap };

struct SeriesPoint {
    long long iteration;
    long long elapsed_ms;
    Weight best_score;
};

struct RunResult {
    Coloring best;
    Weight best_score = std::numeric_limits<Weight>::max();
    bool proven_optimal = false;
    long long iterations = 0;
    long long nodes_created = 0;
    long long slots_pruned = 0;
    std::vector<SeriesPoint> series;
    long long time_to_best_ms = 0;
    long long total_time_ms = 0;
    StopReason reason = StopReason::TimeLimit;
};

// The tree search engine: selection by maximal UCT value through fully
// expanded nodes, expansion of the lowest-color unopened slot, delegated
// simulation, update, and the pruning rules. Score-based pruning removes
// every node and potential child whose partial score already meets the
// incumbent; structural pruning collapses completely explored nodes, so a
// deleted root certifies optimality of the incumbent.
class Engine {
public:
    Engine(const WeightedGraph& g, SimulationStrategy sim, SelectionParams sel, bool score_pruning,
           std::uint64_t seed)
        : g_(&g),
          sim_(std::move(sim)),
          sel_(sel),
          score_pruning_(score_pruning),
          rng_(seed),
          sol_(g) {
        if (g.n() == 0) {
            best_ = Coloring{{}, 0};
            best_score_ = 0;
            exhausted_ = true;
            return;
        }
        root_ = std::make_unique<TreeNode>();
        root_->move = Move{g.order()[0], 0};
        sol_.apply(root_->move);
        root_->partial_score = sol_.score();
        build_slots(*root_);
    }

    const WeightedGraph& graph() const { return *g_; }
    const TreeNode* root() const { return root_.get(); }
    bool exhausted() const { return exhausted_; }
    Weight best_score() const { return best_score_; }
    const Coloring& best() const { return best_; }
    long long iterations() const { return iterations_; }
    long long nodes_created() const { return nodes_created_; }
    long long slots_pruned() const { return slots_pruned_; }

    // One full iteration: select, expand, simulate, update, prune. Returns
    // false once the tree is exhausted.
    bool step() {
        if (exhausted_) return false;
        sol_.rewind(0);
        sol_.apply(root_->move);
        TreeNode* node = descend();
        if (exhausted_) return false;

        Coloring outcome;
        if (sol_.complete()) {
            outcome = sol_.to_coloring();
        } else {
            outcome = sim_.run(sol_, rng_, ls_target_);
        }
        Weight f = outcome.score;

        bool improved = f < best_score_;
        if (improved) {
            best_ = outcome;
            best_score_ = f;
            on_improvement_(iterations_ + 1, f);
        }

        backpropagate(node, f);
        if (node->terminal()) prune_node(node);  // visited terminals never persist
        if (improved && score_pruning_ && !exhausted_) clean_tree();
        ++iterations_;
        return !exhausted_;
    }

    RunResult run(const StopCondition& stop) {
        auto start = std::chrono::steady_clock::now();
        auto elapsed_ms = [&] {
            return std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                .count();
        };

        RunResult rr;
        on_improvement_ = [&](long long iter, Weight score) {
            rr.series.push_back({iter, elapsed_ms(), score});
            rr.time_to_best_ms = elapsed_ms();
        };
        if (stop.target) ls_target_ = *stop.target;

        StopReason reason = StopReason::Exhausted;
        while (!exhausted_) {
            if (iterations_ > 0) {
                if (stop.target && best_score_ <= *stop.target) {
                    reason = StopReason::Target;
                    break;
                }
                if (stop.max_iterations >= 0 && iterations_ >= stop.max_iterations) {
                    reason = StopReason::IterationCap;
                    break;
                }
                if (static_cast<double>(elapsed_ms()) / 1000.0 >= stop.time_limit_s) {
                    reason = StopReason::TimeLimit;
                    break;
                }
            }
            if (!step()) break;
        }
        if (exhausted_) reason = StopReason::Exhausted;

        rr.best = best_;
        rr.best_score = best_score_;
        rr.proven_optimal = exhausted_;
        rr.iterations = iterations_;
        rr.nodes_created = nodes_created_;
        rr.slots_pruned = slots_pruned_;
        rr.total_time_ms = elapsed_ms();
        rr.reason = reason;
        rr.series.push_back({iterations_, rr.total_time_ms, best_score_});
        on_improvement_ = [](long long, Weight) {};
        return rr;
    }

    // Rule 2: one pass over the live tree deleting children and potential
    // children whose partial score is at or above the incumbent; rule 3
    // collapses emptied nodes on the way back up.
    void clean_tree() {
        if (root_->partial_score >= best_score_ || clean(*root_)) exhausted_ = true;
    }

private:
    void build_slots(TreeNode& node) {
        if (sol_.complete()) return;
        auto moves = sol_.legal_moves();
        int u = sol_.next_vertex();
        node.slots.reserve(moves.size());
        for (const auto& m : moves) {
            TreeNode::Slot sl;
            sl.color = m.color;
            sl.child_score = sol_.score() + (m.color == sol_.k() ? g_->weight(u) : 0);
            node.slots.push_back(std::move(sl));
        }
        node.live = static_cast<int>(node.slots.size());
        node.unopened = node.live;
    }

    // Walks the tree applying moves to sol_; returns the node to simulate
    // from. Restarts from the root whenever pruning removes the current
    // branch (rule 1 and rule 3 interactions).
    TreeNode* descend() {
        for (;;) {
            sol_.rewind(0);
            sol_.apply(root_->move);
            TreeNode* node = root_.get();
            bool restart = false;
            for (;;) {
                if (node->terminal()) return node;
                if (node->unopened > 0) {
                    TreeNode* child = expand(*node);
                    if (child == nullptr) {  // rule 1 pruned the fresh child
                        restart = true;
                        break;
                    }
                    return child;
                }
                TreeNode* next = select_child(*node);
                if (next == nullptr) {  // every child pruned: completely explored
                    prune_node(node);
                    restart = true;
                    break;
                }
                sol_.apply(next->move);
                node = next;
            }
            if (exhausted_) return nullptr;
            if (restart) continue;
        }
    }

    TreeNode* expand(TreeNode& node) {
        int idx = 0;
        while (node.slots[idx].state != TreeNode::SlotState::Unopened) ++idx;
        auto& slot = node.slots[idx];
        Move m{sol_.next_vertex(), slot.color};
        sol_.apply(m);

        auto child = std::make_unique<TreeNode>();
        child->parent = &node;
        child->slot_in_parent = idx;
        child->move = m;
        child->partial_score = sol_.score();
        assert(child->partial_score == slot.child_score);
        ++nodes_created_;
        --node.unopened;

        if (score_pruning_ && child->partial_score >= best_score_) {
            slot.state = TreeNode::SlotState::Pruned;
            ++slots_pruned_;
            if (--node.live == 0) prune_node(&node);
            return nullptr;
        }
        build_slots(*child);
        slot.state = TreeNode::SlotState::Open;
        slot.node = std::move(child);
        return slot.node.get();
    }

    TreeNode* select_child(TreeNode& node) {
        live_idx_.clear();
        live_avgs_.clear();
        for (int i = 0; i < static_cast<int>(node.slots.size()); ++i) {
            if (node.slots[i].state == TreeNode::SlotState::Open) {
                live_idx_.push_back(i);
                live_avgs_.push_back(node.slots[i].node->avg_score);
            }
        }
        if (live_idx_.empty()) return nullptr;
        rank_children(live_avgs_, ranks_);
        int rank_sum = 0;
        for (int r : ranks_) rank_sum += r;
        TreeNode* chosen = nullptr;
        double best_val = 0.0;
        for (std::size_t j = 0; j < live_idx_.size(); ++j) {
            TreeNode* ch = node.slots[live_idx_[j]].node.get();
            double val = uct_value(ranks_[j], rank_sum, node.nb_visits, ch->nb_visits, sel_.c);
            if (chosen == nullptr || val > best_val) {
                chosen = ch;
                best_val = val;
            }
        }
        return chosen;
    }

    // Rule 3: tombstone this node in its parent; cascades upward when the
    // parent runs out of live slots. Deleting the root exhausts the search.
    void prune_node(TreeNode* node) {
        if (node == root_.get()) {
            exhausted_ = true;
            return;
        }
        TreeNode* parent = node->parent;
        auto& slot = parent->slots[node->slot_in_parent];
        slot.state = TreeNode::SlotState::Pruned;
        slot.node.reset();
        ++slots_pruned_;
        if (--parent->live == 0) prune_node(parent);
    }

    bool clean(TreeNode& node) {
        for (auto& slot : node.slots) {
            if (slot.state == TreeNode::SlotState::Pruned) continue;
            bool kill = slot.child_score >= best_score_;
            if (!kill && slot.state == TreeNode::SlotState::Open) kill = clean(*slot.node);
            if (kill) {
                if (slot.state == TreeNode::SlotState::Unopened) --node.unopened;
                slot.state = TreeNode::SlotState::Pruned;
                slot.node.reset();
                ++slots_pruned_;
                --node.live;
            }
        }
        return !node.slots.empty() && node.live == 0;
    }

    const WeightedGraph* g_;
    SimulationStrategy sim_;
    SelectionParams sel_;
    bool score_pruning_;
    Rng rng_;
    PartialSolution sol_;
    std::unique_ptr<TreeNode> root_;
    Coloring best_;
    Weight best_score_ = std::numeric_limits<Weight>::max();
    bool exhausted_ = false;
    long long iterations_ = 0;
    long long nodes_created_ = 0;
    long long slots_pruned_ = 0;
    Weight ls_target_ = std::numeric_limits<Weight>::min();
    std::function<void(long long, Weight)> on_improvement_ = [](long long, Weight) {};

    std::vector<int> live_idx_;
    std::vector<double> live_avgs_;
    std::vector<int> ranks_;
};

inline RunResult run(const WeightedGraph& g, const SimulationStrategy& sim,
                     const SelectionParams& sel, bool score_pruning, const StopCondition& stop,
                     std::uint64_t seed) {
    Engine engine(g, sim, sel, score_pruning, seed);
    return engine.run(stop);
}

}  // namespace wvcp::mcts
