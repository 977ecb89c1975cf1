#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"
#include "wvcp/mcts.hpp"
#include "wvcp/oracle.hpp"
#include "wvcp/reduction.hpp"

using namespace wvcp;
using namespace wvcp::mcts;

namespace {

WeightedGraph edgeless3() { return WeightedGraph("edgeless3", 3, {}, {3, 2, 1}); }

WeightedGraph path7() {
    // chain v0-v1-...-v6 with strictly descending weights
    std::vector<std::pair<int, int>> edges;
    for (int v = 0; v + 1 < 7; ++v) edges.emplace_back(v, v + 1);
    return WeightedGraph("path7", 7, std::move(edges), {9, 8, 7, 6, 5, 4, 3});
}

SimulationStrategy greedy_sim() {
    SimulationStrategy s;
    s.kind = SimulationStrategy::Kind::Greedy;
    return s;
}

}  // namespace

TEST_CASE("uct_value matches the direct evaluation") {
    // rank 2 of sum 3, parent 2 visits, child 1 visit, c=1
    CHECK(uct_value(2, 3, 2, 1, 1.0) == doctest::Approx(1.8440766891821413).epsilon(1e-12));
    // rank 1: the better-ranked sibling wins
    CHECK(uct_value(1, 3, 2, 1, 1.0) == doctest::Approx(1.5107433558488079).epsilon(1e-12));
    CHECK(uct_value(2, 3, 2, 1, 1.0) > uct_value(1, 3, 2, 1, 1.0));
    // c=0 reduces to the normalized rank
    CHECK(uct_value(2, 3, 5, 2, 0.0) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(uct_value(1, 1, 1, 0, 1.0), std::invalid_argument);
}

TEST_CASE("rank_children sorts from bad to good") {
    CHECK(rank_children({10, 20}) == std::vector<int>{2, 1});
    CHECK(rank_children({7}) == std::vector<int>{1});
    // ties: lower child index takes the higher rank
    CHECK(rank_children({5, 5, 9}) == std::vector<int>{3, 2, 1});
}

TEST_CASE("backpropagate updates the running mean and visit counts") {
    TreeNode leaf, mid, root;
    leaf.parent = &mid;
    mid.parent = &root;

    mid.avg_score = 10;
    mid.nb_visits = 2;
    mid.score_sum = 20;
    backpropagate(&mid, 16);
    CHECK(mid.avg_score == doctest::Approx(12.0));
    CHECK(mid.nb_visits == 3);

    TreeNode fresh;
    backpropagate(&fresh, 24);
    CHECK(fresh.avg_score == doctest::Approx(24.0));
    CHECK(fresh.nb_visits == 1);

    TreeNode chain;
    for (Weight f : {10, 20, 30}) backpropagate(&chain, f);
    CHECK(chain.avg_score == doctest::Approx(20.0));
    CHECK(chain.nb_visits == 3);
    CHECK(chain.score_sum == 60);
}

TEST_CASE("first iteration expands the lowest-color child of the second vertex") {
    auto g = edgeless3();
    Engine e(g, greedy_sim(), {1.0}, true, 1);
    REQUIRE(e.root()->slots.size() == 2);
    e.step();
    CHECK(e.nodes_created() == 1);
    const auto& slot0 = e.root()->slots[0];
    // the opened child is the color-0 move of order[1] (may already be
    // reclaimed by pruning, but it must not be unopened)
    CHECK(slot0.state != TreeNode::SlotState::Unopened);
}

TEST_CASE("structural toy: forced chain then branching, expansion before selection") {
    auto g = path7();
    Engine e(g, greedy_sim(), {1.0}, false, 7);
    // root colors v0; v1 is adjacent, so the root has exactly one slot
    REQUIRE(e.root()->slots.size() == 1);
    e.step();
    REQUIRE(e.root()->slots[0].state == TreeNode::SlotState::Open);
    const TreeNode* b = e.root()->slots[0].node.get();
    // v2 is adjacent to v1 only: it can join group 0 or open group 2
    REQUIRE(b->slots.size() == 2);
    CHECK(b->slots[0].color == 0);
    CHECK(b->slots[1].color == 2);
    CHECK(e.nodes_created() == 1);

    e.step();  // selection reaches b, expansion opens its color-0 slot
    CHECK(e.nodes_created() == 2);
    CHECK(b->slots[0].state == TreeNode::SlotState::Open);
    CHECK(b->slots[1].state == TreeNode::SlotState::Unopened);

    e.step();  // b still has an unopened slot: expansion precedes deeper selection
    CHECK(e.nodes_created() == 3);
    CHECK(b->slots[1].state == TreeNode::SlotState::Open);

    // partial scores are monotone along every branch
    CHECK(b->partial_score >= e.root()->partial_score);
    CHECK(b->slots[0].node->partial_score >= b->partial_score);
}

TEST_CASE("root statistics: running average equals the exact mean") {
    auto g = path7();
    Engine e(g, greedy_sim(), {1.0}, false, 3);
    for (int i = 0; i < 50 && !e.exhausted(); ++i) e.step();
    const TreeNode* r = e.root();
    REQUIRE(r->nb_visits > 0);
    double exact = static_cast<double>(r->score_sum) / static_cast<double>(r->nb_visits);
    CHECK(r->avg_score == doctest::Approx(exact).epsilon(1e-9));
    CHECK(r->nb_visits == e.iterations());
}

TEST_CASE("single-vertex instance: solved and proven at iteration 1") {
    WeightedGraph g("one", 1, {}, {7});
    auto rr = run(g, greedy_sim(), {1.0}, true, {}, 9);
    CHECK(rr.best_score == 7);
    CHECK(rr.proven_optimal);
    CHECK(rr.iterations == 1);
    CHECK(rr.reason == StopReason::Exhausted);
}

TEST_CASE("empty instance") {
    WeightedGraph g("zero", 0, {}, {});
    auto rr = run(g, greedy_sim(), {1.0}, true, {}, 9);
    CHECK(rr.best_score == 0);
    CHECK(rr.proven_optimal);
}

TEST_CASE("edgeless graph: first improvement prunes the whole tree") {
    // the optimum equals the root's own partial score, so cleaning after the
    // first simulation deletes the root and certifies optimality
    auto g = edgeless3();
    auto rr = run(g, greedy_sim(), {1.0}, true, {}, 11);
    CHECK(rr.best_score == 3);
    CHECK(rr.proven_optimal);
    CHECK(rr.iterations == 1);
}

TEST_CASE("full enumeration without score pruning has the known tree size") {
    // edgeless n=3: root has 2 slots; under (v1,g0) two slots, under (v1,g1)
    // three; 7 non-root nodes in the complete tree
    auto g = edgeless3();
    Engine e(g, greedy_sim(), {1.0}, false, 1);
    while (e.step()) {
    }
    CHECK(e.exhausted());
    CHECK(e.nodes_created() == 7);
    CHECK(e.best_score() == 3);
}

TEST_CASE("exhaustive runs certify the brute-force optimum") {
    auto corpus = testsup::oracle_corpus(40, 0xABCD);
    SimulationStrategy sims[3];
    sims[0].kind = SimulationStrategy::Kind::Random;
    sims[1].kind = SimulationStrategy::Kind::GreedyRandom;
    sims[2].kind = SimulationStrategy::Kind::Greedy;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& g = corpus[i];
        auto rr = run(g, sims[i % 3], {1.0}, true, {}, 1000 + i);
        REQUIRE(rr.proven_optimal);
        REQUIRE(rr.reason == StopReason::Exhausted);
        REQUIRE(rr.best_score == harness::brute_force_optimum(g));
        REQUIRE(testsup::coloring_is_legal(g, rr.best));
        REQUIRE(rr.best.score == rr.best_score);
    }
}

TEST_CASE("degenerate weight profiles: engine, oracle and raw enumeration agree") {
    // all-equal weights (plain graph coloring), extreme spreads, heavy ties
    for (int trial = 0; trial < 60; ++trial) {
        Rng gen(42000 + trial);
        int n = 2 + static_cast<int>(gen.below(8));
        double p = (trial % 4) * 0.3;
        std::vector<std::pair<int, int>> edges;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (gen.uniform01() < p) edges.emplace_back(u, v);
        std::vector<Weight> w(n);
        switch (trial % 3) {
            case 0: for (auto& x : w) x = 1; break;
            case 1: for (auto& x : w) x = gen.below(2) ? 1 : 1000000; break;
            default: for (auto& x : w) x = gen.uniform_int(1, 3); break;
        }
        WeightedGraph g("edge" + std::to_string(trial), n, std::move(edges), std::move(w));
        SimulationStrategy sim;
        sim.kind = static_cast<SimulationStrategy::Kind>(trial % 3);
        auto rr = run(g, sim, {1.0}, true, {}, trial);
        Weight opt = harness::brute_force_optimum(g);
        REQUIRE(rr.proven_optimal);
        REQUIRE(rr.best_score == opt);
        REQUIRE(opt == testsup::raw_partition_optimum(g));
        auto [red, rep] = reduce(g);
        REQUIRE(harness::brute_force_optimum(red) == opt);
    }
}

TEST_CASE("pruning rules: identical optimum, fewer expansions") {
    auto corpus = testsup::oracle_corpus(30, 0xBEEF);
    int strictly_fewer = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& g = corpus[i];
        auto with = run(g, greedy_sim(), {1.0}, true, {}, 5);
        auto without = run(g, greedy_sim(), {1.0}, false, {}, 5);
        REQUIRE(with.proven_optimal);
        REQUIRE(without.proven_optimal);
        REQUIRE(with.best_score == without.best_score);
        REQUIRE(with.nodes_created <= without.nodes_created);
        if (with.nodes_created < without.nodes_created) ++strictly_fewer;
    }
    CHECK(strictly_fewer >= 28);
}

TEST_CASE("same seed reproduces the run bitwise") {
    Rng rng(404);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = testsup::random_graph(rng, 5 + static_cast<int>(rng.below(5)), 0.5, 10, "det");
        SimulationStrategy sim;
        sim.kind = SimulationStrategy::Kind::GreedyRandom;
        StopCondition stop;
        stop.max_iterations = 200;
        auto a = run(g, sim, {1.0}, true, stop, 42);
        auto b = run(g, sim, {1.0}, true, stop, 42);
        REQUIRE(a.best_score == b.best_score);
        REQUIRE(a.iterations == b.iterations);
        REQUIRE(a.series.size() == b.series.size());
        for (std::size_t i = 0; i < a.series.size(); ++i) {
            REQUIRE(a.series[i].iteration == b.series[i].iteration);
            REQUIRE(a.series[i].best_score == b.series[i].best_score);
        }
        REQUIRE(a.best.color_of == b.best.color_of);
    }
}

namespace {

// whole-tree structural integrity: slot/score/stat consistency at every node
void check_tree(const TreeNode* node, Weight best_score, bool score_pruning) {
    int live = 0, unopened = 0;
    for (const auto& slot : node->slots) {
        if (slot.state != TreeNode::SlotState::Pruned) ++live;
        if (slot.state == TreeNode::SlotState::Unopened) ++unopened;
        if (slot.state == TreeNode::SlotState::Open) {
            REQUIRE(slot.node != nullptr);
            REQUIRE(slot.node->parent == node);
            REQUIRE(slot.node->partial_score == slot.child_score);
            REQUIRE(slot.node->partial_score >= node->partial_score);  // monotone
            REQUIRE(slot.node->nb_visits >= 1);
            double exact = static_cast<double>(slot.node->score_sum) /
                           static_cast<double>(slot.node->nb_visits);
            REQUIRE(slot.node->avg_score ==
                    doctest::Approx(exact).epsilon(1e-9));
            if (score_pruning) REQUIRE(slot.node->partial_score < best_score);
            check_tree(slot.node.get(), best_score, score_pruning);
        }
    }
    REQUIRE(node->live == live);
    REQUIRE(node->unopened == unopened);
    REQUIRE(node->live >= 1);  // fully pruned nodes never persist
}

}  // namespace

TEST_CASE("the live tree keeps its structural invariants at every step") {
    Rng rng(8181);
    for (int trial = 0; trial < 8; ++trial) {
        auto g = testsup::random_graph(rng, 6 + static_cast<int>(rng.below(4)), 0.4, 10, "walk");
        for (bool prune : {true, false}) {
            SimulationStrategy sim;
            sim.kind = trial % 2 == 0 ? SimulationStrategy::Kind::Greedy
                                      : SimulationStrategy::Kind::GreedyRandom;
            Engine e(g, sim, {1.0}, prune, trial);
            for (int i = 0; i < 60 && !e.exhausted(); ++i) {
                e.step();
                if (!e.exhausted()) check_tree(e.root(), e.best_score(), prune);
            }
        }
    }
}

TEST_CASE("target score stops the run without claiming optimality") {
    // dense enough that one iteration cannot exhaust the tree
    Rng rng(62);
    auto g = testsup::random_graph(rng, 9, 0.5, 10, "target");
    StopCondition stop;
    stop.target = 1000;  // any first solution reaches this
    auto rr = run(g, greedy_sim(), {1.0}, true, stop, 2);
    CHECK(rr.reason == StopReason::Target);
    CHECK(!rr.proven_optimal);
    CHECK(rr.iterations == 1);
    CHECK(rr.best_score <= 1000);
}

TEST_CASE("series is non-increasing and ends with the final state") {
    Rng rng(777);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = testsup::random_graph(rng, 4 + static_cast<int>(rng.below(6)), 0.5, 10, "ser");
        SimulationStrategy sim;
        sim.kind = SimulationStrategy::Kind::Random;
        auto rr = run(g, sim, {1.0}, true, {}, trial);
        REQUIRE(!rr.series.empty());
        for (std::size_t i = 1; i < rr.series.size(); ++i)
            REQUIRE(rr.series[i].best_score <= rr.series[i - 1].best_score);
        CHECK(rr.series.back().best_score == rr.best_score);
        CHECK(rr.series.back().iteration == rr.iterations);
    }
}
