#pragma once

#include <cassert>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wvcp/graph.hpp"

namespace wvcp {

// Assigns `vertex` (always the next vertex in canonical order) to group
// `color`; color == k opens a new group.
struct Move {
    int vertex = -1;
    int color = -1;
    bool operator==(const Move&) const = default;
};

struct IllegalMove : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A complete coloring as a plain value, detached from any solver state.
struct Coloring {
    std::vector<int> color_of;
    Weight score = 0;
};

// Partial legal solution over the canonical vertex order. Groups are
// independent sets; the uncolored set is exactly the order suffix past
// colored_count(). The score is maintained incrementally: because vertices
// are colored in weight-descending order, placing a vertex in an existing
// group never raises that group's max, so the score grows by w(u) exactly
// when a new group opens.
class PartialSolution {
public:
    explicit PartialSolution(const WeightedGraph& g)
        : g_(&g), color_of_(g.n(), -1), mark_(g.n() + 1, 0) {}

    const WeightedGraph& graph() const { return *g_; }
    int colored_count() const { return pos_; }
    bool complete() const { return pos_ == g_->n(); }
    int k() const { return static_cast<int>(groups_.size()); }
    Weight score() const { return score_; }
    int color_of(int v) const { return color_of_[v]; }
    const std::vector<std::vector<int>>& groups() const { return groups_; }
    Weight group_max_weight(int i) const { return g_->weight(groups_[i].front()); }

    int next_vertex() const {
        if (complete()) throw std::logic_error("next_vertex on a complete solution");
        return g_->order()[pos_];
    }

    // Eq.-style legal move set: every existing group with no neighbor of the
    // next vertex, plus one new-group move, ascending by color index.
    void legal_moves(std::vector<Move>& out) const {
        int u = next_vertex();
        out.clear();
        ++stamp_;
        for (int w : g_->neighbors(u)) {
            int c = color_of_[w];
            if (c >= 0) mark_[c] = stamp_;
        }
        for (int i = 0; i < k(); ++i)
            if (mark_[i] != stamp_) out.push_back({u, i});
        out.push_back({u, k()});
    }

    std::vector<Move> legal_moves() const {
        std::vector<Move> out;
        legal_moves(out);
        return out;
    }

    // Moves that do not increase the score: the legal set minus the new-group
    // move, unless that leaves nothing, in which case the forced new group.
    void greedy_moves(std::vector<Move>& out) const {
        legal_moves(out);
        if (out.size() > 1) out.pop_back();
    }

    std::vector<Move> greedy_moves() const {
        std::vector<Move> out;
        greedy_moves(out);
        return out;
    }

    void apply(const Move& m) {
        int u = next_vertex();
        if (m.vertex != u)
            throw IllegalMove("move colors vertex " + std::to_string(m.vertex) +
                              " but the next vertex in order is " + std::to_string(u));
        if (m.color < 0 || m.color > k())
            throw IllegalMove("color " + std::to_string(m.color) + " out of range, k=" +
                              std::to_string(k()));
        if (m.color < k()) {
            for (int w : g_->neighbors(u))
                if (color_of_[w] == m.color)
                    throw IllegalMove("vertex " + std::to_string(u) + " is adjacent to " +
                                      std::to_string(w) + " in group " + std::to_string(m.color));
            groups_[m.color].push_back(u);
        } else {
            groups_.emplace_back().push_back(u);
            score_ += g_->weight(u);
        }
        color_of_[u] = m.color;
        ++pos_;
    }

    // O(1) undo of the last construction move; the append-only group layout
    // doubles as the trail.
    void undo_last() {
        assert(pos_ > 0);
        int u = g_->order()[pos_ - 1];
        int c = color_of_[u];
        groups_[c].pop_back();
        if (groups_[c].empty()) {
            groups_.pop_back();
            score_ -= g_->weight(u);
        }
        color_of_[u] = -1;
        --pos_;
    }

    void rewind(int colored_count) {
        while (pos_ > colored_count) undo_last();
    }

    Weight recompute_score() const {
        Weight s = 0;
        for (const auto& grp : groups_) {
            Weight mx = 0;
            for (int v : grp) mx = std::max(mx, g_->weight(v));
            s += mx;
        }
        return s;
    }

    Coloring to_coloring() const {
        if (!complete()) throw std::logic_error("to_coloring on a partial solution");
        return Coloring{color_of_, score_};
    }

private:
    const WeightedGraph* g_;
    std::vector<std::vector<int>> groups_;
    std::vector<int> color_of_;
    Weight score_ = 0;
    int pos_ = 0;
    mutable std::vector<unsigned> mark_;
    mutable unsigned stamp_ = 0;
};

inline PartialSolution empty_solution(const WeightedGraph& g) { return PartialSolution(g); }

// Solution file format: one `vertex_id color_id` line per vertex, then a
// `score N` trailer.
inline std::string serialize_solution(const Coloring& sol) {
    std::ostringstream out;
    for (std::size_t v = 0; v < sol.color_of.size(); ++v)
        out << v << ' ' << sol.color_of[v] << '\n';
    out << "score " << sol.score << '\n';
    return out.str();
}

inline Coloring parse_solution(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::pair<int, int>> entries;
    Weight score = -1;
    bool has_score = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream iss(line);
        if (line.rfind("score", 0) == 0) {
            std::string kw;
            if (!(iss >> kw >> score))
                throw ParseError("malformed score trailer at line " + std::to_string(lineno));
            has_score = true;
            continue;
        }
        int v, c;
        if (!(iss >> v >> c))
            throw ParseError("malformed solution line " + std::to_string(lineno) + ": " + line);
        entries.emplace_back(v, c);
    }
    if (!has_score) throw ParseError("solution file has no score trailer");
    Coloring sol;
    sol.score = score;
    sol.color_of.assign(entries.size(), -1);
    for (auto [v, c] : entries) {
        if (v < 0 || v >= static_cast<int>(entries.size()))
            throw ParseError("vertex id out of range in solution: " + std::to_string(v));
        if (sol.color_of[v] != -1) throw ParseError("duplicate vertex in solution: " + std::to_string(v));
        sol.color_of[v] = c;
    }
    return sol;
}

}  // namespace wvcp
