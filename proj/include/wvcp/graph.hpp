#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wvcp {

using Weight = long long;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Immutable weighted instance. Vertices are dense ids 0..n-1. `order` is the
// canonical processing order: weight descending, then degree descending, then
// id ascending, so constructive search colors the most constrained heavy
// vertices first.
class WeightedGraph {
public:
    WeightedGraph() = default;

    WeightedGraph(std::string name, int n, std::vector<std::pair<int, int>> edges,
                  std::vector<Weight> weights)
        : name_(std::move(name)), n_(n), weight_(std::move(weights)) {
        if (n < 0) throw ParseError("negative vertex count");
        if (static_cast<int>(weight_.size()) != n)
            throw ParseError("weight count " + std::to_string(weight_.size()) +
                             " does not match vertex count " + std::to_string(n));
        for (int v = 0; v < n; ++v)
            if (weight_[v] < 1)
                throw ParseError("vertex " + std::to_string(v) + " has weight < 1");

        for (auto& [u, v] : edges) {
            if (u < 0 || u >= n || v < 0 || v >= n)
                throw ParseError("edge endpoint out of range: (" + std::to_string(u) + "," +
                                 std::to_string(v) + ")");
            if (u == v) throw ParseError("self-loop on vertex " + std::to_string(u));
            if (u > v) std::swap(u, v);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

        adj_.assign(n, {});
        for (auto [u, v] : edges) {
            adj_[u].push_back(v);
            adj_[v].push_back(u);
        }
        for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
        m_ = static_cast<long long>(edges.size());

        order_.resize(n);
        std::iota(order_.begin(), order_.end(), 0);
        std::sort(order_.begin(), order_.end(), [&](int a, int b) {
            if (weight_[a] != weight_[b]) return weight_[a] > weight_[b];
            if (degree(a) != degree(b)) return degree(a) > degree(b);
            return a < b;
        });
        rank_in_order_.resize(n);
        for (int i = 0; i < n; ++i) rank_in_order_[order_[i]] = i;
    }

    const std::string& name() const { return name_; }
    int n() const { return n_; }
    long long edge_count() const { return m_; }
    Weight weight(int v) const { return weight_[v]; }
    int degree(int v) const { return static_cast<int>(adj_[v].size()); }
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }
    const std::vector<int>& order() const { return order_; }
    int order_rank(int v) const { return rank_in_order_[v]; }

    bool adjacent(int u, int v) const {
        const auto& nb = adj_[u].size() <= adj_[v].size() ? adj_[u] : adj_[v];
        int other = adj_[u].size() <= adj_[v].size() ? v : u;
        return std::binary_search(nb.begin(), nb.end(), other);
    }

    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> es;
        es.reserve(static_cast<std::size_t>(m_));
        for (int u = 0; u < n_; ++u)
            for (int v : adj_[u])
                if (u < v) es.emplace_back(u, v);
        return es;
    }

private:
    std::string name_;
    int n_ = 0;
    long long m_ = 0;
    std::vector<std::vector<int>> adj_;
    std::vector<Weight> weight_;
    std::vector<int> order_;
    std::vector<int> rank_in_order_;
};

namespace detail {

inline std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace detail

// DIMACS edge format: optional `c` comment lines, one `p edge N M` header,
// then `e u v` lines with 1-indexed endpoints.
inline WeightedGraph parse_instance(const std::string& col_text, const std::string& weights_text,
                                    const std::string& name = "") {
    std::istringstream col(col_text);
    int n = -1;
    long long declared_m = 0;
    std::vector<std::pair<int, int>> edges;
    std::string line;
    int lineno = 0;
    while (std::getline(col, line)) {
        ++lineno;
        line = detail::strip_cr(line);
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream iss(line);
        if (line[0] == 'p') {
            std::string p, fmt;
            if (!(iss >> p >> fmt >> n >> declared_m) || (fmt != "edge" && fmt != "edges" && fmt != "col") || n < 0)
                throw ParseError("malformed header at line " + std::to_string(lineno) + ": " + line);
        } else if (line[0] == 'e') {
            if (n < 0) throw ParseError("edge before header at line " + std::to_string(lineno));
            std::string e;
            int u, v;
            if (!(iss >> e >> u >> v))
                throw ParseError("malformed edge at line " + std::to_string(lineno) + ": " + line);
            if (u < 1 || u > n || v < 1 || v > n)
                throw ParseError("edge endpoint out of range at line " + std::to_string(lineno) +
                                 ": " + line);
            edges.emplace_back(u - 1, v - 1);
        } else {
            throw ParseError("unrecognized line " + std::to_string(lineno) + ": " + line);
        }
    }
    if (n < 0) throw ParseError("missing `p edge N M` header");

    std::istringstream ws(weights_text);
    std::vector<Weight> weights;
    lineno = 0;
    while (std::getline(ws, line)) {
        ++lineno;
        line = detail::strip_cr(line);
        if (line.empty()) continue;
        std::istringstream iss(line);
        Weight w;
        if (!(iss >> w)) throw ParseError("malformed weight at line " + std::to_string(lineno));
        weights.push_back(w);
    }
    return WeightedGraph(name, n, std::move(edges), std::move(weights));
}

inline std::string serialize_col(const WeightedGraph& g) {
    std::ostringstream out;
    out << "p edge " << g.n() << ' ' << g.edge_count() << '\n';
    for (auto [u, v] : g.edges()) out << "e " << u + 1 << ' ' << v + 1 << '\n';
    return out.str();
}

inline std::string serialize_weights(const WeightedGraph& g) {
    std::ostringstream out;
    for (int v = 0; v < g.n(); ++v) out << g.weight(v) << '\n';
    return out.str();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

inline std::string instance_name_from_path(const std::string& path) {
    auto slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    if (base.size() > 4 && base.substr(base.size() - 4) == ".col") base.resize(base.size() - 4);
    return base;
}

inline WeightedGraph load_instance(const std::string& col_path, const std::string& weights_path) {
    return parse_instance(read_file(col_path), read_file(weights_path),
                          instance_name_from_path(col_path));
}

}  // namespace wvcp
