#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "wvcp/config.hpp"
#include "wvcp/graph.hpp"
#include "wvcp/local_search.hpp"
#include "wvcp/mcts.hpp"
#include "wvcp/oracle.hpp"
#include "wvcp/reduction.hpp"
#include "wvcp/rng.hpp"
#include "wvcp/simulation.hpp"
#include "wvcp/stats.hpp"

namespace wvcp::harness {

enum class Method {
    Random,
    GreedyRandom,
    Greedy,
    Tw,
    Afisa,
    Redls,
    Ilsts,
    MctsRandom,
    MctsGreedyRandom,
    MctsGreedy,
    MctsTw,
    MctsAfisa,
    MctsRedls,
    MctsIlsts,
};

inline const std::vector<std::pair<std::string, Method>>& method_table() {
    static const std::vector<std::pair<std::string, Method>> table = {
        {"random", Method::Random},
        {"greedy", Method::Greedy},
        {"greedy-random", Method::GreedyRandom},
        {"tw", Method::Tw},
        {"afisa", Method::Afisa},
        {"redls", Method::Redls},
        {"ilsts", Method::Ilsts},
        {"mcts+random", Method::MctsRandom},
        {"mcts+greedy", Method::MctsGreedy},
        {"mcts+greedy-random", Method::MctsGreedyRandom},
        {"mcts+tw", Method::MctsTw},
        {"mcts+afisa", Method::MctsAfisa},
        {"mcts+redls", Method::MctsRedls},
        {"mcts+ilsts", Method::MctsIlsts},
    };
    return table;
}

inline Method parse_method(const std::string& name) {
    for (const auto& [n, m] : method_table())
        if (n == name) return m;
    std::string known;
    for (const auto& [n, m] : method_table()) known += (known.empty() ? "" : "|") + n;
    throw std::invalid_argument("unknown method '" + name + "' (known: " + known + ")");
}

inline std::string method_name(Method m) {
    for (const auto& [n, mm] : method_table())
        if (mm == m) return n;
    return "?";
}

inline bool is_mcts(Method m) {
    switch (m) {
        case Method::MctsRandom:
        case Method::MctsGreedyRandom:
        case Method::MctsGreedy:
        case Method::MctsTw:
        case Method::MctsAfisa:
        case Method::MctsRedls:
        case Method::MctsIlsts:
            return true;
        default:
            return false;
    }
}

// Every tunable in one place; defaults match the solver's documented values.
struct SolverConfig {
    double coeff = 1.0;       // exploration coefficient
    bool prune = true;        // score-based pruning rules
    double ls_budget_factor = 0.02;  // per-simulation LS budget: factor * n seconds
    long long ls_budget_steps = 0;   // > 0: deterministic per-simulation step budget
    LsParams ls{};
};

struct RunRecord {
    std::string instance;
    std::string method;
    std::uint64_t seed = 0;
    Weight best_score = 0;
    long long time_to_best_ms = 0;
    long long total_time_ms = 0;
    bool proven_optimal = false;
    std::vector<mcts::SeriesPoint> series;
    Coloring best;

    bool same_row(const RunRecord& o) const {
        return instance == o.instance && method == o.method && seed == o.seed &&
               best_score == o.best_score && time_to_best_ms == o.time_to_best_ms &&
               total_time_ms == o.total_time_ms && proven_optimal == o.proven_optimal;
    }
};

namespace detail {

inline SimulationStrategy strategy_for(Method m, const SolverConfig& cfg) {
    SimulationStrategy s;
    s.ls_params = cfg.ls;
    s.ls_budget_factor = cfg.ls_budget_factor;
    s.ls_budget_steps = cfg.ls_budget_steps;
    switch (m) {
        case Method::MctsRandom: s.kind = SimulationStrategy::Kind::Random; break;
        case Method::MctsGreedyRandom: s.kind = SimulationStrategy::Kind::GreedyRandom; break;
        case Method::MctsGreedy: s.kind = SimulationStrategy::Kind::Greedy; break;
        case Method::MctsTw:
            s.kind = SimulationStrategy::Kind::GreedyThenLs;
            s.improver = LsKind::TabuWeight;
            break;
        case Method::MctsAfisa:
            s.kind = SimulationStrategy::Kind::GreedyThenLs;
            s.improver = LsKind::Afisa;
            break;
        case Method::MctsRedls:
            s.kind = SimulationStrategy::Kind::GreedyThenLs;
            s.improver = LsKind::Redls;
            break;
        case Method::MctsIlsts:
            s.kind = SimulationStrategy::Kind::GreedyThenLs;
            s.improver = LsKind::Ilsts;
            break;
        default:
            throw std::logic_error("not an MCTS method");
    }
    return s;
}

inline LsKind ls_kind_for(Method m) {
    switch (m) {
        case Method::Tw: return LsKind::TabuWeight;
        case Method::Afisa: return LsKind::Afisa;
        case Method::Redls: return LsKind::Redls;
        case Method::Ilsts: return LsKind::Ilsts;
        default: throw std::logic_error("not a local search method");
    }
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    long long ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }
    std::chrono::steady_clock::time_point deadline_after(double seconds) const {
        if (!std::isfinite(seconds)) return std::chrono::steady_clock::time_point::max();
        return start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(seconds));
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// One seeded run of any method. The rng stream is a pure function of
// (seed, instance, method), so a bench cell and a standalone solve with the
// same seed produce the same trajectory.
inline RunRecord run_method(const WeightedGraph& g, Method method, const SolverConfig& cfg,
                            const mcts::StopCondition& stop, std::uint64_t seed) {
    RunRecord rec;
    rec.instance = g.name();
    rec.method = method_name(method);
    rec.seed = seed;
    std::uint64_t stream = derive_run_seed(seed, g.name(), rec.method, 0);

    if (is_mcts(method)) {
        auto rr = mcts::run(g, detail::strategy_for(method, cfg), {cfg.coeff}, cfg.prune, stop,
                            stream);
        rec.best_score = rr.best_score;
        rec.best = rr.best;
        rec.proven_optimal = rr.proven_optimal;
        rec.series = rr.series;
        rec.time_to_best_ms = rr.time_to_best_ms;
        rec.total_time_ms = rr.total_time_ms;
        return rec;
    }

    detail::Stopwatch watch;
    Rng rng(stream);
    Weight target = stop.target.value_or(std::numeric_limits<Weight>::min());
    rec.best_score = std::numeric_limits<Weight>::max();

    auto note_best = [&](const Coloring& sol, long long iteration) {
        if (sol.score < rec.best_score) {
            rec.best_score = sol.score;
            rec.best = sol;
            rec.time_to_best_ms = watch.ms();
            rec.series.push_back({iteration, rec.time_to_best_ms, rec.best_score});
        }
    };

    switch (method) {
        case Method::Greedy: {
            PartialSolution s(g);
            simulate_greedy(s);
            note_best(s.to_coloring(), 1);
            break;
        }
        case Method::Random:
        case Method::GreedyRandom: {
            long long iter = 0;
            PartialSolution s(g);
            while (true) {
                if (iter > 0) {
                    if (rec.best_score <= target && stop.target) break;
                    if (stop.max_iterations >= 0 && iter >= stop.max_iterations) break;
                    if (static_cast<double>(watch.ms()) / 1000.0 >= stop.time_limit_s) break;
                }
                s.rewind(0);
                if (method == Method::Random) simulate_random(s, rng);
                else simulate_greedy_random(s, rng);
                note_best(s.to_coloring(), ++iter);
            }
            break;
        }
        case Method::Tw:
        case Method::Afisa:
        case Method::Redls:
        case Method::Ilsts: {
            PartialSolution s(g);
            simulate_greedy(s);
            note_best(s.to_coloring(), 1);
            LsSolution start(g, s.to_coloring().color_of);
            long long ls_iter = 1;
            Weight series_best = rec.best_score;
            LsHooks hooks;
            hooks.on_best = [&](Weight score) {
                if (score >= series_best) return;
                series_best = score;
                rec.series.push_back({++ls_iter, watch.ms(), score});
                rec.time_to_best_ms = watch.ms();
            };
            auto budget = LsBudget::at_deadline(watch.deadline_after(stop.time_limit_s), target);
            if (stop.max_iterations >= 0)
                budget.with_max_steps(static_cast<std::uint64_t>(stop.max_iterations));
            LsSolution improved =
                improve(detail::ls_kind_for(method), std::move(start), budget, cfg.ls, rng, hooks);
            if (improved.score() < rec.best_score) {
                rec.best_score = improved.score();
                rec.best = improved.to_coloring();
            }
            break;
        }
        default:
            throw std::logic_error("unhandled method");
    }

    rec.total_time_ms = watch.ms();
    rec.series.push_back({rec.series.empty() ? 0 : rec.series.back().iteration,
                          rec.total_time_ms, rec.best_score});
    rec.proven_optimal = false;
    return rec;
}

// ---------------------------------------------------------------------------
// experiment configuration and execution

struct InstanceRef {
    std::string name;
    std::string col_path;
    std::string weights_path;
};

// Resolves `<name>` against a data directory: `<dir>/<name>.col`,
// `<dir>/reduced/<name>.col`, `<dir>/original/<name>.col`, first hit wins;
// weights live next to the graph as `<file>.w`.
inline std::optional<InstanceRef> find_instance(const std::string& dir, const std::string& name) {
    namespace fs = std::filesystem;
    for (const char* sub : {"", "reduced/", "original/"}) {
        fs::path col = fs::path(dir) / (std::string(sub) + name + ".col");
        fs::path w = col;
        w += ".w";
        if (fs::exists(col) && fs::exists(w)) return InstanceRef{name, col.string(), w.string()};
    }
    return std::nullopt;
}

inline SolverConfig read_solver_config(const Config& cfg) {
    SolverConfig sc;
    sc.coeff = cfg.get_double("coeff", 1.0);
    sc.prune = cfg.get_bool("prune", true);
    sc.ls_budget_factor = cfg.get_double("ls_budget_factor", 0.02);
    sc.ls_budget_steps = cfg.get_int("ls_budget_steps", 0);
    sc.ls.tenure_base = static_cast<int>(cfg.get_int("tenure_base", 10));
    sc.ls.tenure_div = static_cast<int>(cfg.get_int("tenure_div", 10));
    sc.ls.afisa_phi_init = cfg.get_int("afisa_phi_init", 1);
    sc.ls.afisa_phi_max = cfg.get_int("afisa_phi_max", 1LL << 40);
    sc.ls.afisa_streak = static_cast<int>(cfg.get_int("afisa_streak", 5));
    sc.ls.redls_penalty_base = cfg.get_int("redls_penalty_base", 1);
    sc.ls.ilsts_max_groups = static_cast<int>(cfg.get_int("ilsts_max_groups", 3));
    sc.ls.ilsts_repair_cap_factor = static_cast<int>(cfg.get_int("ilsts_repair_cap", 10));
    return sc;
}

struct ExperimentConfig {
    std::vector<InstanceRef> instances;
    std::vector<Method> methods;
    std::vector<std::uint64_t> seeds;
    double time_limit_s = 60.0;
    bool reduce = false;
    int workers = 0;  // 0 = hardware concurrency
    std::map<std::string, Weight> targets;
    SolverConfig solver;

    static ExperimentConfig from_config(const Config& cfg) {
        ExperimentConfig ec;
        std::string dir = cfg.get_string("instance_dir", ".");
        for (const auto& name : cfg.get_list("instances")) {
            auto ref = find_instance(dir, name);
            if (!ref) throw ConfigError("instance not found under " + dir + ": " + name);
            ec.instances.push_back(*ref);
        }
        for (const auto& m : cfg.get_list("methods")) ec.methods.push_back(parse_method(m));
        for (const auto& s : cfg.get_list("seeds"))
            ec.seeds.push_back(static_cast<std::uint64_t>(Config::parse_int("seeds", s)));
        long long runs = cfg.get_int("runs", 0);
        if (runs > 0) {
            if (!ec.seeds.empty()) throw ConfigError("give either seeds or runs, not both");
            auto master = static_cast<std::uint64_t>(cfg.get_int("master_seed", 1));
            for (long long i = 0; i < runs; ++i) ec.seeds.push_back(splitmix64(master ^ static_cast<std::uint64_t>(i)));
        }
        ec.time_limit_s = cfg.get_double("time_limit", 60.0);
        ec.reduce = cfg.get_bool("reduce", false);
        ec.workers = static_cast<int>(cfg.get_int("workers", 0));
        for (const auto& [name, value] : cfg.get_prefixed("target"))
            ec.targets[name] = Config::parse_int("target." + name, value);
        ec.solver = read_solver_config(cfg);
        cfg.finalize();
        if (ec.instances.empty()) throw ConfigError("no instances configured");
        if (ec.methods.empty()) throw ConfigError("no methods configured");
        if (ec.seeds.empty()) throw ConfigError("no seeds configured");
        return ec;
    }
};

// Runs the full instance x method x seed matrix on a bounded worker pool.
// Workers share only the immutable graphs; each record is handed to
// `on_record` under the writer lock as soon as its run finishes.
inline std::vector<RunRecord> run_experiment(
    const ExperimentConfig& ec,
    const std::function<void(const RunRecord&)>& on_record = nullptr) {
    struct Job {
        const WeightedGraph* graph;
        Method method;
        std::uint64_t seed;
        std::size_t slot;
    };

    std::vector<WeightedGraph> graphs;
    graphs.reserve(ec.instances.size());
    for (const auto& ref : ec.instances) {
        WeightedGraph g = load_instance(ref.col_path, ref.weights_path);
        if (ec.reduce) {
            auto [reduced, report] = reduce(g);
            g = std::move(reduced);
        }
        graphs.push_back(std::move(g));
    }

    std::vector<Job> jobs;
    for (std::size_t gi = 0; gi < graphs.size(); ++gi)
        for (Method m : ec.methods)
            for (std::uint64_t s : ec.seeds) jobs.push_back({&graphs[gi], m, s, jobs.size()});

    std::vector<RunRecord> records(jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex writer_mutex;

    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            mcts::StopCondition stop;
            stop.time_limit_s = ec.time_limit_s;
            auto t = ec.targets.find(job.graph->name());
            if (t != ec.targets.end()) stop.target = t->second;
            RunRecord rec = run_method(*job.graph, job.method, ec.solver, stop, job.seed);
            std::lock_guard<std::mutex> lock(writer_mutex);
            if (on_record) on_record(rec);
            records[job.slot] = std::move(rec);
        }
    };

    int nworkers = ec.workers > 0 ? ec.workers
                                  : std::max(1u, std::thread::hardware_concurrency());
    nworkers = std::min<int>(nworkers, static_cast<int>(jobs.size()));
    if (nworkers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nworkers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return records;
}

// ---------------------------------------------------------------------------
// record persistence

inline const char* records_csv_header() {
    return "instance,method,seed,best_score,time_to_best_ms,total_time_ms,proven_optimal";
}

inline std::string record_csv_row(const RunRecord& r) {
    std::ostringstream out;
    out << r.instance << ',' << r.method << ',' << r.seed << ',' << r.best_score << ','
        << r.time_to_best_ms << ',' << r.total_time_ms << ',' << (r.proven_optimal ? 1 : 0);
    return out.str();
}

inline void write_records_csv(const std::string& path, const std::vector<RunRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << records_csv_header() << '\n';
    for (const auto& r : records) out << record_csv_row(r) << '\n';
}

inline std::vector<RunRecord> read_records_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty records file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != records_csv_header())
        throw std::runtime_error("unexpected records header in " + path + ": " + line);
    std::vector<RunRecord> records;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 7)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 7 fields");
        RunRecord r;
        r.instance = fields[0];
        r.method = fields[1];
        r.seed = static_cast<std::uint64_t>(std::stoull(fields[2]));
        r.best_score = std::stoll(fields[3]);
        r.time_to_best_ms = std::stoll(fields[4]);
        r.total_time_ms = std::stoll(fields[5]);
        r.proven_optimal = fields[6] == "1";
        records.push_back(std::move(r));
    }
    return records;
}

// Improvement trajectory in iteration space; every column is a pure function
// of (instance, config, seed), so replaying a seeded run reproduces the file
// byte for byte. Wall-clock times stay in the records CSV, where reruns are
// not expected to match.
inline std::string series_csv(const RunRecord& r) {
    std::ostringstream out;
    out << "# instance=" << r.instance << " method=" << r.method << " seed=" << r.seed << '\n';
    out << "iteration,best_score\n";
    for (const auto& p : r.series) out << p.iteration << ',' << p.best_score << '\n';
    out << "# proven_optimal=" << (r.proven_optimal ? 1 : 0) << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// pairwise comparison

struct ComparisonCell {
    std::string method_a, method_b, instance;
    double mean_a = 0, mean_b = 0;
    double p_value = 1.0;
    bool significant = false;  // p < 0.001
};

inline std::vector<ComparisonCell> compare(const std::vector<RunRecord>& records,
                                           const std::string& method_a,
                                           const std::string& method_b,
                                           double alpha = 0.001) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_instance;
    for (const auto& r : records) {
        if (r.method == method_a) by_instance[r.instance].first.push_back(static_cast<double>(r.best_score));
        else if (r.method == method_b) by_instance[r.instance].second.push_back(static_cast<double>(r.best_score));
    }
    std::vector<ComparisonCell> cells;
    for (const auto& [instance, samples] : by_instance) {
        const auto& [a, b] = samples;
        if (a.size() < 2 || b.size() < 2)
            throw std::invalid_argument("compare needs >= 2 records per method on " + instance);
        auto t = stats::welch_t_test(a, b);
        ComparisonCell cell;
        cell.method_a = method_a;
        cell.method_b = method_b;
        cell.instance = instance;
        cell.mean_a = stats::mean(a);
        cell.mean_b = stats::mean(b);
        cell.p_value = t.p_value;
        cell.significant = t.p_value < alpha && cell.mean_a != cell.mean_b;
        cells.push_back(std::move(cell));
    }
    return cells;
}

// ---------------------------------------------------------------------------
// independent solution checker

struct VerifyResult {
    bool valid = false;
    Weight score = 0;
    std::string error;
};

// Revalidates a serialized solution from scratch: full edge scan for
// legality and a per-group maximum recomputation, sharing no state with the
// solvers.
inline VerifyResult verify_solution(const WeightedGraph& g, const std::string& solution_text) {
    VerifyResult res;
    Coloring sol;
    try {
        sol = parse_solution(solution_text);
    } catch (const std::exception& e) {
        res.error = e.what();
        return res;
    }
    if (static_cast<int>(sol.color_of.size()) != g.n()) {
        res.error = "solution has " + std::to_string(sol.color_of.size()) + " vertices, instance has " +
                    std::to_string(g.n());
        return res;
    }
    for (int v = 0; v < g.n(); ++v) {
        if (sol.color_of[v] < 0) {
            res.error = "vertex " + std::to_string(v) + " is uncolored";
            return res;
        }
    }
    for (auto [u, v] : g.edges()) {
        if (sol.color_of[u] == sol.color_of[v]) {
            res.error = "adjacent vertices " + std::to_string(u) + " and " + std::to_string(v) +
                        " share color " + std::to_string(sol.color_of[u]);
            return res;
        }
    }
    std::map<int, Weight> group_max;
    for (int v = 0; v < g.n(); ++v) {
        auto& mx = group_max[sol.color_of[v]];
        mx = std::max(mx, g.weight(v));
    }
    Weight score = 0;
    for (const auto& [c, mx] : group_max) score += mx;
    res.score = score;
    if (score != sol.score) {
        res.error = "declared score " + std::to_string(sol.score) + " but recomputed " +
                    std::to_string(score);
        return res;
    }
    res.valid = true;
    return res;
}

}  // namespace wvcp::harness
