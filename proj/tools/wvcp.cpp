#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "wvcp/harness.hpp"
#include "wvcp/reduction_io.hpp"

namespace fs = std::filesystem;
using namespace wvcp;

namespace {

WeightedGraph load_and_maybe_reduce(const std::string& instance, const std::string& weights,
                                    bool do_reduce, WeightedGraph* original_out,
                                    ReductionReport* report_out) {
    WeightedGraph g = load_instance(instance, weights);
    if (!do_reduce) return g;
    if (original_out) *original_out = g;
    auto [reduced, report] = reduce(g);
    if (report_out) *report_out = std::move(report);
    return std::move(reduced);
}

int cmd_solve(const std::string& instance, const std::string& weights, bool do_reduce,
              const std::string& method_str, double time_limit, long long target, bool has_target,
              long long max_iterations, double coeff, bool no_prune, std::uint64_t seed,
              const std::string& series_path, const std::string& solution_path,
              const std::string& config_path) {
    harness::SolverConfig cfg;
    if (!config_path.empty()) {
        Config file_cfg = Config::parse(read_file(config_path));
        cfg = harness::read_solver_config(file_cfg);
        file_cfg.finalize();
    }
    cfg.coeff = coeff;
    if (no_prune) cfg.prune = false;

    WeightedGraph original;
    ReductionReport report;
    WeightedGraph g = load_and_maybe_reduce(instance, weights, do_reduce,
                                            &original, &report);
    if (do_reduce)
        std::cout << "reduced " << original.n() << " -> " << g.n() << " vertices ("
                  << report.removed.size() << " removed)\n";

    harness::Method method = harness::parse_method(method_str);
    mcts::StopCondition stop;
    stop.time_limit_s = time_limit;
    if (has_target) stop.target = target;
    stop.max_iterations = max_iterations;

    harness::RunRecord rec = harness::run_method(g, method, cfg, stop, seed);

    std::cout << "instance=" << g.name() << " n=" << g.n() << " m=" << g.edge_count() << '\n'
              << "method=" << rec.method << " seed=" << rec.seed << '\n'
              << "best_score=" << rec.best_score << " proven_optimal=" << (rec.proven_optimal ? 1 : 0)
              << " time_to_best_ms=" << rec.time_to_best_ms << " total_time_ms="
              << rec.total_time_ms << '\n';

    if (!series_path.empty()) write_file(series_path, harness::series_csv(rec));
    if (!solution_path.empty()) {
        Coloring out = rec.best;
        if (do_reduce) out = expand_solution(original, report, rec.best);
        write_file(solution_path, serialize_solution(out));
    }
    return 0;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir) {
    Config cfg = Config::parse(read_file(config_path));
    auto ec = harness::ExperimentConfig::from_config(cfg);

    fs::create_directories(out_dir);
    fs::create_directories(fs::path(out_dir) / "series");
    std::ofstream records_out(fs::path(out_dir) / "records.csv", std::ios::binary);
    if (!records_out) throw std::runtime_error("cannot write records.csv under " + out_dir);
    records_out << harness::records_csv_header() << '\n' << std::flush;

    std::size_t done = 0;
    auto on_record = [&](const harness::RunRecord& rec) {
        records_out << harness::record_csv_row(rec) << '\n' << std::flush;
        std::string series_name = rec.instance + "__" + rec.method + "__" +
                                  std::to_string(rec.seed) + ".csv";
        write_file((fs::path(out_dir) / "series" / series_name).string(),
                   harness::series_csv(rec));
        ++done;
        std::cout << "[" << done << "] " << rec.instance << " " << rec.method << " seed="
                  << rec.seed << " best=" << rec.best_score
                  << (rec.proven_optimal ? " optimal" : "") << '\n';
    };
    auto records = harness::run_experiment(ec, on_record);
    std::cout << records.size() << " runs completed, records in " << out_dir << "/records.csv\n";
    return 0;
}

int cmd_compare(const std::string& in_dir, const std::string& method_a,
                const std::string& method_b) {
    auto records = harness::read_records_csv((fs::path(in_dir) / "records.csv").string());
    harness::parse_method(method_a);
    harness::parse_method(method_b);
    auto cells = harness::compare(records, method_a, method_b);
    if (cells.empty()) throw std::runtime_error("no common instances for the two methods");

    std::cout << "instance,mean_" << method_a << ",mean_" << method_b << ",p_value,significant,better\n";
    int a_better = 0, b_better = 0;
    for (const auto& c : cells) {
        const char* better = "-";
        if (c.significant && c.mean_a < c.mean_b) {
            better = "a";
            ++a_better;
        } else if (c.significant && c.mean_b < c.mean_a) {
            better = "b";
            ++b_better;
        }
        std::cout << c.instance << ',' << c.mean_a << ',' << c.mean_b << ',' << c.p_value << ','
                  << (c.significant ? 1 : 0) << ',' << better << '\n';
    }
    std::cout << "total," << method_a << " better on " << a_better << ',' << method_b
              << " better on " << b_better << ",instances=" << cells.size() << ",,\n";
    return 0;
}

int cmd_verify(const std::string& instance, const std::string& weights,
               const std::string& solution_path) {
    WeightedGraph g = load_instance(instance, weights);
    auto res = harness::verify_solution(g, read_file(solution_path));
    if (res.valid) {
        std::cout << "VALID score=" << res.score << '\n';
        return 0;
    }
    std::cout << "INVALID: " << res.error << '\n';
    return 1;
}

int cmd_reduce(const std::string& instance, const std::string& weights,
               const std::string& out_instance, const std::string& out_weights,
               const std::string& report_path) {
    WeightedGraph g = load_instance(instance, weights);
    auto [reduced, report] = reduce(g);
    write_file(out_instance, serialize_col(reduced));
    write_file(out_weights, serialize_weights(reduced));
    if (!report_path.empty())
        write_file(report_path, reduction_report_json(g, reduced, report).dump(2) + "\n");
    std::cout << "reduced " << g.n() << " -> " << reduced.n() << " vertices ("
              << report.removed.size() << " removed)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weighted vertex coloring solvers: tree search, greedy and local search"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "run one seeded method on one instance");
    std::string instance, weights, method, series_path, solution_path, config_path;
    bool do_reduce = false, no_prune = false;
    double time_limit = 3600.0, coeff = 1.0;
    long long target = 0, max_iterations = -1;
    std::uint64_t seed = 1;
    solve->add_option("--instance", instance, "DIMACS .col file")->required();
    solve->add_option("--weights", weights, "weights file, one integer per line")->required();
    solve->add_flag("--reduce", do_reduce, "apply the preprocessing reductions first");
    solve->add_option("--method", method, "method id, e.g. mcts+greedy")->required();
    solve->add_option("--time-limit", time_limit, "cutoff in seconds");
    auto* target_opt = solve->add_option("--target", target, "stop once this score is reached");
    solve->add_option("--max-iterations", max_iterations,
                      "stop after this many iterations (deterministic budget)");
    solve->add_option("--coeff", coeff, "exploration coefficient c");
    solve->add_flag("--no-prune", no_prune, "disable the score-based pruning rules");
    solve->add_option("--seed", seed, "rng seed")->required();
    solve->add_option("--series", series_path, "write the improvement series CSV here");
    solve->add_option("--solution", solution_path, "write the best solution here");
    solve->add_option("--config", config_path, "tuning config file");

    // bench
    auto* bench = app.add_subcommand("bench", "run an experiment matrix from a config file");
    std::string bench_config, bench_out;
    bench->add_option("--config", bench_config, "experiment config file")->required();
    bench->add_option("--out", bench_out, "output directory")->required();

    // compare
    auto* comp = app.add_subcommand("compare", "pairwise significance comparison of two methods");
    std::string comp_in, comp_a, comp_b;
    comp->add_option("--in", comp_in, "bench output directory")->required();
    comp->add_option("--a", comp_a, "first method")->required();
    comp->add_option("--b", comp_b, "second method")->required();

    // verify
    auto* verify = app.add_subcommand("verify", "independently check a solution file");
    std::string v_instance, v_weights, v_solution;
    verify->add_option("--instance", v_instance)->required();
    verify->add_option("--weights", v_weights)->required();
    verify->add_option("--solution", v_solution)->required();

    // reduce
    auto* red = app.add_subcommand("reduce", "write the reduced instance and a removal report");
    std::string r_instance, r_weights, r_out_instance, r_out_weights, r_report;
    red->add_option("--instance", r_instance)->required();
    red->add_option("--weights", r_weights)->required();
    red->add_option("--out-instance", r_out_instance)->required();
    red->add_option("--out-weights", r_out_weights)->required();
    red->add_option("--report", r_report, "JSON removal report path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed())
            return cmd_solve(instance, weights, do_reduce, method, time_limit, target,
                             target_opt->count() > 0, max_iterations, coeff, no_prune, seed,
                             series_path, solution_path, config_path);
        if (bench->parsed()) return cmd_bench(bench_config, bench_out);
        if (comp->parsed()) return cmd_compare(comp_in, comp_a, comp_b);
        if (verify->parsed()) return cmd_verify(v_instance, v_weights, v_solution);
        if (red->parsed())
            return cmd_reduce(r_instance, r_weights, r_out_instance, r_out_weights, r_report);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
