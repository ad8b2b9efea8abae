// Command-line front end: instance generation, solvers, bound studies, and
// the CSV benchmark harness.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "expsearch/bench.hpp"
#include "expsearch/bnc.hpp"
#include "expsearch/graph.hpp"
#include "expsearch/greedy.hpp"
#include "expsearch/io.hpp"
#include "expsearch/local_search.hpp"
#include "expsearch/oracle.hpp"
#include "expsearch/tree_sequencer.hpp"

namespace fs = std::filesystem;
using namespace expsearch;

namespace {

// Exit codes, documented in the README: 64 usage, 65 data, 66 unreadable
// input, 70 internal.
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitNoInput = 66;
constexpr int kExitInternal = 70;

[[noreturn]] void die(int code, const std::string& kind, const std::string& msg) {
    std::cerr << "error: code=" << kind << " msg=\"" << msg << "\"\n";
    std::exit(code);
}

io::InstanceDoc load_or_die(const std::string& path) {
    if (!fs::exists(path)) die(kExitNoInput, "unreadable-file", path + " does not exist");
    try {
        std::vector<std::string> warnings;
        io::InstanceDoc doc = io::read_instance_file(path, &warnings);
        for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
        return doc;
    } catch (const io::ParseError& e) {
        die(kExitData, "parse-error", e.what());
    } catch (const ValidationError& e) {
        die(kExitData, "invalid-instance", e.what());
    } catch (const Error& e) {
        die(kExitNoInput, "unreadable-file", e.what());
    }
}

std::vector<std::string> instance_files(const std::string& dir) {
    if (!fs::is_directory(dir))
        die(kExitNoInput, "unreadable-file", dir + " is not a directory");
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".esp")
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty())
        die(kExitNoInput, "unreadable-file", "no .esp instances under " + dir);
    return files;
}

int cmd_generate(const io::GeneratorSpec& spec, const std::string& out_path) {
    io::InstanceDoc doc;
    try {
        doc = io::generate(spec);
    } catch (const ValidationError& e) {
        die(kExitData, "infeasible-request", e.what());
    }
    if (out_path.empty() || out_path == "-") {
        io::write_instance(std::cout, doc);
    } else {
        io::write_instance_file(out_path, doc);
        std::cout << "wrote " << out_path << " (" << doc.inst.vertex_count()
                  << " vertices, " << doc.inst.edge_count() << " edges)\n";
    }
    return 0;
}

int cmd_solve(const std::string& path, const std::string& method,
              const bench::RunOptions& options) {
    io::InstanceDoc doc = load_or_die(path);
    bench::ResultRow row;
    try {
        row = bench::run_method(doc, method, options);
    } catch (const LimitError& e) {
        die(kExitData, "infeasible-request", e.what());
    }
    std::cout.precision(10);
    std::cout << "instance " << doc.name << "\n";
    std::cout << "method " << method << "\n";
    if (row.cost) std::cout << "cost " << *row.cost << "\n";
    if (row.lower_bound) std::cout << "lower_bound " << *row.lower_bound << "\n";
    if (row.gap) std::cout << "gap " << *row.gap << "\n";
    if (row.nodes) std::cout << "nodes " << *row.nodes << "\n";
    if (row.cuts_c1) std::cout << "cuts_c1 " << *row.cuts_c1 << "\n";
    if (row.cuts_c2) std::cout << "cuts_c2 " << *row.cuts_c2 << "\n";
    std::cout << "wall_ms " << row.wall_ms << "\n";
    return 0;
}

int cmd_bench(const std::string& dir, const std::string& out_csv,
              const std::vector<std::string>& methods,
              const bench::RunOptions& base_options, bool write_solutions) {
    std::vector<std::string> files = instance_files(dir);
    std::ofstream out(out_csv, std::ios::binary);
    if (!out) die(kExitNoInput, "unreadable-file", "cannot open " + out_csv);
    out << bench::csv_header() << "\n";
    for (const std::string& file : files) {
        io::InstanceDoc doc = load_or_die(file);
        for (const std::string& method : methods) {
            bench::RunOptions options = base_options;
            if (write_solutions && method != "bounds-none" &&
                method.rfind("bounds-", 0) != 0) {
                fs::path p(out_csv);
                options.solution_path =
                    (p.parent_path() / (doc.name + "." + method + ".sol")).string();
            }
            bench::ResultRow row = bench::run_method(doc, method, options);
            out << bench::to_csv(row) << "\n";
            out.flush();
            std::cerr << doc.name << " " << method << ": done ("
                      << static_cast<long>(row.wall_ms) << " ms)\n";
        }
    }
    std::cout << "wrote " << out_csv << "\n";
    return 0;
}

int cmd_ratio_report(const std::string& in_csv, const std::string& out_csv) {
    std::ifstream in(in_csv, std::ios::binary);
    if (!in) die(kExitNoInput, "unreadable-file", "cannot open " + in_csv);
    std::vector<bench::ResultRow> rows = bench::parse_csv(in);
    std::string report = bench::ratio_report(rows, std::cerr);
    if (out_csv.empty() || out_csv == "-") {
        std::cout << report;
    } else {
        std::ofstream out(out_csv, std::ios::binary);
        if (!out) die(kExitNoInput, "unreadable-file", "cannot open " + out_csv);
        out << report;
        std::cout << "wrote " << out_csv << "\n";
    }
    return 0;
}

// Structural invariants over an instance directory; exercised by `verify`.
int cmd_verify(const std::string& dir) {
    int failures = 0;
    for (const std::string& file : instance_files(dir)) {
        std::string problem;
        try {
            io::InstanceDoc doc = load_or_die(file);
            const Instance& inst = doc.inst;
            if (!inst.has_unit_mass()) problem = "probabilities do not sum to 1";

            // Closure idempotence.
            MetricClosure closure = metric_closure(inst);
            MetricClosure twice = metric_closure(closure.graph);
            for (int id = 0; id < closure.graph.edge_count() && problem.empty(); ++id)
                if (std::abs(closure.graph.edge(id).length -
                             twice.graph.edge(id).length) > 1e-9)
                    problem = "metric closure not idempotent";

            // Greedy produces a valid search; on oracle-sized instances it is
            // within its certified factor and its price bound.
            GreedyResult greedy = greedy_search(inst);
            if (problem.empty() &&
                greedy.cost > greedy_upper_bound(greedy.trace) + 1e-9)
                problem = "greedy price bound violated";
            if (inst.non_root_count() <= 12 && problem.empty()) {
                oracle::DpResult dp = oracle::optimal_search_dp(inst);
                if (greedy.cost < dp.cost - 1e-9) problem = "greedy beat the oracle";
                if (greedy.cost > 8.0 * dp.cost + 1e-6)
                    problem = "greedy exceeded 8x the optimum";
            }
        } catch (const Error& e) {
            problem = e.what();
        }
        if (problem.empty()) {
            std::cout << file << ": ok\n";
        } else {
            std::cout << file << ": FAIL (" << problem << ")\n";
            ++failures;
        }
    }
    return failures == 0 ? 0 : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Expanding search solvers and benchmark tooling"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a benchmark instance");
    std::string family_str = "density-controlled";
    io::GeneratorSpec spec;
    std::string gen_out;
    gen->add_option("--family", family_str, "random-metric | euclidean | density-controlled");
    gen->add_option("--n", spec.n, "total vertex count (root included)")->required();
    gen->add_option("--density", spec.density, "edge density in (0,1]");
    gen->add_flag("--weighted,!--unweighted", spec.weighted,
                  "integer-weight probabilities (default) or uniform");
    gen->add_option("--seed", spec.seed, "RNG seed");
    gen->add_option("-o,--out", gen_out, "output path (default stdout)");

    // solve
    auto* solve = app.add_subcommand("solve", "Solve one instance");
    std::string solve_path, solve_method = "exact";
    bench::RunOptions solve_options;
    std::string warm = "on";
    solve->add_option("instance", solve_path, "instance file")->required();
    solve->add_option("--method", solve_method, "exact | greedy | local | oracle");
    solve->add_option("--time-limit", solve_options.time_limit_s, "seconds (exact)");
    solve->add_option("--epsilon", solve_options.epsilon,
                      "parametric-search epsilon (default 1/(2n-1))");
    solve->add_option("--warm-start", warm, "on | off (exact)");
    solve->add_option("--solution", solve_options.solution_path,
                      "write the sequence to this file");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "Root LP bound under a cut family");
    std::string bounds_path, cuts = "c1c2";
    bounds->add_option("instance", bounds_path, "instance file")->required();
    bounds->add_option("--cuts", cuts, "none | c1 | c2 | c1c2");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Run methods over a directory");
    std::string bench_dir, bench_out = "results.csv";
    std::vector<std::string> bench_methods{"exact", "greedy", "local"};
    bench::RunOptions bench_options;
    bool bench_solutions = false;
    bench_cmd->add_option("--dir", bench_dir, "directory of .esp instances")->required();
    bench_cmd->add_option("--out", bench_out, "output CSV path");
    bench_cmd->add_option("--methods", bench_methods,
                          "exact greedy local oracle bounds-none bounds-c1 "
                          "bounds-c2 bounds-c1c2");
    bench_cmd->add_option("--time-limit", bench_options.time_limit_s, "seconds");
    bench_cmd->add_option("--epsilon", bench_options.epsilon, "epsilon");
    bench_cmd->add_flag("--solutions", bench_solutions,
                        "write per-run solution files next to the CSV");

    // ratio-report
    auto* ratio = app.add_subcommand("ratio-report",
                                     "Aggregate bound/optimum ratios from a bench CSV");
    std::string ratio_in, ratio_out;
    ratio->add_option("--in", ratio_in, "bench CSV")->required();
    ratio->add_option("--out", ratio_out, "output CSV (default stdout)");

    // verify
    auto* verify = app.add_subcommand("verify", "Run the invariant suite on a directory");
    std::string verify_dir;
    verify->add_option("--dir", verify_dir, "directory of .esp instances")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: code=usage msg=\"" << e.what() << "\"\n";
        return kExitUsage;
    }

    try {
        if (gen->parsed()) {
            auto family = io::family_from_name(family_str);
            if (!family) die(kExitUsage, "usage", "unknown family '" + family_str + "'");
            spec.family = *family;
            return cmd_generate(spec, gen_out);
        }
        if (solve->parsed()) {
            if (warm != "on" && warm != "off")
                die(kExitUsage, "usage", "--warm-start expects on|off");
            solve_options.warm_start = warm == "on";
            const char* methods[] = {"exact", "greedy", "local", "oracle"};
            if (std::find(std::begin(methods), std::end(methods), solve_method) ==
                std::end(methods))
                die(kExitUsage, "usage", "unknown method '" + solve_method + "'");
            return cmd_solve(solve_path, solve_method, solve_options);
        }
        if (bounds->parsed()) {
            if (cuts != "none" && cuts != "c1" && cuts != "c2" && cuts != "c1c2")
                die(kExitUsage, "usage", "--cuts expects none|c1|c2|c1c2");
            io::InstanceDoc doc = load_or_die(bounds_path);
            std::cout.precision(10);
            std::cout << "instance " << doc.name << "\n";
            std::cout << "cuts " << cuts << "\n";
            bnc::CutConfig config = cuts == "none" ? bnc::CutConfig::None
                                    : cuts == "c1" ? bnc::CutConfig::C1
                                    : cuts == "c2" ? bnc::CutConfig::C2
                                                   : bnc::CutConfig::C1C2;
            std::cout << "lower_bound " << bnc::lp_lower_bound(doc.inst, config) << "\n";
            return 0;
        }
        if (bench_cmd->parsed())
            return cmd_bench(bench_dir, bench_out, bench_methods, bench_options,
                             bench_solutions);
        if (ratio->parsed()) return cmd_ratio_report(ratio_in, ratio_out);
        if (verify->parsed()) return cmd_verify(verify_dir);
    } catch (const io::ParseError& e) {
        die(kExitData, "parse-error", e.what());
    } catch (const ValidationError& e) {
        die(kExitData, "invalid-instance", e.what());
    } catch (const Error& e) {
        die(kExitInternal, "internal", e.what());
    }
    return kExitUsage;
}
