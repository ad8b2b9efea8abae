#include "expsearch/bench.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "expsearch/bnc.hpp"
#include "expsearch/greedy.hpp"
#include "expsearch/local_search.hpp"
#include "expsearch/oracle.hpp"
#include "expsearch/tree_sequencer.hpp"

namespace expsearch {
namespace bench {

namespace {

double wall_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t0)
        .count();
}

std::string opt_str(const std::optional<double>& v) {
    if (!v) return "";
    std::ostringstream os;
    os.precision(12);
    os << *v;
    return os.str();
}

std::string opt_str(const std::optional<long>& v) {
    return v ? std::to_string(*v) : "";
}

}  // namespace

std::string csv_header() {
    return "instance,method,cost,lower_bound,gap,nodes,cuts_c1,cuts_c2,wall_ms";
}

std::string to_csv(const ResultRow& row) {
    std::ostringstream os;
    os.precision(12);
    os << row.instance << "," << row.method << "," << opt_str(row.cost) << ","
       << opt_str(row.lower_bound) << "," << opt_str(row.gap) << ","
       << opt_str(row.nodes) << "," << opt_str(row.cuts_c1) << ","
       << opt_str(row.cuts_c2) << "," << row.wall_ms;
    return os.str();
}

std::vector<ResultRow> parse_csv(std::istream& in) {
    std::vector<ResultRow> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && line.rfind("instance,", 0) == 0) {
            first = false;
            continue;
        }
        first = false;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string f;
        while (std::getline(ls, f, ',')) fields.push_back(f);
        fields.resize(9);
        ResultRow row;
        row.instance = fields[0];
        row.method = fields[1];
        if (!fields[2].empty()) row.cost = std::stod(fields[2]);
        if (!fields[3].empty()) row.lower_bound = std::stod(fields[3]);
        if (!fields[4].empty()) row.gap = std::stod(fields[4]);
        if (!fields[5].empty()) row.nodes = std::stol(fields[5]);
        if (!fields[6].empty()) row.cuts_c1 = std::stol(fields[6]);
        if (!fields[7].empty()) row.cuts_c2 = std::stol(fields[7]);
        if (!fields[8].empty()) row.wall_ms = std::stod(fields[8]);
        rows.push_back(std::move(row));
    }
    return rows;
}

ResultRow run_method(const io::InstanceDoc& doc, const std::string& method,
                     const RunOptions& options) {
    const Instance& inst = doc.inst;
    ResultRow row;
    row.instance = doc.name;
    row.method = method;
    auto t0 = std::chrono::steady_clock::now();

    std::optional<ExpandingSearch> emitted;
    if (method == "exact") {
        bnc::SolveOptions sopts;
        sopts.time_limit_s = options.time_limit_s;
        sopts.epsilon = options.epsilon;
        sopts.warm_start = options.warm_start;
        bnc::SolveReport report = bnc::branch_and_cut(inst, sopts);
        emitted = report.incumbent;
        row.lower_bound = report.lower_bound;
        row.gap = report.gap;
        row.nodes = report.nodes;
        row.cuts_c1 = report.cuts_c1;
        row.cuts_c2 = report.cuts_c2;
    } else if (method == "greedy") {
        emitted = greedy_search(inst, options.epsilon).search;
    } else if (method == "local") {
        GreedyResult greedy = greedy_search(inst, options.epsilon);
        MetricClosure closure = metric_closure(inst);
        std::vector<int> ids;
        for (auto [a, b] : greedy.search.steps)
            ids.push_back(closure.graph.find_edge(a, b));
        emitted = edge_swap_local_search(inst, closure,
                                         tree_from_edges(closure.graph, ids))
                      .search;
    } else if (method == "oracle") {
        emitted = oracle::optimal_search_dp(inst).search;
    } else if (method == "bounds-none") {
        row.lower_bound = bnc::lp_lower_bound(inst, bnc::CutConfig::None);
    } else if (method == "bounds-c1") {
        row.lower_bound = bnc::lp_lower_bound(inst, bnc::CutConfig::C1);
    } else if (method == "bounds-c2") {
        row.lower_bound = bnc::lp_lower_bound(inst, bnc::CutConfig::C2);
    } else if (method == "bounds-c1c2") {
        row.lower_bound = bnc::lp_lower_bound(inst, bnc::CutConfig::C1C2);
    } else {
        throw ValidationError("unknown method '" + method + "'");
    }

    if (emitted) {
        // Costs are always re-derived from the emitted sequence.
        row.cost = search_cost(inst, *emitted);
        if (!options.solution_path.empty()) {
            std::ofstream out(options.solution_path, std::ios::binary);
            if (!out) throw Error("cannot open " + options.solution_path);
            io::write_solution(out, doc, *emitted, *row.cost);
        }
    }
    row.wall_ms = wall_since(t0);
    return row;
}

namespace {

// Generated names look like "<family>-n12-d60-w-s7"; extract n and density.
std::pair<int, int> group_key(const std::string& name) {
    int n = -1, d = -1;
    for (size_t i = 0; i + 1 < name.size(); ++i) {
        if (name[i] != '-') continue;
        char tag = name[i + 1];
        size_t j = i + 2;
        if ((tag == 'n' || tag == 'd') && j < name.size() && std::isdigit(name[j])) {
            int value = 0;
            while (j < name.size() && std::isdigit(name[j]))
                value = value * 10 + (name[j++] - '0');
            (tag == 'n' ? n : d) = value;
        }
    }
    return {n, d};
}

struct Accumulator {
    double sum = 0.0;
    int count = 0;
    void add(double v) {
        sum += v;
        ++count;
    }
    std::string mean() const {
        if (count == 0) return "";
        std::ostringstream os;
        os.precision(10);
        os << sum / count;
        return os.str();
    }
};

}  // namespace

std::string ratio_report(const std::vector<ResultRow>& rows, std::ostream& warn) {
    // optimum per instance: a proved exact solve, else an oracle run
    std::map<std::string, double> optimum;
    for (const ResultRow& row : rows) {
        if (row.method == "exact" && row.cost && row.gap && *row.gap <= 1e-9)
            optimum[row.instance] = *row.cost;
        else if (row.method == "oracle" && row.cost && !optimum.count(row.instance))
            optimum[row.instance] = *row.cost;
    }

    struct Group {
        Accumulator lb_none, lb_c1, lb_c2, lb_c1c2, greedy, local;
        int instances = 0;
    };
    std::map<std::pair<int, int>, Group> groups;
    std::map<std::pair<int, int>, int> skipped;
    for (const ResultRow& row : rows) {
        auto key = group_key(row.instance);
        auto opt = optimum.find(row.instance);
        if (opt == optimum.end()) {
            ++skipped[key];
            continue;
        }
        Group& g = groups[key];
        double o = opt->second;
        if (row.method == "exact") ++g.instances;
        if (row.lower_bound && row.method.rfind("bounds-", 0) == 0) {
            double ratio = *row.lower_bound / o;
            if (row.method == "bounds-none") g.lb_none.add(ratio);
            if (row.method == "bounds-c1") g.lb_c1.add(ratio);
            if (row.method == "bounds-c2") g.lb_c2.add(ratio);
            if (row.method == "bounds-c1c2") g.lb_c1c2.add(ratio);
        }
        if (row.cost && row.method == "greedy") g.greedy.add(*row.cost / o);
        if (row.cost && row.method == "local") g.local.add(*row.cost / o);
    }
    for (auto& [key, count] : skipped)
        warn << "warning: group n=" << key.first << " density=" << key.second << ": "
             << count << " rows without a matching optimum skipped\n";

    std::ostringstream os;
    os << "n,density,instances,lb_none,lb_c1,lb_c2,lb_c1c2,greedy,local\n";
    for (auto& [key, g] : groups) {
        os << key.first << "," << key.second << "," << g.instances << ","
           << g.lb_none.mean() << "," << g.lb_c1.mean() << "," << g.lb_c2.mean() << ","
           << g.lb_c1c2.mean() << "," << g.greedy.mean() << "," << g.local.mean()
           << "\n";
    }
    return os.str();
}

}  // namespace bench
}  // namespace expsearch
