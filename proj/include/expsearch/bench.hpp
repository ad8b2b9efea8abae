#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "expsearch/io.hpp"

namespace expsearch {
namespace bench {

/// One CSV row of the benchmark schema:
/// instance,method,cost,lower_bound,gap,nodes,cuts_c1,cuts_c2,wall_ms
struct ResultRow {
    std::string instance;
    std::string method;
    std::optional<double> cost;
    std::optional<double> lower_bound;
    std::optional<double> gap;
    std::optional<long> nodes;
    std::optional<long> cuts_c1;
    std::optional<long> cuts_c2;
    double wall_ms = 0.0;
};

std::string csv_header();
std::string to_csv(const ResultRow& row);
std::vector<ResultRow> parse_csv(std::istream& in);

struct RunOptions {
    double time_limit_s = 1200.0;
    double epsilon = -1.0;
    bool warm_start = true;
    /// When set, the solver's sequence is written here for audit.
    std::string solution_path;
};

/// Runs one method ("exact", "greedy", "local", "oracle", "bounds-none",
/// "bounds-c1", "bounds-c2", "bounds-c1c2") on one instance. Costs are
/// recomputed from the emitted sequence, never taken from the solver.
ResultRow run_method(const io::InstanceDoc& doc, const std::string& method,
                     const RunOptions& options);

/// Per-(n, density) means of bound/optimum and heuristic/optimum ratios.
/// Groups without an exact row are skipped with a warning on `warn`.
std::string ratio_report(const std::vector<ResultRow>& rows, std::ostream& warn);

}  // namespace bench
}  // namespace expsearch
