#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "expsearch/graph.hpp"

namespace expsearch {
namespace io {

/// Malformed instance file; the message carries the line number.
class ParseError : public Error {
    using Error::Error;
};

enum class Family { RandomMetric, Euclidean, DensityControlled };

std::string family_name(Family family);
std::optional<Family> family_from_name(const std::string& name);

struct GeneratorSpec {
    Family family = Family::DensityControlled;
    int n = 10;              // TOTAL vertex count, root included
    double density = 1.0;    // edge count / (n choose 2); density-controlled only
    bool weighted = true;    // integer-weight probabilities vs. uniform 1/n
    std::uint64_t seed = 0;
};

struct GenMeta {
    Family family;
    int n;
    double density;
    bool weighted;
    std::uint64_t seed;
};

/// An instance plus the provenance needed to round-trip its file form.
struct InstanceDoc {
    std::string name;
    Instance inst;
    std::optional<GenMeta> meta;
    /// Integer weights a_v when known; probabilities are written as exact
    /// a_v / sum pairs to avoid float round-trip drift.
    std::vector<long> weights;
};

/// Seed-deterministic generation; (family, seed, n, density) fixes the result.
InstanceDoc generate(const GeneratorSpec& spec);

InstanceDoc read_instance(std::istream& in, std::vector<std::string>* warnings = nullptr);
InstanceDoc read_instance_file(const std::string& path,
                               std::vector<std::string>* warnings = nullptr);

void write_instance(std::ostream& out, const InstanceDoc& doc);
void write_instance_file(const std::string& path, const InstanceDoc& doc);

/// Solution files: the search sequence next to its recomputed cost.
void write_solution(std::ostream& out, const InstanceDoc& doc,
                    const ExpandingSearch& search, double cost);
ExpandingSearch read_solution(std::istream& in, const Instance& inst);

}  // namespace io
}  // namespace expsearch
