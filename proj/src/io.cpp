#include "expsearch/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace expsearch {
namespace io {

std::string family_name(Family family) {
    switch (family) {
        case Family::RandomMetric: return "random-metric";
        case Family::Euclidean: return "euclidean";
        case Family::DensityControlled: return "density-controlled";
    }
    return "?";
}

std::optional<Family> family_from_name(const std::string& name) {
    if (name == "random-metric") return Family::RandomMetric;
    if (name == "euclidean") return Family::Euclidean;
    if (name == "density-controlled") return Family::DensityControlled;
    return std::nullopt;
}

namespace {

std::vector<long> draw_weights(std::mt19937_64& rng, int n_total) {
    // Integer weights in [0, 1000]; resample if everything is zero.
    std::uniform_int_distribution<long> dist(0, 1000);
    std::vector<long> w(n_total, 0);
    for (;;) {
        long sum = 0;
        for (int v = 1; v < n_total; ++v) {
            w[v] = dist(rng);
            sum += w[v];
        }
        if (sum > 0) return w;
    }
}

std::vector<double> probs_from_weights(const std::vector<long>& w) {
    long sum = 0;
    for (long x : w) sum += x;
    std::vector<double> p(w.size(), 0.0);
    for (size_t v = 1; v < w.size(); ++v)
        p[v] = static_cast<double>(w[v]) / static_cast<double>(sum);
    return p;
}

std::string default_name(const GeneratorSpec& spec) {
    std::ostringstream os;
    os << family_name(spec.family) << "-n" << spec.n;
    if (spec.family == Family::DensityControlled)
        os << "-d" << static_cast<int>(std::lround(spec.density * 100));
    os << (spec.weighted ? "-w" : "-u") << "-s" << spec.seed;
    return os.str();
}

InstanceDoc finish(const GeneratorSpec& spec, std::vector<double> probs,
                   std::vector<Edge> edges, std::vector<long> weights) {
    InstanceDoc doc;
    doc.name = default_name(spec);
    doc.inst = Instance(std::move(probs), std::move(edges));
    doc.meta = GenMeta{spec.family, spec.n, spec.density, spec.weighted, spec.seed};
    doc.weights = std::move(weights);
    return doc;
}

InstanceDoc generate_density_controlled(const GeneratorSpec& spec) {
    const int n_total = spec.n;
    const long max_edges = static_cast<long>(n_total) * (n_total - 1) / 2;
    const long target = std::lround(spec.density * static_cast<double>(max_edges));
    if (target < n_total - 1)
        throw ValidationError("infeasible density: " + std::to_string(target) +
                              " edges cannot span " + std::to_string(n_total) +
                              " vertices");

    std::mt19937_64 rng(spec.seed);
    std::vector<long> weights = draw_weights(rng, n_total);

    // Integer points in the cube [0,100]^3, rectilinear edge lengths.
    std::uniform_int_distribution<int> coord(0, 100);
    std::vector<std::array<int, 3>> pt(n_total);
    for (int v = 0; v < n_total; ++v) pt[v] = {coord(rng), coord(rng), coord(rng)};
    auto length_of = [&](int u, int v) {
        double d = std::abs(pt[u][0] - pt[v][0]) + std::abs(pt[u][1] - pt[v][1]) +
                   std::abs(pt[u][2] - pt[v][2]);
        return std::max(d, 1.0);
    };

    // Spanning tree from a random edge stream, then random fill-in edges.
    std::vector<int> comp(n_total);
    for (int v = 0; v < n_total; ++v) comp[v] = v;
    auto find = [&](int v) {
        while (comp[v] != v) v = comp[v] = comp[comp[v]];
        return v;
    };
    std::vector<std::vector<bool>> present(n_total, std::vector<bool>(n_total, false));
    std::vector<Edge> edges;
    std::uniform_int_distribution<int> pick(0, n_total - 1);
    while (static_cast<int>(edges.size()) < n_total - 1) {
        int u = pick(rng), v = pick(rng);
        if (u == v) continue;
        if (find(u) == find(v)) continue;
        comp[find(u)] = find(v);
        present[u][v] = present[v][u] = true;
        edges.push_back(Edge{std::min(u, v), std::max(u, v), length_of(u, v)});
    }
    if (target > n_total - 1) {
        std::vector<std::pair<int, int>> absent;
        for (int u = 0; u < n_total; ++u)
            for (int v = u + 1; v < n_total; ++v)
                if (!present[u][v]) absent.emplace_back(u, v);
        std::shuffle(absent.begin(), absent.end(), rng);
        for (long k = 0; k < target - (n_total - 1); ++k) {
            auto [u, v] = absent[k];
            edges.push_back(Edge{u, v, length_of(u, v)});
        }
    }

    std::vector<double> probs = probs_from_weights(weights);
    return finish(spec, std::move(probs), std::move(edges), std::move(weights));
}

InstanceDoc generate_random_metric(const GeneratorSpec& spec) {
    const int n_total = spec.n;
    std::mt19937_64 rng(spec.seed);
    std::vector<long> weights;
    std::vector<double> probs(n_total, 0.0);
    if (spec.weighted) {
        weights = draw_weights(rng, n_total);
        probs = probs_from_weights(weights);
    } else {
        for (int v = 1; v < n_total; ++v) probs[v] = 1.0 / (n_total - 1);
    }

    // Random pairwise lengths, then the metric closure's shortest paths.
    std::uniform_int_distribution<int> len(1, 100);
    std::vector<std::vector<double>> d(n_total, std::vector<double>(n_total, 0.0));
    for (int u = 0; u < n_total; ++u)
        for (int v = u + 1; v < n_total; ++v) d[u][v] = d[v][u] = len(rng);
    for (int k = 0; k < n_total; ++k)
        for (int i = 0; i < n_total; ++i)
            for (int j = 0; j < n_total; ++j)
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);

    std::vector<Edge> edges;
    for (int u = 0; u < n_total; ++u)
        for (int v = u + 1; v < n_total; ++v) edges.push_back(Edge{u, v, d[u][v]});
    return finish(spec, std::move(probs), std::move(edges), std::move(weights));
}

InstanceDoc generate_euclidean(const GeneratorSpec& spec) {
    const int n_total = spec.n;
    std::mt19937_64 rng(spec.seed);
    std::vector<long> weights;
    std::vector<double> probs(n_total, 0.0);
    if (spec.weighted) {
        weights = draw_weights(rng, n_total);
        probs = probs_from_weights(weights);
    } else {
        for (int v = 1; v < n_total; ++v) probs[v] = 1.0 / (n_total - 1);
    }

    std::uniform_int_distribution<int> coord(0, 100);
    std::vector<std::pair<int, int>> pt(n_total);
    for (int v = 0; v < n_total; ++v) pt[v] = {coord(rng), coord(rng)};
    std::vector<Edge> edges;
    for (int u = 0; u < n_total; ++u)
        for (int v = u + 1; v < n_total; ++v) {
            double dx = pt[u].first - pt[v].first;
            double dy = pt[u].second - pt[v].second;
            double rounded = std::round(std::hypot(dx, dy));
            edges.push_back(Edge{u, v, std::max(rounded, 1.0)});
        }
    return finish(spec, std::move(probs), std::move(edges), std::move(weights));
}

}  // namespace

InstanceDoc generate(const GeneratorSpec& spec) {
    if (spec.n < 2) throw ValidationError("generator needs at least two vertices");
    switch (spec.family) {
        case Family::DensityControlled: return generate_density_controlled(spec);
        case Family::RandomMetric: return generate_random_metric(spec);
        case Family::Euclidean: return generate_euclidean(spec);
    }
    throw ValidationError("unknown generator family");
}

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ParseError("line " + std::to_string(line) + ": " + msg);
}

}  // namespace

void write_instance(std::ostream& out, const InstanceDoc& doc) {
    const Instance& inst = doc.inst;
    out << "esp 1\n";
    out << "name " << (doc.name.empty() ? "unnamed" : doc.name) << "\n";
    out << "vertices " << inst.vertex_count() << "\n";
    out << "root " << inst.name(Instance::root()) << "\n";
    long weight_sum = 0;
    for (long w : doc.weights) weight_sum += w;
    for (Vertex v = 0; v < inst.vertex_count(); ++v) {
        out << "vertex " << inst.name(v) << " ";
        if (!doc.weights.empty())
            out << doc.weights[v] << "/" << weight_sum << "\n";
        else
            out << format_double(inst.prob(v)) << "\n";
    }
    for (const Edge& e : inst.edges())
        out << "edge " << inst.name(e.u) << " " << inst.name(e.v) << " "
            << format_double(e.length) << "\n";
    if (doc.meta) {
        out << "gen family=" << family_name(doc.meta->family) << " n=" << doc.meta->n
            << " density=" << format_double(doc.meta->density)
            << " weighted=" << (doc.meta->weighted ? 1 : 0)
            << " seed=" << doc.meta->seed << "\n";
    }
    out << "end\n";
}

void write_instance_file(const std::string& path, const InstanceDoc& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    write_instance(out, doc);
}

InstanceDoc read_instance(std::istream& in, std::vector<std::string>* warnings) {
    InstanceDoc doc;
    std::string line;
    int lineno = 0;
    int declared_vertices = -1;
    std::string root_name;
    std::vector<std::pair<std::string, std::string>> vertex_records;  // (name, prob)
    struct RawEdge {
        std::string u, v;
        double length;
        int line;
    };
    std::vector<RawEdge> edge_records;
    bool saw_magic = false, saw_end = false;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (!saw_magic) {
            int version = 0;
            if (key != "esp" || !(ls >> version)) fail(lineno, "expected 'esp <version>'");
            if (version != 1) fail(lineno, "unsupported schema version");
            saw_magic = true;
            continue;
        }
        if (key == "name") {
            ls >> doc.name;
        } else if (key == "vertices") {
            if (!(ls >> declared_vertices)) fail(lineno, "bad vertex count");
        } else if (key == "root") {
            if (!(ls >> root_name)) fail(lineno, "bad root id");
        } else if (key == "vertex") {
            std::string id, p;
            if (!(ls >> id >> p)) fail(lineno, "vertex needs '<id> <probability>'");
            vertex_records.emplace_back(id, p);
        } else if (key == "edge") {
            std::string u, v;
            double len;
            if (!(ls >> u >> v >> len)) fail(lineno, "edge needs '<u> <v> <length>'");
            if (!(len > 0.0)) fail(lineno, "edge length must be positive");
            edge_records.push_back(RawEdge{u, v, len, lineno});
        } else if (key == "gen") {
            GenMeta meta{Family::DensityControlled, 0, 0.0, false, 0};
            std::string kv;
            bool have_family = false;
            while (ls >> kv) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) fail(lineno, "bad gen entry '" + kv + "'");
                std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
                if (k == "family") {
                    auto fam = family_from_name(v);
                    if (!fam) fail(lineno, "unknown family '" + v + "'");
                    meta.family = *fam;
                    have_family = true;
                } else if (k == "n") meta.n = std::stoi(v);
                else if (k == "density") meta.density = std::stod(v);
                else if (k == "weighted") meta.weighted = v == "1";
                else if (k == "seed") meta.seed = std::stoull(v);
                else fail(lineno, "unknown gen key '" + k + "'");
            }
            if (have_family) doc.meta = meta;
        } else if (key == "end") {
            saw_end = true;
            break;
        } else {
            fail(lineno, "unknown record '" + key + "'");
        }
    }
    if (!saw_magic) throw ParseError("line 1: missing 'esp' header");
    if (!saw_end) fail(lineno, "missing 'end'");
    if (root_name.empty()) fail(lineno, "missing 'root'");
    if (vertex_records.empty()) fail(lineno, "no vertices");
    if (declared_vertices >= 0 &&
        declared_vertices != static_cast<int>(vertex_records.size()))
        fail(lineno, "vertex count " + std::to_string(vertex_records.size()) +
                         " does not match declared " +
                         std::to_string(declared_vertices));

    // Root first, remaining vertices in file order.
    std::map<std::string, Vertex> id_of;
    std::vector<std::string> names;
    std::vector<double> probs;
    std::vector<long> weights;
    bool all_rational = true;
    long weight_sum = -1;

    auto add_vertex = [&](const std::string& id, const std::string& p) {
        if (id_of.count(id)) throw ParseError("duplicate vertex id '" + id + "'");
        id_of[id] = static_cast<Vertex>(names.size());
        names.push_back(id);
        auto slash = p.find('/');
        if (slash != std::string::npos) {
            long num = std::stol(p.substr(0, slash));
            long den = std::stol(p.substr(slash + 1));
            if (den <= 0) throw ParseError("vertex " + id + ": bad weight denominator");
            if (weight_sum < 0) weight_sum = den;
            if (weight_sum != den) all_rational = false;
            weights.push_back(num);
            probs.push_back(static_cast<double>(num) / static_cast<double>(den));
        } else {
            all_rational = false;
            probs.push_back(std::stod(p));
        }
    };
    for (auto& [id, p] : vertex_records)
        if (id == root_name) add_vertex(id, p);
    if (names.empty()) throw ParseError("root '" + root_name + "' has no vertex record");
    for (auto& [id, p] : vertex_records)
        if (id != root_name) add_vertex(id, p);

    double total = 0.0;
    for (double p : probs) total += p;
    if (std::abs(total - 1.0) > 1e-9)
        throw ParseError("probabilities sum to " + format_double(total) +
                         ", expected 1 within 1e-9");

    std::map<std::pair<Vertex, Vertex>, int> seen_edges;
    std::vector<Edge> edges;
    for (const RawEdge& e : edge_records) {
        auto iu = id_of.find(e.u), iv = id_of.find(e.v);
        if (iu == id_of.end()) fail(e.line, "edge references unknown vertex '" + e.u + "'");
        if (iv == id_of.end()) fail(e.line, "edge references unknown vertex '" + e.v + "'");
        auto key = std::minmax(iu->second, iv->second);
        if (auto it = seen_edges.find(key); it != seen_edges.end()) {
            if (warnings)
                warnings->push_back("line " + std::to_string(e.line) +
                                    ": duplicate edge {" + e.u + "," + e.v +
                                    "} collapsed to minimum length");
        } else {
            seen_edges.emplace(key, 1);
        }
        edges.push_back(Edge{iu->second, iv->second, e.length});
    }

    doc.inst = Instance(std::move(probs), std::move(edges), std::move(names));
    if (all_rational && weight_sum > 0) doc.weights = std::move(weights);
    return doc;
}

InstanceDoc read_instance_file(const std::string& path,
                               std::vector<std::string>* warnings) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    try {
        return read_instance(in, warnings);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_solution(std::ostream& out, const InstanceDoc& doc,
                    const ExpandingSearch& search, double cost) {
    out << "esp-solution 1\n";
    out << "instance " << (doc.name.empty() ? "unnamed" : doc.name) << "\n";
    out << "cost " << format_double(cost) << "\n";
    const Instance& inst = doc.inst;
    for (auto [a, b] : search.steps)
        out << "step " << inst.name(a) << " " << inst.name(b) << "\n";
    out << "end\n";
}

ExpandingSearch read_solution(std::istream& in, const Instance& inst) {
    std::map<std::string, Vertex> id_of;
    for (Vertex v = 0; v < inst.vertex_count(); ++v) id_of[inst.name(v)] = v;
    ExpandingSearch search;
    std::string line;
    int lineno = 0;
    bool saw_magic = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (!saw_magic) {
            if (key != "esp-solution") fail(lineno, "expected 'esp-solution'");
            saw_magic = true;
            continue;
        }
        if (key == "step") {
            std::string a, b;
            if (!(ls >> a >> b)) fail(lineno, "step needs two vertex ids");
            if (!id_of.count(a) || !id_of.count(b)) fail(lineno, "unknown vertex id");
            search.steps.emplace_back(id_of[a], id_of[b]);
        } else if (key == "end") {
            return search;
        }
        // other records (instance, cost) are informational
    }
    fail(lineno, "missing 'end'");
}

}  // namespace io
}  // namespace expsearch
