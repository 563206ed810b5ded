#include "dwloa/refinement.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <unordered_map>

#include "dwloa/error.hpp"
#include "dwloa/parallel.hpp"

namespace dwloa {

namespace {

struct SignatureHash {
    std::size_t operator()(const std::vector<NodeId>& s) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ull ^ s.size();
        for (NodeId c : s) {
            h ^= c + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

}  // namespace

int ColorHierarchy::level(NodeId node) const {
    if (node >= num_nodes()) throw IndexError("hierarchy node out of range");
    auto it = std::upper_bound(level_offset_.begin(), level_offset_.end(), node);
    return static_cast<int>(it - level_offset_.begin()) - 1;
}

NodeId ColorHierarchy::color(int i, std::size_t g, VertexId v) const {
    if (i < 0 || i > h()) throw IndexError("refinement level out of range");
    if (g >= num_graphs()) throw IndexError("graph index out of range");
    if (v >= graph_sizes_[g]) throw IndexError("vertex index out of range");
    return colors_[i][vertex_offset_[g] + v];
}

std::int32_t ColorHierarchy::count(NodeId node, std::size_t g) const {
    if (node >= num_nodes()) throw IndexError("hierarchy node out of range");
    auto c = counts(node);
    auto it = std::lower_bound(c.begin(), c.end(), g,
                               [](const CountEntry& e, std::size_t gg) { return e.graph < gg; });
    return (it != c.end() && it->graph == g) ? it->count : 0;
}

void ColorHierarchy::set_weights(std::vector<double> weights, double root_weight) {
    if (weights.size() != num_nodes())
        throw DimensionError("expected " + std::to_string(num_nodes()) + " node weights, got " +
                             std::to_string(weights.size()));
    auto bad = [](double w) { return !std::isfinite(w) || w < 0.0; };
    if (bad(root_weight) || std::any_of(weights.begin(), weights.end(), bad))
        throw NumericError("hierarchy weights must be finite and non-negative");
    weights_ = std::move(weights);
    root_weight_ = root_weight;
}

void ColorHierarchy::set_uniform_weights(double value, double root_weight) {
    set_weights(std::vector<double>(num_nodes(), value), root_weight);
}

ColorHierarchy refine_colors(const GraphDataset& dataset, int h, unsigned jobs) {
    if (h < 0) throw ConfigError("refinement iterations must be non-negative");
    ColorHierarchy hier;
    const std::size_t num_graphs = dataset.size();
    hier.graph_sizes_.resize(num_graphs);
    hier.vertex_offset_.resize(num_graphs + 1, 0);
    for (std::size_t g = 0; g < num_graphs; ++g) {
        hier.graph_sizes_[g] = dataset.graphs[g].num_vertices();
        hier.vertex_offset_[g + 1] = hier.vertex_offset_[g] + hier.graph_sizes_[g];
    }
    const std::size_t total = hier.vertex_offset_.back();
    hier.colors_.assign(h + 1, std::vector<NodeId>(total));
    hier.level_offset_.push_back(0);

    // Level 0: initial colors numbered by first occurrence.
    {
        std::unordered_map<Color, NodeId> ids;
        for (std::size_t g = 0; g < num_graphs; ++g) {
            const auto& graph = dataset.graphs[g];
            for (VertexId v = 0; v < graph.num_vertices(); ++v) {
                auto [it, fresh] = ids.try_emplace(graph.initial_color[v],
                                                   static_cast<NodeId>(hier.parent_.size()));
                if (fresh) hier.parent_.push_back(-1);
                hier.colors_[0][hier.vertex_offset_[g] + v] = it->second;
            }
        }
        hier.level_offset_.push_back(static_cast<NodeId>(hier.parent_.size()));
    }

    std::vector<std::vector<std::vector<NodeId>>> signatures(num_graphs);
    for (int i = 1; i <= h; ++i) {
        const auto& prev = hier.colors_[i - 1];
        parallel::for_each_index(
            num_graphs,
            [&](std::size_t g) {
                const auto& graph = dataset.graphs[g];
                const std::size_t base = hier.vertex_offset_[g];
                auto& sigs = signatures[g];
                sigs.resize(graph.num_vertices());
                for (VertexId v = 0; v < graph.num_vertices(); ++v) {
                    auto& s = sigs[v];
                    s.clear();
                    s.reserve(graph.adjacency[v].size() + 1);
                    s.push_back(prev[base + v]);
                    for (VertexId u : graph.adjacency[v]) s.push_back(prev[base + u]);
                    std::sort(s.begin() + 1, s.end());
                }
            },
            jobs);

        // Sequential id assignment in dataset scan order.
        std::unordered_map<std::vector<NodeId>, NodeId, SignatureHash> ids;
        auto& cur = hier.colors_[i];
        for (std::size_t g = 0; g < num_graphs; ++g) {
            const std::size_t base = hier.vertex_offset_[g];
            for (VertexId v = 0; v < hier.graph_sizes_[g]; ++v) {
                auto& s = signatures[g][v];
                auto it = ids.find(s);
                if (it == ids.end()) {
                    const auto id = static_cast<NodeId>(hier.parent_.size());
                    hier.parent_.push_back(s.front());
                    it = ids.emplace(std::move(s), id).first;
                }
                cur[base + v] = it->second;
            }
        }
        hier.level_offset_.push_back(static_cast<NodeId>(hier.parent_.size()));
    }

    // Per-node counts, CSR with entries sorted by graph.
    const std::size_t num_nodes = hier.parent_.size();
    std::vector<std::vector<std::pair<NodeId, std::int32_t>>> per_graph(num_graphs);
    parallel::for_each_index(
        num_graphs,
        [&](std::size_t g) {
            std::vector<NodeId> cs;
            cs.reserve(hier.graph_sizes_[g] * (h + 1));
            for (int i = 0; i <= h; ++i)
                for (std::size_t t = hier.vertex_offset_[g]; t < hier.vertex_offset_[g + 1]; ++t)
                    cs.push_back(hier.colors_[i][t]);
            std::sort(cs.begin(), cs.end());
            auto& out = per_graph[g];
            for (std::size_t a = 0; a < cs.size();) {
                std::size_t b = a;
                while (b < cs.size() && cs[b] == cs[a]) ++b;
                out.emplace_back(cs[a], static_cast<std::int32_t>(b - a));
                a = b;
            }
        },
        jobs);
    hier.count_offset_.assign(num_nodes + 1, 0);
    for (const auto& pg : per_graph)
        for (auto [node, c] : pg) ++hier.count_offset_[node + 1];
    for (std::size_t k = 0; k < num_nodes; ++k) hier.count_offset_[k + 1] += hier.count_offset_[k];
    hier.entries_.resize(hier.count_offset_.back());
    std::vector<std::size_t> fill(hier.count_offset_.begin(), hier.count_offset_.end() - 1);
    for (std::size_t g = 0; g < num_graphs; ++g)
        for (auto [node, c] : per_graph[g])
            hier.entries_[fill[node]++] = CountEntry{static_cast<std::uint32_t>(g), c};

    hier.set_uniform_weights(1.0, 0.0);
    return hier;
}

double vertex_similarity(const ColorHierarchy& hier, std::size_t g, VertexId v, std::size_t g2,
                         VertexId v2) {
    double k = hier.root_weight();
    for (int i = 0; i <= hier.h(); ++i) {
        const NodeId a = hier.color(i, g, v);
        const NodeId b = hier.color(i, g2, v2);
        if (a != b) break;  // refinement never re-merges colors
        k += hier.weight(a);
    }
    return k;
}

void write_hierarchy(std::ostream& out, const ColorHierarchy& hier) {
    out << "# level,node,parent,weight,counts(graph:count;...)\n";
    out << "-1,root,-," << hier.root_weight() << ",\n";
    for (NodeId node = 0; node < hier.num_nodes(); ++node) {
        out << hier.level(node) << ',' << node << ',';
        if (hier.parent(node) < 0)
            out << "root";
        else
            out << hier.parent(node);
        out << ',' << hier.weight(node) << ',';
        bool first = true;
        for (const auto& e : hier.counts(node)) {
            if (!first) out << ';';
            out << e.graph << ':' << e.count;
            first = false;
        }
        out << '\n';
    }
}

}  // namespace dwloa
