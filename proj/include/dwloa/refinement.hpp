#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "dwloa/graph.hpp"

namespace dwloa {

/// Hierarchy node id. Every (level, color) pair is its own node; ids are
/// global across levels and level i occupies a contiguous id range.
using NodeId = std::uint32_t;

struct CountEntry {
    std::uint32_t graph;
    std::int32_t count;
};

/// The rooted tree produced by color refinement over a whole dataset.
///
/// Level-0 nodes are the initial colors and hang below a synthetic root.
/// A level-i node's parent is the level-(i-1) color its vertices carried
/// before refinement. For each node the hierarchy keeps the number of
/// vertices of every graph that hold that color (only non-zero entries,
/// sorted by graph), plus a non-negative weight. The root's weight is kept
/// separately and defaults to 0.
class ColorHierarchy {
public:
    int h() const { return static_cast<int>(level_offset_.size()) - 2; }
    std::size_t num_graphs() const { return graph_sizes_.size(); }
    std::size_t num_nodes() const { return parent_.size(); }
    std::size_t graph_size(std::size_t g) const { return graph_sizes_.at(g); }
    std::span<const std::size_t> graph_sizes() const { return graph_sizes_; }

    /// Nodes of level i are [level_begin(i), level_end(i)).
    NodeId level_begin(int i) const { return level_offset_.at(i); }
    NodeId level_end(int i) const { return level_offset_.at(i + 1); }
    std::size_t level_size(int i) const { return level_end(i) - level_begin(i); }
    int level(NodeId node) const;

    /// Parent node, or -1 when the parent is the root.
    std::int64_t parent(NodeId node) const { return parent_.at(node); }

    /// Color (node id) of vertex v of graph g after i refinement rounds.
    NodeId color(int i, std::size_t g, VertexId v) const;

    std::span<const CountEntry> counts(NodeId node) const {
        return {entries_.data() + count_offset_[node], entries_.data() + count_offset_[node + 1]};
    }
    std::int32_t count(NodeId node, std::size_t g) const;

    std::span<const double> weights() const { return weights_; }
    double weight(NodeId node) const { return weights_.at(node); }
    double root_weight() const { return root_weight_; }

    /// Installs node weights (one per non-root node). Throws on negative or
    /// non-finite values or on a length mismatch.
    void set_weights(std::vector<double> weights, double root_weight = 0.0);
    void set_uniform_weights(double value = 1.0, double root_weight = 0.0);

    friend ColorHierarchy refine_colors(const GraphDataset& dataset, int h, unsigned jobs);

private:
    std::vector<std::size_t> graph_sizes_;
    std::vector<std::size_t> vertex_offset_;  // first global vertex of graph g
    std::vector<NodeId> level_offset_;        // h + 2 entries
    std::vector<std::int64_t> parent_;
    std::vector<std::vector<NodeId>> colors_;  // [level][global vertex]
    std::vector<std::size_t> count_offset_;    // CSR over nodes
    std::vector<CountEntry> entries_;
    std::vector<double> weights_;
    double root_weight_ = 0.0;
};

/// Runs h rounds of color refinement jointly over all graphs with one
/// injective signature -> color mapping, keeping every level even after the
/// partition stabilises. Weights start uniform (1) with root weight 0.
ColorHierarchy refine_colors(const GraphDataset& dataset, int h, unsigned jobs = 0);

/// Base kernel on vertices induced by the weighted hierarchy:
/// root weight + sum over levels of the shared color's weight while the two
/// vertices still share a color. Throws IndexError for invalid references.
double vertex_similarity(const ColorHierarchy& hier, std::size_t g, VertexId v, std::size_t g2,
                         VertexId v2);

/// Text dump, one row per node: level, node, parent, weight, graph:count list.
void write_hierarchy(std::ostream& out, const ColorHierarchy& hier);

}  // namespace dwloa
