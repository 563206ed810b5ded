#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dwloa {

using VertexId = std::uint32_t;
using Color = std::uint32_t;

/// Simple undirected graph. Adjacency lists are sorted, duplicate free and
/// symmetric; there are no self-loops.
struct Graph {
    std::size_t id = 0;
    std::vector<std::vector<VertexId>> adjacency;
    std::vector<Color> initial_color;

    std::size_t num_vertices() const { return adjacency.size(); }
    std::size_t num_edges() const;

    /// Builds a graph from an undirected edge list. Both orientations of an
    /// edge may appear; duplicates collapse. Self-loops and out-of-range
    /// endpoints throw FormatError. Initial colors default to 0.
    static Graph from_edges(std::size_t id, std::size_t num_vertices,
                            const std::vector<std::pair<VertexId, VertexId>>& edges);
};

/// Binary-labelled collection of graphs. Labels are -1 or +1.
struct GraphDataset {
    std::string name;
    std::vector<Graph> graphs;
    std::vector<int> labels;

    std::size_t size() const { return graphs.size(); }
    std::size_t total_vertices() const;
};

/// Checks the dataset invariants (two classes, label count, graph invariants).
/// Throws UnsupportedDatasetError or FormatError.
void validate(const GraphDataset& dataset);

/// Reads `<name>_A.txt`, `<name>_graph_indicator.txt`, `<name>_graph_labels.txt`
/// and, when use_node_labels is set, `<name>_node_labels.txt` from directory.
/// Global 1-based vertex ids become 0-based per-graph ids. Class labels are
/// remapped so that the smaller original label becomes -1.
GraphDataset load_tudataset(const std::filesystem::path& directory, const std::string& name,
                            bool use_node_labels = false);

/// Writes the dataset in the same format (labels as -1/+1, node labels from
/// initial colors). Loading the result gives back an identical dataset.
void write_tudataset(const GraphDataset& dataset, const std::filesystem::path& directory,
                     const std::string& name);

struct DatasetStats {
    std::size_t num_graphs = 0;
    std::size_t num_negative = 0;
    std::size_t num_positive = 0;
    std::size_t total_vertices = 0;
    std::size_t total_edges = 0;
    std::size_t min_vertices = 0;
    std::size_t max_vertices = 0;
    std::map<std::size_t, std::size_t> degree_histogram;  // degree -> vertex count
};

DatasetStats dataset_stats(const GraphDataset& dataset);
std::string format_stats(const std::string& name, const DatasetStats& stats);

bool operator==(const Graph& a, const Graph& b);
bool operator==(const GraphDataset& a, const GraphDataset& b);

}  // namespace dwloa
