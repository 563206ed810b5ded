#include "dwloa/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

#include "dwloa/error.hpp"

namespace dwloa {

std::size_t Graph::num_edges() const {
    std::size_t deg = 0;
    for (const auto& nb : adjacency) deg += nb.size();
    return deg / 2;
}

Graph Graph::from_edges(std::size_t id, std::size_t num_vertices,
                        const std::vector<std::pair<VertexId, VertexId>>& edges) {
    Graph g;
    g.id = id;
    g.adjacency.resize(num_vertices);
    g.initial_color.assign(num_vertices, 0);
    for (auto [u, v] : edges) {
        if (u >= num_vertices || v >= num_vertices)
            throw FormatError("graph " + std::to_string(id) + ": edge endpoint out of range");
        if (u == v)
            throw FormatError("graph " + std::to_string(id) + ": self-loop at vertex " +
                              std::to_string(u));
        g.adjacency[u].push_back(v);
        g.adjacency[v].push_back(u);
    }
    for (auto& nb : g.adjacency) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    return g;
}

std::size_t GraphDataset::total_vertices() const {
    std::size_t n = 0;
    for (const auto& g : graphs) n += g.num_vertices();
    return n;
}

void validate(const GraphDataset& dataset) {
    if (dataset.labels.size() != dataset.graphs.size())
        throw FormatError("label count does not match graph count");
    std::set<int> classes(dataset.labels.begin(), dataset.labels.end());
    if (classes != std::set<int>{-1, 1})
        throw UnsupportedDatasetError("dataset must contain exactly the classes -1 and +1");
    for (const auto& g : dataset.graphs) {
        if (g.initial_color.size() != g.num_vertices())
            throw FormatError("graph " + std::to_string(g.id) + ": initial colors missing");
        for (VertexId v = 0; v < g.num_vertices(); ++v) {
            for (VertexId u : g.adjacency[v]) {
                if (u == v || u >= g.num_vertices() ||
                    !std::binary_search(g.adjacency[u].begin(), g.adjacency[u].end(), v))
                    throw FormatError("graph " + std::to_string(g.id) + ": adjacency not symmetric");
            }
        }
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <class T>
T parse_number(std::string_view s, const std::filesystem::path& file, std::size_t line) {
    s = trim(s);
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw FormatError(file.string() + ":" + std::to_string(line) + ": expected a number, got '" +
                          std::string(s) + "'");
    return value;
}

std::vector<std::string> read_lines(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw LoadError("cannot open " + file.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        lines.push_back(line);
    }
    return lines;
}

std::filesystem::path member(const std::filesystem::path& dir, const std::string& name,
                             const char* suffix) {
    return dir / (name + "_" + suffix + ".txt");
}

// Numeric order when both labels are integers, text order otherwise.
bool label_less(const std::string& a, const std::string& b) {
    long long x = 0, y = 0;
    auto ra = std::from_chars(a.data(), a.data() + a.size(), x);
    auto rb = std::from_chars(b.data(), b.data() + b.size(), y);
    if (ra.ec == std::errc() && ra.ptr == a.data() + a.size() && rb.ec == std::errc() &&
        rb.ptr == b.data() + b.size())
        return x < y;
    return a < b;
}

}  // namespace

GraphDataset load_tudataset(const std::filesystem::path& directory, const std::string& name,
                            bool use_node_labels) {
    if (!std::filesystem::is_directory(directory))
        throw LoadError("dataset directory not found: " + directory.string());
    const auto a_file = member(directory, name, "A");
    const auto ind_file = member(directory, name, "graph_indicator");
    const auto lab_file = member(directory, name, "graph_labels");
    const auto node_file = member(directory, name, "node_labels");
    for (const auto& f : {a_file, ind_file, lab_file})
        if (!std::filesystem::exists(f)) throw LoadError("missing file: " + f.string());
    if (use_node_labels && !std::filesystem::exists(node_file))
        throw LoadError("missing file: " + node_file.string());

    // Graph labels.
    std::vector<std::string> raw_labels;
    for (auto& l : read_lines(lab_file)) raw_labels.emplace_back(trim(l));
    std::vector<std::string> distinct = raw_labels;
    std::sort(distinct.begin(), distinct.end(), label_less);
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() != 2)
        throw UnsupportedDatasetError(name + ": expected exactly 2 class labels, found " +
                                      std::to_string(distinct.size()));
    const std::size_t num_graphs = raw_labels.size();

    // Graph indicator: vertices of each graph form one contiguous block, ids 1..G.
    const auto ind_lines = read_lines(ind_file);
    std::vector<std::size_t> graph_of(ind_lines.size());
    std::vector<std::size_t> first_vertex(num_graphs + 1, 0);
    std::vector<std::size_t> sizes(num_graphs, 0);
    std::size_t current = 0;
    for (std::size_t t = 0; t < ind_lines.size(); ++t) {
        auto gid = parse_number<std::size_t>(ind_lines[t], ind_file, t + 1);
        if (gid < 1 || gid > num_graphs)
            throw FormatError(ind_file.string() + ":" + std::to_string(t + 1) +
                              ": graph id out of range");
        if (gid != current && gid != current + 1)
            throw FormatError(ind_file.string() + ":" + std::to_string(t + 1) +
                              ": vertex ids of a graph are not contiguous");
        if (gid == current + 1) {
            first_vertex[gid - 1] = t;
            current = gid;
        }
        graph_of[t] = gid - 1;
        ++sizes[gid - 1];
    }
    if (current != num_graphs)
        throw FormatError(ind_file.string() + ": graph without vertices (ids not contiguous)");

    // Edges.
    std::vector<std::vector<std::pair<VertexId, VertexId>>> edges(num_graphs);
    const auto a_lines = read_lines(a_file);
    for (std::size_t l = 0; l < a_lines.size(); ++l) {
        std::string_view line = a_lines[l];
        const auto comma = line.find(',');
        if (comma == std::string_view::npos)
            throw FormatError(a_file.string() + ":" + std::to_string(l + 1) + ": expected 'i, j'");
        auto i = parse_number<std::size_t>(line.substr(0, comma), a_file, l + 1);
        auto j = parse_number<std::size_t>(line.substr(comma + 1), a_file, l + 1);
        if (i < 1 || j < 1 || i > graph_of.size() || j > graph_of.size())
            throw FormatError(a_file.string() + ":" + std::to_string(l + 1) +
                              ": vertex id out of range");
        const std::size_t g = graph_of[i - 1];
        if (graph_of[j - 1] != g)
            throw FormatError(a_file.string() + ":" + std::to_string(l + 1) +
                              ": edge connects different graphs");
        if (i == j)
            throw FormatError(a_file.string() + ":" + std::to_string(l + 1) + ": self-loop at vertex " +
                              std::to_string(i));
        edges[g].emplace_back(static_cast<VertexId>(i - 1 - first_vertex[g]),
                              static_cast<VertexId>(j - 1 - first_vertex[g]));
    }

    GraphDataset ds;
    ds.name = name;
    ds.graphs.reserve(num_graphs);
    for (std::size_t g = 0; g < num_graphs; ++g)
        ds.graphs.push_back(Graph::from_edges(g, sizes[g], edges[g]));
    for (const auto& l : raw_labels) ds.labels.push_back(l == distinct[0] ? -1 : 1);

    if (use_node_labels) {
        const auto lines = read_lines(node_file);
        if (lines.size() != graph_of.size())
            throw FormatError(node_file.string() + ": expected one label per vertex");
        std::vector<long long> raw(lines.size());
        for (std::size_t t = 0; t < lines.size(); ++t)
            raw[t] = parse_number<long long>(lines[t], node_file, t + 1);
        std::vector<long long> uniq = raw;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (std::size_t t = 0; t < raw.size(); ++t) {
            const auto g = graph_of[t];
            const auto c = std::lower_bound(uniq.begin(), uniq.end(), raw[t]) - uniq.begin();
            ds.graphs[g].initial_color[t - first_vertex[g]] = static_cast<Color>(c);
        }
    }
    return ds;
}

void write_tudataset(const GraphDataset& dataset, const std::filesystem::path& directory,
                     const std::string& name) {
    std::filesystem::create_directories(directory);
    auto open = [&](const char* suffix) {
        std::ofstream out(member(directory, name, suffix));
        if (!out) throw Error("cannot write " + member(directory, name, suffix).string());
        return out;
    };
    auto a = open("A");
    auto ind = open("graph_indicator");
    auto lab = open("graph_labels");
    auto nodes = open("node_labels");
    std::size_t offset = 0;
    for (std::size_t g = 0; g < dataset.size(); ++g) {
        const auto& graph = dataset.graphs[g];
        for (VertexId v = 0; v < graph.num_vertices(); ++v) {
            ind << g + 1 << '\n';
            nodes << graph.initial_color[v] << '\n';
            for (VertexId u : graph.adjacency[v]) a << offset + v + 1 << ", " << offset + u + 1 << '\n';
        }
        offset += graph.num_vertices();
        lab << dataset.labels[g] << '\n';
    }
}

DatasetStats dataset_stats(const GraphDataset& dataset) {
    DatasetStats s;
    s.num_graphs = dataset.size();
    for (int y : dataset.labels) (y < 0 ? s.num_negative : s.num_positive)++;
    bool first = true;
    for (const auto& g : dataset.graphs) {
        const auto n = g.num_vertices();
        s.total_vertices += n;
        s.total_edges += g.num_edges();
        s.min_vertices = first ? n : std::min(s.min_vertices, n);
        s.max_vertices = first ? n : std::max(s.max_vertices, n);
        first = false;
        for (const auto& nb : g.adjacency) ++s.degree_histogram[nb.size()];
    }
    return s;
}

std::string format_stats(const std::string& name, const DatasetStats& s) {
    std::ostringstream out;
    out << "dataset        " << name << '\n'
        << "graphs         " << s.num_graphs << '\n'
        << "classes        -1: " << s.num_negative << "  +1: " << s.num_positive << '\n'
        << "vertices       " << s.total_vertices << " (min " << s.min_vertices << ", max "
        << s.max_vertices << ")\n"
        << "edges          " << s.total_edges << '\n'
        << "degree histogram\n";
    for (auto [deg, count] : s.degree_histogram) out << "  " << deg << ": " << count << '\n';
    return out.str();
}

bool operator==(const Graph& a, const Graph& b) {
    return a.id == b.id && a.adjacency == b.adjacency && a.initial_color == b.initial_color;
}

bool operator==(const GraphDataset& a, const GraphDataset& b) {
    return a.graphs == b.graphs && a.labels == b.labels;
}

}  // namespace dwloa
