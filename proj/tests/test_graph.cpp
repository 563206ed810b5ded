#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"

#include "dwloa/error.hpp"
#include "dwloa/graph.hpp"

using namespace dwloa;
using testutil::write_file;

namespace {

// Two triangles-ish graphs: graph 1 = vertices 1..3, graph 2 = vertices 4..5.
void write_small(const std::filesystem::path& dir, const std::string& edges, const std::string& labels = "1\n-1\n",
                 const std::string& indicator = "1\n1\n1\n2\n2\n") {
    write_file(dir / "S_A.txt", edges);
    write_file(dir / "S_graph_indicator.txt", indicator);
    write_file(dir / "S_graph_labels.txt", labels);
}

}  // namespace

TEST_CASE("MUTAG loads with two classes") {
    const auto ds = load_tudataset(DWLOA_DATA_DIR "/MUTAG", "MUTAG");
    CHECK(ds.size() == 188);
    const auto stats = dataset_stats(ds);
    CHECK(stats.num_negative + stats.num_positive == 188);
    for (int y : ds.labels) CHECK((y == 1 || y == -1));
    for (const auto& g : ds.graphs)
        for (auto c : g.initial_color) CHECK(c == 0);
}

TEST_CASE("edge list is symmetrized and duplicates collapse") {
    const auto dir = testutil::temp_dir("dup");
    write_small(dir, "1, 2\n2, 1\n1, 2\n2, 3\n4, 5\n");
    const auto ds = load_tudataset(dir, "S");
    REQUIRE(ds.size() == 2);
    CHECK(ds.graphs[0].num_edges() == 2);
    CHECK(ds.graphs[0].adjacency[1] == std::vector<VertexId>{0, 2});
    CHECK(ds.graphs[1].num_edges() == 1);
    // the smaller original label maps to -1
    CHECK(ds.labels == std::vector<int>{1, -1});
}

TEST_CASE("empty edge file yields edgeless graphs") {
    const auto dir = testutil::temp_dir("empty");
    write_small(dir, "");
    const auto ds = load_tudataset(dir, "S");
    CHECK(ds.graphs[0].num_vertices() == 3);
    CHECK(ds.graphs[0].num_edges() == 0);
    CHECK(ds.graphs[1].num_edges() == 0);
}

TEST_CASE("self-loops are rejected") {
    const auto dir = testutil::temp_dir("loop");
    write_small(dir, "1, 2\n3, 3\n");
    CHECK_THROWS_AS(load_tudataset(dir, "S"), FormatError);
    CHECK_THROWS_AS(Graph::from_edges(0, 2, {{1, 1}}), FormatError);
}

TEST_CASE("edges crossing graphs are rejected") {
    const auto dir = testutil::temp_dir("cross");
    write_small(dir, "1, 4\n");
    CHECK_THROWS_AS(load_tudataset(dir, "S"), FormatError);
}

TEST_CASE("missing files name the file") {
    const auto dir = testutil::temp_dir("missing");
    write_small(dir, "1, 2\n");
    std::filesystem::remove(dir / "S_graph_labels.txt");
    try {
        load_tudataset(dir, "S");
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        CHECK(std::string(e.what()).find("S_graph_labels.txt") != std::string::npos);
    }
    CHECK_THROWS_AS(load_tudataset(dir / "nope", "S"), LoadError);
    // node labels are only needed when requested
    CHECK_THROWS_AS(load_tudataset(dir, "S", true), LoadError);
}

TEST_CASE("non-contiguous graph indicator is a format error") {
    const auto dir = testutil::temp_dir("noncontig");
    write_small(dir, "1, 2\n", "1\n-1\n", "1\n2\n1\n2\n2\n");
    CHECK_THROWS_AS(load_tudataset(dir, "S"), FormatError);
}

TEST_CASE("class count other than two is unsupported") {
    const auto dir = testutil::temp_dir("classes");
    write_small(dir, "1, 2\n", "1\n2\n3\n", "1\n1\n2\n2\n3\n");
    CHECK_THROWS_AS(load_tudataset(dir, "S"), UnsupportedDatasetError);
    write_small(dir, "1, 2\n", "1\n1\n");
    CHECK_THROWS_AS(load_tudataset(dir, "S"), UnsupportedDatasetError);
}

TEST_CASE("labels {0, 1} and {1, 2} map to {-1, +1}") {
    const auto dir = testutil::temp_dir("remap");
    write_small(dir, "1, 2\n", "0\n1\n");
    CHECK(load_tudataset(dir, "S").labels == std::vector<int>{-1, 1});
    write_small(dir, "1, 2\n", "2\n1\n");
    CHECK(load_tudataset(dir, "S").labels == std::vector<int>{1, -1});
    // numeric, not lexicographic, ordering
    write_small(dir, "1, 2\n", "10\n9\n");
    CHECK(load_tudataset(dir, "S").labels == std::vector<int>{1, -1});
}

TEST_CASE("node labels become dense initial colors when enabled") {
    const auto dir = testutil::temp_dir("nodelabels");
    write_small(dir, "1, 2\n2, 3\n4, 5\n");
    write_file(dir / "S_node_labels.txt", "7\n3\n7\n3\n9\n");
    const auto ds = load_tudataset(dir, "S", true);
    CHECK(ds.graphs[0].initial_color == std::vector<Color>{1, 0, 1});
    CHECK(ds.graphs[1].initial_color == std::vector<Color>{0, 2});
    const auto plain = load_tudataset(dir, "S");
    CHECK(plain.graphs[0].initial_color == std::vector<Color>{0, 0, 0});
}

TEST_CASE("write then reload round-trips") {
    const auto ds = testutil::random_dataset(11, 12, 1, 9);
    const auto dir = testutil::temp_dir("roundtrip");
    write_tudataset(ds, dir, "R");
    auto back = load_tudataset(dir, "R");
    back.name = ds.name;
    CHECK(back == ds);
}

TEST_CASE("stats text lists counts") {
    const auto ds = testutil::make_dataset({testutil::path_graph(3), testutil::star_graph(3)}, {-1, 1});
    const auto s = dataset_stats(ds);
    CHECK(s.total_vertices == 7);
    CHECK(s.total_edges == 5);
    CHECK(s.min_vertices == 3);
    CHECK(s.max_vertices == 4);
    const auto text = format_stats("toy", s);
    CHECK(text.find("toy") != std::string::npos);
    CHECK(text.find("7") != std::string::npos);
}
