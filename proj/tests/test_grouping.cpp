#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"

#include "dwloa/grouping.hpp"
#include "dwloa/refinement.hpp"

using namespace dwloa;

namespace {

SparsePoints blobs(std::uint64_t seed, std::size_t per, std::size_t centers) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 0.1);
    SparsePoints p;
    p.dim = 2;
    for (std::size_t c = 0; c < centers; ++c)
        for (std::size_t i = 0; i < per; ++i) {
            const double pt[] = {10.0 * c + nd(rng), (c % 2) * 5.0 + nd(rng)};
            p.add_dense(pt);
        }
    return p;
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

}  // namespace

TEST_CASE("node feature vectors hold per-graph counts") {
    const auto ds = testutil::make_dataset({testutil::path_graph(3), testutil::star_graph(4)}, {1, -1});
    const auto hier = refine_colors(ds, 1);
    const auto pts = node_feature_vectors(hier);
    CHECK(pts.size() == hier.num_nodes());
    CHECK(pts.dim == 2);
    CHECK(pts.dense(0) == std::vector<double>{3.0, 5.0});  // level 0: graph sizes
}

TEST_CASE("well separated blobs are recovered") {
    const auto p = blobs(1, 20, 4);
    const auto a = kmeans(p, 4, 7);
    REQUIRE(a.k == 4);
    for (std::size_t c = 0; c < 4; ++c) {
        std::set<std::uint32_t> ids;
        for (std::size_t i = 0; i < 20; ++i) ids.insert(a.assignment[c * 20 + i]);
        CHECK(ids.size() == 1);
    }
}

TEST_CASE("k-means invariants on hierarchy nodes") {
    const auto ds = testutil::random_dataset(2, 30, 2, 12);
    const auto hier = refine_colors(ds, 3);
    const auto pts = node_feature_vectors(hier);
    for (std::size_t k : {1u, 3u, 10u}) {
        const auto a = kmeans(pts, k, 11);
        CHECK(a.k <= k);
        CHECK(a.requested_k == k);
        CHECK(a.assignment.size() == hier.num_nodes());
        std::vector<std::size_t> sizes(a.k, 0);
        for (auto c : a.assignment) {
            REQUIRE(c < a.k);
            ++sizes[c];
        }
        for (auto s : sizes) CHECK(s > 0);
        // inertia never increases across Lloyd iterations
        for (std::size_t i = 1; i < a.inertia_trace.size(); ++i)
            CHECK(a.inertia_trace[i] <= a.inertia_trace[i - 1] * (1 + 1e-12) + 1e-9);
        // each point sits at its nearest centroid
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto x = pts.dense(i);
            const double own = squared_distance(x, a.centroids[a.assignment[i]]);
            for (std::size_t c = 0; c < a.k; ++c) CHECK(own <= squared_distance(x, a.centroids[c]) + 1e-9);
        }
    }
}

TEST_CASE("k = 1 puts everything in one cluster") {
    const auto p = blobs(3, 5, 3);
    const auto a = kmeans(p, 1, 0);
    CHECK(a.k == 1);
    for (auto c : a.assignment) CHECK(c == 0);
}

TEST_CASE("k larger than the number of distinct points is reduced") {
    SparsePoints p;
    p.dim = 1;
    for (double v : {1.0, 1.0, 2.0, 2.0, 3.0}) {
        const double pt[] = {v};
        p.add_dense(pt);
    }
    const auto a = kmeans(p, 10, 0);
    CHECK(a.k == 3);
    CHECK(a.requested_k == 10);
    CHECK(a.assignment[0] == a.assignment[1]);
    CHECK(a.assignment[2] == a.assignment[3]);
    CHECK(a.assignment[0] != a.assignment[4]);
}

TEST_CASE("k-means is deterministic per seed and thread count") {
    const auto ds = testutil::random_dataset(4, 40, 2, 14);
    const auto pts = node_feature_vectors(refine_colors(ds, 3));
    const auto a = kmeans(pts, 8, 5, 300, 1);
    const auto b = kmeans(pts, 8, 5, 300, 4);
    CHECK(a.assignment == b.assignment);
    CHECK(a.inertia_trace == b.inertia_trace);
}

TEST_CASE("identity assignment and CSV export") {
    const auto ds = testutil::make_dataset({testutil::path_graph(3)}, {1});
    const auto hier = refine_colors(ds, 1);
    const auto a = identity_assignment(hier.num_nodes());
    CHECK(a.k == hier.num_nodes());
    std::ostringstream out;
    write_assignment(out, hier, a);
    CHECK(out.str() == "node,level,cluster\n0,0,0\n1,1,1\n2,1,2\n");
}
