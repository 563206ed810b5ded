#include <random>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"

#include "dwloa/error.hpp"
#include "dwloa/grouping.hpp"
#include "dwloa/kernels.hpp"
#include "dwloa/simd.hpp"

using namespace dwloa;

namespace {

// Pairwise sums straight from the definition: loop over nodes and graphs.
KernelMatrix naive_kernel(const ColorHierarchy& hier, bool use_min, std::span<const double> w, double root) {
    const std::size_t n = hier.num_graphs();
    KernelMatrix k(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            double s = root * static_cast<double>(std::min(hier.graph_size(a), hier.graph_size(b)));
            for (NodeId v = 0; v < hier.num_nodes(); ++v) {
                const double ca = hier.count(v, a), cb = hier.count(v, b);
                s += use_min ? w[v] * std::min(ca, cb) : ca * cb;
            }
            k.set(a, b, s);
        }
    return k;
}

}  // namespace

TEST_CASE("WL subtree kernel of the 3-path with itself is 14") {
    const auto ds = testutil::make_dataset({testutil::path_graph(3)}, {1});
    const auto k = wl_subtree_matrix(refine_colors(ds, 1));
    CHECK(k(0, 0) == 14.0);  // 3*3 + (2*2 + 1*1)
}

TEST_CASE("WL-OA between the 3-path and the 3-leaf star is 5") {
    const auto ds = testutil::make_dataset({testutil::path_graph(3), testutil::star_graph(3)}, {1, -1});
    const auto hier = refine_colors(ds, 1);
    const auto k = wloa_matrix(hier);
    CHECK(k(0, 1) == 5.0);  // min(3,4) at level 0, endpoints vs leaves min(2,3) at level 1
    CHECK(k(0, 1) == bruteforce_assignment(hier, 0, 1));
}

TEST_CASE("self-similarity under uniform weights is (h+1)|V|") {
    const auto ds = testutil::random_dataset(2, 15, 1, 12);
    for (int h = 0; h <= 4; ++h) {
        const auto k = wloa_matrix(refine_colors(ds, h));
        for (std::size_t g = 0; g < ds.size(); ++g)
            CHECK(k(g, g) == static_cast<double>((h + 1) * ds.graphs[g].num_vertices()));
    }
}

TEST_CASE("h = 0 WL kernel is the product of graph sizes") {
    const auto ds = testutil::random_dataset(4, 10, 1, 9);
    const auto k = wl_subtree_matrix(refine_colors(ds, 0));
    for (std::size_t a = 0; a < ds.size(); ++a)
        for (std::size_t b = 0; b < ds.size(); ++b)
            CHECK(k(a, b) == static_cast<double>(ds.graphs[a].num_vertices() * ds.graphs[b].num_vertices()));
}

TEST_CASE("histogram intersection equals the brute-force optimal assignment") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> wd(0, 5);
    const auto ds = testutil::random_dataset(17, 12, 1, 7);
    for (int h = 0; h <= 4; ++h) {
        auto hier = refine_colors(ds, h);
        std::vector<double> w(hier.num_nodes());
        for (auto& x : w) x = wd(rng);
        hier.set_weights(w, static_cast<double>(wd(rng)));
        const auto k = wloa_matrix(hier);
        for (std::size_t a = 0; a < ds.size(); ++a)
            for (std::size_t b = a; b < ds.size(); ++b) CHECK(k(a, b) == bruteforce_assignment(hier, a, b));
    }
}

TEST_CASE("bruteforce oracle refuses large graphs") {
    const auto ds = testutil::make_dataset({testutil::path_graph(9), testutil::path_graph(2)}, {1, -1});
    CHECK_THROWS_AS(bruteforce_assignment(refine_colors(ds, 1), 0, 1), SizeError);
}

TEST_CASE("dense and sparse accumulation paths match the definition") {
    // enough graphs that frequent nodes take the dense path and rare ones the sparse path
    const auto ds = testutil::random_dataset(31, 120, 1, 20, 0.2);
    auto hier = refine_colors(ds, 3);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<double> w(hier.num_nodes());
    for (auto& x : w) x = u(rng);

    const std::vector<double> ones(hier.num_nodes(), 1.0);
    CHECK(wl_subtree_matrix(hier) == naive_kernel(hier, false, ones, 0.0));
    CHECK(wloa_matrix(hier) == naive_kernel(hier, true, ones, 0.0));
    const auto weighted = wloa_matrix(hier, w, 0.25);
    const auto expect = naive_kernel(hier, true, w, 0.25);
    for (std::size_t a = 0; a < ds.size(); ++a)
        for (std::size_t b = 0; b < ds.size(); ++b) CHECK(weighted(a, b) == doctest::Approx(expect(a, b)).epsilon(1e-12));
}

TEST_CASE("scalar and SIMD paths give identical integer kernels") {
    const auto ds = testutil::random_dataset(12, 90, 3, 25, 0.15);
    const auto hier = refine_colors(ds, 4);
    const auto before = simd::active_isa();
    simd::force_isa(simd::Isa::kScalar);
    const auto wl_s = wl_subtree_matrix(hier);
    const auto oa_s = wloa_matrix(hier);
    simd::force_isa(simd::detected_isa());
    CHECK(wl_subtree_matrix(hier) == wl_s);
    CHECK(wloa_matrix(hier) == oa_s);
    simd::force_isa(before);
}

TEST_CASE("kernel matrices do not depend on the thread count") {
    const auto ds = testutil::random_dataset(13, 70, 1, 18);
    const auto hier = refine_colors(ds, 3);
    CHECK(wloa_matrix(hier, 1) == wloa_matrix(hier, 4));
    CHECK(wl_subtree_matrix(hier, 1) == wl_subtree_matrix(hier, 3));
}

TEST_CASE("group kernels add up to the uniform WL-OA kernel") {
    const auto ds = testutil::random_dataset(14, 40, 2, 14);
    const auto hier = refine_colors(ds, 4);
    const auto a = kmeans(node_feature_vectors(hier), 6, 1);
    const auto groups = group_kernel_matrices(hier, a);
    REQUIRE(groups.size() == a.k);
    const auto sum = combine(groups, std::vector<double>(groups.size(), 1.0));
    CHECK(sum == wloa_matrix(hier));

    std::vector<NodeId> all(hier.num_nodes());
    std::iota(all.begin(), all.end(), 0);
    CHECK(node_subset_matrix(hier, all) == wloa_matrix(hier));

    auto bad = a;
    bad.assignment.pop_back();
    CHECK_THROWS_AS(group_kernel_matrices(hier, bad), CoverageError);
}

TEST_CASE("kernels are positive semidefinite") {
    const auto ds = testutil::random_dataset(15, 50, 1, 15);
    const auto hier = refine_colors(ds, 4);
    CHECK(is_psd(wl_subtree_matrix(hier)));
    CHECK(is_psd(wloa_matrix(hier)));
    KernelMatrix bad(2);
    bad.set(0, 0, 1.0);
    bad.set(1, 1, 1.0);
    bad.set(0, 1, 2.0);
    CHECK_FALSE(is_psd(bad));
    CHECK(min_eigenvalue(bad) == doctest::Approx(-1.0));
}

TEST_CASE("normalization gives a unit diagonal") {
    const auto ds = testutil::random_dataset(16, 20, 1, 10);
    const auto k = wloa_matrix(refine_colors(ds, 2));
    const auto n = normalize_unit_diagonal(k);
    for (std::size_t i = 0; i < n.size(); ++i) {
        CHECK(n(i, i) == doctest::Approx(1.0));
        for (std::size_t j = 0; j < n.size(); ++j) {
            CHECK(n(i, j) <= 1.0 + 1e-12);
            CHECK(n(i, j) == doctest::Approx(k(i, j) / std::sqrt(k(i, i) * k(j, j))));
        }
    }
    KernelMatrix zero(2);
    CHECK_THROWS_AS(normalize_unit_diagonal(zero), NormalizationError);
}

TEST_CASE("combine validates its inputs") {
    KernelMatrix a(2), b(2), c(3);
    a.set(0, 0, 1.0);
    b.set(0, 1, 2.0);
    const std::vector<KernelMatrix> ab{a, b};
    const auto m = combine(ab, std::vector<double>{2.0, 0.5});
    CHECK(m(0, 0) == 2.0);
    CHECK(m(1, 0) == 1.0);
    CHECK_THROWS_AS(combine(ab, std::vector<double>{1.0}), DimensionError);
    const std::vector<KernelMatrix> ac{a, c};
    CHECK_THROWS_AS(combine(ac, std::vector<double>{1.0, 1.0}), DimensionError);
    CHECK_THROWS_AS(combine(ab, std::vector<double>{1.0, std::nan("")}), NumericError);
}

TEST_CASE("CSV and precomputed formats round-trip") {
    const auto ds = testutil::random_dataset(18, 9, 1, 8);
    auto k = normalize_unit_diagonal(wloa_matrix(refine_colors(ds, 2)));
    k.provenance = "test matrix";
    std::stringstream csv;
    write_kernel_csv(csv, k);
    CHECK(csv.str().rfind("# ", 0) == 0);
    CHECK(read_kernel_csv(csv) == k);

    std::stringstream pre;
    write_kernel_precomputed(pre, k, ds.labels);
    std::vector<int> labels;
    CHECK(read_kernel_precomputed(pre, &labels) == k);
    CHECK(labels == ds.labels);

    std::stringstream js;
    write_kernel_json(js, k);
    CHECK(js.str().find("\"provenance\"") != std::string::npos);
}

TEST_CASE("submatrix and cross blocks index the full matrix") {
    const auto ds = testutil::random_dataset(19, 8, 1, 8);
    const auto k = wloa_matrix(refine_colors(ds, 2));
    const std::vector<std::size_t> rows{5, 1}, cols{0, 7, 3};
    const auto sub = k.principal_submatrix(rows);
    CHECK(sub(0, 1) == k(5, 1));
    const auto x = k.cross(rows, cols);
    CHECK(x.rows == 2);
    CHECK(x.cols == 3);
    CHECK(x(1, 2) == k(1, 3));
}
