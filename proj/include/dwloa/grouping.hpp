#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "dwloa/refinement.hpp"

namespace dwloa {

/// Points stored row-wise in compressed sparse form. Node count vectors are
/// mostly zero (a color appears in few graphs), so k-means works on this
/// layout directly.
struct SparsePoints {
    std::size_t dim = 0;
    std::vector<std::size_t> offset{0};
    std::vector<std::uint32_t> index;
    std::vector<double> value;

    std::size_t size() const { return offset.size() - 1; }
    void add(std::span<const std::uint32_t> idx, std::span<const double> val);
    void add_dense(std::span<const double> point);
    std::vector<double> dense(std::size_t p) const;
};

struct ClusterAssignment {
    std::size_t k = 0;
    std::vector<std::uint32_t> assignment;  // point (hierarchy node) -> cluster
    std::vector<std::vector<double>> centroids;
    std::size_t requested_k = 0;
    std::vector<double> inertia_trace;  // after each Lloyd iteration
    std::size_t iterations = 0;

    double inertia() const { return inertia_trace.empty() ? 0.0 : inertia_trace.back(); }
};

/// One point per non-root hierarchy node; coordinate g is the number of
/// vertices of graph g holding that node's color.
SparsePoints node_feature_vectors(const ColorHierarchy& hier);

/// Lloyd's algorithm with k-means++ seeding drawn from `seed`. k is reduced to
/// the number of distinct points when larger; clusters left empty after a
/// reseed from the farthest point are dropped. Ties go to the lower cluster.
ClusterAssignment kmeans(const SparsePoints& points, std::size_t k, std::uint64_t seed,
                         std::size_t max_iter = 300, unsigned jobs = 0);

/// Identity grouping: every node its own cluster.
ClusterAssignment identity_assignment(std::size_t num_nodes);

/// CSV rows node,level,cluster.
void write_assignment(std::ostream& out, const ColorHierarchy& hier,
                      const ClusterAssignment& assignment);

}  // namespace dwloa
