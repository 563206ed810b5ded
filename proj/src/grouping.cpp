#include "dwloa/grouping.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "dwloa/error.hpp"
#include "dwloa/parallel.hpp"

namespace dwloa {

void SparsePoints::add(std::span<const std::uint32_t> idx, std::span<const double> val) {
    if (idx.size() != val.size()) throw DimensionError("sparse point: index/value length mismatch");
    for (std::size_t t = 0; t < idx.size(); ++t) {
        if (idx[t] >= dim) throw DimensionError("sparse point: coordinate out of range");
        if (t > 0 && idx[t] <= idx[t - 1]) throw FormatError("sparse point: indices must increase");
    }
    index.insert(index.end(), idx.begin(), idx.end());
    value.insert(value.end(), val.begin(), val.end());
    offset.push_back(index.size());
}

void SparsePoints::add_dense(std::span<const double> point) {
    if (size() == 0 && dim == 0) dim = point.size();
    if (point.size() != dim) throw DimensionError("point dimension mismatch");
    for (std::size_t t = 0; t < point.size(); ++t) {
        if (point[t] == 0.0) continue;
        index.push_back(static_cast<std::uint32_t>(t));
        value.push_back(point[t]);
    }
    offset.push_back(index.size());
}

std::vector<double> SparsePoints::dense(std::size_t p) const {
    std::vector<double> out(dim, 0.0);
    for (std::size_t t = offset[p]; t < offset[p + 1]; ++t) out[index[t]] = value[t];
    return out;
}

SparsePoints node_feature_vectors(const ColorHierarchy& hier) {
    SparsePoints pts;
    pts.dim = hier.num_graphs();
    pts.offset.reserve(hier.num_nodes() + 1);
    for (NodeId v = 0; v < hier.num_nodes(); ++v) {
        for (const auto& e : hier.counts(v)) {
            pts.index.push_back(e.graph);
            pts.value.push_back(static_cast<double>(e.count));
        }
        pts.offset.push_back(pts.index.size());
    }
    return pts;
}

ClusterAssignment identity_assignment(std::size_t num_nodes) {
    ClusterAssignment a;
    a.k = a.requested_k = num_nodes;
    a.assignment.resize(num_nodes);
    std::iota(a.assignment.begin(), a.assignment.end(), 0u);
    return a;
}

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t count_distinct(const SparsePoints& pts) {
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    auto view = [&](std::size_t p) {
        return std::pair{std::span(pts.index.data() + pts.offset[p], pts.offset[p + 1] - pts.offset[p]),
                         std::span(pts.value.data() + pts.offset[p], pts.offset[p + 1] - pts.offset[p])};
    };
    auto less = [&](std::size_t a, std::size_t b) {
        auto [ia, va] = view(a);
        auto [ib, vb] = view(b);
        if (std::lexicographical_compare(ia.begin(), ia.end(), ib.begin(), ib.end())) return true;
        if (std::lexicographical_compare(ib.begin(), ib.end(), ia.begin(), ia.end())) return false;
        return std::lexicographical_compare(va.begin(), va.end(), vb.begin(), vb.end());
    };
    std::sort(order.begin(), order.end(), less);
    std::size_t distinct = order.empty() ? 0 : 1;
    for (std::size_t t = 1; t < order.size(); ++t)
        if (less(order[t - 1], order[t])) ++distinct;
    return distinct;
}

struct Workspace {
    const SparsePoints& pts;
    std::vector<double> point_norm;
    std::size_t dim;

    double sq_dist(std::size_t p, const std::vector<double>& centroid, double centroid_norm) const {
        double dot = 0.0;
        for (std::size_t t = pts.offset[p]; t < pts.offset[p + 1]; ++t)
            dot += pts.value[t] * centroid[pts.index[t]];
        return std::max(0.0, point_norm[p] - 2.0 * dot + centroid_norm);
    }
};

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

}  // namespace

ClusterAssignment kmeans(const SparsePoints& points, std::size_t k, std::uint64_t seed,
                         std::size_t max_iter, unsigned jobs) {
    if (k == 0) throw ConfigError("k-means: k must be at least 1");
    const std::size_t n = points.size();
    if (n == 0) throw ConfigError("k-means: no points");

    ClusterAssignment result;
    result.requested_k = k;
    k = std::min(k, count_distinct(points));

    Workspace ws{points, std::vector<double>(n), points.dim};
    for (std::size_t p = 0; p < n; ++p) {
        double s = 0.0;
        for (std::size_t t = points.offset[p]; t < points.offset[p + 1]; ++t)
            s += points.value[t] * points.value[t];
        ws.point_norm[p] = s;
    }

    // k-means++ seeding.
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> centroids;
    std::vector<double> cnorm;
    centroids.push_back(points.dense(static_cast<std::size_t>(uniform01(rng) * n)));
    cnorm.push_back(norm2(centroids.back()));
    std::vector<double> nearest(n);
    for (std::size_t p = 0; p < n; ++p) nearest[p] = ws.sq_dist(p, centroids[0], cnorm[0]);
    while (centroids.size() < k) {
        const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
        std::size_t pick = n - 1;
        if (total > 0.0) {
            const double target = uniform01(rng) * total;
            double run = 0.0;
            for (std::size_t p = 0; p < n; ++p) {
                run += nearest[p];
                if (nearest[p] > 0.0 && run > target) {
                    pick = p;
                    break;
                }
            }
            // guard the upper end against rounding
            while (nearest[pick] == 0.0 && pick > 0) --pick;
        }
        centroids.push_back(points.dense(pick));
        cnorm.push_back(norm2(centroids.back()));
        for (std::size_t p = 0; p < n; ++p)
            nearest[p] = std::min(nearest[p], ws.sq_dist(p, centroids.back(), cnorm.back()));
    }

    std::vector<std::uint32_t> assign(n, 0);
    std::vector<double> dist(n, 0.0);
    std::vector<bool> alive(k, true), reseeded(k, false);
    auto assign_all = [&] {
        parallel::for_each_index(
            (n + 255) / 256,
            [&](std::size_t b) {
                for (std::size_t p = b * 256; p < std::min(n, b * 256 + 256); ++p) {
                    double best = std::numeric_limits<double>::infinity();
                    std::uint32_t arg = 0;
                    for (std::size_t c = 0; c < k; ++c) {
                        if (!alive[c]) continue;
                        const double d = ws.sq_dist(p, centroids[c], cnorm[c]);
                        if (d < best) {
                            best = d;
                            arg = static_cast<std::uint32_t>(c);
                        }
                    }
                    assign[p] = arg;
                    dist[p] = best;
                }
            },
            jobs);
    };

    std::vector<std::uint32_t> previous;
    assign_all();
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        result.inertia_trace.push_back(std::accumulate(dist.begin(), dist.end(), 0.0));
        result.iterations = iter + 1;
        if (assign == previous) break;
        previous = assign;

        // Update step.
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t c = 0; c < k; ++c)
            if (alive[c]) std::fill(centroids[c].begin(), centroids[c].end(), 0.0);
        for (std::size_t p = 0; p < n; ++p) {
            auto& cen = centroids[assign[p]];
            ++sizes[assign[p]];
            for (std::size_t t = points.offset[p]; t < points.offset[p + 1]; ++t)
                cen[points.index[t]] += points.value[t];
        }
        bool reseed = false;
        for (std::size_t c = 0; c < k; ++c) {
            if (!alive[c]) continue;
            if (sizes[c] == 0) {
                if (reseeded[c]) {
                    alive[c] = false;
                    continue;
                }
                // Reseed once from the point farthest from its centroid.
                reseeded[c] = true;
                reseed = true;
                const auto far = static_cast<std::size_t>(
                    std::max_element(dist.begin(), dist.end()) - dist.begin());
                centroids[c] = points.dense(far);
                dist[far] = 0.0;
            } else {
                for (double& x : centroids[c]) x /= static_cast<double>(sizes[c]);
            }
            cnorm[c] = norm2(centroids[c]);
        }
        assign_all();
        if (reseed) previous.clear();
    }

    // Drop clusters that ended up empty and compact the ids.
    std::vector<std::size_t> sizes(k, 0);
    for (auto c : assign) ++sizes[c];
    std::vector<std::uint32_t> remap(k, 0);
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] == 0) continue;
        remap[c] = static_cast<std::uint32_t>(result.centroids.size());
        result.centroids.push_back(std::move(centroids[c]));
    }
    result.k = result.centroids.size();
    result.assignment.resize(n);
    for (std::size_t p = 0; p < n; ++p) result.assignment[p] = remap[assign[p]];
    return result;
}

void write_assignment(std::ostream& out, const ColorHierarchy& hier, const ClusterAssignment& a) {
    out << "node,level,cluster\n";
    for (NodeId v = 0; v < a.assignment.size(); ++v)
        out << v << ',' << hier.level(v) << ',' << a.assignment[v] << '\n';
}

}  // namespace dwloa
