#include "dwloa/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "dwloa/error.hpp"
#include "dwloa/parallel.hpp"
#include "dwloa/simd.hpp"

namespace dwloa {

double KernelMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < size(); ++i) t += m_(i, i);
    return t;
}

KernelMatrix KernelMatrix::principal_submatrix(std::span<const std::size_t> index) const {
    KernelMatrix sub(index.size(), provenance);
    for (std::size_t a = 0; a < index.size(); ++a)
        for (std::size_t b = a; b < index.size(); ++b) sub.set(a, b, m_(index[a], index[b]));
    return sub;
}

Matrix KernelMatrix::cross(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const {
    Matrix out(rows.size(), cols.size());
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b) out(a, b) = m_(rows[a], cols[b]);
    return out;
}

double min_eigenvalue(const KernelMatrix& k) {
    const auto n = static_cast<Eigen::Index>(k.size());
    if (n == 0) return 0.0;
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = k(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

bool is_psd(const KernelMatrix& k, double rel_tol) {
    if (k.size() == 0) return true;
    const double scale = std::abs(k.trace()) / static_cast<double>(k.size());
    return min_eigenvalue(k) >= -rel_tol * scale;
}

namespace {

enum class PairOp { kMin, kDot };

// Nodes present in at least this fraction of graphs go through the dense
// SIMD path; the rest are scattered pair by pair from their count lists.
constexpr std::size_t kDenseFraction = 4;
constexpr std::size_t kChunkWidth = 256;

/// Accumulates sum over `nodes` of op(count_g, count_g') [* weight] into the
/// upper triangle of `out` (n x n, row-major).
template <class Acc>
void accumulate_pairs(const ColorHierarchy& hier, std::span<const NodeId> nodes, PairOp op,
                      std::span<const double> weights, std::vector<Acc>& out, unsigned jobs) {
    const std::size_t n = hier.num_graphs();
    const bool weighted = !weights.empty();
    std::vector<NodeId> dense_nodes, sparse_nodes;
    for (NodeId v : nodes) {
        if (weighted && weights[v] == 0.0) continue;
        const auto c = hier.counts(v);
        if (c.empty()) continue;
        (c.size() * kDenseFraction >= n ? dense_nodes : sparse_nodes).push_back(v);
    }

    const auto& simd_table = simd::active();
    for (std::size_t begin = 0; begin < dense_nodes.size(); begin += kChunkWidth) {
        const std::size_t width = std::min(kChunkWidth, dense_nodes.size() - begin);
        std::vector<std::int32_t> block(n * width, 0);
        std::vector<double> w(width, 1.0);
        for (std::size_t c = 0; c < width; ++c) {
            const NodeId v = dense_nodes[begin + c];
            if (weighted) w[c] = weights[v];
            for (const auto& e : hier.counts(v)) block[e.graph * width + c] = e.count;
        }
        parallel::for_each_index(
            n,
            [&](std::size_t i) {
                const std::int32_t* ri = block.data() + i * width;
                for (std::size_t j = i; j < n; ++j) {
                    const std::int32_t* rj = block.data() + j * width;
                    if constexpr (std::is_same_v<Acc, double>) {
                        if (op == PairOp::kMin)
                            out[i * n + j] += simd_table.sum_min_weighted(ri, rj, w.data(), width);
                        else
                            out[i * n + j] += static_cast<double>(simd_table.dot_i32(ri, rj, width));
                    } else {
                        out[i * n + j] += op == PairOp::kMin ? simd_table.sum_min_i32(ri, rj, width)
                                                             : simd_table.dot_i32(ri, rj, width);
                    }
                }
            },
            jobs);
    }

    if (sparse_nodes.empty()) return;
    const std::size_t blocks = std::min<std::size_t>(n, std::size_t{8} * parallel::default_jobs());
    parallel::for_each_index(
        blocks,
        [&](std::size_t b) {
            const std::size_t r0 = n * b / blocks, r1 = n * (b + 1) / blocks;
            for (NodeId v : sparse_nodes) {
                const auto c = hier.counts(v);
                auto it = std::lower_bound(c.begin(), c.end(), r0, [](const CountEntry& e, std::size_t g) {
                    return e.graph < g;
                });
                for (; it != c.end() && it->graph < r1; ++it) {
                    Acc* row = out.data() + std::size_t{it->graph} * n;
                    for (auto jt = it; jt != c.end(); ++jt) {
                        const std::int64_t x = op == PairOp::kMin ? std::min(it->count, jt->count)
                                                                   : std::int64_t{it->count} * jt->count;
                        if constexpr (std::is_same_v<Acc, double>)
                            row[jt->graph] += weighted ? static_cast<double>(x) * weights[v]
                                                       : static_cast<double>(x);
                        else
                            row[jt->graph] += x;
                    }
                }
            }
        },
        jobs);
}

template <class Acc>
KernelMatrix to_kernel(const std::vector<Acc>& upper, std::size_t n, std::string provenance) {
    KernelMatrix k(n, std::move(provenance));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) k.set(i, j, static_cast<double>(upper[i * n + j]));
    return k;
}

std::vector<NodeId> all_nodes(const ColorHierarchy& hier) {
    std::vector<NodeId> nodes(hier.num_nodes());
    std::iota(nodes.begin(), nodes.end(), NodeId{0});
    return nodes;
}

}  // namespace

KernelMatrix wl_subtree_matrix(const ColorHierarchy& hier, unsigned jobs) {
    const std::size_t n = hier.num_graphs();
    std::vector<std::int64_t> acc(n * n, 0);
    accumulate_pairs<std::int64_t>(hier, all_nodes(hier), PairOp::kDot, {}, acc, jobs);
    return to_kernel(acc, n, "wl-subtree h=" + std::to_string(hier.h()));
}

KernelMatrix wloa_matrix(const ColorHierarchy& hier, std::span<const double> node_weights,
                         double root_weight, unsigned jobs) {
    if (node_weights.size() != hier.num_nodes())
        throw DimensionError("expected one weight per hierarchy node");
    for (double w : node_weights)
        if (!(w >= 0.0) || !std::isfinite(w)) throw NumericError("node weights must be finite and >= 0");
    const std::size_t n = hier.num_graphs();
    std::vector<double> acc(n * n, 0.0);
    accumulate_pairs<double>(hier, all_nodes(hier), PairOp::kMin, node_weights, acc, jobs);
    if (root_weight != 0.0) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j)
                acc[i * n + j] +=
                    root_weight * static_cast<double>(std::min(hier.graph_size(i), hier.graph_size(j)));
    }
    return to_kernel(acc, n, "wl-oa h=" + std::to_string(hier.h()));
}

KernelMatrix wloa_matrix(const ColorHierarchy& hier, unsigned jobs) {
    return wloa_matrix(hier, hier.weights(), hier.root_weight(), jobs);
}

KernelMatrix node_subset_matrix(const ColorHierarchy& hier, std::span<const NodeId> nodes,
                                unsigned jobs) {
    const std::size_t n = hier.num_graphs();
    for (NodeId v : nodes)
        if (v >= hier.num_nodes()) throw IndexError("hierarchy node out of range");
    std::vector<std::int64_t> acc(n * n, 0);
    accumulate_pairs<std::int64_t>(hier, nodes, PairOp::kMin, {}, acc, jobs);
    return to_kernel(acc, n, "node-subset h=" + std::to_string(hier.h()));
}

std::vector<KernelMatrix> group_kernel_matrices(const ColorHierarchy& hier,
                                                const ClusterAssignment& assignment,
                                                unsigned jobs) {
    if (assignment.assignment.size() != hier.num_nodes())
        throw CoverageError("cluster assignment covers " + std::to_string(assignment.assignment.size()) +
                            " of " + std::to_string(hier.num_nodes()) + " hierarchy nodes");
    std::vector<std::vector<NodeId>> members(assignment.k);
    for (NodeId v = 0; v < hier.num_nodes(); ++v) {
        const auto c = assignment.assignment[v];
        if (c >= assignment.k)
            throw CoverageError("node " + std::to_string(v) + " has no valid cluster");
        members[c].push_back(v);
    }
    std::vector<KernelMatrix> out;
    out.reserve(assignment.k);
    for (std::size_t c = 0; c < assignment.k; ++c) {
        out.push_back(node_subset_matrix(hier, members[c], jobs));
        out.back().provenance = "group " + std::to_string(c) + "/" + std::to_string(assignment.k) +
                                " h=" + std::to_string(hier.h());
    }
    return out;
}

double bruteforce_assignment(const ColorHierarchy& hier, std::size_t g, std::size_t g2) {
    const std::size_t n1 = hier.graph_size(g), n2 = hier.graph_size(g2);
    const std::size_t n = std::max(n1, n2);
    if (n > kBruteforceMaxVertices)
        throw SizeError("assignment oracle limited to " + std::to_string(kBruteforceMaxVertices) +
                        " vertices, got " + std::to_string(n));
    std::vector<double> sim(n * n, 0.0);  // dummies score 0
    for (std::size_t a = 0; a < n1; ++a)
        for (std::size_t b = 0; b < n2; ++b)
            sim[a * n + b] = vertex_similarity(hier, g, static_cast<VertexId>(a), g2,
                                               static_cast<VertexId>(b));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    bool first = true;
    do {
        double s = 0.0;
        for (std::size_t a = 0; a < n; ++a) s += sim[a * n + perm[a]];
        if (first || s > best) best = s;
        first = false;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

KernelMatrix normalize_unit_diagonal(const KernelMatrix& k) {
    const std::size_t n = k.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(k(i, i) > 0.0))
            throw NormalizationError("cannot normalize: diagonal entry of graph " + std::to_string(i) +
                                     " is not positive");
        d[i] = std::sqrt(k(i, i));
    }
    KernelMatrix out(n, k.provenance + " normalized");
    for (std::size_t i = 0; i < n; ++i) {
        out.set(i, i, 1.0);
        for (std::size_t j = i + 1; j < n; ++j) out.set(i, j, k(i, j) / (d[i] * d[j]));
    }
    return out;
}

KernelMatrix combine(std::span<const KernelMatrix> matrices, std::span<const double> alpha) {
    if (matrices.size() != alpha.size())
        throw DimensionError("combine: " + std::to_string(matrices.size()) + " matrices but " +
                             std::to_string(alpha.size()) + " coefficients");
    if (matrices.empty()) throw DimensionError("combine: no matrices");
    const std::size_t n = matrices.front().size();
    for (const auto& m : matrices)
        if (m.size() != n) throw DimensionError("combine: matrix dimensions differ");
    for (double a : alpha)
        if (!(a >= 0.0) || !std::isfinite(a)) throw NumericError("combine: coefficients must be >= 0");
    std::vector<double> acc(n * n, 0.0);
    for (std::size_t r = 0; r < matrices.size(); ++r) {
        if (alpha[r] == 0.0) continue;
        simd::axpy(alpha[r], matrices[r].matrix().data, acc);
    }
    KernelMatrix out(n, "combined(" + std::to_string(matrices.size()) + ")");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) out.set(i, j, acc[i * n + j]);
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_kernel_csv(std::ostream& out, const KernelMatrix& k) {
    if (!k.provenance.empty()) out << "# " << k.provenance << '\n';
    for (std::size_t i = 0; i < k.size(); ++i) {
        for (std::size_t j = 0; j < k.size(); ++j) {
            if (j) out << ',';
            out << format_double(k(i, j));
        }
        out << '\n';
    }
}

void write_kernel_precomputed(std::ostream& out, const KernelMatrix& k, std::span<const int> labels) {
    if (!labels.empty() && labels.size() != k.size())
        throw DimensionError("precomputed export: label count does not match matrix size");
    if (!k.provenance.empty()) out << "# " << k.provenance << '\n';
    for (std::size_t i = 0; i < k.size(); ++i) {
        out << (labels.empty() ? 0 : labels[i]) << " 0:" << i + 1;
        for (std::size_t j = 0; j < k.size(); ++j) out << ' ' << j + 1 << ':' << format_double(k(i, j));
        out << '\n';
    }
}

void write_kernel_json(std::ostream& out, const KernelMatrix& k) {
    out << "{\"provenance\": \"" << k.provenance << "\", \"n\": " << k.size() << ", \"values\": [";
    for (std::size_t i = 0; i < k.size(); ++i) {
        out << (i ? ",\n  [" : "\n  [");
        for (std::size_t j = 0; j < k.size(); ++j) out << (j ? ", " : "") << format_double(k(i, j));
        out << ']';
    }
    out << "]}\n";
}

namespace {

double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw FormatError("kernel file: bad number '" + std::string(s) + "'");
    return v;
}

KernelMatrix from_rows(std::vector<std::vector<double>> rows, std::string provenance) {
    const std::size_t n = rows.size();
    for (const auto& r : rows)
        if (r.size() != n) throw FormatError("kernel file: matrix is not square");
    KernelMatrix k(n, std::move(provenance));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            if (rows[i][j] != rows[j][i]) throw FormatError("kernel file: matrix is not symmetric");
            k.set(i, j, rows[i][j]);
        }
    return k;
}

}  // namespace

KernelMatrix read_kernel_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string provenance, line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (provenance.empty()) provenance = line.size() > 2 ? line.substr(2) : "";
            continue;
        }
        std::vector<double> row;
        std::string_view rest = line;
        for (;;) {
            const auto comma = rest.find(',');
            row.push_back(parse_double(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        rows.push_back(std::move(row));
    }
    return from_rows(std::move(rows), std::move(provenance));
}

KernelMatrix read_kernel_precomputed(std::istream& in, std::vector<int>* labels) {
    std::vector<std::vector<double>> rows;
    std::string provenance, line;
    if (labels) labels->clear();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (provenance.empty()) provenance = line.size() > 2 ? line.substr(2) : "";
            continue;
        }
        std::istringstream ls(line);
        int label = 0;
        std::string tok;
        if (!(ls >> label >> tok) || tok.rfind("0:", 0) != 0)
            throw FormatError("precomputed kernel: expected '<label> 0:<index>'");
        if (labels) labels->push_back(label);
        std::vector<double> row;
        while (ls >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) throw FormatError("precomputed kernel: expected 'j:value'");
            row.push_back(parse_double(std::string_view(tok).substr(colon + 1)));
        }
        rows.push_back(std::move(row));
    }
    return from_rows(std::move(rows), std::move(provenance));
}

}  // namespace dwloa
