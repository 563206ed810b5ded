#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dwloa/grouping.hpp"
#include "dwloa/refinement.hpp"

namespace dwloa {

/// Row-major dense matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

/// Symmetric Gram matrix over a dataset. set() writes both triangles, so
/// values[i][j] == values[j][i] holds bit-for-bit.
class KernelMatrix {
public:
    KernelMatrix() = default;
    explicit KernelMatrix(std::size_t n, std::string provenance = {})
        : m_(n, n), provenance(std::move(provenance)) {}

    std::size_t size() const { return m_.rows; }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    void set(std::size_t i, std::size_t j, double v) {
        m_(i, j) = v;
        m_(j, i) = v;
    }
    std::span<const double> row(std::size_t i) const { return m_.row(i); }
    const Matrix& matrix() const { return m_; }
    double trace() const;

    KernelMatrix principal_submatrix(std::span<const std::size_t> index) const;
    Matrix cross(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const;

    friend bool operator==(const KernelMatrix& a, const KernelMatrix& b) {
        return a.m_.rows == b.m_.rows && a.m_.data == b.m_.data;
    }

private:
    Matrix m_;

public:
    std::string provenance;
};

/// Smallest eigenvalue (symmetric eigen-decomposition).
double min_eigenvalue(const KernelMatrix& k);
/// smallest eigenvalue >= -rel_tol * trace / n
bool is_psd(const KernelMatrix& k, double rel_tol = 1e-8);

/// WL subtree kernel: dot product of per-level color histograms.
KernelMatrix wl_subtree_matrix(const ColorHierarchy& hier, unsigned jobs = 0);

/// Optimal assignment kernel by histogram intersection over the weighted
/// hierarchy: sum over nodes of min(count_g, count_g') * weight, plus the
/// root weight times min(|V(g)|, |V(g')|).
KernelMatrix wloa_matrix(const ColorHierarchy& hier, unsigned jobs = 0);
/// Same with explicit node weights (one per hierarchy node) instead of the
/// hierarchy's own.
KernelMatrix wloa_matrix(const ColorHierarchy& hier, std::span<const double> node_weights,
                         double root_weight, unsigned jobs = 0);

/// Unweighted intersection kernel restricted to `nodes` (exact integer sums).
KernelMatrix node_subset_matrix(const ColorHierarchy& hier, std::span<const NodeId> nodes,
                                unsigned jobs = 0);

/// One matrix per cluster: entry (g, g') sums min(count_g, count_g') over the
/// cluster's nodes. Throws CoverageError unless every node is assigned.
std::vector<KernelMatrix> group_kernel_matrices(const ColorHierarchy& hier,
                                                const ClusterAssignment& assignment,
                                                unsigned jobs = 0);

/// Largest instance the enumeration oracle accepts (vertices of the bigger graph).
inline constexpr std::size_t kBruteforceMaxVertices = 8;

/// Optimal assignment by enumerating every bijection between the vertex sets
/// (the smaller side padded with zero-similarity dummies), scored with
/// vertex_similarity. Test oracle; throws SizeError above kBruteforceMaxVertices.
double bruteforce_assignment(const ColorHierarchy& hier, std::size_t g, std::size_t g2);

/// K'[i][j] = K[i][j] / sqrt(K[i][i] K[j][j]). Throws NormalizationError on a
/// non-positive diagonal entry.
KernelMatrix normalize_unit_diagonal(const KernelMatrix& k);

/// sum_r alpha_r K_r. Throws DimensionError on mismatched sizes and
/// NumericError on negative coefficients.
KernelMatrix combine(std::span<const KernelMatrix> matrices, std::span<const double> alpha);

// Export / import.
void write_kernel_csv(std::ostream& out, const KernelMatrix& k);
/// LIBSVM precomputed layout: "<label> 0:<row+1> 1:<v> 2:<v> ...".
void write_kernel_precomputed(std::ostream& out, const KernelMatrix& k,
                              std::span<const int> labels = {});
void write_kernel_json(std::ostream& out, const KernelMatrix& k);
KernelMatrix read_kernel_csv(std::istream& in);
KernelMatrix read_kernel_precomputed(std::istream& in, std::vector<int>* labels = nullptr);

/// Shortest text form that parses back to the same double.
std::string format_double(double v);

}  // namespace dwloa
