#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "dwloa/kernels.hpp"
#include "dwloa/refinement.hpp"

namespace dwloa {

/// Per-kernel quadratic forms z^T K_r z over one training set, plus the
/// average kernel (1/R) sum_r K_r used to fit gamma.
class QuadraticForms {
public:
    virtual ~QuadraticForms() = default;
    virtual std::size_t num_kernels() const = 0;
    virtual std::size_t num_examples() const = 0;
    /// out[r] = z^T K_r z
    virtual void evaluate(std::span<const double> z, std::span<double> out) const = 0;
    virtual KernelMatrix average_kernel() const = 0;
};

/// Forms over explicit (training-restricted) kernel matrices.
class MatrixListForms final : public QuadraticForms {
public:
    explicit MatrixListForms(std::vector<KernelMatrix> matrices);
    std::size_t num_kernels() const override { return matrices_.size(); }
    std::size_t num_examples() const override;
    void evaluate(std::span<const double> z, std::span<double> out) const override;
    KernelMatrix average_kernel() const override;

private:
    std::vector<KernelMatrix> matrices_;
};

/// One kernel per hierarchy node, k_v(g, g') = min(count_v(g), count_v(g')),
/// never materialised. For a node whose counts sorted in decreasing order are
/// c_1 >= ... >= c_m (c_{m+1} = 0) with signed weights z,
///   sum_{a,b} z_a z_b min(c_a, c_b) = sum_j (c_j - c_{j+1}) (z_1 + ... + z_j)^2.
class NodeCountForms final : public QuadraticForms {
public:
    /// `uniform_wloa` is the full-dataset WL-OA matrix with unit node weights
    /// and zero root weight; its training block divided by R is the average kernel.
    NodeCountForms(const ColorHierarchy& hier, std::span<const std::size_t> train_index,
                   const KernelMatrix& uniform_wloa);
    std::size_t num_kernels() const override { return offset_.size() - 1; }
    std::size_t num_examples() const override { return train_.size(); }
    void evaluate(std::span<const double> z, std::span<double> out) const override;
    KernelMatrix average_kernel() const override;

private:
    std::vector<std::size_t> train_;
    const KernelMatrix* uniform_;
    std::vector<std::size_t> offset_;
    std::vector<std::uint32_t> position_;  // training position, per node sorted by count desc
    std::vector<std::int32_t> count_;
};

struct SolverOptions {
    double tol = 1e-6;  // relative objective change
    std::size_t max_iter = 1000;
};

struct GammaSolution {
    std::vector<double> gamma;
    std::vector<double> objective_trace;
    std::size_t iterations = 0;
};

struct MKLWeights {
    std::vector<double> alpha;
    std::vector<double> gamma;
    double lambda = 0.0;
    std::vector<double> objective_trace;
    std::size_t iterations = 0;
    bool degenerate = false;  // all quadratic forms vanished; alpha is uniform
};

/// (1 - lambda) * gamma^T Y K Y gamma + lambda * ||gamma||^2
double gamma_objective(const KernelMatrix& k, std::span<const int> labels, double lambda,
                       std::span<const double> gamma);

/// Euclidean projection onto the product of the per-class probability simplices.
std::vector<double> project_bisimplex(std::span<const double> v, std::span<const int> labels);

/// Minimises gamma_objective over the bi-simplex by projected gradient with
/// backtracking. Every iterate is feasible and the objective never increases.
GammaSolution solve_gamma(const KernelMatrix& k, std::span<const int> labels, double lambda,
                          const SolverOptions& options = {});

/// alpha_r proportional to gamma^T Y K_r Y gamma, scaled to unit Euclidean norm.
/// When every form is zero alpha is uniform and *degenerate is set.
std::vector<double> compute_alpha(const QuadraticForms& forms, std::span<const double> gamma,
                                  std::span<const int> labels, bool* degenerate = nullptr);

/// Fits gamma on the average kernel (scaled to unit mean diagonal), then
/// derives alpha from the per-kernel forms.
MKLWeights learn_weights(const QuadraticForms& forms, std::span<const int> labels, double lambda,
                         const SolverOptions& options = {});

/// CSV rows id,alpha preceded by '#' diagnostics lines.
void write_weights(std::ostream& out, const MKLWeights& weights, const char* id_name);

}  // namespace dwloa
