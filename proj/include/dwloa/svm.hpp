#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "dwloa/kernels.hpp"

namespace dwloa {

/// Binary C-SVM trained on a precomputed kernel. decision(x) =
/// sum_j dual_coef_j K(x, x_j) + bias over the training examples.
struct SVMModel {
    std::vector<double> dual_coef;  // y_i * a_i, one per training example
    double bias = 0.0;
    std::vector<std::size_t> support;  // positions with a_i > 0
    double C = 1.0;
    std::vector<std::size_t> train_index;  // dataset rows of the training examples
    std::size_t iterations = 0;
    bool converged = true;
    std::vector<double> objective_trace;  // dual objective per iteration, if recorded
};

struct SVMOptions {
    double tol = 1e-3;  // maximal KKT violation
    std::size_t max_iter = 0;  // 0: max(10^7, 100 l)
    bool record_objective = false;
};

/// Sequential minimal optimisation with maximal-violating-pair selection.
/// `k` is the training Gram matrix; `train_index` is stored on the model.
SVMModel train_svm(const KernelMatrix& k, std::span<const int> labels, double C,
                   const SVMOptions& options = {}, std::span<const std::size_t> train_index = {});

/// Rows are test examples, columns follow the model's training order.
std::vector<double> decision_values(const SVMModel& model, const Matrix& k_cross);
/// sign of the decision value; exactly 0 maps to +1.
std::vector<int> predict(const SVMModel& model, const Matrix& k_cross);

/// sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij for a_i = |dual_coef_i|.
double dual_objective(const KernelMatrix& k, std::span<const double> dual_coef);
/// Largest KKT violation m(a) - M(a) of the trained dual variables (0 when optimal).
double kkt_violation(const KernelMatrix& k, std::span<const int> labels, const SVMModel& model);

/// "# bias=..., C=..." then rows support_index,dual_coef.
void write_model(std::ostream& out, const SVMModel& model);

}  // namespace dwloa
