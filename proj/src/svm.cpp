#include "dwloa/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "dwloa/error.hpp"
#include "dwloa/simd.hpp"

namespace dwloa {

namespace {

constexpr double kTau = 1e-12;

void check_inputs(const KernelMatrix& k, std::span<const int> labels, double C) {
    if (labels.size() != k.size()) throw DimensionError("label count does not match kernel size");
    if (!(C > 0.0) || !std::isfinite(C)) throw ConfigError("C must be positive");
    bool pos = false, neg = false;
    for (int y : labels) {
        if (y == 1) pos = true;
        else if (y == -1) neg = true;
        else throw ClassError("labels must be -1 or +1");
    }
    if (!pos || !neg) throw ClassError("training set must contain both classes");
    for (double x : k.matrix().data)
        if (!std::isfinite(x)) throw NumericError("kernel matrix has non-finite entries");
}

// Gradient of f(a) = 1/2 a^T Q a - e^T a with Q_ij = y_i y_j K_ij.
std::vector<double> gradient(const KernelMatrix& k, std::span<const int> y, std::span<const double> a) {
    const std::size_t l = k.size();
    std::vector<double> ya(l);
    for (std::size_t t = 0; t < l; ++t) ya[t] = y[t] * a[t];
    std::vector<double> g(l);
    for (std::size_t t = 0; t < l; ++t) g[t] = y[t] * simd::dot(k.row(t), ya) - 1.0;
    return g;
}

struct Violation {
    double gap;
    std::ptrdiff_t i, j;
};

Violation most_violating(std::span<const int> y, std::span<const double> a, std::span<const double> g,
                         double C) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::ptrdiff_t i = -1, j = -1;
    for (std::size_t t = 0; t < a.size(); ++t) {
        const double v = -y[t] * g[t];
        const bool up = y[t] == 1 ? a[t] < C : a[t] > 0.0;
        const bool low = y[t] == 1 ? a[t] > 0.0 : a[t] < C;
        if (up && v > gmax) {
            gmax = v;
            i = static_cast<std::ptrdiff_t>(t);
        }
        if (low && v < gmin) {
            gmin = v;
            j = static_cast<std::ptrdiff_t>(t);
        }
    }
    if (i < 0 || j < 0) return {0.0, i, j};
    return {gmax - gmin, i, j};
}

}  // namespace

SVMModel train_svm(const KernelMatrix& k, std::span<const int> y, double C, const SVMOptions& options,
                   std::span<const std::size_t> train_index) {
    check_inputs(k, y, C);
    const std::size_t l = k.size();
    if (!train_index.empty() && train_index.size() != l)
        throw DimensionError("train_index length does not match kernel size");
    std::vector<double> a(l, 0.0);
    std::vector<double> g(l, -1.0);
    const std::size_t max_iter = options.max_iter ? options.max_iter : std::max<std::size_t>(10'000'000, 100 * l);

    SVMModel model;
    model.C = C;
    auto objective = [&] {
        // -f(a) = sum a - 1/2 a^T Q a = -1/2 a^T (g - e)
        double s = 0.0;
        for (std::size_t t = 0; t < l; ++t) s += a[t] * (g[t] - 1.0);
        return -0.5 * s;
    };
    if (options.record_objective) model.objective_trace.push_back(0.0);

    std::size_t iter = 0;
    for (;; ++iter) {
        const auto [gap, si, sj] = most_violating(y, a, g, C);
        if (si < 0 || sj < 0 || gap < options.tol) break;
        if (iter >= max_iter) {
            model.converged = false;
            break;
        }
        const auto i = static_cast<std::size_t>(si), j = static_cast<std::size_t>(sj);
        const double kii = k(i, i), kjj = k(j, j), kij = k(i, j);
        const double old_ai = a[i], old_aj = a[j];
        if (y[i] != y[j]) {
            double quad = kii + kjj - 2.0 * kij;  // Q_ii + Q_jj + 2 Q_ij with Q_ij = -K_ij
            if (quad <= 0.0) quad = kTau;
            const double delta = (-g[i] - g[j]) / quad;
            const double diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if (diff > 0) {
                if (a[j] < 0) { a[j] = 0; a[i] = diff; }
            } else {
                if (a[i] < 0) { a[i] = 0; a[j] = -diff; }
            }
            if (diff > 0) {
                if (a[i] > C) { a[i] = C; a[j] = C - diff; }
            } else {
                if (a[j] > C) { a[j] = C; a[i] = C + diff; }
            }
        } else {
            double quad = kii + kjj - 2.0 * kij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (g[i] - g[j]) / quad;
            const double sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if (sum > C) {
                if (a[i] > C) { a[i] = C; a[j] = sum - C; }
            } else {
                if (a[j] < 0) { a[j] = 0; a[i] = sum; }
            }
            if (sum > C) {
                if (a[j] > C) { a[j] = C; a[i] = sum - C; }
            } else {
                if (a[i] < 0) { a[i] = 0; a[j] = sum; }
            }
        }
        // G_t += Q_ti d_i + Q_tj d_j
        const double di = (a[i] - old_ai) * y[i], dj = (a[j] - old_aj) * y[j];
        const auto ri = k.row(i), rj = k.row(j);
        for (std::size_t t = 0; t < l; ++t) g[t] += y[t] * (ri[t] * di + rj[t] * dj);
        if (options.record_objective) model.objective_trace.push_back(objective());
    }
    model.iterations = iter;

    // Bias from free vectors, midpoint of the feasible interval otherwise.
    double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
    std::size_t nfree = 0;
    for (std::size_t t = 0; t < l; ++t) {
        const double yg = y[t] * g[t];
        if (a[t] >= C) {
            if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (a[t] <= 0.0) {
            if (y[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++nfree;
            sum_free += yg;
        }
    }
    const double rho = nfree > 0 ? sum_free / static_cast<double>(nfree) : (ub + lb) / 2.0;
    model.bias = -rho;
    model.dual_coef.resize(l);
    for (std::size_t t = 0; t < l; ++t) {
        model.dual_coef[t] = y[t] * a[t];
        if (a[t] > 0.0) model.support.push_back(t);
    }
    model.train_index.assign(train_index.begin(), train_index.end());
    return model;
}

std::vector<double> decision_values(const SVMModel& model, const Matrix& k_cross) {
    if (k_cross.cols != model.dual_coef.size())
        throw DimensionError("cross kernel has " + std::to_string(k_cross.cols) + " columns, model has " +
                             std::to_string(model.dual_coef.size()) + " training examples");
    std::vector<double> out(k_cross.rows);
    for (std::size_t r = 0; r < k_cross.rows; ++r)
        out[r] = simd::dot(k_cross.row(r), model.dual_coef) + model.bias;
    return out;
}

std::vector<int> predict(const SVMModel& model, const Matrix& k_cross) {
    const auto dv = decision_values(model, k_cross);
    std::vector<int> out(dv.size());
    for (std::size_t r = 0; r < dv.size(); ++r) out[r] = dv[r] < 0.0 ? -1 : 1;
    return out;
}

double dual_objective(const KernelMatrix& k, std::span<const double> dual_coef) {
    double lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        lin += std::abs(dual_coef[i]);
        quad += dual_coef[i] * simd::dot(k.row(i), dual_coef);
    }
    return lin - 0.5 * quad;
}

double kkt_violation(const KernelMatrix& k, std::span<const int> y, const SVMModel& model) {
    std::vector<double> a(model.dual_coef.size());
    for (std::size_t t = 0; t < a.size(); ++t) a[t] = std::abs(model.dual_coef[t]);
    const auto g = gradient(k, y, a);
    return std::max(0.0, most_violating(y, a, g, model.C).gap);
}

void write_model(std::ostream& out, const SVMModel& model) {
    out << "# C=" << format_double(model.C) << " bias=" << format_double(model.bias)
        << " iterations=" << model.iterations << '\n';
    out << "support,dual_coef\n";
    for (auto s : model.support) {
        const auto row = model.train_index.empty() ? s : model.train_index[s];
        out << row << ',' << format_double(model.dual_coef[s]) << '\n';
    }
}

}  // namespace dwloa
