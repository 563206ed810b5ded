#include "dwloa/mkl.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "dwloa/error.hpp"
#include "dwloa/simd.hpp"

namespace dwloa {

namespace {

void check_labels(std::span<const int> labels, std::size_t n) {
    if (labels.size() != n) throw DimensionError("label count does not match kernel size");
    bool pos = false, neg = false;
    for (int y : labels) {
        if (y == 1) pos = true;
        else if (y == -1) neg = true;
        else throw ClassError("labels must be -1 or +1");
    }
    if (!pos || !neg) throw ClassError("both classes must be present");
}

std::vector<double> signed_weights(std::span<const double> gamma, std::span<const int> labels) {
    std::vector<double> z(gamma.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = labels[i] * gamma[i];
    return z;
}

double quad_form(const KernelMatrix& k, std::span<const double> z) {
    double s = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) s += z[i] * simd::dot(k.row(i), z);
    return s;
}

// Sort-and-threshold projection onto {x >= 0, sum x = 1}.
void project_simplex(std::vector<double>& x) {
    std::vector<double> u = x;
    std::sort(u.begin(), u.end(), std::greater<>());
    double run = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        run += u[j];
        const double t = (run - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) theta = t;
    }
    for (double& v : x) v = std::max(v - theta, 0.0);
}

}  // namespace

MatrixListForms::MatrixListForms(std::vector<KernelMatrix> matrices) : matrices_(std::move(matrices)) {
    if (matrices_.empty()) throw DimensionError("no kernels given");
    for (const auto& m : matrices_)
        if (m.size() != matrices_.front().size()) throw DimensionError("kernel sizes differ");
}

std::size_t MatrixListForms::num_examples() const { return matrices_.front().size(); }

void MatrixListForms::evaluate(std::span<const double> z, std::span<double> out) const {
    for (std::size_t r = 0; r < matrices_.size(); ++r) out[r] = quad_form(matrices_[r], z);
}

KernelMatrix MatrixListForms::average_kernel() const {
    std::vector<double> alpha(matrices_.size(), 1.0 / static_cast<double>(matrices_.size()));
    auto avg = combine(matrices_, alpha);
    avg.provenance = "average of " + std::to_string(matrices_.size()) + " kernels";
    return avg;
}

NodeCountForms::NodeCountForms(const ColorHierarchy& hier, std::span<const std::size_t> train_index,
                               const KernelMatrix& uniform_wloa)
    : train_(train_index.begin(), train_index.end()), uniform_(&uniform_wloa) {
    if (uniform_wloa.size() != hier.num_graphs())
        throw DimensionError("uniform WL-OA matrix does not match the hierarchy");
    std::vector<std::int64_t> pos_of(hier.num_graphs(), -1);
    for (std::size_t p = 0; p < train_.size(); ++p) pos_of.at(train_[p]) = static_cast<std::int64_t>(p);
    offset_.reserve(hier.num_nodes() + 1);
    offset_.push_back(0);
    std::vector<std::pair<std::int32_t, std::uint32_t>> buf;
    for (NodeId v = 0; v < hier.num_nodes(); ++v) {
        buf.clear();
        for (const auto& e : hier.counts(v))
            if (pos_of[e.graph] >= 0) buf.emplace_back(e.count, static_cast<std::uint32_t>(pos_of[e.graph]));
        std::sort(buf.begin(), buf.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        for (auto [c, p] : buf) {
            count_.push_back(c);
            position_.push_back(p);
        }
        offset_.push_back(count_.size());
    }
}

void NodeCountForms::evaluate(std::span<const double> z, std::span<double> out) const {
    for (std::size_t v = 0; v + 1 < offset_.size(); ++v) {
        double s = 0.0, prefix = 0.0;
        for (std::size_t t = offset_[v]; t < offset_[v + 1]; ++t) {
            prefix += z[position_[t]];
            const std::int32_t next = t + 1 < offset_[v + 1] ? count_[t + 1] : 0;
            s += static_cast<double>(count_[t] - next) * prefix * prefix;
        }
        out[v] = s;
    }
}

KernelMatrix NodeCountForms::average_kernel() const {
    auto sub = uniform_->principal_submatrix(train_);
    const double r = static_cast<double>(num_kernels());
    KernelMatrix avg(sub.size(), "average of " + std::to_string(num_kernels()) + " node kernels");
    for (std::size_t i = 0; i < sub.size(); ++i)
        for (std::size_t j = i; j < sub.size(); ++j) avg.set(i, j, sub(i, j) / r);
    return avg;
}

double gamma_objective(const KernelMatrix& k, std::span<const int> labels, double lambda,
                       std::span<const double> gamma) {
    const auto z = signed_weights(gamma, labels);
    const double sq = std::inner_product(gamma.begin(), gamma.end(), gamma.begin(), 0.0);
    return (1.0 - lambda) * quad_form(k, z) + lambda * sq;
}

std::vector<double> project_bisimplex(std::span<const double> v, std::span<const int> labels) {
    if (v.size() != labels.size()) throw DimensionError("projection: length mismatch");
    std::vector<double> out(v.size());
    for (int cls : {1, -1}) {
        std::vector<double> part;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (labels[i] == cls) part.push_back(v[i]);
        if (part.empty()) throw ClassError("projection: both classes must be present");
        project_simplex(part);
        std::size_t t = 0;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (labels[i] == cls) out[i] = part[t++];
    }
    return out;
}

GammaSolution solve_gamma(const KernelMatrix& k, std::span<const int> labels, double lambda,
                          const SolverOptions& options) {
    const std::size_t l = k.size();
    check_labels(labels, l);
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
    double row_bound = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
        double s = 0.0;
        for (double x : k.row(i)) {
            if (!std::isfinite(x)) throw NumericError("kernel matrix has non-finite entries");
            s += std::abs(x);
        }
        row_bound = std::max(row_bound, s);
    }

    std::size_t npos = 0;
    for (int y : labels) npos += y == 1;
    GammaSolution sol;
    sol.gamma.resize(l);
    for (std::size_t i = 0; i < l; ++i)
        sol.gamma[i] = 1.0 / static_cast<double>(labels[i] == 1 ? npos : l - npos);

    // Lipschitz bound of the gradient; a step of 1/L always passes the test below.
    const double lipschitz = 2.0 * ((1.0 - lambda) * row_bound + lambda);
    if (lipschitz == 0.0) {
        sol.objective_trace.push_back(0.0);
        return sol;
    }
    double step = 1.0 / lipschitz;

    auto objective = [&](const std::vector<double>& g, std::vector<double>* grad) {
        const auto z = signed_weights(g, labels);
        double quad = 0.0, sq = 0.0;
        if (grad) grad->assign(l, 0.0);
        for (std::size_t i = 0; i < l; ++i) {
            const double kz = simd::dot(k.row(i), z);
            quad += z[i] * kz;
            sq += g[i] * g[i];
            if (grad) (*grad)[i] = 2.0 * (1.0 - lambda) * labels[i] * kz + 2.0 * lambda * g[i];
        }
        return (1.0 - lambda) * quad + lambda * sq;
    };

    std::vector<double> grad, trial(l), cand;
    double f = objective(sol.gamma, &grad);
    sol.objective_trace.push_back(f);
    for (std::size_t it = 0; it < options.max_iter; ++it) {
        step = std::min(step * 2.0, 1e12);
        double f_new = f;
        bool accepted = false;
        for (int halvings = 0; halvings < 100; ++halvings) {
            for (std::size_t i = 0; i < l; ++i) trial[i] = sol.gamma[i] - step * grad[i];
            cand = project_bisimplex(trial, labels);
            double lin = 0.0, dist2 = 0.0;
            for (std::size_t i = 0; i < l; ++i) {
                const double d = cand[i] - sol.gamma[i];
                lin += grad[i] * d;
                dist2 += d * d;
            }
            f_new = objective(cand, nullptr);
            if (f_new <= f + lin + dist2 / (2.0 * step) && f_new <= f) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        sol.gamma = cand;
        sol.iterations = it + 1;
        const double change = f - f_new;
        f = objective(sol.gamma, &grad);
        sol.objective_trace.push_back(f);
        if (change <= options.tol * std::max(1.0, std::abs(f))) break;
    }
    return sol;
}

std::vector<double> compute_alpha(const QuadraticForms& forms, std::span<const double> gamma,
                                  std::span<const int> labels, bool* degenerate) {
    if (gamma.size() != forms.num_examples() || labels.size() != gamma.size())
        throw DimensionError("compute_alpha: gamma/label length does not match the kernels");
    const auto z = signed_weights(gamma, labels);
    std::vector<double> d(forms.num_kernels());
    forms.evaluate(z, d);
    double scale = 0.0;
    for (double x : d) scale += std::abs(x);
    for (std::size_t r = 0; r < d.size(); ++r) {
        if (!std::isfinite(d[r])) throw NumericError("non-finite quadratic form");
        if (d[r] < 0.0) {
            // rounding on a PSD kernel; anything larger means the kernel is not PSD
            if (d[r] < -1e-10 * std::max(scale, 1.0))
                throw NumericError("kernel " + std::to_string(r) + " is not positive semidefinite");
            d[r] = 0.0;
        }
    }
    const double norm = std::sqrt(std::inner_product(d.begin(), d.end(), d.begin(), 0.0));
    if (degenerate) *degenerate = norm == 0.0;
    if (norm == 0.0) {
        std::clog << "warning: all kernel quadratic forms are zero; using uniform weights\n";
        return std::vector<double>(d.size(), 1.0 / std::sqrt(static_cast<double>(d.size())));
    }
    for (double& x : d) x /= norm;
    return d;
}

MKLWeights learn_weights(const QuadraticForms& forms, std::span<const int> labels, double lambda,
                         const SolverOptions& options) {
    // Stage 1 runs on the average kernel rescaled to unit mean diagonal, so
    // that lambda trades off against a scale-free margin term and a common
    // rescaling of all kernels leaves gamma (and hence alpha) unchanged.
    auto avg = forms.average_kernel();
    const double scale = avg.trace() / static_cast<double>(avg.size());
    if (scale > 0.0 && std::isfinite(scale)) {
        for (std::size_t i = 0; i < avg.size(); ++i)
            for (std::size_t j = i; j < avg.size(); ++j) avg.set(i, j, avg(i, j) / scale);
    }
    auto sol = solve_gamma(avg, labels, lambda, options);
    MKLWeights w;
    w.lambda = lambda;
    w.alpha = compute_alpha(forms, sol.gamma, labels, &w.degenerate);
    w.gamma = std::move(sol.gamma);
    w.objective_trace = std::move(sol.objective_trace);
    w.iterations = sol.iterations;
    return w;
}

void write_weights(std::ostream& out, const MKLWeights& w, const char* id_name) {
    out << "# lambda=" << format_double(w.lambda) << " iterations=" << w.iterations
        << " objective=" << format_double(w.objective_trace.empty() ? 0.0 : w.objective_trace.back())
        << (w.degenerate ? " degenerate=1" : "") << '\n';
    out << id_name << ",alpha\n";
    for (std::size_t r = 0; r < w.alpha.size(); ++r) out << r << ',' << format_double(w.alpha[r]) << '\n';
}

}  // namespace dwloa
