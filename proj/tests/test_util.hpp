#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "dwloa/graph.hpp"
#include "dwloa/kernels.hpp"
#include "dwloa/mkl.hpp"

namespace testutil {

using dwloa::Graph;
using dwloa::GraphDataset;
using dwloa::VertexId;

inline Graph path_graph(std::size_t n, std::size_t id = 0) {
    std::vector<std::pair<VertexId, VertexId>> e;
    for (VertexId v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
    return Graph::from_edges(id, n, e);
}

inline Graph star_graph(std::size_t leaves, std::size_t id = 0) {
    std::vector<std::pair<VertexId, VertexId>> e;
    for (VertexId v = 1; v <= leaves; ++v) e.emplace_back(0, v);
    return Graph::from_edges(id, leaves + 1, e);
}

inline Graph cycle_graph(std::size_t n, std::size_t id = 0) {
    std::vector<std::pair<VertexId, VertexId>> e;
    for (VertexId v = 0; v < n; ++v) e.emplace_back(v, static_cast<VertexId>((v + 1) % n));
    return Graph::from_edges(id, n, e);
}

inline Graph random_graph(std::mt19937_64& rng, std::size_t n, double p, std::size_t id = 0) {
    std::bernoulli_distribution coin(p);
    std::vector<std::pair<VertexId, VertexId>> e;
    for (VertexId a = 0; a < n; ++a)
        for (VertexId b = a + 1; b < n; ++b)
            if (coin(rng)) e.emplace_back(a, b);
    return Graph::from_edges(id, n, e);
}

inline GraphDataset make_dataset(std::vector<Graph> graphs, std::vector<int> labels, std::string name = "toy") {
    for (std::size_t i = 0; i < graphs.size(); ++i) graphs[i].id = i;
    return GraphDataset{std::move(name), std::move(graphs), std::move(labels)};
}

// Random dataset of small graphs with alternating labels.
inline GraphDataset random_dataset(std::uint64_t seed, std::size_t n, std::size_t min_v, std::size_t max_v,
                                   double p = 0.35) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> size(min_v, max_v);
    std::vector<Graph> g;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
        g.push_back(random_graph(rng, size(rng), p, i));
        y.push_back(i % 2 ? 1 : -1);
    }
    return make_dataset(std::move(g), std::move(y));
}

inline std::filesystem::path temp_dir(const std::string& tag) {
    auto p = std::filesystem::temp_directory_path() / ("dwloa_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

inline dwloa::KernelMatrix from_eigen(const Eigen::MatrixXd& m) {
    dwloa::KernelMatrix k(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i; j < m.cols(); ++j) k.set(i, j, m(i, j));
    return k;
}

inline Eigen::MatrixXd random_psd(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = nd(rng);
    return a * a.transpose();
}

// Exhaustive minimum of the gamma objective over the bi-simplex. With two
// examples per class the bi-simplex is a square, parametrized by (s, t).
inline double bisimplex_grid_minimum(const dwloa::KernelMatrix& k, const std::vector<int>& y, double lambda,
                                     std::size_t steps = 2000) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < y.size(); ++i) (y[i] > 0 ? pos : neg).push_back(i);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> g(y.size());
    for (std::size_t a = 0; a <= steps; ++a) {
        for (std::size_t b = 0; b <= steps; ++b) {
            const double s = static_cast<double>(a) / steps, t = static_cast<double>(b) / steps;
            g[pos[0]] = s;
            g[pos[1]] = 1 - s;
            g[neg[0]] = t;
            g[neg[1]] = 1 - t;
            best = std::min(best, dwloa::gamma_objective(k, y, lambda, g));
        }
    }
    return best;
}

// Exact maximum of the C-SVM dual by enumerating which multipliers sit at 0,
// at C or strictly between; each free set gives a linear KKT system.
inline double svm_dual_oracle(const Eigen::MatrixXd& K, const std::vector<int>& y, double C) {
    const std::size_t n = y.size();
    Eigen::MatrixXd Q(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Q(i, j) = y[i] * y[j] * K(i, j);
    auto objective = [&](const Eigen::VectorXd& a) { return a.sum() - 0.5 * a.dot(Q * a); };
    double best = -std::numeric_limits<double>::infinity();
    std::size_t states = 1;
    for (std::size_t i = 0; i < n; ++i) states *= 3;
    for (std::size_t code = 0; code < states; ++code) {
        std::vector<int> st(n);
        std::size_t c = code;
        for (std::size_t i = 0; i < n; ++i, c /= 3) st[i] = static_cast<int>(c % 3);  // 0: zero, 1: C, 2: free
        std::vector<std::size_t> F;
        Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (st[i] == 1) a(i) = C;
            if (st[i] == 2) F.push_back(i);
        }
        if (F.empty()) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += y[i] * a(i);
            if (std::abs(s) < 1e-12) best = std::max(best, objective(a));
            continue;
        }
        const std::size_t m = F.size();
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 1, m + 1);
        Eigen::VectorXd rhs(m + 1);
        const Eigen::VectorXd Qa = Q * a;
        double ya = 0.0;
        for (std::size_t i = 0; i < n; ++i) ya += y[i] * a(i);
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t s = 0; s < m; ++s) A(r, s) = Q(F[r], F[s]);
            A(r, m) = y[F[r]];
            A(m, r) = y[F[r]];
            rhs(r) = 1.0 - Qa(F[r]);
        }
        rhs(m) = -ya;
        const Eigen::VectorXd sol = A.completeOrthogonalDecomposition().solve(rhs);
        if ((A * sol - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) continue;
        bool feasible = true;
        for (std::size_t r = 0; r < m; ++r) {
            if (sol(r) < -1e-12 || sol(r) > C + 1e-12) feasible = false;
            a(F[r]) = std::clamp(sol(r), 0.0, C);
        }
        if (feasible) best = std::max(best, objective(a));
    }
    return best;
}

}  // namespace testutil
