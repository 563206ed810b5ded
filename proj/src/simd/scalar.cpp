#include <algorithm>

#include "dwloa/simd.hpp"

namespace dwloa::simd::detail {

namespace {

std::int64_t sum_min_i32(const std::int32_t* a, const std::int32_t* b, std::size_t n) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < n; ++i) s += std::min(a[i], b[i]);
    return s;
}

std::int64_t dot_i32(const std::int32_t* a, const std::int32_t* b, std::size_t n) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < n; ++i) s += std::int64_t{a[i]} * b[i];
    return s;
}

double sum_min_weighted(const std::int32_t* a, const std::int32_t* b, const double* w,
                        std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += static_cast<double>(std::min(a[i], b[i])) * w[i];
    return s;
}

double dot_f64(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_f64(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable t{Isa::kScalar, sum_min_i32, dot_i32, sum_min_weighted, dot_f64,
                               axpy_f64};
    return t;
}

}  // namespace dwloa::simd::detail
