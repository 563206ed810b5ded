#pragma once

// Inner loops of the kernel computations. Every routine has a portable scalar
// reference and, where the CPU allows it, a vectorized variant; the variant is
// picked once at startup and can be pinned with force_isa() (tests compare the
// two paths directly through table()).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace dwloa::simd {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
    Isa isa;
    /// sum_i min(a_i, b_i)
    std::int64_t (*sum_min_i32)(const std::int32_t* a, const std::int32_t* b, std::size_t n);
    /// sum_i a_i * b_i, 64-bit products
    std::int64_t (*dot_i32)(const std::int32_t* a, const std::int32_t* b, std::size_t n);
    /// sum_i min(a_i, b_i) * w_i
    double (*sum_min_weighted)(const std::int32_t* a, const std::int32_t* b, const double* w,
                               std::size_t n);
    double (*dot_f64)(const double* a, const double* b, std::size_t n);
    /// y += alpha * x
    void (*axpy_f64)(double alpha, const double* x, double* y, std::size_t n);
};

/// Best instruction set supported by this CPU and build.
Isa detected_isa();
/// Instruction set currently used by the free functions below.
Isa active_isa();
/// Pins the active instruction set. Throws Error if the CPU lacks it.
void force_isa(Isa isa);
bool isa_supported(Isa isa);
std::string_view isa_name(Isa isa);

const KernelTable& table(Isa isa);
const KernelTable& active();

inline std::int64_t sum_min(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
    return active().sum_min_i32(a.data(), b.data(), a.size());
}
inline std::int64_t dot(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
    return active().dot_i32(a.data(), b.data(), a.size());
}
inline double sum_min_weighted(std::span<const std::int32_t> a, std::span<const std::int32_t> b,
                               std::span<const double> w) {
    return active().sum_min_weighted(a.data(), b.data(), w.data(), a.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot_f64(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy_f64(alpha, x.data(), y.data(), x.size());
}

namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in
}  // namespace detail

}  // namespace dwloa::simd
