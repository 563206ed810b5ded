// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>

#include "dwloa/simd.hpp"

namespace dwloa::simd::detail {

namespace {

inline std::int64_t hsum_epi64(__m256i v) {
    __m128i lo = _mm256_castsi256_si128(v);
    __m128i hi = _mm256_extracti128_si256(v, 1);
    __m128i s = _mm_add_epi64(lo, hi);
    return _mm_cvtsi128_si64(s) + _mm_extract_epi64(s, 1);
}

inline double hsum_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

std::int64_t sum_min_i32(const std::int32_t* a, const std::int32_t* b, std::size_t n) {
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        __m256i m = _mm256_min_epi32(va, vb);
        acc = _mm256_add_epi64(acc, _mm256_cvtepi32_epi64(_mm256_castsi256_si128(m)));
        acc = _mm256_add_epi64(acc, _mm256_cvtepi32_epi64(_mm256_extracti128_si256(m, 1)));
    }
    std::int64_t s = hsum_epi64(acc);
    for (; i < n; ++i) s += std::min(a[i], b[i]);
    return s;
}

std::int64_t dot_i32(const std::int32_t* a, const std::int32_t* b, std::size_t n) {
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        // even lanes, then odd lanes shifted into the low halves
        acc = _mm256_add_epi64(acc, _mm256_mul_epi32(va, vb));
        acc = _mm256_add_epi64(
            acc, _mm256_mul_epi32(_mm256_srli_epi64(va, 32), _mm256_srli_epi64(vb, 32)));
    }
    std::int64_t s = hsum_epi64(acc);
    for (; i < n; ++i) s += std::int64_t{a[i]} * b[i];
    return s;
}

double sum_min_weighted(const std::int32_t* a, const std::int32_t* b, const double* w,
                        std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        __m256i m = _mm256_min_epi32(va, vb);
        __m256d lo = _mm256_cvtepi32_pd(_mm256_castsi256_si128(m));
        __m256d hi = _mm256_cvtepi32_pd(_mm256_extracti128_si256(m, 1));
        acc0 = _mm256_fmadd_pd(lo, _mm256_loadu_pd(w + i), acc0);
        acc1 = _mm256_fmadd_pd(hi, _mm256_loadu_pd(w + i + 4), acc1);
    }
    double s = hsum_pd(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += static_cast<double>(std::min(a[i], b[i])) * w[i];
    return s;
}

double dot_f64(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    double s = hsum_pd(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_f64(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable* avx2_table() {
    static const KernelTable t{Isa::kAvx2, sum_min_i32, dot_i32, sum_min_weighted, dot_f64,
                               axpy_f64};
    return &t;
}

}  // namespace dwloa::simd::detail
