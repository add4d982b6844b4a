#if defined(__x86_64__) || defined(_M_X64)
#include "mfrac/kernels.hpp"

#include <immintrin.h>
#include <limits>

// AVX2 backend. Compiled with -mavx2 in this translation unit only; the
// dispatcher never calls in here unless the CPU reports the feature.
namespace mfrac::kern::avx2 {

static inline double kmax(double a, double b) { return a > b ? a : b; }

// (l0 + l2) + (l1 + l3), matching the scalar lane combine
static inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s2 = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(s2) + _mm_cvtsd_f64(_mm_unpackhi_pd(s2, s2));
}

// max(max(l0, l2), max(l1, l3))
static inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m2 = _mm_max_pd(lo, hi);
    __m128d m1 = _mm_max_sd(m2, _mm_unpackhi_pd(m2, m2));
    return _mm_cvtsd_f64(m1);
}

double reduce_add(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4)
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (std::size_t i = n4; i < n; ++i) s += x[i];
    return s;
}

double reduce_dot(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d p = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_add_pd(acc, p); // separate mul+add, no FMA
    }
    double s = hsum(acc);
    for (std::size_t i = n4; i < n; ++i) s += x[i] * y[i];
    return s;
}

static double max_value(const double* x, std::size_t n) {
    __m256d acc = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4)
        acc = _mm256_max_pd(_mm256_loadu_pd(x + i), acc);
    double m = hmax(acc);
    for (std::size_t i = n4; i < n; ++i) m = kmax(x[i], m);
    return m;
}

MaxHit max_element(const double* x, std::size_t n) {
    if (n == 0) return {-std::numeric_limits<double>::infinity(), -1};
    double m = max_value(x, n);
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] == m) return {m, std::ptrdiff_t(i)};
    return {m, 0};
}

MaxHit scaled_diff_max(const double* hi, const double* lo, std::size_t n, double w) {
    if (n == 0) return {-std::numeric_limits<double>::infinity(), -1};
    __m256d wv = _mm256_set1_pd(w);
    __m256d acc = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(hi + i), _mm256_loadu_pd(lo + i));
        acc = _mm256_max_pd(_mm256_mul_pd(wv, d), acc);
    }
    double m = hmax(acc);
    for (std::size_t i = n4; i < n; ++i) m = kmax(w * (hi[i] - lo[i]), m);
    for (std::size_t i = 0; i < n; ++i)
        if (w * (hi[i] - lo[i]) == m) return {m, std::ptrdiff_t(i)};
    return {m, 0};
}

void max_update(double* dst, std::size_t n, double c) {
    __m256d cv = _mm256_set1_pd(c);
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4)
        _mm256_storeu_pd(dst + i, _mm256_max_pd(cv, _mm256_loadu_pd(dst + i)));
    for (std::size_t i = n4; i < n; ++i) dst[i] = kmax(c, dst[i]);
}

} // namespace mfrac::kern::avx2
#endif
