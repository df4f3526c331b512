#ifdef PFLOW_HAVE_AVX2

#include "kernels_impl.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

// AVX2 variants. Same pairwise recursion (base block 128) as the scalar
// kernels; inside a block four lanes accumulate independently and are folded
// at the end, so cross-backend drift stays at rounding level. Element-wise
// maps avoid FMA on purpose: they then produce bit-identical results to the
// scalar backend.

namespace pflow::kern {
namespace {

constexpr std::size_t kBase = 128;

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

inline double hmin(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_min_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_min_sd(lo, sh));
}

inline __m256d vabs(__m256d v) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    return _mm256_and_pd(v, mask);
}

double sum_block(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

double sum_impl(const double* x, std::size_t n) {
    if (n <= kBase) return sum_block(x, n);
    std::size_t half = n / 2;
    return sum_impl(x, half) + sum_impl(x + half, n - half);
}

double dot_block(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double dot_impl(const double* x, const double* y, std::size_t n) {
    if (n <= kBase) return dot_block(x, y, n);
    std::size_t half = n / 2;
    return dot_impl(x, y, half) + dot_impl(x + half, y + half, n - half);
}

double dot_w_block(const double* x, const double* y, const double* w, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d xy = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_fmadd_pd(xy, _mm256_loadu_pd(w + i), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * y[i] * w[i];
    return s;
}

double dot_w_impl(const double* x, const double* y, const double* w, std::size_t n) {
    if (n <= kBase) return dot_w_block(x, y, w, n);
    std::size_t half = n / 2;
    return dot_w_impl(x, y, w, half) + dot_w_impl(x + half, y + half, w + half, n - half);
}

void axpy_impl(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_add_pd(_mm256_loadu_pd(y + i),
                                  _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, t);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void xpay_impl(const double* x, double a, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_add_pd(_mm256_loadu_pd(x + i),
                                  _mm256_mul_pd(va, _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(y + i, t);
    }
    for (; i < n; ++i) y[i] = x[i] + a * y[i];
}

void clamp_impl(const double* x, double lo, double hi, double* y, std::size_t n) {
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vhi = _mm256_set1_pd(hi);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_min_pd(vhi, _mm256_max_pd(vlo, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, t);
    }
    for (; i < n; ++i) y[i] = std::min(hi, std::max(lo, x[i]));
}

double max_abs_impl(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, vabs(_mm256_loadu_pd(x + i)));
    double m = hmax(acc);
    for (; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

double max_abs_diff_impl(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_max_pd(acc, vabs(d));
    }
    double m = hmax(acc);
    for (; i < n; ++i) m = std::max(m, std::fabs(x[i] - y[i]));
    return m;
}

double min_val_impl(const double* x, std::size_t n) {
    if (n < 8) {
        double m = x[0];
        for (std::size_t i = 1; i < n; ++i) m = std::min(m, x[i]);
        return m;
    }
    __m256d acc = _mm256_loadu_pd(x);
    std::size_t i = 4;
    for (; i + 4 <= n; i += 4) acc = _mm256_min_pd(acc, _mm256_loadu_pd(x + i));
    double m = hmin(acc);
    for (; i < n; ++i) m = std::min(m, x[i]);
    return m;
}

double max_val_impl(const double* x, std::size_t n) {
    if (n < 8) {
        double m = x[0];
        for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
        return m;
    }
    __m256d acc = _mm256_loadu_pd(x);
    std::size_t i = 4;
    for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
    double m = hmax(acc);
    for (; i < n; ++i) m = std::max(m, x[i]);
    return m;
}

double asum_diff_w_block(const double* a, const double* b, const double* w, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = vabs(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        acc = _mm256_fmadd_pd(d, _mm256_loadu_pd(w + i), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * std::fabs(a[i] - b[i]);
    return s;
}

double asum_diff_w_impl(const double* a, const double* b, const double* w, std::size_t n) {
    if (n <= kBase) return asum_diff_w_block(a, b, w, n);
    std::size_t half = n / 2;
    return asum_diff_w_impl(a, b, w, half) + asum_diff_w_impl(a + half, b + half, w + half, n - half);
}

double psum_diff_w_block(const double* a, const double* b, const double* w, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    __m256d acc = zero;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_max_pd(zero, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        acc = _mm256_fmadd_pd(d, _mm256_loadu_pd(w + i), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * std::max(a[i] - b[i], 0.0);
    return s;
}

double psum_diff_w_impl(const double* a, const double* b, const double* w, std::size_t n) {
    if (n <= kBase) return psum_diff_w_block(a, b, w, n);
    std::size_t half = n / 2;
    return psum_diff_w_impl(a, b, w, half) + psum_diff_w_impl(a + half, b + half, w + half, n - half);
}

} // namespace

const KernelOps avx2_ops = {
    sum_impl,    dot_impl,          dot_w_impl,   axpy_impl,
    xpay_impl,   clamp_impl,        max_abs_impl, max_abs_diff_impl,
    min_val_impl, max_val_impl,     asum_diff_w_impl, psum_diff_w_impl,
};

} // namespace pflow::kern

#endif // PFLOW_HAVE_AVX2
