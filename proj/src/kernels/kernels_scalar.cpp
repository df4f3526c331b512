#include "kernels_impl.hpp"

#include <algorithm>
#include <cmath>

// Reference kernels. Reductions split the range in half recursively down to
// a small base block, which keeps rounding error O(log n) and makes the
// summation order independent of how callers chunk their data.

namespace pflow::kern {
namespace {

constexpr std::size_t kBase = 128;

double sum_impl(const double* x, std::size_t n) {
    if (n <= kBase) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    std::size_t half = n / 2;
    return sum_impl(x, half) + sum_impl(x + half, n - half);
}

double dot_impl(const double* x, const double* y, std::size_t n) {
    if (n <= kBase) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
        return s;
    }
    std::size_t half = n / 2;
    return dot_impl(x, y, half) + dot_impl(x + half, y + half, n - half);
}

double dot_w_impl(const double* x, const double* y, const double* w, std::size_t n) {
    if (n <= kBase) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i] * w[i];
        return s;
    }
    std::size_t half = n / 2;
    return dot_w_impl(x, y, w, half) + dot_w_impl(x + half, y + half, w + half, n - half);
}

void axpy_impl(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpay_impl(const double* x, double a, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + a * y[i];
}

void clamp_impl(const double* x, double lo, double hi, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::min(hi, std::max(lo, x[i]));
}

double max_abs_impl(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

double max_abs_diff_impl(const double* x, const double* y, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i] - y[i]));
    return m;
}

double min_val_impl(const double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = std::min(m, x[i]);
    return m;
}

double max_val_impl(const double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
    return m;
}

double asum_diff_w_impl(const double* a, const double* b, const double* w, std::size_t n) {
    if (n <= kBase) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += w[i] * std::fabs(a[i] - b[i]);
        return s;
    }
    std::size_t half = n / 2;
    return asum_diff_w_impl(a, b, w, half) + asum_diff_w_impl(a + half, b + half, w + half, n - half);
}

double psum_diff_w_impl(const double* a, const double* b, const double* w, std::size_t n) {
    if (n <= kBase) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += w[i] * std::max(a[i] - b[i], 0.0);
        return s;
    }
    std::size_t half = n / 2;
    return psum_diff_w_impl(a, b, w, half) + psum_diff_w_impl(a + half, b + half, w + half, n - half);
}

} // namespace

const KernelOps scalar_ops = {
    sum_impl,    dot_impl,          dot_w_impl,   axpy_impl,
    xpay_impl,   clamp_impl,        max_abs_impl, max_abs_diff_impl,
    min_val_impl, max_val_impl,     asum_diff_w_impl, psum_diff_w_impl,
};

} // namespace pflow::kern
