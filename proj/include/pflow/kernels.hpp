#pragma once

#include <cstddef>

// Hot array loops used by the solvers. Every operation has a scalar
// reference implementation and may have SIMD variants; the active variant is
// picked once at startup from the CPU features, or forced via the
// PFLOW_KERNELS environment variable ("scalar", "avx2").
//
// Reductions use pairwise (block-recursive) accumulation in every backend so
// results are deterministic for a fixed backend and stay close across
// backends even on ill-conditioned sums.

namespace pflow::kern {

enum class Backend { Scalar, Avx2 };

Backend active_backend();
const char* backend_name();

// Force a backend (tests). Throws pflow::Error if unsupported on this CPU.
void set_backend(Backend b);

double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
// Weighted dot: sum x[i]*y[i]*w[i]. Cell-volume inner products.
double dot_w(const double* x, const double* y, const double* w, std::size_t n);

void axpy(double a, const double* x, double* y, std::size_t n); // y += a*x
void xpay(const double* x, double a, double* y, std::size_t n); // y = x + a*y

void clamp(const double* x, double lo, double hi, double* y, std::size_t n);

double max_abs(const double* x, std::size_t n);
double max_abs_diff(const double* x, const double* y, std::size_t n);
double min_val(const double* x, std::size_t n);
double max_val(const double* x, std::size_t n);

// sum w[i]*|a[i]-b[i]|  and  sum w[i]*max(a[i]-b[i], 0)
double asum_diff_w(const double* a, const double* b, const double* w, std::size_t n);
double psum_diff_w(const double* a, const double* b, const double* w, std::size_t n);

} // namespace pflow::kern
