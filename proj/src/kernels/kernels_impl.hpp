#pragma once

#include <cstddef>

namespace pflow::kern {

struct KernelOps {
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*dot_w)(const double*, const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*xpay)(const double*, double, double*, std::size_t);
    void (*clamp)(const double*, double, double, double*, std::size_t);
    double (*max_abs)(const double*, std::size_t);
    double (*max_abs_diff)(const double*, const double*, std::size_t);
    double (*min_val)(const double*, std::size_t);
    double (*max_val)(const double*, std::size_t);
    double (*asum_diff_w)(const double*, const double*, const double*, std::size_t);
    double (*psum_diff_w)(const double*, const double*, const double*, std::size_t);
};

extern const KernelOps scalar_ops;

#ifdef PFLOW_HAVE_AVX2
extern const KernelOps avx2_ops;
#endif

} // namespace pflow::kern
