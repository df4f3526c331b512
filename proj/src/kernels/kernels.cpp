#include "pflow/kernels.hpp"

#include "kernels_impl.hpp"
#include "pflow/errors.hpp"

#include <cstdlib>
#include <cstring>
#include <string>

namespace pflow::kern {
namespace {

bool avx2_available() {
#ifdef PFLOW_HAVE_AVX2
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const KernelOps* ops_for(Backend b) {
    switch (b) {
    case Backend::Scalar:
        return &scalar_ops;
    case Backend::Avx2:
#ifdef PFLOW_HAVE_AVX2
        return &avx2_ops;
#else
        break;
#endif
    }
    return nullptr;
}

struct State {
    Backend backend;
    const KernelOps* ops;
};

State init_state() {
    Backend b = avx2_available() ? Backend::Avx2 : Backend::Scalar;
    if (const char* env = std::getenv("PFLOW_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) {
            b = Backend::Scalar;
        } else if (std::strcmp(env, "avx2") == 0) {
            if (!avx2_available())
                throw Error("PFLOW_KERNELS=avx2 but this CPU/build has no avx2 support");
            b = Backend::Avx2;
        } else {
            throw Error(std::string("unknown PFLOW_KERNELS value: ") + env);
        }
    }
    return {b, ops_for(b)};
}

State& state() {
    static State s = init_state();
    return s;
}

} // namespace

Backend active_backend() { return state().backend; }

const char* backend_name() {
    return state().backend == Backend::Avx2 ? "avx2" : "scalar";
}

void set_backend(Backend b) {
    const KernelOps* ops = ops_for(b);
    if (!ops || (b == Backend::Avx2 && !avx2_available()))
        throw Error("requested kernel backend is not available");
    state() = {b, ops};
}

double sum(const double* x, std::size_t n) { return state().ops->sum(x, n); }
double dot(const double* x, const double* y, std::size_t n) { return state().ops->dot(x, y, n); }
double dot_w(const double* x, const double* y, const double* w, std::size_t n) {
    return state().ops->dot_w(x, y, w, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) { state().ops->axpy(a, x, y, n); }
void xpay(const double* x, double a, double* y, std::size_t n) { state().ops->xpay(x, a, y, n); }
void clamp(const double* x, double lo, double hi, double* y, std::size_t n) {
    state().ops->clamp(x, lo, hi, y, n);
}
double max_abs(const double* x, std::size_t n) { return state().ops->max_abs(x, n); }
double max_abs_diff(const double* x, const double* y, std::size_t n) {
    return state().ops->max_abs_diff(x, y, n);
}
double min_val(const double* x, std::size_t n) { return state().ops->min_val(x, n); }
double max_val(const double* x, std::size_t n) { return state().ops->max_val(x, n); }
double asum_diff_w(const double* a, const double* b, const double* w, std::size_t n) {
    return state().ops->asum_diff_w(a, b, w, n);
}
double psum_diff_w(const double* a, const double* b, const double* w, std::size_t n) {
    return state().ops->psum_diff_w(a, b, w, n);
}

} // namespace pflow::kern
