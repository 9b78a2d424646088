#include "lueders/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace lueders::kernels {
namespace {

// Complex products are spelled out on re/im parts: std::complex operator*
// routes through the C99 Annex G recovery path, which is slow and which the
// SIMD variants do not mirror.

void gemm_scalar(std::size_t n, const cplx* a, const cplx* b, cplx* c) {
    const auto* bd = reinterpret_cast<const double*>(b);
    auto* cd = reinterpret_cast<double*>(c);
    std::fill(cd, cd + 2 * n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double* crow = cd + 2 * i * n;
        for (std::size_t k = 0; k < n; ++k) {
            const double ar = a[i * n + k].real();
            const double ai = a[i * n + k].imag();
            const double* brow = bd + 2 * k * n;
            for (std::size_t j = 0; j < n; ++j) {
                const double br = brow[2 * j];
                const double bi = brow[2 * j + 1];
                crow[2 * j] += ar * br - ai * bi;
                crow[2 * j + 1] += ar * bi + ai * br;
            }
        }
    }
}

void gemm_adj_scalar(std::size_t n, const cplx* a, const cplx* b, cplx* c) {
    // c_ij = sum_k a_ik conj(b_jk): both operands walk rows.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double re = 0.0;
            double im = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double ar = a[i * n + k].real();
                const double ai = a[i * n + k].imag();
                const double br = b[j * n + k].real();
                const double bi = -b[j * n + k].imag();
                re += ar * br - ai * bi;
                im += ar * bi + ai * br;
            }
            c[i * n + j] = {re, im};
        }
    }
}

void axpy_scalar(std::size_t len, cplx alpha, const cplx* x, cplx* y) {
    const double ar = alpha.real();
    const double ai = alpha.imag();
    for (std::size_t i = 0; i < len; ++i) {
        const double xr = x[i].real();
        const double xi = x[i].imag();
        y[i] = {y[i].real() + (ar * xr - ai * xi), y[i].imag() + (ar * xi + ai * xr)};
    }
}

double max_abs_scalar(std::size_t len, const cplx* x) {
    double m = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        m = std::max(m, x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
    }
    return std::sqrt(m);
}

}  // namespace

const KernelSet& scalar_kernels() {
    static const KernelSet k{Backend::Scalar, "scalar", gemm_scalar, gemm_adj_scalar, axpy_scalar,
                             max_abs_scalar};
    return k;
}

}  // namespace lueders::kernels
