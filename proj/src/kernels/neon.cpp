// AArch64 NEON kernels. One float64x2_t holds a single complex value.
#include "lueders/kernels.hpp"

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

namespace lueders::kernels {
namespace {

inline float64x2_t cmul(double ar, double ai, float64x2_t b) {
    // [ar*br - ai*bi, ar*bi + ai*br]
    const float64x2_t b_swap = vextq_f64(b, b, 1);
    const float64x2_t sign = {-1.0, 1.0};
    return vfmaq_f64(vmulq_n_f64(b, ar), vmulq_f64(b_swap, sign), vdupq_n_f64(ai));
}

void gemm_neon(std::size_t n, const cplx* a, const cplx* b, cplx* c) {
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
                float64x2_t acc = vld1q_f64(crow + 2 * j);
                acc = vaddq_f64(acc, cmul(ar, ai, vld1q_f64(brow + 2 * j)));
                vst1q_f64(crow + 2 * j, acc);
            }
        }
    }
}

void gemm_adj_neon(std::size_t n, const cplx* a, const cplx* b, cplx* c) {
    for (std::size_t i = 0; i < n; ++i) {
        const auto* arow = reinterpret_cast<const double*>(a + i * n);
        for (std::size_t j = 0; j < n; ++j) {
            const auto* brow = reinterpret_cast<const double*>(b + j * n);
            float64x2_t p = vdupq_n_f64(0.0);
            float64x2_t q = vdupq_n_f64(0.0);
            for (std::size_t k = 0; k < n; ++k) {
                const float64x2_t va = vld1q_f64(arow + 2 * k);
                const float64x2_t vb = vld1q_f64(brow + 2 * k);
                p = vfmaq_f64(p, va, vb);
                q = vfmaq_f64(q, va, vextq_f64(vb, vb, 1));
            }
            c[i * n + j] = {vgetq_lane_f64(p, 0) + vgetq_lane_f64(p, 1),
                            vgetq_lane_f64(q, 1) - vgetq_lane_f64(q, 0)};
        }
    }
}

void axpy_neon(std::size_t len, cplx alpha, const cplx* x, cplx* y) {
    const auto* xd = reinterpret_cast<const double*>(x);
    auto* yd = reinterpret_cast<double*>(y);
    for (std::size_t i = 0; i < len; ++i) {
        const float64x2_t prod = cmul(alpha.real(), alpha.imag(), vld1q_f64(xd + 2 * i));
        vst1q_f64(yd + 2 * i, vaddq_f64(vld1q_f64(yd + 2 * i), prod));
    }
}

double max_abs_neon(std::size_t len, const cplx* x) {
    const auto* xd = reinterpret_cast<const double*>(x);
    double best = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        const float64x2_t v = vld1q_f64(xd + 2 * i);
        best = std::max(best, vaddvq_f64(vmulq_f64(v, v)));
    }
    return std::sqrt(best);
}

}  // namespace

const KernelSet& neon_kernels() {
    static const KernelSet k{Backend::Neon, "neon", gemm_neon, gemm_adj_neon, axpy_neon, max_abs_neon};
    return k;
}

}  // namespace lueders::kernels
