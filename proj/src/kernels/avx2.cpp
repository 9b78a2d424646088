// AVX2 + FMA kernels. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after dispatch has confirmed CPU support.
#include "lueders/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace lueders::kernels {
namespace {

// One __m256d holds two interleaved complex values [re0, im0, re1, im1].

inline __m256d cmul_bcast(__m256d a_re, __m256d a_im, __m256d b) {
    // (ar + i ai)(br + i bi): even lanes ar*br - ai*bi, odd lanes ar*bi + ai*br
    const __m256d b_swap = _mm256_permute_pd(b, 0b0101);
    return _mm256_fmaddsub_pd(a_re, b, _mm256_mul_pd(a_im, b_swap));
}

void gemm_avx2(std::size_t n, const cplx* a, const cplx* b, cplx* c) {
    const auto* bd = reinterpret_cast<const double*>(b);
    auto* cd = reinterpret_cast<double*>(c);
    std::fill(cd, cd + 2 * n * n, 0.0);
    const std::size_t n2 = n & ~std::size_t{1};
    for (std::size_t i = 0; i < n; ++i) {
        double* crow = cd + 2 * i * n;
        for (std::size_t k = 0; k < n; ++k) {
            const double ar = a[i * n + k].real();
            const double ai = a[i * n + k].imag();
            const __m256d vr = _mm256_set1_pd(ar);
            const __m256d vi = _mm256_set1_pd(ai);
            const double* brow = bd + 2 * k * n;
            std::size_t j = 0;
            for (; j < n2; j += 2) {
                __m256d acc = _mm256_loadu_pd(crow + 2 * j);
                acc = _mm256_add_pd(acc, cmul_bcast(vr, vi, _mm256_loadu_pd(brow + 2 * j)));
                _mm256_storeu_pd(crow + 2 * j, acc);
            }
            for (; j < n; ++j) {
                const double br = brow[2 * j];
                const double bi = brow[2 * j + 1];
                crow[2 * j] += ar * br - ai * bi;
                crow[2 * j + 1] += ar * bi + ai * br;
            }
        }
    }
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void gemm_adj_avx2(std::size_t n, const cplx* a, const cplx* b, cplx* c) {
    const std::size_t n2 = n & ~std::size_t{1};
    const __m256d odd_sign = _mm256_set_pd(1.0, -1.0, 1.0, -1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto* arow = reinterpret_cast<const double*>(a + i * n);
        for (std::size_t j = 0; j < n; ++j) {
            const auto* brow = reinterpret_cast<const double*>(b + j * n);
            // p collects ar*br, ai*bi; q collects ar*bi, ai*br
            __m256d p = _mm256_setzero_pd();
            __m256d q = _mm256_setzero_pd();
            std::size_t k = 0;
            for (; k < n2; k += 2) {
                const __m256d va = _mm256_loadu_pd(arow + 2 * k);
                const __m256d vb = _mm256_loadu_pd(brow + 2 * k);
                p = _mm256_fmadd_pd(va, vb, p);
                q = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0b0101), q);
            }
            double re = hsum(p);
            double im = hsum(_mm256_mul_pd(q, odd_sign));
            for (; k < n; ++k) {
                const double ar = arow[2 * k];
                const double ai = arow[2 * k + 1];
                const double br = brow[2 * k];
                const double bi = brow[2 * k + 1];
                re += ar * br + ai * bi;
                im += ai * br - ar * bi;
            }
            c[i * n + j] = {re, im};
        }
    }
}

void axpy_avx2(std::size_t len, cplx alpha, const cplx* x, cplx* y) {
    const auto* xd = reinterpret_cast<const double*>(x);
    auto* yd = reinterpret_cast<double*>(y);
    const __m256d vr = _mm256_set1_pd(alpha.real());
    const __m256d vi = _mm256_set1_pd(alpha.imag());
    std::size_t i = 0;
    for (; i + 2 <= len; i += 2) {
        const __m256d prod = cmul_bcast(vr, vi, _mm256_loadu_pd(xd + 2 * i));
        _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yd + 2 * i), prod));
    }
    for (; i < len; ++i) {
        const double xr = x[i].real();
        const double xi = x[i].imag();
        y[i] = {y[i].real() + (alpha.real() * xr - alpha.imag() * xi),
                y[i].imag() + (alpha.real() * xi + alpha.imag() * xr)};
    }
}

double max_abs_avx2(std::size_t len, const cplx* x) {
    const auto* xd = reinterpret_cast<const double*>(x);
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= len; i += 2) {
        const __m256d v = _mm256_loadu_pd(xd + 2 * i);
        const __m256d sq = _mm256_mul_pd(v, v);
        // re^2 + im^2 lands in both lanes of each complex slot
        m = _mm256_max_pd(m, _mm256_hadd_pd(sq, sq));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    double best = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; i < len; ++i) {
        best = std::max(best, x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
    }
    return std::sqrt(best);
}

}  // namespace

const KernelSet& avx2_kernels() {
    static const KernelSet k{Backend::Avx2, "avx2", gemm_avx2, gemm_adj_avx2, axpy_avx2, max_abs_avx2};
    return k;
}

}  // namespace lueders::kernels
