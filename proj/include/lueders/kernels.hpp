#pragma once
// Dense complex kernels for the inner loops of the operator algebra.
//
// Data layout: interleaved complex<double>, row-major, square n x n. Every
// backend computes the same quantities with the same loop order; they differ
// only in FMA contraction and lane-parallel accumulation, so results agree to
// a few ulps of the accumulated magnitude (see tests/test_kernels.cpp).

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace lueders::kernels {

using cplx = std::complex<double>;

enum class Backend { Scalar, Avx2, Neon };

struct KernelSet {
    Backend backend;
    std::string_view name;
    /// c = a * b for n x n row-major matrices. c must not alias a or b.
    void (*gemm)(std::size_t n, const cplx* a, const cplx* b, cplx* c);
    /// c = a * b^dagger.
    void (*gemm_adj)(std::size_t n, const cplx* a, const cplx* b, cplx* c);
    /// y += alpha * x over len elements.
    void (*axpy)(std::size_t len, cplx alpha, const cplx* x, cplx* y);
    /// max_i |x_i|
    double (*max_abs)(std::size_t len, const cplx* x);
};

const KernelSet& scalar_kernels();
#if defined(LUEDERS_KERNEL_AVX2)
const KernelSet& avx2_kernels();
#endif
#if defined(LUEDERS_KERNEL_NEON)
const KernelSet& neon_kernels();
#endif

/// Backends compiled in and supported by the running CPU, scalar first.
std::vector<Backend> available_backends();
const KernelSet& kernels_for(Backend b);

/// The process-wide kernel set. Chosen on first use: the widest supported
/// backend, unless LUEDERS_KERNEL=scalar|avx2|neon overrides it.
const KernelSet& active();

/// Force a backend (tests, benchmarks). Throws if unavailable.
void select(Backend b);

std::string_view backend_name(Backend b);

}  // namespace lueders::kernels
