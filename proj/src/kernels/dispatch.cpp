#include "lueders/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace lueders::kernels {
namespace {

bool cpu_supports(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return true;
        case Backend::Avx2:
#if defined(LUEDERS_KERNEL_AVX2) && (defined(__GNUC__) || defined(__clang__))
            __builtin_cpu_init();
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::Neon:
#if defined(LUEDERS_KERNEL_NEON)
            return true;  // mandatory on AArch64
#else
            return false;
#endif
    }
    return false;
}

const KernelSet* initial_choice() {
    if (const char* env = std::getenv("LUEDERS_KERNEL"); env != nullptr && *env != '\0') {
        const std::string want(env);
        for (Backend b : available_backends()) {
            if (backend_name(b) == want) {
                return &kernels_for(b);
            }
        }
        throw std::runtime_error("LUEDERS_KERNEL=" + want + " is not available on this machine");
    }
    return &kernels_for(available_backends().back());
}

std::atomic<const KernelSet*>& slot() {
    static std::atomic<const KernelSet*> s{initial_choice()};
    return s;
}

}  // namespace

std::string_view backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return "scalar";
        case Backend::Avx2:
            return "avx2";
        case Backend::Neon:
            return "neon";
    }
    return "unknown";
}

std::vector<Backend> available_backends() {
    std::vector<Backend> out{Backend::Scalar};
    for (Backend b : {Backend::Avx2, Backend::Neon}) {
        if (cpu_supports(b)) {
            out.push_back(b);
        }
    }
    return out;
}

const KernelSet& kernels_for(Backend b) {
    if (!cpu_supports(b)) {
        throw std::runtime_error("kernel backend '" + std::string(backend_name(b)) + "' is not available");
    }
    switch (b) {
#if defined(LUEDERS_KERNEL_AVX2)
        case Backend::Avx2:
            return avx2_kernels();
#endif
#if defined(LUEDERS_KERNEL_NEON)
        case Backend::Neon:
            return neon_kernels();
#endif
        default:
            return scalar_kernels();
    }
}

const KernelSet& active() { return *slot().load(std::memory_order_acquire); }

void select(Backend b) { slot().store(&kernels_for(b), std::memory_order_release); }

}  // namespace lueders::kernels
