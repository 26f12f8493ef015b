#include "tcsim/simd/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace tcsim::simd {

#if defined(TCSIM_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

bool cpu_has_avx2() {
#if defined(TCSIM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* avx2_kernels() {
#if defined(TCSIM_HAVE_AVX2)
    if (cpu_has_avx2()) {
        return &avx2_kernel_table();
    }
#endif
    return nullptr;
}

const KernelTable& kernels_for(Backend backend) {
    if (backend == Backend::scalar) {
        return scalar_kernels();
    }
    if (const KernelTable* t = avx2_kernels()) {
        return *t;
    }
    throw std::runtime_error("AVX2 kernels are not available on this machine");
}

namespace {

const KernelTable& resolve() {
    if (const char* env = std::getenv("TCSIM_SIMD")) {
        const std::string choice(env);
        if (choice == "scalar") {
            return scalar_kernels();
        }
        if (choice == "avx2") {
            return kernels_for(Backend::avx2);
        }
    }
    if (const KernelTable* t = avx2_kernels()) {
        return *t;
    }
    return scalar_kernels();
}

}  // namespace

const KernelTable& best_kernels() {
    static const KernelTable& chosen = resolve();
    return chosen;
}

}  // namespace tcsim::simd
