#include <cstdlib>
#include <cstring>

#include "pxa/kernels/kernels.hpp"

namespace pxa::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, scalar::correlate_rows, scalar::correlate_cols,
                              scalar::median3x3, scalar::magnitude};

#if defined(PXA_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, avx2::correlate_rows, avx2::correlate_cols,
                            avx2::median3x3, avx2::magnitude};
#endif

bool cpu_has_avx2() noexcept {
#if defined(PXA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const KernelTable* initial() noexcept {
    const char* force = std::getenv("PXA_FORCE_SCALAR");
    if (force != nullptr && std::strcmp(force, "0") != 0 && *force != '\0') return &kScalar;
    if (const KernelTable* t = avx2_table()) return t;
    return &kScalar;
}

const KernelTable*& current() noexcept {
    static const KernelTable* table = initial();
    return table;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "unknown";
}

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* avx2_table() noexcept {
#if defined(PXA_HAVE_AVX2)
    static const bool ok = cpu_has_avx2();
    return ok ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() noexcept { return *current(); }

Isa select(Isa isa) {
    const Isa prev = current()->isa;
    if (isa == Isa::avx2) {
        const KernelTable* t = avx2_table();
        current() = t != nullptr ? t : &kScalar;
    } else {
        current() = &kScalar;
    }
    return prev;
}

}  // namespace pxa::kernels
