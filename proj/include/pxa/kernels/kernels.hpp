#pragma once

// Data-parallel inner loops shared by the flow estimator and the
// preprocessing stage. Every kernel has a portable scalar reference in
// pxa::kernels::scalar and, where the host supports it, an AVX2 variant.
// Both produce bit-identical results; dispatch happens once at startup.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace pxa::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

// dst(x,y) = sum_k taps[k] * src(clamp(x + k - r), y), r = taps.size() / 2.
// taps.size() must be odd. Accumulation order is k = 0 .. taps.size()-1.
using CorrelateFn = void (*)(std::span<const float> src, std::span<float> dst, int width,
                             int height, std::span<const float> taps);

// 3x3 median with replicated borders; codes must be < 32768.
using Median3x3Fn = void (*)(std::span<const std::uint16_t> src, std::span<std::uint16_t> dst,
                             int width, int height);

// out[i] = sqrt(ux[i]^2 + uy[i]^2)
using MagnitudeFn = void (*)(std::span<const float> ux, std::span<const float> uy,
                             std::span<float> out);

struct KernelTable {
    Isa isa;
    CorrelateFn correlate_rows;
    CorrelateFn correlate_cols;
    Median3x3Fn median3x3;
    MagnitudeFn magnitude;
};

const KernelTable& scalar_table() noexcept;

// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const KernelTable* avx2_table() noexcept;

// Best table for this host. PXA_FORCE_SCALAR=1 in the environment pins the
// scalar reference.
const KernelTable& active() noexcept;

// Override for tests and benchmarking; returns the previous selection.
Isa select(Isa isa);

namespace scalar {
void correlate_rows(std::span<const float> src, std::span<float> dst, int width, int height,
                    std::span<const float> taps);
void correlate_cols(std::span<const float> src, std::span<float> dst, int width, int height,
                    std::span<const float> taps);
void median3x3(std::span<const std::uint16_t> src, std::span<std::uint16_t> dst, int width,
               int height);
void magnitude(std::span<const float> ux, std::span<const float> uy, std::span<float> out);
}  // namespace scalar

#if defined(PXA_HAVE_AVX2)
namespace avx2 {
void correlate_rows(std::span<const float> src, std::span<float> dst, int width, int height,
                    std::span<const float> taps);
void correlate_cols(std::span<const float> src, std::span<float> dst, int width, int height,
                    std::span<const float> taps);
void median3x3(std::span<const std::uint16_t> src, std::span<std::uint16_t> dst, int width,
               int height);
void magnitude(std::span<const float> ux, std::span<const float> uy, std::span<float> out);
}  // namespace avx2
#endif

}  // namespace pxa::kernels
