// Compiled with -mavx2 only; callers reach it through the dispatch table
// after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "median_network.hpp"
#include "pxa/common/error.hpp"
#include "pxa/kernels/kernels.hpp"

namespace pxa::kernels::avx2 {

namespace {

struct VecOps {
    __m256i lo(__m256i a, __m256i b) const { return _mm256_min_epu16(a, b); }
    __m256i hi(__m256i a, __m256i b) const { return _mm256_max_epu16(a, b); }
};

struct ScalarOps {
    std::uint16_t lo(std::uint16_t a, std::uint16_t b) const { return a < b ? a : b; }
    std::uint16_t hi(std::uint16_t a, std::uint16_t b) const { return a < b ? b : a; }
};

}  // namespace

void correlate_rows(std::span<const float> src, std::span<float> dst, int width, int height,
                    std::span<const float> taps) {
    const auto area = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    expect(src.size() >= area && dst.size() >= area, "correlate: buffer smaller than width*height");
    expect(taps.size() % 2 == 1, "correlate: tap count must be odd");
    const int r = static_cast<int>(taps.size() / 2);
    const int ntaps = static_cast<int>(taps.size());

    auto scalar_at = [&](const float* s, int x) {
        float acc = 0.0f;
        for (int k = 0; k < ntaps; ++k) acc += taps[k] * s[std::clamp(x + k - r, 0, width - 1)];
        return acc;
    };

    for (int y = 0; y < height; ++y) {
        const float* s = src.data() + static_cast<std::size_t>(y) * width;
        float* d = dst.data() + static_cast<std::size_t>(y) * width;
        const int lo = std::min(r, width);
        int x = 0;
        for (; x < lo; ++x) d[x] = scalar_at(s, x);
        for (; x + 8 + r <= width; x += 8) {
            __m256 acc = _mm256_setzero_ps();
            for (int k = 0; k < ntaps; ++k) {
                const __m256 w = _mm256_set1_ps(taps[k]);
                acc = _mm256_add_ps(acc, _mm256_mul_ps(w, _mm256_loadu_ps(s + x + k - r)));
            }
            _mm256_storeu_ps(d + x, acc);
        }
        for (; x < width; ++x) d[x] = scalar_at(s, x);
    }
}

void correlate_cols(std::span<const float> src, std::span<float> dst, int width, int height,
                    std::span<const float> taps) {
    const auto area = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    expect(src.size() >= area && dst.size() >= area, "correlate: buffer smaller than width*height");
    expect(taps.size() % 2 == 1, "correlate: tap count must be odd");
    const int r = static_cast<int>(taps.size() / 2);
    const int ntaps = static_cast<int>(taps.size());
    std::vector<const float*> rows(static_cast<std::size_t>(ntaps));

    for (int y = 0; y < height; ++y) {
        for (int k = 0; k < ntaps; ++k)
            rows[k] = src.data() + static_cast<std::size_t>(std::clamp(y + k - r, 0, height - 1)) * width;
        float* d = dst.data() + static_cast<std::size_t>(y) * width;
        int x = 0;
        for (; x + 8 <= width; x += 8) {
            __m256 acc = _mm256_setzero_ps();
            for (int k = 0; k < ntaps; ++k) {
                const __m256 w = _mm256_set1_ps(taps[k]);
                acc = _mm256_add_ps(acc, _mm256_mul_ps(w, _mm256_loadu_ps(rows[k] + x)));
            }
            _mm256_storeu_ps(d + x, acc);
        }
        for (; x < width; ++x) {
            float acc = 0.0f;
            for (int k = 0; k < ntaps; ++k) acc += taps[k] * rows[k][x];
            d[x] = acc;
        }
    }
}

void median3x3(std::span<const std::uint16_t> src, std::span<std::uint16_t> dst, int width,
               int height) {
    const auto area = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    expect(src.size() >= area && dst.size() >= area, "median3x3: buffer too small");
    if (width == 0 || height == 0) return;

    // Replicated-border copy so every output pixel reads a full 3x3 window.
    const int pw = width + 2;
    std::vector<std::uint16_t> pad(static_cast<std::size_t>(pw) * (height + 2));
    for (int y = -1; y <= height; ++y) {
        const std::uint16_t* s = src.data() + static_cast<std::size_t>(std::clamp(y, 0, height - 1)) * width;
        std::uint16_t* p = pad.data() + static_cast<std::size_t>(y + 1) * pw;
        p[0] = s[0];
        std::copy(s, s + width, p + 1);
        p[pw - 1] = s[width - 1];
    }

    const VecOps vop;
    const ScalarOps sop;
    for (int y = 0; y < height; ++y) {
        const std::uint16_t* r0 = pad.data() + static_cast<std::size_t>(y) * pw;
        const std::uint16_t* r1 = r0 + pw;
        const std::uint16_t* r2 = r1 + pw;
        std::uint16_t* d = dst.data() + static_cast<std::size_t>(y) * width;
        auto ld = [](const std::uint16_t* p) {
            return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
        };
        int x = 0;
        for (; x + 16 <= width; x += 16) {
            const __m256i m = detail::median9(vop, ld(r0 + x), ld(r0 + x + 1), ld(r0 + x + 2),
                                              ld(r1 + x), ld(r1 + x + 1), ld(r1 + x + 2),
                                              ld(r2 + x), ld(r2 + x + 1), ld(r2 + x + 2));
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(d + x), m);
        }
        for (; x < width; ++x)
            d[x] = detail::median9(sop, r0[x], r0[x + 1], r0[x + 2], r1[x], r1[x + 1], r1[x + 2],
                                   r2[x], r2[x + 1], r2[x + 2]);
    }
}

void magnitude(std::span<const float> ux, std::span<const float> uy, std::span<float> out) {
    expect(ux.size() == uy.size() && out.size() >= ux.size(), "magnitude: size mismatch");
    const std::size_t n = ux.size();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 a = _mm256_loadu_ps(ux.data() + i);
        const __m256 b = _mm256_loadu_ps(uy.data() + i);
        const __m256 s = _mm256_add_ps(_mm256_mul_ps(a, a), _mm256_mul_ps(b, b));
        _mm256_storeu_ps(out.data() + i, _mm256_sqrt_ps(s));
    }
    for (; i < n; ++i) out[i] = std::sqrt(ux[i] * ux[i] + uy[i] * uy[i]);
}

}  // namespace pxa::kernels::avx2
