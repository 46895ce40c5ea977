#include <algorithm>
#include <cmath>
#include <vector>

#include "median_network.hpp"
#include "pxa/common/error.hpp"
#include "pxa/kernels/kernels.hpp"

namespace pxa::kernels::scalar {

namespace {

struct ScalarOps {
    std::uint16_t lo(std::uint16_t a, std::uint16_t b) const { return a < b ? a : b; }
    std::uint16_t hi(std::uint16_t a, std::uint16_t b) const { return a < b ? b : a; }
};

void check(std::size_t src, std::size_t dst, int width, int height, std::size_t ntaps) {
    const auto area = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    expect(src >= area && dst >= area, "correlate: buffer smaller than width*height");
    expect(ntaps % 2 == 1, "correlate: tap count must be odd");
}

}  // namespace

void correlate_rows(std::span<const float> src, std::span<float> dst, int width, int height,
                    std::span<const float> taps) {
    check(src.size(), dst.size(), width, height, taps.size());
    const int r = static_cast<int>(taps.size() / 2);
    const int ntaps = static_cast<int>(taps.size());
    for (int y = 0; y < height; ++y) {
        const float* s = src.data() + static_cast<std::size_t>(y) * width;
        float* d = dst.data() + static_cast<std::size_t>(y) * width;
        for (int x = 0; x < width; ++x) {
            float acc = 0.0f;
            for (int k = 0; k < ntaps; ++k) {
                const int xx = std::clamp(x + k - r, 0, width - 1);
                acc += taps[k] * s[xx];
            }
            d[x] = acc;
        }
    }
}

void correlate_cols(std::span<const float> src, std::span<float> dst, int width, int height,
                    std::span<const float> taps) {
    check(src.size(), dst.size(), width, height, taps.size());
    const int r = static_cast<int>(taps.size() / 2);
    const int ntaps = static_cast<int>(taps.size());
    for (int y = 0; y < height; ++y) {
        float* d = dst.data() + static_cast<std::size_t>(y) * width;
        for (int x = 0; x < width; ++x) {
            float acc = 0.0f;
            for (int k = 0; k < ntaps; ++k) {
                const int yy = std::clamp(y + k - r, 0, height - 1);
                acc += taps[k] * src[static_cast<std::size_t>(yy) * width + x];
            }
            d[x] = acc;
        }
    }
}

void median3x3(std::span<const std::uint16_t> src, std::span<std::uint16_t> dst, int width,
               int height) {
    const auto area = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    expect(src.size() >= area && dst.size() >= area, "median3x3: buffer too small");
    const ScalarOps op;
    auto at = [&](int x, int y) {
        x = std::clamp(x, 0, width - 1);
        y = std::clamp(y, 0, height - 1);
        return src[static_cast<std::size_t>(y) * width + x];
    };
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            dst[static_cast<std::size_t>(y) * width + x] = detail::median9(
                op, at(x - 1, y - 1), at(x, y - 1), at(x + 1, y - 1), at(x - 1, y), at(x, y),
                at(x + 1, y), at(x - 1, y + 1), at(x, y + 1), at(x + 1, y + 1));
}

void magnitude(std::span<const float> ux, std::span<const float> uy, std::span<float> out) {
    expect(ux.size() == uy.size() && out.size() >= ux.size(), "magnitude: size mismatch");
    for (std::size_t i = 0; i < ux.size(); ++i) out[i] = std::sqrt(ux[i] * ux[i] + uy[i] * uy[i]);
}

}  // namespace pxa::kernels::scalar
