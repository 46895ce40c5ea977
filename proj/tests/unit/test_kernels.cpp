#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "pxa/kernels/kernels.hpp"

using namespace pxa::kernels;

namespace {

std::vector<float> random_floats(std::size_t n, unsigned seed) {
    std::mt19937 g(seed);
    std::uniform_real_distribution<float> u(-100.f, 100.f);
    std::vector<float> v(n);
    for (auto& x : v) x = u(g);
    return v;
}

std::vector<std::uint16_t> random_codes(std::size_t n, unsigned seed) {
    std::mt19937 g(seed);
    std::uniform_int_distribution<int> u(0, 1023);
    std::vector<std::uint16_t> v(n);
    for (auto& x : v) x = static_cast<std::uint16_t>(u(g));
    return v;
}

std::uint16_t median_oracle(const std::vector<std::uint16_t>& src, int w, int h, int x, int y) {
    std::array<std::uint16_t, 9> n{};
    int k = 0;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            const int xx = std::clamp(x + dx, 0, w - 1), yy = std::clamp(y + dy, 0, h - 1);
            n[k++] = src[static_cast<std::size_t>(yy * w + xx)];
        }
    std::sort(n.begin(), n.end());
    return n[4];
}

// Sizes around the 8-lane boundary and tap radius.
constexpr std::array<std::pair<int, int>, 5> kShapes{{{1, 1}, {7, 3}, {8, 8}, {37, 13}, {130, 9}}};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("median matches the sort-of-nine oracle") {
    for (auto [w, h] : kShapes) {
        const auto src = random_codes(static_cast<std::size_t>(w * h), static_cast<unsigned>(w * 31 + h));
        std::vector<std::uint16_t> dst(src.size());
        scalar::median3x3(src, dst, w, h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                REQUIRE(dst[static_cast<std::size_t>(y * w + x)] == median_oracle(src, w, h, x, y));
    }
}

TEST_CASE("scalar correlation matches a direct evaluation") {
    const int w = 19, h = 5;
    const auto src = random_floats(w * h, 2);
    const std::vector<float> taps{0.25f, 0.5f, 0.25f};
    std::vector<float> dst(src.size());
    scalar::correlate_rows(src, dst, w, h, taps);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            float acc = 0.f;
            for (int k = 0; k < 3; ++k) acc += taps[k] * src[y * w + std::clamp(x + k - 1, 0, w - 1)];
            CHECK(dst[y * w + x] == acc);
        }
}

TEST_CASE("magnitude") {
    const std::vector<float> ux{3.f, 0.f}, uy{4.f, 0.f};
    std::vector<float> out(2);
    scalar::magnitude(ux, uy, out);
    CHECK(out[0] == 5.f);
    CHECK(out[1] == 0.f);
}

#if defined(PXA_HAVE_AVX2)
TEST_CASE("AVX2 variants are bit-identical to the scalar reference") {
    if (!avx2_table()) {
        MESSAGE("host lacks AVX2; skipped");
        return;
    }
    const std::vector<std::vector<float>> tap_sets{
        {1.f}, {0.25f, 0.5f, 0.25f}, {0.1f, -0.2f, 0.4f, -0.2f, 0.1f}, std::vector<float>(15, 1.f / 15.f)};
    for (auto [w, h] : kShapes) {
        const std::size_t n = static_cast<std::size_t>(w * h);
        const auto src = random_floats(n, static_cast<unsigned>(n));
        for (const auto& taps : tap_sets) {
            std::vector<float> a(n), b(n);
            scalar::correlate_rows(src, a, w, h, taps);
            avx2::correlate_rows(src, b, w, h, taps);
            CHECK(a == b);
            scalar::correlate_cols(src, a, w, h, taps);
            avx2::correlate_cols(src, b, w, h, taps);
            CHECK(a == b);
        }
        const auto codes = random_codes(n, static_cast<unsigned>(n + 1));
        std::vector<std::uint16_t> ma(n), mb(n);
        scalar::median3x3(codes, ma, w, h);
        avx2::median3x3(codes, mb, w, h);
        CHECK(ma == mb);

        const auto uy = random_floats(n, 99);
        std::vector<float> ga(n), gb(n);
        scalar::magnitude(src, uy, ga);
        avx2::magnitude(src, uy, gb);
        CHECK(ga == gb);
    }
}
#endif

TEST_CASE("runtime selection") {
    const Isa before = active().isa;
    CHECK(select(Isa::scalar) == before);
    CHECK(active().isa == Isa::scalar);
    select(before);
    CHECK(active().isa == before);
    CHECK(to_string(Isa::scalar) == "scalar");
}

}
