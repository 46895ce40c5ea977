#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pxa/flow/flow.hpp"

using namespace pxa;
using namespace pxa::flow;

namespace {

// Smooth random texture on a 0..255 scale, sampled at (x - dx, y - dy).
class Texture {
public:
    explicit Texture(unsigned seed) {
        std::mt19937 g(seed);
        std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
        std::uniform_real_distribution<double> f(0.15, 0.6);
        for (auto& w : waves_) w = {f(g) * std::cos(u(g)), f(g) * std::sin(u(g)), u(g)};
    }
    double operator()(double x, double y) const {
        double v = 0.0;
        for (const auto& w : waves_) v += std::sin(w.kx * x + w.ky * y + w.ph);
        return 128.0 + 90.0 * v / static_cast<double>(waves_.size()) * 2.0;
    }

private:
    struct Wave {
        double kx, ky, ph;
    };
    std::array<Wave, 6> waves_;
};

Image<float> render(const Texture& t, int w, int h, auto&& warp) {
    Image<float> img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const auto [sx, sy] = warp(static_cast<double>(x), static_cast<double>(y));
            img(x, y) = static_cast<float>(t(sx, sy));
        }
    return img;
}

struct Mean {
    double ux = 0, uy = 0, max_mag = 0;
};

Mean interior_mean(const FlowField& f, int border) {
    Mean m;
    int n = 0;
    for (int y = border; y < f.height() - border; ++y)
        for (int x = border; x < f.width() - border; ++x) {
            m.ux += f.ux(x, y);
            m.uy += f.uy(x, y);
            m.max_mag = std::max(m.max_mag, std::hypot<double>(f.ux(x, y), f.uy(x, y)));
            ++n;
        }
    m.ux /= n;
    m.uy /= n;
    return m;
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("identical frames give no flow") {
    const Texture t(1);
    const auto a = render(t, 96, 96, [](double x, double y) { return std::pair{x, y}; });
    const FlowField f = estimate_flow(a, a);
    const Image<float> mag = flow_magnitude(f);
    float worst = 0.f;
    for (std::size_t i = 0; i < mag.size(); ++i) worst = std::max(worst, mag[i]);
    CHECK(worst <= 0.05f);
}

TEST_CASE("integer translations of a texture are recovered") {
    const Texture t(2);
    const auto a = render(t, 128, 96, [](double x, double y) { return std::pair{x, y}; });
    for (int k = 1; k <= 4; ++k) {
        CAPTURE(k);
        const auto b = render(t, 128, 96, [k](double x, double y) { return std::pair{x - k, y}; });
        const Mean m = interior_mean(estimate_flow(a, b), 20);
        CHECK(std::abs(m.ux - k) <= 0.25);
        CHECK(std::abs(m.uy) <= 0.25);
    }
    const auto b = render(t, 128, 96, [](double x, double y) { return std::pair{x, y - 2}; });
    const Mean m = interior_mean(estimate_flow(a, b), 20);
    CHECK(std::abs(m.uy - 2.0) <= 0.25);
    CHECK(std::abs(m.ux) <= 0.25);
}

TEST_CASE("rigid rotation gives tangential flow of omega r") {
    const Texture t(3);
    const int n = 224;
    const double c = (n - 1) / 2.0, w = 0.02;
    const auto a = render(t, n, n, [](double x, double y) { return std::pair{x, y}; });
    // curr(x) = prev(R(-w)(x - c) + c)
    const auto b = render(t, n, n, [&](double x, double y) {
        const double dx = x - c, dy = y - c;
        return std::pair{c + std::cos(w) * dx + std::sin(w) * dy, c - std::sin(w) * dx + std::cos(w) * dy};
    });
    FlowParams p;
    p.levels = 4;
    const FlowField f = estimate_flow(a, b, p);
    for (double r : {20.0, 40.0, 60.0, 80.0, 100.0}) {
        double sum = 0.0;
        int cnt = 0;
        for (int k = 0; k < 64; ++k) {
            const double th = 2.0 * std::numbers::pi * k / 64.0;
            const int x = static_cast<int>(std::lround(c + r * std::cos(th)));
            const int y = static_cast<int>(std::lround(c + r * std::sin(th)));
            sum += std::hypot<double>(f.ux(x, y), f.uy(x, y));
            ++cnt;
        }
        CAPTURE(r);
        CHECK(sum / cnt == doctest::Approx(w * r).epsilon(0.2));
    }
}

TEST_CASE("damping suppresses flow along a static straight edge") {
    std::mt19937 g(5);
    std::normal_distribution<double> noise(0.0, 0.8);
    Image<float> a(96, 64), b(96, 64);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 96; ++x) {
            const double v = x < 48 ? 40.0 : 200.0;
            a(x, y) = static_cast<float>(v + noise(g));
            b(x, y) = static_cast<float>(v + noise(g));
        }
    const Mean damped = interior_mean(estimate_flow(a, b), 16);
    CHECK(damped.max_mag < 0.5);
}

TEST_CASE("flat frames are marked valid away from the border only") {
    Image<float> a(64, 64, 100.f);
    const FlowParams p;
    const FlowField f = estimate_flow(a, a, p);
    CHECK(f.valid(32, 32) == 1);
    CHECK(f.valid(0, 0) == 0);
    CHECK(f.valid(p.margin() - 1, 32) == 0);
}

TEST_CASE("magnitude") {
    FlowField f(2, 1);
    f.ux(0, 0) = 3.f;
    f.uy(0, 0) = 4.f;
    f.valid(0, 0) = 1;
    f.valid(1, 0) = 1;
    const auto m = flow_magnitude(f);
    CHECK(m(0, 0) == 5.f);
    CHECK(m(1, 0) == 0.f);
}

TEST_CASE("parameter validation") {
    FlowParams p;
    p.win_size = 14;
    CHECK_THROWS_AS(p.validate(), ContractViolation);
    p = {};
    p.regularization = 0.0;
    CHECK_THROWS_AS(p.validate(), ContractViolation);
    p = {};
    p.damping = -1.0;
    CHECK_THROWS_AS(p.validate(), ContractViolation);
    const Image<float> a(16, 16), b(15, 16);
    CHECK_THROWS_AS(estimate_flow(a, b), ContractViolation);
}

}
