#include "pxa/flow/flow.hpp"

#include <array>
#include <cmath>
#include <vector>

#include "pxa/kernels/kernels.hpp"

namespace pxa::flow {

namespace {

using Plane = Image<float>;

struct Basis {
    std::vector<float> g, xg, xxg;
    double ig11 = 0, ig03 = 0, ig33 = 0, ig55 = 0;
};

// Separable Gaussian applicability and the entries of the inverse normal
// matrix needed to turn filter responses into polynomial coefficients.
Basis make_basis(int n, double sigma) {
    Basis b;
    const int len = 2 * n + 1;
    b.g.resize(len);
    b.xg.resize(len);
    b.xxg.resize(len);
    std::vector<double> gd(len);
    double s = 0.0;
    for (int x = -n; x <= n; ++x) {
        gd[x + n] = std::exp(-x * x / (2.0 * sigma * sigma));
        s += gd[x + n];
    }
    for (int x = -n; x <= n; ++x) {
        const float g = static_cast<float>(gd[x + n] / s);
        b.g[x + n] = g;
        b.xg[x + n] = static_cast<float>(x * static_cast<double>(g));
        b.xxg[x + n] = static_cast<float>(x * x * static_cast<double>(g));
    }
    double g00 = 0, g11 = 0, g33 = 0, g55 = 0;
    for (int y = -n; y <= n; ++y)
        for (int x = -n; x <= n; ++x) {
            const double w = static_cast<double>(b.g[y + n]) * b.g[x + n];
            g00 += w;
            g11 += w * x * x;
            g33 += w * x * x * x * x;
            g55 += w * x * x * y * y;
        }
    // Normal matrix over basis (1, x, y, x^2, y^2, xy): (1, x^2, y^2) form a
    // coupled block [[g00, g11, g11], [g11, g33, g55], [g11, g55, g33]]; the
    // rest is diagonal.
    const double a = g00, c = g11, d = g33, e = g55;
    const double det = a * (d * d - e * e) - c * (c * d - c * e) + c * (c * e - d * c);
    b.ig03 = (c * e - c * d) / det;
    b.ig33 = (a * d - c * c) / det;
    b.ig11 = 1.0 / g11;
    b.ig55 = 1.0 / g55;
    return b;
}

void correlate(const kernels::CorrelateFn fn, const Plane& src, Plane& dst,
               const std::vector<float>& taps) {
    fn(src.pixels(), dst.pixels(), src.width(), src.height(), taps);
}

// Five coefficient planes per pixel: linear (by, bx) and quadratic
// (Ayy, Axx, Axy), fitted in a weighted least-squares sense.
std::array<Plane, 5> poly_expand(const Plane& img, const Basis& b) {
    const auto& k = kernels::active();
    const int w = img.width(), h = img.height();
    Plane r0(w, h), r1(w, h), r2(w, h);
    correlate(k.correlate_cols, img, r0, b.g);
    correlate(k.correlate_cols, img, r1, b.xg);
    correlate(k.correlate_cols, img, r2, b.xxg);

    Plane b1(w, h), b2(w, h), b3(w, h), b4(w, h), b5(w, h), b6(w, h);
    correlate(k.correlate_rows, r0, b1, b.g);
    correlate(k.correlate_rows, r0, b2, b.xg);
    correlate(k.correlate_rows, r1, b3, b.g);
    correlate(k.correlate_rows, r0, b4, b.xxg);
    correlate(k.correlate_rows, r2, b5, b.g);
    correlate(k.correlate_rows, r1, b6, b.xg);

    std::array<Plane, 5> out{Plane(w, h), Plane(w, h), Plane(w, h), Plane(w, h), Plane(w, h)};
    for (std::size_t i = 0; i < img.size(); ++i) {
        out[0][i] = static_cast<float>(b3[i] * b.ig11);
        out[1][i] = static_cast<float>(b2[i] * b.ig11);
        out[2][i] = static_cast<float>(b1[i] * b.ig03 + b5[i] * b.ig33);
        out[3][i] = static_cast<float>(b1[i] * b.ig03 + b4[i] * b.ig33);
        out[4][i] = static_cast<float>(b6[i] * b.ig55);
    }
    return out;
}

constexpr int kBorder = 5;
constexpr std::array<float, kBorder> kBorderWeight{0.14f, 0.14f, 0.4472f, 0.4472f, 0.4472f};

// Builds the per-pixel 2x2 system (g11, g12, g22 | h1, h2) from the two
// expansions, sampling the second one at the current displacement estimate.
void update_matrices(const std::array<Plane, 5>& R0, const std::array<Plane, 5>& R1,
                     const Plane& fx_, const Plane& fy_, std::array<Plane, 5>& M) {
    const int w = R0[0].width(), h = R0[0].height();
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const float dx = fx_(x, y), dy = fy_(x, y);
            float fx = x + dx, fy = y + dy;
            const int x1 = static_cast<int>(std::floor(fx));
            const int y1 = static_cast<int>(std::floor(fy));
            fx -= x1;
            fy -= y1;
            float r2, r3, r4, r5, r6;
            if (x1 >= 0 && x1 < w - 1 && y1 >= 0 && y1 < h - 1) {
                const float a00 = (1.f - fx) * (1.f - fy), a01 = fx * (1.f - fy);
                const float a10 = (1.f - fx) * fy, a11 = fx * fy;
                auto bil = [&](const Plane& p) {
                    return a00 * p(x1, y1) + a01 * p(x1 + 1, y1) + a10 * p(x1, y1 + 1) +
                           a11 * p(x1 + 1, y1 + 1);
                };
                r2 = bil(R1[0]);
                r3 = bil(R1[1]);
                r4 = (R0[2](x, y) + bil(R1[2])) * 0.5f;
                r5 = (R0[3](x, y) + bil(R1[3])) * 0.5f;
                r6 = (R0[4](x, y) + bil(R1[4])) * 0.25f;
            } else {
                r2 = r3 = 0.f;
                r4 = R0[2](x, y);
                r5 = R0[3](x, y);
                r6 = R0[4](x, y) * 0.5f;
            }
            r2 = (R0[0](x, y) - r2) * 0.5f;
            r3 = (R0[1](x, y) - r3) * 0.5f;
            r2 += r4 * dy + r6 * dx;
            r3 += r6 * dy + r5 * dx;

            if (x < kBorder || y < kBorder || x >= w - kBorder || y >= h - kBorder) {
                float s = 1.f;
                if (x < kBorder) s *= kBorderWeight[x];
                if (x >= w - kBorder) s *= kBorderWeight[w - x - 1];
                if (y < kBorder) s *= kBorderWeight[y];
                if (y >= h - kBorder) s *= kBorderWeight[h - y - 1];
                r2 *= s;
                r3 *= s;
                r4 *= s;
                r5 *= s;
                r6 *= s;
            }
            M[0](x, y) = r4 * r4 + r6 * r6;
            M[1](x, y) = (r4 + r5) * r6;
            M[2](x, y) = r5 * r5 + r6 * r6;
            M[3](x, y) = r4 * r2 + r6 * r3;
            M[4](x, y) = r6 * r2 + r5 * r3;
        }
}

std::vector<float> gaussian_taps(int radius, double sigma) {
    std::vector<float> t(2 * radius + 1);
    double s = 0.0;
    std::vector<double> v(t.size());
    for (int i = -radius; i <= radius; ++i) {
        v[i + radius] = std::exp(-i * i / (2.0 * sigma * sigma));
        s += v[i + radius];
    }
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<float>(v[i] / s);
    return t;
}

Plane blur(const Plane& src, const std::vector<float>& taps) {
    const auto& k = kernels::active();
    Plane tmp(src.width(), src.height()), out(src.width(), src.height());
    correlate(k.correlate_cols, src, tmp, taps);
    correlate(k.correlate_rows, tmp, out, taps);
    return out;
}

// Solves (G + damping I) u = h per pixel. The determinant constant guards
// flat areas; the diagonal damping also limits the component along an edge,
// which the local model cannot observe.
void solve_flow(const std::array<Plane, 5>& M, const std::vector<float>& window, double reg,
                double damping, Plane& ux, Plane& uy) {
    std::array<Plane, 5> S;
    for (int c = 0; c < 5; ++c) S[c] = blur(M[c], window);
    for (std::size_t i = 0; i < ux.size(); ++i) {
        const double g11 = S[0][i] + damping, g12 = S[1][i], g22 = S[2][i] + damping;
        const double h1 = S[3][i], h2 = S[4][i];
        const double idet = 1.0 / (g11 * g22 - g12 * g12 + reg);
        ux[i] = static_cast<float>((g11 * h2 - g12 * h1) * idet);
        uy[i] = static_cast<float>((g22 * h1 - g12 * h2) * idet);
    }
}

// Bilinear resampling with pixel-centre alignment and replicated borders.
Plane resize(const Plane& src, int w, int h) {
    Plane out(w, h);
    const double sx = static_cast<double>(src.width()) / w;
    const double sy = static_cast<double>(src.height()) / h;
    for (int y = 0; y < h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(src.height() - 1));
        const int y0 = std::min(static_cast<int>(fy), src.height() - 1);
        const int y1 = std::min(y0 + 1, src.height() - 1);
        const double ay = fy - y0;
        for (int x = 0; x < w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(src.width() - 1));
            const int x0 = std::min(static_cast<int>(fx), src.width() - 1);
            const int x1 = std::min(x0 + 1, src.width() - 1);
            const double ax = fx - x0;
            const double top = src(x0, y0) * (1 - ax) + src(x1, y0) * ax;
            const double bot = src(x0, y1) * (1 - ax) + src(x1, y1) * ax;
            out(x, y) = static_cast<float>(top * (1 - ay) + bot * ay);
        }
    }
    return out;
}

Plane pyramid_level(const Plane& img, double scale) {
    if (scale == 1.0) return img;
    const double sigma = (1.0 / scale - 1.0) * 0.5;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    const Plane smooth = blur(img, gaussian_taps(radius, sigma));
    const int w = std::max(1, static_cast<int>(std::lround(img.width() * scale)));
    const int h = std::max(1, static_cast<int>(std::lround(img.height() * scale)));
    return resize(smooth, w, h);
}

}  // namespace

void FlowParams::validate() const {
    expect(levels >= 1, "flow: levels must be >= 1");
    expect(pyr_scale > 0.0 && pyr_scale < 1.0, "flow: pyramid scale must be in (0, 1)");
    expect(poly_n >= 1, "flow: poly_n must be >= 1");
    expect(poly_sigma > 0.0 && win_sigma > 0.0, "flow: sigmas must be > 0");
    expect(win_size >= 3 && win_size % 2 == 1, "flow: window size must be odd and >= 3");
    expect(iterations >= 1, "flow: iterations must be >= 1");
    expect(regularization > 0.0, "flow: regularization must be > 0");
    expect(damping >= 0.0, "flow: damping must be >= 0");
}

FlowField estimate_flow(const Image<float>& prev, const Image<float>& curr,
                        const FlowParams& p) {
    require_same_shape(prev, curr, "estimate_flow");
    p.validate();
    const int W = prev.width(), H = prev.height();
    FlowField out(W, H);
    if (prev.empty()) return out;

    const Basis basis = make_basis(p.poly_n, p.poly_sigma);
    const std::vector<float> window = gaussian_taps(p.win_size / 2, p.win_sigma);
    const int min_side = 2 * p.poly_n + 2 * kBorder;

    // Skip levels too small to hold an expansion neighbourhood.
    int levels = p.levels;
    while (levels > 1) {
        const double s = std::pow(p.pyr_scale, levels - 1);
        if (std::lround(W * s) >= min_side && std::lround(H * s) >= min_side) break;
        --levels;
    }

    Plane ux, uy;
    for (int k = levels - 1; k >= 0; --k) {
        const double scale = std::pow(p.pyr_scale, k);
        const Plane I0 = pyramid_level(prev, scale);
        const Plane I1 = pyramid_level(curr, scale);
        const int w = I0.width(), h = I0.height();
        if (ux.empty()) {
            ux = Plane(w, h);
            uy = Plane(w, h);
        } else {
            ux = resize(ux, w, h);
            uy = resize(uy, w, h);
            const float up = static_cast<float>(1.0 / p.pyr_scale);
            for (float& v : ux.pixels()) v *= up;
            for (float& v : uy.pixels()) v *= up;
        }
        const auto R0 = poly_expand(I0, basis);
        const auto R1 = poly_expand(I1, basis);
        std::array<Plane, 5> M{Plane(w, h), Plane(w, h), Plane(w, h), Plane(w, h), Plane(w, h)};
        for (int it = 0; it < p.iterations; ++it) {
            update_matrices(R0, R1, ux, uy, M);
            solve_flow(M, window, p.regularization, p.damping, ux, uy);
        }
    }

    const int m = p.margin();
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            const float dx = ux(x, y), dy = uy(x, y);
            out.ux(x, y) = dx;
            out.uy(x, y) = dy;
            const bool inside = x >= m && y >= m && x < W - m && y < H - m;
            const float tx = x + dx, ty = y + dy;
            const bool lands = tx >= 0.f && ty >= 0.f && tx <= W - 1 && ty <= H - 1;
            out.valid(x, y) = inside && lands && std::isfinite(dx) && std::isfinite(dy);
        }
    return out;
}

Image<float> flow_magnitude(const FlowField& f) {
    require_same_shape(f.ux, f.uy, "flow_magnitude");
    require_same_shape(f.ux, f.valid, "flow_magnitude");
    Image<float> mag(f.width(), f.height());
    kernels::active().magnitude(f.ux.pixels(), f.uy.pixels(), mag.pixels());
    for (std::size_t i = 0; i < mag.size(); ++i)
        if (!f.valid[i]) mag[i] = 0.f;
    return mag;
}

}  // namespace pxa::flow
