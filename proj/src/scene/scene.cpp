#include "pxa/scene/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "pxa/common/rng.hpp"

namespace pxa::scene {

namespace {

struct Pose {
    double dx, dy;        // translation
    double cos_t, sin_t;  // rotation
    double px, py;        // pivot
    double wcx, wcy;      // world position of the region centre
    bool rotated;
};

Pose pose_of(const Region& r, double t) {
    const Vec2 d = r.motion.displacement(t);
    const double th = r.motion.angle(t);
    Pose p{};
    p.dx = d.x;
    p.dy = d.y;
    p.cos_t = std::cos(th);
    p.sin_t = std::sin(th);
    p.rotated = th != 0.0;
    const Vec2 piv = r.motion.has_pivot ? r.motion.pivot : r.center;
    p.px = piv.x;
    p.py = piv.y;
    const double ox = r.center.x - piv.x, oy = r.center.y - piv.y;
    p.wcx = piv.x + p.cos_t * ox - p.sin_t * oy + d.x;
    p.wcy = piv.y + p.sin_t * ox + p.cos_t * oy + d.y;
    return p;
}

// World point -> coordinates relative to the region centre in its own frame.
inline void to_local(const Region& r, const Pose& p, double wx, double wy, double& qx,
                     double& qy) {
    const double ux = wx - p.dx - p.px, uy = wy - p.dy - p.py;
    const double rx = p.cos_t * ux + p.sin_t * uy;
    const double ry = -p.sin_t * ux + p.cos_t * uy;
    qx = rx + p.px - r.center.x;
    qy = ry + p.py - r.center.y;
}

bool block_on(std::uint64_t seed, std::size_t region, std::int64_t cx, std::int64_t cy) {
    std::uint64_t h = splitmix64(seed ^ (static_cast<std::uint64_t>(Stream::texture) << 56));
    h = splitmix64(h ^ region);
    h = splitmix64(h ^ static_cast<std::uint64_t>(cx));
    h = splitmix64(h ^ static_cast<std::uint64_t>(cy));
    return (h >> 17) & 1U;
}

// Radiance of a region at a local point, or nullopt when outside it.
std::optional<double> sample_region(const Region& r, std::size_t idx, std::uint64_t seed,
                                    double qx, double qy) {
    switch (r.shape) {
        case Shape::rect:
            if (std::abs(qx) <= r.half_width && std::abs(qy) <= r.half_height) return r.flux;
            return std::nullopt;
        case Shape::disc:
            if (qx * qx + qy * qy <= r.radius * r.radius) return r.flux;
            return std::nullopt;
        case Shape::annulus: {
            const double rr = qx * qx + qy * qy;
            if (rr <= r.radius * r.radius && rr >= r.inner_radius * r.inner_radius) return r.flux;
            return std::nullopt;
        }
        case Shape::bars: {
            if (std::abs(qx) > r.half_width || std::abs(qy) > r.half_height) return std::nullopt;
            const double u = (qx + r.half_width) / r.period;
            return (u - std::floor(u)) < 0.5 ? r.flux : r.flux_alt;
        }
        case Shape::blocks: {
            if (std::abs(qx) > r.half_width || std::abs(qy) > r.half_height) return std::nullopt;
            const auto cx = static_cast<std::int64_t>(std::floor((qx + r.half_width) / r.period));
            const auto cy = static_cast<std::int64_t>(std::floor((qy + r.half_height) / r.period));
            return block_on(seed, idx, cx, cy) ? r.flux : r.flux_alt;
        }
        case Shape::spokes: {
            const double rr = qx * qx + qy * qy;
            if (rr > r.radius * r.radius || rr < r.inner_radius * r.inner_radius)
                return std::nullopt;
            double u = (std::atan2(qy, qx) + std::numbers::pi) / (2.0 * std::numbers::pi) * r.period;
            return (u - std::floor(u)) < 0.5 ? r.flux : r.flux_alt;
        }
        case Shape::raster: {
            if (std::abs(qx) > r.half_width || std::abs(qy) > r.half_height || !r.raster)
                return std::nullopt;
            const Image<float>& img = *r.raster;
            const int ix = std::clamp(static_cast<int>((qx + r.half_width) / (2.0 * r.half_width) *
                                                       img.width()),
                                      0, img.width() - 1);
            const int iy = std::clamp(static_cast<int>((qy + r.half_height) /
                                                       (2.0 * r.half_height) * img.height()),
                                      0, img.height() - 1);
            return r.flux_alt + (r.flux - r.flux_alt) * static_cast<double>(img(ix, iy));
        }
    }
    return std::nullopt;
}

inline double overlap(double a0, double a1, double b0, double b1) {
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

// Length of the "on" half-periods of a square wave over [0, u].
inline double bars_on_length(double u, double period) {
    const double k = std::floor(u / period);
    return k * period * 0.5 + std::min(u - k * period, period * 0.5);
}

bool analytic(const Region& r) {
    return !r.motion.rotates() &&
           (r.shape == Shape::rect || r.shape == Shape::bars || r.shape == Shape::blocks);
}

// Exact footprint coverage for axis-aligned shapes. Returns (covered area,
// radiance integral over the covered area).
std::pair<double, double> analytic_coverage(const Region& r, std::size_t idx, std::uint64_t seed,
                                            double fx0, double fy0, double fx1, double fy1) {
    const double bx0 = -r.half_width, bx1 = r.half_width;
    const double by0 = -r.half_height, by1 = r.half_height;
    const double ax = overlap(fx0, fx1, bx0, bx1);
    const double ay = overlap(fy0, fy1, by0, by1);
    const double cov = ax * ay;
    if (cov <= 0.0) return {0.0, 0.0};
    switch (r.shape) {
        case Shape::rect: return {cov, cov * r.flux};
        case Shape::bars: {
            const double u0 = std::max(fx0, bx0) - bx0, u1 = std::min(fx1, bx1) - bx0;
            const double on = (bars_on_length(u1, r.period) - bars_on_length(u0, r.period)) * ay;
            return {cov, on * r.flux + (cov - on) * r.flux_alt};
        }
        case Shape::blocks: {
            const double x0 = std::max(fx0, bx0) - bx0, x1 = std::min(fx1, bx1) - bx0;
            const double y0 = std::max(fy0, by0) - by0, y1 = std::min(fy1, by1) - by0;
            const auto cx0 = static_cast<std::int64_t>(std::floor(x0 / r.period));
            const auto cx1 = static_cast<std::int64_t>(std::floor(x1 / r.period));
            const auto cy0 = static_cast<std::int64_t>(std::floor(y0 / r.period));
            const auto cy1 = static_cast<std::int64_t>(std::floor(y1 / r.period));
            double on = 0.0;
            for (auto cy = cy0; cy <= cy1; ++cy)
                for (auto cx = cx0; cx <= cx1; ++cx) {
                    if (!block_on(seed, idx, cx, cy)) continue;
                    const double c0x = static_cast<double>(cx) * r.period;
                    const double c0y = static_cast<double>(cy) * r.period;
                    on += overlap(x0, x1, c0x, c0x + r.period) * overlap(y0, y1, c0y, c0y + r.period);
                }
            return {cov, on * r.flux + (cov - on) * r.flux_alt};
        }
        default: return {0.0, 0.0};
    }
}

}  // namespace

// ---------------------------------------------------------------- motion

Vec2 MotionScript::displacement(double t) const noexcept {
    Vec2 d;
    for (const auto& s : segments) {
        const double dt = std::clamp(t - s.t_begin_ms, 0.0, s.t_end_ms - s.t_begin_ms);
        d.x += s.vx * dt;
        d.y += s.vy * dt;
    }
    return d;
}

double MotionScript::angle(double t) const noexcept {
    double a = 0.0;
    for (const auto& s : segments)
        a += s.omega * std::clamp(t - s.t_begin_ms, 0.0, s.t_end_ms - s.t_begin_ms);
    return a;
}

bool MotionScript::translates() const noexcept {
    return std::any_of(segments.begin(), segments.end(), [](const MotionSegment& s) {
        return (s.vx != 0.0 || s.vy != 0.0) && s.t_end_ms > s.t_begin_ms;
    });
}

bool MotionScript::rotates() const noexcept {
    return std::any_of(segments.begin(), segments.end(), [](const MotionSegment& s) {
        return s.omega != 0.0 && s.t_end_ms > s.t_begin_ms;
    });
}

// ---------------------------------------------------------------- names

std::string_view to_string(Shape s) noexcept {
    switch (s) {
        case Shape::rect: return "rect";
        case Shape::disc: return "disc";
        case Shape::annulus: return "annulus";
        case Shape::bars: return "bars";
        case Shape::blocks: return "blocks";
        case Shape::spokes: return "spokes";
        case Shape::raster: return "raster";
    }
    return "?";
}

Shape shape_from_string(std::string_view s) {
    for (Shape v : {Shape::rect, Shape::disc, Shape::annulus, Shape::bars, Shape::blocks,
                    Shape::spokes, Shape::raster})
        if (to_string(v) == s) return v;
    throw ContractViolation("unknown region shape '" + std::string(s) + "'");
}

std::string_view to_string(SceneKind k) noexcept {
    switch (k) {
        case SceneKind::static_hdr: return "static-hdr";
        case SceneKind::translate: return "translate";
        case SceneKind::rotate: return "rotate";
        case SceneKind::composite: return "composite";
    }
    return "?";
}

// ---------------------------------------------------------------- scene

Scene::Scene(SceneConfig cfg, double background, std::vector<Region> regions)
    : cfg_(cfg), background_(background), regions_(std::move(regions)) {
    expect(cfg_.width > 0 && cfg_.height > 0, "scene: width and height must be positive");
    expect(cfg_.ratio >= 1.0, "scene: dynamic-range ratio must be >= 1");
    expect(cfg_.supersample >= 1, "scene: supersample must be >= 1");
    expect(background_ >= 0.0, "scene: background radiance must be >= 0");
    for (const auto& r : regions_) {
        expect(r.flux >= 0.0 && r.flux_alt >= 0.0, "scene: region radiance must be >= 0");
        for (const auto& s : r.motion.segments)
            expect(s.t_end_ms >= s.t_begin_ms && s.t_begin_ms >= 0.0,
                   "scene: motion segment must satisfy 0 <= t_begin <= t_end");
        switch (r.shape) {
            case Shape::rect:
            case Shape::bars:
            case Shape::blocks:
            case Shape::raster:
                expect(r.half_width > 0.0 && r.half_height > 0.0,
                       "scene: rectangular region needs positive half extents");
                break;
            case Shape::disc:
            case Shape::annulus:
            case Shape::spokes:
                expect(r.radius > 0.0 && r.inner_radius >= 0.0 && r.inner_radius < r.radius,
                       "scene: radial region needs 0 <= inner_radius < radius");
                break;
        }
        if (r.shape == Shape::bars || r.shape == Shape::blocks || r.shape == Shape::spokes)
            expect(r.period > 0.0, "scene: patterned region needs a positive period");
        if (r.shape == Shape::raster) expect(r.raster != nullptr, "scene: raster region without image");
    }
}

SceneKind Scene::kind() const noexcept {
    bool tr = false, rot = false;
    for (const auto& r : regions_) {
        tr = tr || r.motion.translates();
        rot = rot || r.motion.rotates();
    }
    if (tr && rot) return SceneKind::composite;
    if (tr) return SceneKind::translate;
    if (rot) return SceneKind::rotate;
    return SceneKind::static_hdr;
}


Vec2 Scene::region_center_at(const Region& r, double t) const noexcept {
    const Pose p = pose_of(r, t);
    return {p.wcx, p.wcy};
}

void Scene::check_pixel(int x, int y) const {
    if (x < 0 || y < 0 || x >= cfg_.width || y >= cfg_.height)
        throw ContractViolation("scene: pixel (" + std::to_string(x) + "," + std::to_string(y) +
                                ") out of bounds");
}

double Scene::point_radiance(double px, double py, double t) const {
    expect(t >= 0.0, "scene: time must be >= 0");
    double v = background_;
    for (std::size_t i = 0; i < regions_.size(); ++i) {
        const Region& r = regions_[i];
        const Pose p = pose_of(r, t);
        double qx, qy;
        to_local(r, p, px, py, qx, qy);
        if (auto s = sample_region(r, i, cfg_.seed, qx, qy)) v = *s;
    }
    return v;
}

namespace {

std::vector<Pose> poses_at(const std::vector<Region>& regions, double t) {
    std::vector<Pose> out;
    out.reserve(regions.size());
    for (const auto& r : regions) out.push_back(pose_of(r, t));
    return out;
}

double bound_radius(const Region& r) noexcept {
    switch (r.shape) {
        case Shape::disc:
        case Shape::annulus:
        case Shape::spokes: return r.radius;
        default: return std::hypot(r.half_width, r.half_height);
    }
}

// True when no subsample of the footprint centred on local (qx, qy) can land
// in the region. Subsamples lie within sqrt(2)/2 of the centre.
bool footprint_misses(const Region& r, double qx, double qy) noexcept {
    constexpr double m = 0.75;
    switch (r.shape) {
        case Shape::disc: return std::hypot(qx, qy) > r.radius + m;
        case Shape::annulus:
        case Shape::spokes: {
            const double d = std::hypot(qx, qy);
            return d > r.radius + m || d < r.inner_radius - m;
        }
        default: return std::abs(qx) > r.half_width + m || std::abs(qy) > r.half_height + m;
    }
}

double footprint(const Scene& scene, const std::vector<Pose>& poses, double x, double y) {
    const auto& regions = scene.regions();
    const std::uint64_t seed = scene.config().seed;
    const int ss = scene.config().supersample;
    const double inv_n = 1.0 / static_cast<double>(ss * ss);
    double v = scene.background();
    for (std::size_t i = 0; i < regions.size(); ++i) {
        const Region& r = regions[i];
        const Pose& p = poses[i];
        const double reach = bound_radius(r) + 0.75;
        const double ddx = x - p.wcx, ddy = y - p.wcy;
        if (ddx * ddx + ddy * ddy > reach * reach) continue;

        if (analytic(r)) {
            const double ox = r.center.x + p.dx, oy = r.center.y + p.dy;
            const auto [cov, integral] = analytic_coverage(
                r, i, seed, x - 0.5 - ox, y - 0.5 - oy, x + 0.5 - ox, y + 0.5 - oy);
            v = v * (1.0 - cov) + integral;
            continue;
        }

        double cx, cy;
        to_local(r, p, x, y, cx, cy);
        if (footprint_misses(r, cx, cy)) continue;

        int inside = 0;
        double sum = 0.0;
        for (int j = 0; j < ss; ++j) {
            const double sy = y + (j + 0.5) / ss - 0.5;
            for (int k = 0; k < ss; ++k) {
                const double sx = x + (k + 0.5) / ss - 0.5;
                double qx, qy;
                to_local(r, p, sx, sy, qx, qy);
                if (auto s = sample_region(r, i, seed, qx, qy)) {
                    ++inside;
                    sum += *s;
                }
            }
        }
        const double cov = inside * inv_n;
        v = v * (1.0 - cov) + sum * inv_n;
    }
    return v;
}

}  // namespace

double Scene::footprint_radiance(double x, double y, double t) const {
    return footprint(*this, poses_at(regions_, t), x, y);
}

double Scene::radiance_at(int x, int y, double t) const {
    check_pixel(x, y);
    expect(t >= 0.0, "scene: time must be >= 0");
    return footprint_radiance(x, y, t);
}

double Scene::quadrature_step(double window) noexcept {
    if (window >= 8.0) return 1.0;
    // Largest power of two not exceeding window / 8.
    return std::exp2(std::floor(std::log2(window / 8.0)));
}

std::vector<Scene::Bounds> Scene::swept_bounds(double t0, double t1) const {
    const double h = quadrature_step(t1 - t0);
    const auto k0 = static_cast<std::int64_t>(std::floor(t0 / h));
    const auto k1 = static_cast<std::int64_t>(std::ceil(t1 / h));
    std::vector<Bounds> out;
    for (const auto& r : regions_) {
        if (r.motion.is_static()) continue;
        Bounds b{1e300, 1e300, -1e300, -1e300};
        for (auto k = k0; k <= k1; ++k) {
            const Vec2 c = region_center_at(r, static_cast<double>(k) * h);
            b.x0 = std::min(b.x0, c.x);
            b.y0 = std::min(b.y0, c.y);
            b.x1 = std::max(b.x1, c.x);
            b.y1 = std::max(b.y1, c.y);
        }
        const double reach = bound_radius(r) + 1.0;
        out.push_back({b.x0 - reach, b.y0 - reach, b.x1 + reach, b.y1 + reach});
    }
    return out;
}

bool Scene::touched_by_motion(int x, int y, const std::vector<Bounds>& swept) const noexcept {
    return std::any_of(swept.begin(), swept.end(), [&](const Bounds& b) {
        return x >= b.x0 && x <= b.x1 && y >= b.y0 && y <= b.y1;
    });
}

double Scene::integrate_pixel(int x, int y, double t0, double t1,
                              const std::vector<Bounds>& swept) const {
    const double h = quadrature_step(t1 - t0);
    const auto k0 = static_cast<std::int64_t>(std::floor(t0 / h));
    const auto k1 = static_cast<std::int64_t>(std::ceil(t1 / h));
    if (!touched_by_motion(x, y, swept))
        return footprint_radiance(x, y, static_cast<double>(k0) * h) * (t1 - t0);

    // Node values of the piecewise-linear interpolant, integrated exactly
    // over the part of each grid cell that lies inside [t0, t1].
    double acc = 0.0;
    double f_prev = footprint_radiance(x, y, static_cast<double>(k0) * h);
    for (auto k = k0; k < k1; ++k) {
        const double ta = static_cast<double>(k) * h, tb = ta + h;
        const double f_next = footprint_radiance(x, y, tb);
        const double a = std::max(t0, ta), b = std::min(t1, tb);
        if (b > a) {
            const double fa = f_prev + (f_next - f_prev) * ((a - ta) / h);
            const double fb = f_prev + (f_next - f_prev) * ((b - ta) / h);
            acc += (b - a) * 0.5 * (fa + fb);
        }
        f_prev = f_next;
    }
    return acc;
}

double Scene::integrate_flux(int x, int y, double t0, double t1) const {
    check_pixel(x, y);
    expect(t0 >= 0.0, "scene: integration window must start at t >= 0");
    expect(t1 > t0, "scene: integration window requires t1 > t0");
    return integrate_pixel(x, y, t0, t1, swept_bounds(t0, t1));
}

Image<double> Scene::integrate_frame(double t0, double t1) const {
    expect(t0 >= 0.0, "scene: integration window must start at t >= 0");
    expect(t1 > t0, "scene: integration window requires t1 > t0");
    const auto swept = swept_bounds(t0, t1);
    const double h = quadrature_step(t1 - t0);
    const auto k0 = static_cast<std::int64_t>(std::floor(t0 / h));
    const auto k1 = static_cast<std::int64_t>(std::ceil(t1 / h));
    std::vector<std::vector<Pose>> poses;
    for (auto k = k0; k <= k1; ++k) poses.push_back(poses_at(regions_, static_cast<double>(k) * h));

    // Same arithmetic as integrate_pixel, with poses hoisted out of the pixel loop.
    Image<double> out(cfg_.width, cfg_.height);
    for (int y = 0; y < cfg_.height; ++y)
        for (int x = 0; x < cfg_.width; ++x) {
            if (!touched_by_motion(x, y, swept)) {
                out(x, y) = footprint(*this, poses.front(), x, y) * (t1 - t0);
                continue;
            }
            double acc = 0.0;
            double f_prev = footprint(*this, poses.front(), x, y);
            for (auto k = k0; k < k1; ++k) {
                const double ta = static_cast<double>(k) * h, tb = ta + h;
                const double f_next = footprint(*this, poses[static_cast<std::size_t>(k - k0 + 1)], x, y);
                const double a = std::max(t0, ta), b = std::min(t1, tb);
                if (b > a) {
                    const double fa = f_prev + (f_next - f_prev) * ((a - ta) / h);
                    const double fb = f_prev + (f_next - f_prev) * ((b - ta) / h);
                    acc += (b - a) * 0.5 * (fa + fb);
                }
                f_prev = f_next;
            }
            out(x, y) = acc;
        }
    return out;
}

Image<double> Scene::render(double t) const {
    expect(t >= 0.0, "scene: time must be >= 0");
    const auto poses = poses_at(regions_, t);
    Image<double> out(cfg_.width, cfg_.height);
    for (int y = 0; y < cfg_.height; ++y)
        for (int x = 0; x < cfg_.width; ++x) out(x, y) = footprint(*this, poses, x, y);
    return out;
}

}  // namespace pxa::scene
