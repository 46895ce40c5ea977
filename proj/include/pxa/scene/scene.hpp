#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "pxa/common/image.hpp"

namespace pxa::scene {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

// One constant-velocity piece of a motion script. Outside [t_begin, t_end)
// the segment contributes its accumulated displacement (or nothing before
// t_begin), so the resulting pose is continuous in t.
struct MotionSegment {
    double t_begin_ms = 0.0;
    double t_end_ms = 0.0;
    double vx = 0.0;     // px/ms
    double vy = 0.0;     // px/ms
    double omega = 0.0;  // rad/ms, counter-clockwise in image coordinates
    friend bool operator==(const MotionSegment&, const MotionSegment&) = default;
};

struct MotionScript {
    std::vector<MotionSegment> segments;
    // Rotation pivot in image coordinates; defaults to the region centre.
    bool has_pivot = false;
    Vec2 pivot;

    Vec2 displacement(double t_ms) const noexcept;
    double angle(double t_ms) const noexcept;
    bool translates() const noexcept;
    bool rotates() const noexcept;
    bool is_static() const noexcept { return !translates() && !rotates(); }
    friend bool operator==(const MotionScript&, const MotionScript&) = default;
};

enum class Shape {
    rect,     // uniform rectangle
    disc,     // uniform disc
    annulus,  // uniform ring
    bars,     // vertical square-wave grating inside a rectangle
    blocks,   // pseudo-random on/off cells inside a rectangle (text-like)
    spokes,   // radial square-wave grating inside a ring
    raster,   // imported graymap mapped onto a rectangle
};

std::string_view to_string(Shape s) noexcept;
Shape shape_from_string(std::string_view s);

struct Region {
    Shape shape = Shape::rect;
    Vec2 center;              // image coordinates at t = 0
    double half_width = 0.0;  // rect, bars, blocks, raster
    double half_height = 0.0;
    double radius = 0.0;        // disc, annulus, spokes
    double inner_radius = 0.0;  // annulus, spokes
    double period = 0.0;        // bars: px; blocks: cell size px; spokes: spoke count
    double flux = 0.0;          // photons / px / ms for the "on" level
    double flux_alt = 0.0;      // "off" level of patterned shapes
    std::shared_ptr<const Image<float>> raster;  // values in [0,1]
    MotionScript motion;

    friend bool operator==(const Region& a, const Region& b) {
        return a.shape == b.shape && a.center == b.center && a.half_width == b.half_width &&
               a.half_height == b.half_height && a.radius == b.radius &&
               a.inner_radius == b.inner_radius && a.period == b.period && a.flux == b.flux &&
               a.flux_alt == b.flux_alt && a.motion == b.motion &&
               (a.raster == b.raster || (a.raster && b.raster && *a.raster == *b.raster));
    }
};

struct SceneConfig {
    int width = 256;
    int height = 256;
    double ratio = 64.0;  // bright : dark radiance
    std::uint64_t seed = 1;
    int supersample = 4;  // per-axis point samples for curved or rotating regions
    friend bool operator==(const SceneConfig&, const SceneConfig&) = default;
};

enum class SceneKind { static_hdr, translate, rotate, composite };

std::string_view to_string(SceneKind k) noexcept;

// Immutable radiance field. Regions are painted in order over a uniform
// background; each pixel reports the mean radiance over its unit footprint
// centred on (x, y).
class Scene {
public:
    Scene(SceneConfig cfg, double background, std::vector<Region> regions);

    const SceneConfig& config() const noexcept { return cfg_; }
    double background() const noexcept { return background_; }
    const std::vector<Region>& regions() const noexcept { return regions_; }
    int width() const noexcept { return cfg_.width; }
    int height() const noexcept { return cfg_.height; }
    SceneKind kind() const noexcept;

    // photons / ms over the pixel footprint.
    double radiance_at(int x, int y, double t_ms) const;

    // Point radiance at sub-pixel position (px, py); no footprint averaging.
    double point_radiance(double px, double py, double t_ms) const;

    // photons collected over [t0, t1). The integrand is replaced by its
    // piecewise-linear interpolant on a fixed global time grid, so the result
    // is additive over adjacent windows.
    double integrate_flux(int x, int y, double t0_ms, double t1_ms) const;

    Image<double> integrate_frame(double t0_ms, double t1_ms) const;
    Image<double> render(double t_ms) const;

    // Grid spacing used for a window of the given length.
    static double quadrature_step(double window_ms) noexcept;

private:
    struct Bounds {
        double x0, y0, x1, y1;
    };

    double footprint_radiance(double x, double y, double t_ms) const;
    Vec2 region_center_at(const Region& r, double t_ms) const noexcept;
    bool touched_by_motion(int x, int y, const std::vector<Bounds>& swept) const noexcept;
    std::vector<Bounds> swept_bounds(double t0_ms, double t1_ms) const;
    double integrate_pixel(int x, int y, double t0_ms, double t1_ms,
                           const std::vector<Bounds>& swept) const;
    void check_pixel(int x, int y) const;

    SceneConfig cfg_;
    double background_;
    std::vector<Region> regions_;
};

}  // namespace pxa::scene
