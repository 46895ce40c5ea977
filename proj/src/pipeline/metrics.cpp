#include "pxa/pipeline/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pxa::pipeline {

namespace {

double bilinear(const Image<float>& img, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
    y = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
    const int x0 = std::min(static_cast<int>(x), img.width() - 1);
    const int y0 = std::min(static_cast<int>(y), img.height() - 1);
    const int x1 = std::min(x0 + 1, img.width() - 1);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double ax = x - x0, ay = y - y0;
    const double top = img(x0, y0) * (1 - ax) + img(x1, y0) * ax;
    const double bot = img(x0, y1) * (1 - ax) + img(x1, y1) * ax;
    return top * (1 - ay) + bot * ay;
}

double percentile(std::vector<double> v, double q) {
    const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(v.size() - 1)));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

// Sub-sample position where the profile crosses `level` between i and i+1.
double crossing(std::span<const double> p, std::size_t i, double level) {
    const double d = p[i + 1] - p[i];
    return d == 0.0 ? static_cast<double>(i) : static_cast<double>(i) + (level - p[i]) / d;
}

bool in_band(std::uint16_t c, const BandParams& b) {
    return std::abs(static_cast<double>(c) - b.i_target) <= b.e_tol;
}

}  // namespace

std::vector<double> sample_profile(const Image<float>& img, const EdgeProbe& probe) {
    std::vector<double> out;
    if (img.empty()) return out;
    if (probe.kind == EdgeProbe::Kind::segment) {
        const double dx = probe.b.x - probe.a.x, dy = probe.b.y - probe.a.y;
        const double len = std::hypot(dx, dy);
        const auto n = static_cast<std::size_t>(std::floor(len / kProbeStep)) + 1;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = len > 0.0 ? i * kProbeStep / len : 0.0;
            out.push_back(bilinear(img, probe.a.x + s * dx, probe.a.y + s * dy));
        }
    } else {
        const double circ = 2.0 * std::numbers::pi * probe.radius;
        const auto n = static_cast<std::size_t>(std::floor(circ / kProbeStep));
        for (std::size_t i = 0; i < n; ++i) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
            out.push_back(bilinear(img, probe.a.x + probe.radius * std::cos(th),
                                   probe.a.y + probe.radius * std::sin(th)));
        }
    }
    return out;
}

std::vector<double> edge_widths(std::span<const double> p, double step, double min_contrast) {
    std::vector<double> widths;
    if (p.size() < 3) return widths;
    const std::vector<double> v(p.begin(), p.end());
    const double lo = percentile(v, 0.05), hi = percentile(v, 0.95);
    if (hi - lo < min_contrast) return widths;
    const double l10 = lo + 0.1 * (hi - lo), l50 = lo + 0.5 * (hi - lo), l90 = lo + 0.9 * (hi - lo);

    // A noisy transition can cross the midpoint several times; each transition
    // is measured once and scanning resumes past its far end.
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const bool rise = p[i] < l50 && p[i + 1] >= l50;
        const bool fall = p[i] >= l50 && p[i + 1] < l50;
        if (!rise && !fall) continue;
        // Walk outwards to the 10 % and 90 % crossings of this transition.
        const double start_level = rise ? l10 : l90;
        const double end_level = rise ? l90 : l10;
        auto before = [&](double x) { return rise ? x <= start_level : x >= start_level; };
        auto after = [&](double x) { return rise ? x >= end_level : x <= end_level; };
        std::size_t a = i;
        while (a > 0 && !before(p[a])) --a;
        if (!before(p[a])) continue;
        std::size_t b = i + 1;
        while (b + 1 < p.size() && !after(p[b])) ++b;
        if (!after(p[b])) continue;
        const double x0 = crossing(p, a, start_level);
        const double x1 = crossing(p, b - 1, end_level);
        widths.push_back((x1 - x0) * step);
        i = b - 1;
    }
    return widths;
}

double blur_metric(const Image<float>& img, std::span<const EdgeProbe> probes) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& probe : probes) {
        for (double w : edge_widths(sample_profile(img, probe))) {
            sum += w;
            ++n;
        }
    }
    return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

void fill_intensity_metrics(MetricsRecord& rec, const Image<std::uint16_t>& codes,
                            const Image<std::uint8_t>& bright, const BandParams& band) {
    if (codes.empty()) return;
    std::size_t sat = 0, inb = 0, nb = 0, under = 0;
    const bool have_bright = !bright.empty();
    if (have_bright) require_same_shape(codes, bright, "metrics (codes vs bright mask)");
    for (std::size_t i = 0; i < codes.size(); ++i) {
        sat += codes[i] >= band.saturation_code;
        inb += in_band(codes[i], band);
        if (have_bright && bright[i]) {
            ++nb;
            under += codes[i] < band.i_target - band.e_tol;
        }
    }
    const double n = static_cast<double>(codes.size());
    rec.saturated_fraction = static_cast<double>(sat) / n;
    rec.in_band_fraction = static_cast<double>(inb) / n;
    rec.underexposed_fraction = nb ? static_cast<double>(under) / static_cast<double>(nb) : 0.0;
}

Image<int> settling_samples(std::span<const Image<std::uint16_t>> codes,
                            std::span<const Image<std::uint8_t>> fresh, std::int64_t first_frame,
                            std::int64_t from_frame, const Image<std::uint8_t>& mask,
                            const BandParams& band) {
    expect(codes.size() == fresh.size(), "settling_samples: codes and fresh differ in length");
    Image<int> out(mask.width(), mask.height(), -1);
    for (const auto& c : codes) require_same_shape(c, mask, "settling_samples");
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        int count = 0, settled_at = -1;
        for (std::size_t k = 0; k < codes.size(); ++k) {
            if (first_frame + static_cast<std::int64_t>(k) < from_frame) continue;
            if (!fresh[k][i]) continue;
            ++count;
            if (in_band(codes[k][i], band)) {
                if (settled_at < 0) settled_at = count;
            } else {
                settled_at = -1;
            }
        }
        out[i] = settled_at;
    }
    return out;
}

std::int64_t settling_frame(std::span<const Image<std::uint16_t>> codes, std::int64_t first_frame,
                            const Image<std::uint8_t>& mask, const BandParams& band) {
    std::int64_t settled = -1;
    for (std::size_t k = 0; k < codes.size(); ++k) {
        require_same_shape(codes[k], mask, "settling_frame");
        bool all = true;
        for (std::size_t i = 0; i < mask.size() && all; ++i)
            if (mask[i] && !in_band(codes[k][i], band)) all = false;
        if (!all)
            settled = -1;
        else if (settled < 0)
            settled = first_frame + static_cast<std::int64_t>(k);
    }
    return settled;
}

}  // namespace pxa::pipeline
