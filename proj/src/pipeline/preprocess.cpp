#include "pxa/pipeline/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pxa/kernels/kernels.hpp"

namespace pxa::pipeline {

FpnMap fpn_calibrate(std::span<const Image<std::uint16_t>> frames) {
    expect(frames.size() >= 2, "fpn_calibrate: at least two dark frames required");
    const auto& first = frames.front();
    std::vector<double> acc(first.size(), 0.0);
    for (const auto& f : frames) {
        require_same_shape(first, f, "fpn_calibrate");
        for (std::size_t i = 0; i < f.size(); ++i) acc[i] += f[i];
    }
    FpnMap m{Image<float>(first.width(), first.height()), 0.0};
    const double n = static_cast<double>(frames.size());
    double total = 0.0;
    for (std::size_t i = 0; i < acc.size(); ++i) {
        const double mean = acc[i] / n;
        m.dark[i] = static_cast<float>(mean);
        total += mean;
    }
    m.mean = acc.empty() ? 0.0 : total / static_cast<double>(acc.size());
    return m;
}

FpnMap fpn_calibrate(std::span<const sensor::RawFrame> frames) {
    std::vector<Image<std::uint16_t>> codes;
    codes.reserve(frames.size());
    for (const auto& f : frames) codes.push_back(f.codes);
    return fpn_calibrate(std::span<const Image<std::uint16_t>>(codes));
}

Image<float> fpn_residual(const Image<std::uint16_t>& raw, const FpnMap& fpn) {
    require_same_shape(raw, fpn.dark, "fpn_residual");
    Image<float> out(raw.width(), raw.height());
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] - fpn.dark[i];
    return out;
}

Image<std::uint16_t> fpn_correct(const Image<std::uint16_t>& raw, const FpnMap& fpn,
                                 int max_code) {
    require_same_shape(raw, fpn.dark, "fpn_correct");
    Image<std::uint16_t> out(raw.width(), raw.height());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] >= max_code) {
            out[i] = raw[i];
            continue;
        }
        const double v = std::round(raw[i] - (fpn.dark[i] - fpn.mean));
        out[i] = static_cast<std::uint16_t>(std::clamp(v, 0.0, static_cast<double>(max_code)));
    }
    return out;
}

Image<std::uint16_t> median3x3(const Image<std::uint16_t>& src) {
    Image<std::uint16_t> out(src.width(), src.height());
    if (!src.empty())
        kernels::active().median3x3(src.pixels(), out.pixels(), src.width(), src.height());
    return out;
}

bool DisplayFrame::primed() const noexcept {
    return !sampled.empty() &&
           std::all_of(sampled.pixels().begin(), sampled.pixels().end(),
                       [](std::uint8_t s) { return s != 0; });
}

DisplayFrame initial_display(int width, int height, int exposure) {
    return {Image<std::uint16_t>(width, height), Image<std::uint8_t>(width, height),
            Image<std::uint8_t>(width, height, static_cast<std::uint8_t>(exposure)),
            Image<std::uint8_t>(width, height), -1};
}

DisplayFrame assemble_display(const Image<std::uint16_t>& codes,
                              const Image<std::uint8_t>& updated,
                              const Image<std::uint8_t>& exposure, const DisplayFrame& prev,
                              std::int64_t index) {
    require_same_shape(codes, updated, "assemble_display (codes vs updated)");
    require_same_shape(codes, exposure, "assemble_display (codes vs exposure)");
    require_same_shape(codes, prev.code, "assemble_display (codes vs previous display)");
    DisplayFrame d = prev;
    d.index = index;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (updated[i]) {
            d.code[i] = codes[i];
            d.age[i] = 0;
            d.exposure[i] = exposure[i];
            d.sampled[i] = 1;
        } else {
            d.age[i] = static_cast<std::uint8_t>(std::min(prev.age[i] + 1, 255));
        }
    }
    return d;
}

DisplayFrame assemble_display(const sensor::RawFrame& raw, const DisplayFrame& prev) {
    return assemble_display(raw.codes, raw.updated, raw.exposure, prev, raw.index);
}

Image<float> display_intensity(const DisplayFrame& d, int max_code, double dark) {
    Image<float> out(d.width(), d.height());
    const double k = 255.0 / (static_cast<double>(max_code) - dark);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double above = std::max(0.0, static_cast<double>(d.code[i]) - dark);
        out[i] = static_cast<float>(above / std::max<int>(d.exposure[i], 1) * k);
    }
    return out;
}

void invalidate_saturated(flow::FlowField& flow, const DisplayFrame& prev, const DisplayFrame& curr,
                          int saturation_code, int radius) {
    require_same_shape(flow.valid, prev.code, "invalidate_saturated (flow vs previous)");
    require_same_shape(flow.valid, curr.code, "invalidate_saturated (flow vs current)");
    const int w = flow.width(), h = flow.height();
    // Separable dilation of the saturation mask: rows, then columns.
    Image<std::uint8_t> sat(w, h), rows(w, h);
    for (std::size_t i = 0; i < sat.size(); ++i)
        sat[i] = prev.code[i] >= saturation_code || curr.code[i] >= saturation_code;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::uint8_t any = 0;
            for (int k = std::max(0, x - radius); k <= std::min(w - 1, x + radius) && !any; ++k)
                any = sat(k, y);
            rows(x, y) = any;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::uint8_t any = 0;
            for (int k = std::max(0, y - radius); k <= std::min(h - 1, y + radius) && !any; ++k)
                any = rows(x, k);
            if (any) flow.valid(x, y) = 0;
        }
}

HdrImage hdr_reconstruct(const Image<std::uint16_t>& codes, const Image<std::uint8_t>& exposure,
                         double dark_level, double t_base_ms, int saturation_code) {
    require_same_shape(codes, exposure, "hdr_reconstruct");
    expect(t_base_ms > 0.0, "hdr_reconstruct: t_base must be > 0");
    HdrImage h{Image<float>(codes.width(), codes.height()),
               Image<std::uint8_t>(codes.width(), codes.height())};
    for (std::size_t i = 0; i < codes.size(); ++i) {
        const int e = std::max<int>(exposure[i], 1);
        h.radiance[i] = static_cast<float>((codes[i] - dark_level) / (e * t_base_ms));
        h.valid[i] = codes[i] < saturation_code;
    }
    return h;
}

HdrImage hdr_reconstruct(const DisplayFrame& d, double dark_level, double t_base_ms,
                         int saturation_code) {
    return hdr_reconstruct(d.code, d.exposure, dark_level, t_base_ms, saturation_code);
}

}  // namespace pxa::pipeline
