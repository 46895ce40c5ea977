#include "pxa/sensor/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "pxa/scene/scene.hpp"

namespace pxa::sensor {

std::string_view to_string(Variant v) noexcept {
    return v == Variant::legacy ? "legacy" : "modified";
}

Variant variant_from_string(std::string_view s) {
    if (s == "legacy") return Variant::legacy;
    if (s == "modified") return Variant::modified;
    throw ContractViolation("unknown pixel variant '" + std::string(s) + "'");
}

void SensorConfig::validate() const {
    expect(t_base_ms > 0.0, "sensor: t_base must be > 0");
    expect(e_max >= 1 && e_max <= 255, "sensor: e_max must be in [1, 255]");
    expect(conversion_gain > 0.0, "sensor: conversion gain must be > 0");
    expect(quantum_efficiency >= 0.0, "sensor: quantum efficiency must be >= 0");
    expect(read_noise_e >= 0.0 && fpn_sigma_e >= 0.0, "sensor: noise sigma must be >= 0");
    expect(pd_full_well > 0.0 && fd_capacity > 0.0 && mid_capacity >= 0.0,
           "sensor: well capacities must be positive");
}

void ExposureMap::validate(int e_max) const {
    for (std::uint8_t e : pixels())
        if (e < 1 || e > e_max)
            throw ContractViolation("exposure map: code " + std::to_string(e) +
                                    " outside [1, " + std::to_string(e_max) + "]");
}

PixelState accumulate(PixelState s, double photons, const SensorConfig& cfg, CounterRng& rng) {
    expect(photons >= 0.0, "accumulate: photons must be >= 0");
    const double mean = cfg.quantum_efficiency * photons;
    double electrons = mean;
    if (cfg.shot_noise) {
        electrons = 0.0;
        if (mean > 0.0) {
            std::poisson_distribution<long> pois(mean);
            electrons = static_cast<double>(pois(rng));
        }
    }
    if (cfg.variant == Variant::legacy && s.phase == 0) {
        const double to_mid = std::min(electrons, cfg.mid_capacity - s.mid_charge);
        s.mid_charge += to_mid;
        electrons -= to_mid;
    }
    s.pd_charge = std::min(s.pd_charge + electrons, cfg.pd_full_well);
    return s;
}

double signal_charge(const PixelState& s, const SensorConfig& cfg) noexcept {
    // Legacy: mid_charge was cleared before readout and never reaches FD.
    return std::min(s.pd_charge, cfg.fd_capacity);
}

Readout end_exposure(PixelState s, const SensorConfig& cfg, CounterRng& rng) {
    if (s.phase != s.exposure)
        throw ContractViolation("end_exposure: window incomplete (phase " +
                                std::to_string(s.phase) + " of " + std::to_string(s.exposure) +
                                ")");
    double noise = 0.0;
    if (cfg.read_noise_e > 0.0) {
        std::normal_distribution<double> n(0.0, cfg.read_noise_e);
        noise = n(rng);
    }
    const double q = signal_charge(s, cfg) + s.fpn_offset;
    Readout r;
    r.v_reset = cfg.v_fd_reset + cfg.conversion_gain * noise;
    r.v_signal = cfg.v_fd_reset - cfg.conversion_gain * q;
    s.pd_charge = 0.0;
    s.mid_charge = 0.0;
    s.phase = 0;
    r.state = s;
    return r;
}

Sensor::Sensor(int width, int height, SensorConfig cfg, AdcConfig adc)
    : cfg_(cfg), adc_(adc), pixels_(width, height) {
    cfg_.validate();
    adc_.validate();
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            PixelState& p = pixels_(x, y);
            if (cfg_.fpn_sigma_e > 0.0) {
                CounterRng rng(cfg_.seed, Stream::fpn, 0, pixels_.index(x, y));
                std::normal_distribution<double> n(0.0, cfg_.fpn_sigma_e);
                p.fpn_offset = n(rng);
            }
        }
}

std::uint16_t Sensor::digitise(double signal_e, double fpn_offset_e, CounterRng& read_rng) const {
    PixelState s;
    s.pd_charge = signal_e;
    s.fpn_offset = fpn_offset_e;
    s.phase = s.exposure = 1;
    const Readout r = end_exposure(s, cfg_, read_rng);
    return static_cast<std::uint16_t>(cyclic_adc(cds(r.v_reset, r.v_signal, adc_), adc_));
}

RawFrame Sensor::step(const scene::Scene& scene, const ExposureMap& exmap, std::int64_t n) {
    require_same_shape(scene, exmap, "sensor step (scene vs exposure map)");
    require_same_shape(scene, pixels_, "sensor step (scene vs sensor)");
    expect(n >= 0, "sensor step: frame index must be >= 0");
    const double t0 = static_cast<double>(n) * cfg_.t_base_ms;
    return step_impl(scene.integrate_frame(t0, t0 + cfg_.t_base_ms), exmap, n);
}

RawFrame Sensor::step(const Image<double>& photons, const ExposureMap& exmap, std::int64_t n) {
    require_same_shape(photons, pixels_, "sensor step (photons vs sensor)");
    expect(n >= 0, "sensor step: frame index must be >= 0");
    return step_impl(photons, exmap, n);
}

RawFrame Sensor::step_impl(const Image<double>& photons, const ExposureMap& exmap,
                           std::int64_t n) {
    require_same_shape(exmap, pixels_, "sensor step (exposure map vs sensor)");
    exmap.validate(cfg_.e_max);
    const int w = width(), h = height();
    RawFrame f{Image<std::uint16_t>(w, h), Image<std::uint8_t>(w, h), Image<std::uint8_t>(w, h),
               Image<std::uint8_t>(w, h), Image<std::uint8_t>(w, h), n};
    const auto frame = static_cast<std::uint64_t>(n);
    for (std::size_t i = 0; i < pixels_.size(); ++i) {
        PixelState& p = pixels_[i];
        if (p.phase == 0) {
            p.exposure = exmap[i];
            f.window_start[i] = 1;
        }
        f.active[i] = static_cast<std::uint8_t>(p.exposure);
        CounterRng shot(cfg_.seed, Stream::shot, frame, i);
        p = accumulate(p, photons[i], cfg_, shot);
        ++p.phase;
        if (p.phase == p.exposure) {
            CounterRng read(cfg_.seed, Stream::read, frame, i);
            const Readout r = end_exposure(p, cfg_, read);
            p = r.state;
            p.last_code = static_cast<std::uint16_t>(cyclic_adc(cds(r.v_reset, r.v_signal, adc_), adc_));
            p.last_exposure = static_cast<std::uint8_t>(p.exposure);
            f.updated[i] = 1;
        }
        f.codes[i] = p.last_code;
        f.exposure[i] = p.last_exposure;
    }
    return f;
}

RawFrame Sensor::dark_frame(std::int64_t k) const {
    const int w = width(), h = height();
    RawFrame f{Image<std::uint16_t>(w, h), Image<std::uint8_t>(w, h, 1), Image<std::uint8_t>(w, h, 1),
               Image<std::uint8_t>(w, h, 1), Image<std::uint8_t>(w, h, 1), k};
    for (std::size_t i = 0; i < pixels_.size(); ++i) {
        CounterRng read(cfg_.seed, Stream::dark, static_cast<std::uint64_t>(k), i);
        f.codes[i] = digitise(0.0, pixels_[i].fpn_offset, read);
    }
    return f;
}

}  // namespace pxa::sensor
