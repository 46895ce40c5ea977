#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

#include "pxa/common/image.hpp"
#include "pxa/common/rng.hpp"
#include "pxa/sensor/adc.hpp"

namespace pxa::scene {
class Scene;
}

namespace pxa::sensor {

// Pixel designs differing in where the exposure gate sits. The legacy
// layout drains charge collected in the first base period of each exposure
// window into the MID node (up to its capacity), where it is lost.
enum class Variant { legacy, modified };

std::string_view to_string(Variant v) noexcept;
Variant variant_from_string(std::string_view s);

struct SensorConfig {
    double t_base_ms = 30.0;
    int e_max = 8;
    double conversion_gain = 1.0 / 12000.0;  // V / e-
    double quantum_efficiency = 0.6;        // e- / photon
    double read_noise_e = 5.0;              // e- rms
    double fpn_sigma_e = 15.0;              // e- rms, fixed per seed
    double pd_full_well = 12000.0;
    double fd_capacity = 12000.0;
    double mid_capacity = 300.0;
    double v_fd_reset = 2.5;
    bool shot_noise = true;
    Variant variant = Variant::modified;
    std::uint64_t seed = 1;

    void validate() const;
    friend bool operator==(const SensorConfig&, const SensorConfig&) = default;
};

// Per-pixel exposure multiples of the base period, each in [1, e_max].
class ExposureMap : public Image<std::uint8_t> {
public:
    ExposureMap() = default;
    ExposureMap(int width, int height, int uniform = 1)
        : Image<std::uint8_t>(width, height, static_cast<std::uint8_t>(uniform)) {}
    explicit ExposureMap(Image<std::uint8_t> img) : Image<std::uint8_t>(std::move(img)) {}

    void validate(int e_max) const;
};

struct PixelState {
    double pd_charge = 0.0;
    double mid_charge = 0.0;
    int phase = 0;     // base frames elapsed in the current window
    int exposure = 1;  // E latched at the start of the current window
    std::uint16_t last_code = 0;
    std::uint8_t last_exposure = 1;  // E of the window that produced last_code
    double fpn_offset = 0.0;         // e-
};

// Converts photons to electrons and deposits them. Legacy pixels route the
// first base period into MID until it is full. Saturation clips.
PixelState accumulate(PixelState state, double photons, const SensorConfig& cfg, CounterRng& rng);

struct Readout {
    double v_reset;
    double v_signal;
    PixelState state;
};

// Charge transfer and reset at the end of an exposure window. Throws
// ContractViolation when the window is not complete.
Readout end_exposure(PixelState state, const SensorConfig& cfg, CounterRng& rng);

// Charge that reaches the floating diffusion for a complete window.
double signal_charge(const PixelState& state, const SensorConfig& cfg) noexcept;

struct RawFrame {
    Image<std::uint16_t> codes;       // latest code per pixel
    Image<std::uint8_t> updated;      // 1 where an exposure ended this frame
    Image<std::uint8_t> exposure;     // E of the sample held in codes
    Image<std::uint8_t> active;       // E of the window in progress during this frame
    Image<std::uint8_t> window_start; // 1 where a new window began this frame
    std::int64_t index = 0;
};

class Sensor {
public:
    Sensor(int width, int height, SensorConfig cfg, AdcConfig adc);

    int width() const noexcept { return pixels_.width(); }
    int height() const noexcept { return pixels_.height(); }
    const SensorConfig& config() const noexcept { return cfg_; }
    const AdcConfig& adc() const noexcept { return adc_; }
    const Image<PixelState>& pixels() const noexcept { return pixels_; }

    // Integrates the scene over [n T, (n+1) T) and reads out completed
    // windows. Exposure codes latch only where a window begins.
    RawFrame step(const scene::Scene& scene, const ExposureMap& exmap, std::int64_t n);
    RawFrame step(const Image<double>& photons, const ExposureMap& exmap, std::int64_t n);

    // Zero-light frame at E = 1 on an independent noise stream, for dark
    // calibration. Does not disturb the exposure state.
    RawFrame dark_frame(std::int64_t k) const;

    // Digitises a signal charge through CDS and the ADC with this pixel's
    // offset; exposed for characterisation.
    std::uint16_t digitise(double signal_e, double fpn_offset_e, CounterRng& read_rng) const;

private:
    RawFrame step_impl(const Image<double>& photons, const ExposureMap& exmap, std::int64_t n);

    SensorConfig cfg_;
    AdcConfig adc_;
    Image<PixelState> pixels_;
};

}  // namespace pxa::sensor
