#include "pxa/sensor/adc.hpp"

#include <algorithm>

#include "pxa/common/error.hpp"

namespace pxa::sensor {

void AdcConfig::validate() const {
    expect(v_rl < v_com && v_com < v_rh, "adc: require V_RL < V_COM < V_RH");
    expect(cds_gain > 0.0, "adc: cds_gain must be > 0");
    expect(n_stages >= 1 && n_stages <= 15, "adc: n_stages must be in [1, 15]");
}

double cds(double v_reset, double v_signal, const AdcConfig& adc) noexcept {
    return adc.cds_gain * (v_reset - v_signal) + adc.v_rp;
}

double mdac_reference(int decision, const AdcConfig& adc) noexcept {
    switch (decision) {
        case 2: return adc.v_rh;
        case 1: return adc.v_com;
        default: return adc.v_rl;
    }
}

namespace {

template <class OnStage>
int convert(double v_in, const AdcConfig& adc, OnStage&& on_stage) {
    const double quarter = (adc.v_rh - adc.v_rl) / 8.0;
    const double hi = adc.v_com + quarter + adc.comparator_offset;
    const double lo = adc.v_com - quarter + adc.comparator_offset;
    double v = std::clamp(v_in, adc.v_rl, adc.v_rh);
    long acc = 0;
    for (int i = 1; i <= adc.n_stages; ++i) {
        const int d = v > hi ? 2 : (v < lo ? 0 : 1);
        const double vr = mdac_reference(d, adc);
        v = 2.0 * v - vr;
        // Weight 2^(n-i): each stage resolves one bit with a half-bit overlap.
        acc += static_cast<long>(d - 1) << (adc.n_stages - i);
        on_stage(AdcStage{d, vr, v});
    }
    const long full = 1L << adc.n_stages;
    return static_cast<int>(std::clamp((full + acc) >> 1, 0L, full - 1));
}

}  // namespace

int cyclic_adc(double v_in, const AdcConfig& adc) noexcept {
    return convert(v_in, adc, [](const AdcStage&) {});
}

AdcConversion cyclic_adc_trace(double v_in, const AdcConfig& adc) {
    AdcConversion out;
    out.stages.reserve(static_cast<std::size_t>(adc.n_stages));
    out.code = convert(v_in, adc, [&](const AdcStage& s) { out.stages.push_back(s); });
    return out;
}

}  // namespace pxa::sensor
