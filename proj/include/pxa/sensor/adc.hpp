#pragma once

#include <cstdint>
#include <vector>

namespace pxa::sensor {

struct AdcConfig {
    double v_rh = 1.5;
    double v_rl = 0.5;
    double v_com = 1.0;
    double v_rp = 0.515625;  // 16 LSB pedestal above V_RL
    double cds_gain = 1.0;   // C1 / C2
    int n_stages = 10;
    // Comparator offset (volts) added to both sub-ADC thresholds. Redundancy
    // absorbs anything below (V_RH - V_RL) / 8.
    double comparator_offset = 0.0;

    int max_code() const noexcept { return (1 << n_stages) - 1; }
    void validate() const;
    friend bool operator==(const AdcConfig&, const AdcConfig&) = default;
};

// Correlated double sampling: (C1/C2) * (v_reset - v_signal) + V_RP.
double cds(double v_reset, double v_signal, const AdcConfig& adc) noexcept;

struct AdcStage {
    int decision;     // sub-ADC output D in {0, 1, 2}
    double v_ref;     // MDAC reference V_R selected by D
    double residue;   // 2 * v - V_R
};

struct AdcConversion {
    int code = 0;
    std::vector<AdcStage> stages;
};

// Reference voltage applied for a sub-ADC decision.
double mdac_reference(int decision, const AdcConfig& adc) noexcept;

// n_stages cycles of sample / amplify with a 1.5-bit sub-ADC, followed by
// shift-and-add digital correction. Inputs outside [V_RL, V_RH] clip.
int cyclic_adc(double v_in, const AdcConfig& adc) noexcept;
AdcConversion cyclic_adc_trace(double v_in, const AdcConfig& adc);

}  // namespace pxa::sensor
