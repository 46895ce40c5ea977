#include <doctest.h>

#include <cmath>
#include <random>

#include "pxa/common/rng.hpp"
#include "pxa/sensor/adc.hpp"
#include "pxa/sensor/sensor.hpp"

using namespace pxa;
using namespace pxa::sensor;

namespace {

SensorConfig noiseless(Variant v = Variant::modified) {
    SensorConfig c;
    c.shot_noise = false;
    c.read_noise_e = 0.0;
    c.fpn_sigma_e = 0.0;
    c.quantum_efficiency = 1.0;
    c.variant = v;
    return c;
}

// Collects `per_frame` electrons for each of E base frames.
double window_signal(const SensorConfig& cfg, int e, double per_frame) {
    PixelState s;
    s.exposure = e;
    CounterRng rng(7);
    for (int k = 0; k < e; ++k) {
        s = accumulate(s, per_frame / cfg.quantum_efficiency, cfg, rng);
        ++s.phase;
    }
    return signal_charge(s, cfg);
}

int ideal_quantizer(double v, const AdcConfig& a) {
    const double q = (v - a.v_rl) / (a.v_rh - a.v_rl) * (a.max_code() + 1);
    return std::clamp(static_cast<int>(std::floor(q)), 0, a.max_code());
}

}  // namespace

TEST_SUITE("sensor") {

TEST_CASE("photon to electron conversion") {
    SensorConfig c = noiseless();
    CounterRng rng(1);
    c.quantum_efficiency = 0.5;
    CHECK(accumulate({}, 0.0, c, rng).pd_charge == 0.0);
    c.quantum_efficiency = 1.0;
    CHECK(accumulate({}, 100.0, c, rng).pd_charge == doctest::Approx(100.0));
}

TEST_CASE("shot noise follows Poisson statistics") {
    SensorConfig c = noiseless();
    c.shot_noise = true;
    c.pd_full_well = 1e9;
    const int n = 10000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        CounterRng rng(3, Stream::test, 0, static_cast<std::uint64_t>(i));
        const double e = accumulate({}, 1e4, c, rng).pd_charge;
        sum += e;
        sum2 += e * e;
    }
    const double mean = sum / n, var = sum2 / n - mean * mean;
    CHECK(std::abs(mean - 1e4) < 3.0 * std::sqrt(1e4 / n));
    CHECK(var == doctest::Approx(1e4).epsilon(0.05));
}

TEST_CASE("window charge for both pixel designs") {
    CHECK(window_signal(noiseless(Variant::modified), 4, 100.0) == doctest::Approx(400.0));
    SensorConfig legacy = noiseless(Variant::legacy);
    legacy.mid_capacity = 200.0;
    CHECK(window_signal(legacy, 4, 100.0) == doctest::Approx(300.0));
    CHECK(window_signal(legacy, 2, 5000.0) == doctest::Approx(9800.0));
}

TEST_CASE("readout requires a complete window") {
    const SensorConfig c = noiseless();
    PixelState s;
    s.exposure = 3;
    s.phase = 2;
    CounterRng rng(1);
    CHECK_THROWS_AS(end_exposure(s, c, rng), ContractViolation);
    s.phase = 3;
    s.pd_charge = 1200.0;
    const Readout r = end_exposure(s, c, rng);
    CHECK(r.v_reset - r.v_signal == doctest::Approx(1200.0 * c.conversion_gain));
    CHECK(r.state.pd_charge == 0.0);
    CHECK(r.state.phase == 0);
}

TEST_CASE("correlated double sampling") {
    AdcConfig a;
    CHECK(cds(1.0, 1.0, a) == doctest::Approx(a.v_rp));
    a.v_rp = 0.5;
    CHECK(cds(1.2, 0.7, a) == doctest::Approx(1.0));
    CHECK(cds(1.4, 0.4, a) - a.v_rp == doctest::Approx(2.0 * (cds(1.2, 0.7, a) - a.v_rp)));
}

TEST_CASE("cyclic ADC") {
    const AdcConfig a;
    CHECK(cyclic_adc(a.v_rl, a) == 0);
    CHECK(cyclic_adc(a.v_rh, a) == 1023);
    CHECK(mdac_reference(2, a) == a.v_rh);
    CHECK(mdac_reference(1, a) == a.v_com);
    CHECK(mdac_reference(0, a) == a.v_rl);

    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(a.v_rl, a.v_rh);
    int worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const double v = u(gen);
        worst = std::max(worst, std::abs(cyclic_adc(v, a) - ideal_quantizer(v, a)));
    }
    CHECK(worst <= 1);

    SUBCASE("redundancy absorbs comparator offset") {
        AdcConfig off = a;
        off.comparator_offset = 0.1;  // below (V_RH - V_RL) / 8
        int w = 0;
        for (int i = 0; i < 1000; ++i) {
            const double v = u(gen);
            w = std::max(w, std::abs(cyclic_adc(v, off) - ideal_quantizer(v, off)));
        }
        CHECK(w <= 1);
    }
    SUBCASE("trace records one decision per stage") {
        const auto t = cyclic_adc_trace(1.23, a);
        CHECK(t.stages.size() == 10);
        CHECK(t.code == cyclic_adc(1.23, a));
    }
}

TEST_CASE("sampling schedule") {
    const int w = 4, h = 1;
    SensorConfig c = noiseless();
    Sensor s(w, h, c, AdcConfig{});
    Image<double> photons(w, h, 100.0);
    ExposureMap m(w, h, 1);
    m(1, 0) = 8;
    m(2, 0) = 3;
    std::vector<int> upd1, upd8, upd3;
    for (int n = 0; n < 24; ++n) {
        const RawFrame f = s.step(photons, m, n);
        if (f.updated(0, 0)) upd1.push_back(n);
        if (f.updated(1, 0)) upd8.push_back(n);
        if (f.updated(2, 0)) upd3.push_back(n);
    }
    CHECK(upd1.size() == 24);
    CHECK(upd8 == std::vector<int>{7, 15, 23});
    CHECK(upd3 == std::vector<int>{2, 5, 8, 11, 14, 17, 20, 23});
}

TEST_CASE("exposure map validation") {
    ExposureMap m(2, 2, 4);
    CHECK_NOTHROW(m.validate(8));
    m(0, 0) = 0;
    CHECK_THROWS_AS(m.validate(8), ContractViolation);
    m(0, 0) = 9;
    CHECK_THROWS_AS(m.validate(8), ContractViolation);
}

}
