#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fmcw/error.hpp"
#include "fmcw/fft.hpp"
#include "fmcw/synth.hpp"

using namespace fmcw;

namespace {

double power(const ComplexSeries& s) {
    double acc = 0.0;
    for (const auto& x : s.samples)
        acc += std::norm(x);
    return acc / static_cast<double>(s.size());
}

// Beat frequency of the strongest DFT bin; kernel exp(+j...) matches the beat convention.
double peak_frequency(std::span<const cdouble> x, double fs) {
    const auto spec = fft::transform(x, x.size(), fft::Direction::Inverse);
    std::size_t best = 0;
    for (std::size_t k = 1; k < spec.size(); ++k)
        if (std::abs(spec[k]) > std::abs(spec[best]))
            best = k;
    return static_cast<double>(best) * fs / static_cast<double>(x.size());
}

InterferenceParams table1_interferer() { return *point_target_scenario().interference; }

}  // namespace

TEST(GenTargetBeat, TwoKilometreTone) {
    const RadarParams r = table1_radar();
    const auto s = gen_target_beat(r, {{2000.0, {1.0, 0.0}, 0.0}});
    ASSERT_EQ(s.size(), 6000u);
    for (const auto& x : s.samples)
        EXPECT_NEAR(std::abs(x), 1.0, 1e-12);
    const double fb = beat_frequency_from_range(2000.0, r.chirp_rate());
    EXPECT_NEAR(fb, 1.0667e6, 1e3);
    EXPECT_NEAR(peak_frequency(s.samples, r.sample_rate), fb, r.sample_rate / 6000.0);
}

TEST(GenTargetBeat, FiveKilometreTone) {
    const RadarParams r = table1_radar();
    const auto s = gen_target_beat(r, {{5000.0, {1.0, 0.0}, 0.0}});
    const double f = peak_frequency(s.samples, r.sample_rate);
    EXPECT_NEAR(f, 2.6667e6, 3e3);
    EXPECT_NEAR(range_from_beat_frequency(f, r.chirp_rate()), 5000.0,
                range_from_beat_frequency(r.sample_rate / 6000.0, r.chirp_rate()));
}

TEST(GenTargetBeat, NoTargetsGivesZeros) {
    const auto s = gen_target_beat(table1_radar(), {});
    ASSERT_EQ(s.size(), 6000u);
    EXPECT_TRUE(std::all_of(s.samples.begin(), s.samples.end(), [](cdouble x) { return x == cdouble{}; }));
}

TEST(GenTargetBeat, RejectsAliasedTarget) {
    const RadarParams r = table1_radar();
    try {
        gen_target_beat(r, {{r.max_unambiguous_range() + 10.0, {1.0, 0.0}, 0.0}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OutOfRange);
    }
}

TEST(GenTargetBeat, StationaryScenePeaksDoNotMove) {
    const RadarParams r = table1_radar();
    const auto s = gen_target_beat(r, {{2000.0, {1.0, 0.0}, 0.0}, {5000.0, {0.2, 0.0}, 0.0}});
    const std::span<const cdouble> v(s.samples);
    const double bin = r.sample_rate / 1024.0;
    for (std::size_t start : {0u, 1500u, 3000u, 4976u})
        EXPECT_NEAR(peak_frequency(v.subspan(start, 1024), r.sample_rate),
                    peak_frequency(v.subspan(0, 1024), r.sample_rate), bin);
}

TEST(Interference, CrossingAtWindowCentre) {
    const RadarParams r = table1_radar();
    const auto intf = table1_interferer();
    EXPECT_DOUBLE_EQ(r.chirp_rate() - intf.chirp_rate(), 1.6e11);
    EXPECT_LT(std::abs(instantaneous_intf_freq(r, intf, 215e-6)), 0.5e6);
    EXPECT_NEAR(instantaneous_intf_freq(r, intf, 212.5e-6), 0.0, 1e-3);
}

TEST(Interference, FrequencyFormulaTrivialCases) {
    const RadarParams r = table1_radar();
    InterferenceParams same{r.f0, r.bandwidth, r.sweep_time, 0.0, {1.0, 0.0}};
    EXPECT_DOUBLE_EQ(instantaneous_intf_freq(r, same, 0.0), 0.0);
    same.delay = 10e-6;
    const double k2 = instantaneous_intf_freq(r, same, 0.0);
    EXPECT_DOUBLE_EQ(instantaneous_intf_freq(r, same, 300e-6), k2);
}

TEST(PredictedGap, TableOneWindow) {
    const RadarParams r = table1_radar();
    const auto intf = table1_interferer();
    const GapSpec g = predicted_gap(r, intf, 8e6);
    // ~(1980, 3179); the crossing lands at 212.5 us, so the window is shifted by 30 samples.
    EXPECT_NEAR(static_cast<double>(g.n1), 1980.0, 40.0);
    EXPECT_NEAR(static_cast<double>(g.n2), 3179.0, 40.0);
    EXPECT_EQ(g, (GapSpec{1950, 3149}));
    const GapSpec wide = predicted_gap(r, intf, 8e6, 10);
    EXPECT_EQ(wide.n1, g.n1 - 10);
    EXPECT_EQ(wide.n2, g.n2 + 10);
}

TEST(PredictedGap, UnboundedLowpassCoversSweep) {
    const RadarParams r = table1_radar();
    InterferenceParams intf = table1_interferer();
    intf.delay = 0.0;
    intf.sweep_time = 2.0 * r.sweep_time;
    const GapSpec g = predicted_gap(r, intf, 1e12);
    EXPECT_EQ(g.n1, 0u);
    EXPECT_EQ(g.n2, r.n_samples - 1);
}

TEST(PredictedGap, OutOfBandInterfererThrows) {
    const RadarParams r = table1_radar();
    InterferenceParams intf = table1_interferer();
    intf.f_start += 1e9;
    EXPECT_THROW(predicted_gap(r, intf, 8e6), Error);
    const auto beat = gen_interference_beat(r, intf, 8e6);
    EXPECT_TRUE(std::all_of(beat.series.samples.begin(), beat.series.samples.end(),
                            [](cdouble x) { return x == cdouble{}; }));
}

TEST(Interference, SupportEqualsPredictedGap) {
    const RadarParams r = table1_radar();
    for (double lp : {2e6, 4e6, 8e6, 11e6}) {
        const auto intf = table1_interferer();
        const auto beat = gen_interference_beat(r, intf, lp);
        const GapSpec g = predicted_gap(r, intf, lp);
        for (std::size_t k = 0; k < r.n_samples; ++k)
            EXPECT_EQ(beat.series.samples[k] != cdouble{}, g.contains(k)) << "lp=" << lp << " k=" << k;
    }
}

TEST(Interference, SameSlopeIsGhostTone) {
    const RadarParams r = table1_radar();
    InterferenceParams intf{r.f0, r.bandwidth, r.sweep_time, -5e-6, {1.0, 0.0}};
    const auto beat = gen_interference_beat(r, intf, 4e6);
    EXPECT_TRUE(beat.ghost_target);
    const auto& s = beat.series.samples;
    // Constant frequency: successive-sample phase steps are all equal.
    const cdouble step = s[101] / s[100];
    for (std::size_t k = 200; k < 5900; k += 500)
        EXPECT_NEAR(std::abs(s[k + 1] / s[k] - step), 0.0, 1e-9);
}

TEST(Interference, DurationFractionMatchesTableOne) {
    const auto sc = extended_target_scenario();
    const GapSpec g = predicted_gap(sc.radar, *sc.interference, sc.lowpass_hz);
    EXPECT_NEAR(static_cast<double>(g.length()) / 6000.0, 0.243, 2.0 / 6000.0);
}

TEST(AddNoise, InfiniteSnrIsIdentity) {
    const auto s = gen_target_beat(table1_radar(), {{2000.0, {1.0, 0.0}, 0.0}});
    EXPECT_EQ(add_noise(s, kNoNoise, 3).samples, s.samples);
}

TEST(AddNoise, DeterministicUnderSeed) {
    const auto s = gen_target_beat(table1_radar(), {{2000.0, {1.0, 0.0}, 0.0}});
    EXPECT_EQ(add_noise(s, 10.0, 9).samples, add_noise(s, 10.0, 9).samples);
    EXPECT_NE(add_noise(s, 10.0, 9).samples, add_noise(s, 10.0, 10).samples);
}

TEST(AddNoise, EmpiricalSnrOverSeeds) {
    const auto s = gen_target_beat(table1_radar(), {{2000.0, {1.0, 0.0}, 0.0}});
    const double ps = power(s);
    for (double snr : {-10.0, 0.0, 15.0}) {
        double mean_db = 0.0;
        double worst = 0.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto y = add_noise(s, snr, seed);
            ComplexSeries noise = y;
            for (std::size_t k = 0; k < y.size(); ++k)
                noise.samples[k] -= s.samples[k];
            const double db = 10.0 * std::log10(ps / power(noise));
            mean_db += db / 100.0;
            worst = std::max(worst, std::abs(db - snr));
        }
        EXPECT_NEAR(mean_db, snr, 0.05);
        // 12000 real degrees of freedom: one trial sits within ~0.08 dB at 3 sigma.
        EXPECT_LT(worst, 0.5);
    }
}

TEST(BuildScenario, ContaminatedIsReferencePlusInterference) {
    const auto sc = build_scenario(point_target_scenario(15.0, 4));
    ASSERT_EQ(sc.contaminated.size(), 6000u);
    for (std::size_t k = 0; k < 6000; ++k)
        EXPECT_EQ(sc.contaminated.samples[k], sc.reference.samples[k] + sc.interference.samples[k]);
    EXPECT_EQ(sc.truth_gap, (GapSpec{1950, 3149}));
}

TEST(BuildScenario, DefaultSirScalesInterfererTo20x) {
    const auto sc = build_scenario(point_target_scenario(kNoNoise, 1));
    double peak = 0.0;
    for (const auto& x : sc.interference.samples)
        peak = std::max(peak, std::abs(x));
    EXPECT_NEAR(peak, 20.0, 1e-9);
}

TEST(BuildScenario, ChirpInsideGapToneOutside) {
    const auto sc = build_scenario(point_target_scenario(15.0, 1));
    double in = 0.0, out = 0.0;
    for (std::size_t k = 0; k < 6000; ++k)
        (sc.truth_gap.contains(k) ? in : out) += std::norm(sc.contaminated.samples[k]);
    in /= static_cast<double>(sc.truth_gap.length());
    out /= static_cast<double>(6000 - sc.truth_gap.length());
    EXPECT_GT(10.0 * std::log10(in / out), 20.0);
}

TEST(BuildScenario, ExtendedTargetsDrawnInRange) {
    const auto sc = build_scenario(extended_target_scenario(15.0, 2));
    ASSERT_EQ(sc.targets.size(), 15u);
    for (const auto& t : sc.targets) {
        EXPECT_GE(t.range_m, 3000.0);
        EXPECT_LE(t.range_m, 3025.0);
        EXPECT_LE(std::abs(t.amplitude), 0.05 + 1e-12);
    }
}

TEST(BuildCpiScenario, SweepsShareGapAndDiffer) {
    auto cfg = point_target_scenario(20.0, 3);
    cfg.targets[0].velocity = 15.0;
    cfg.n_sweeps = 4;
    const auto cpi = build_cpi_scenario(cfg);
    ASSERT_EQ(cpi.contaminated.size(), 4u);
    EXPECT_EQ(cpi.truth_gap, (GapSpec{1950, 3149}));
    EXPECT_NE(cpi.clean[0].samples, cpi.clean[1].samples);
}
