#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "fmcw/error.hpp"
#include "fmcw/rng.hpp"
#include "fmcw/spectra.hpp"
#include "fmcw/synth.hpp"

using namespace fmcw;

namespace {

std::size_t argmax(const std::vector<double>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

Cpi random_cpi(std::size_t m, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Cpi cpi(m);
    for (auto& s : cpi) {
        s = ComplexSeries(std::vector<cdouble>(n), 1e-6);
        for (auto& x : s.samples)
            x = rng.complex_normal(1.0);
    }
    return cpi;
}

double total_power(const Cpi& cpi) {
    double acc = 0.0;
    for (const auto& s : cpi)
        for (const auto& x : s.samples)
            acc += std::norm(x);
    return acc;
}

}  // namespace

TEST(Window, Shapes) {
    EXPECT_EQ(make_window(Window::Rect, 4), std::vector<double>(4, 1.0));
    const auto h = make_window(Window::Hann, 5);
    EXPECT_NEAR(h[0], 0.0, 1e-15);
    EXPECT_NEAR(h[2], 1.0, 1e-15);
    EXPECT_NEAR(h[1], h[3], 1e-15);
    const auto hm = make_window(Window::Hamming, 5);
    EXPECT_NEAR(hm[0], 0.08, 1e-12);
    EXPECT_EQ(window_from_string("hann"), Window::Hann);
    EXPECT_THROW(window_from_string("kaiser"), Error);
}

TEST(MagnitudeDb, FloorForZero) {
    EXPECT_EQ(magnitude_db(0.0), kDbFloor);
    EXPECT_NEAR(magnitude_db(10.0), 20.0, 1e-12);
}

TEST(RangeProfile, TwoKilometrePeak) {
    const RadarParams r = table1_radar();
    const auto s = gen_target_beat(r, {{2000.0, {1.0, 0.0}, 0.0}});
    for (std::size_t nfft : {0u, 8192u}) {
        const auto p = range_profile(s, r, Window::Hann, nfft);
        const std::size_t b = argmax(p.magnitude);
        const double bin = p.range_m[1] - p.range_m[0];
        EXPECT_NEAR(p.range_m[b], 2000.0, bin);
    }
}

TEST(RangeProfile, FiveKilometreRoundTrip) {
    const RadarParams r = table1_radar();
    const auto p = range_profile(gen_target_beat(r, {{5000.0, {1.0, 0.0}, 0.0}}), r);
    EXPECT_NEAR(p.range_m[argmax(p.magnitude)], 5000.0, p.range_m[1]);
}

TEST(RangeProfile, ZeroInputFloors) {
    const RadarParams r = table1_radar();
    const auto p = range_profile(ComplexSeries(std::vector<cdouble>(64), r.dt()), r);
    for (double d : p.db(1.0))
        EXPECT_EQ(d, kDbFloor);
}

TEST(RangeProfile, RejectsShortNfft) {
    const RadarParams r = table1_radar();
    EXPECT_THROW(range_profile(ComplexSeries(std::vector<cdouble>(64), r.dt()), r, Window::Rect, 32), Error);
}

TEST(RangeProfile, ZeroingRaisesSidelobes) {
    // Integrated level outside the three target main lobes, relative to total.
    const auto sc = build_scenario(point_target_scenario(kNoNoise, 1));
    const RadarParams r = table1_radar();
    auto sidelobe_db = [&](const ComplexSeries& s) {
        const auto p = range_profile(s, r, Window::Hann);
        const double bin = p.range_m[1];
        double side = 0.0, total = 0.0;
        for (std::size_t b = 0; b < p.magnitude.size(); ++b) {
            const double e = p.magnitude[b] * p.magnitude[b];
            total += e;
            bool lobe = false;
            for (double d : {2000.0, 5000.0, 5100.0})
                lobe = lobe || std::abs(p.range_m[b] - d) < 4.0 * bin;
            if (!lobe)
                side += e;
        }
        return 10.0 * std::log10(side / total);
    };
    EXPECT_GT(sidelobe_db(zero_gap(sc.clean, sc.truth_gap)), sidelobe_db(sc.clean) + 20.0);
}

TEST(SlowTime, StaticToneAtZeroDoppler) {
    Cpi cpi(16, ComplexSeries(std::vector<cdouble>(32, cdouble(1.0, 0.5)), 1.0));
    const auto map = range_doppler(cpi);
    const auto pw = map.power();
    double zero_row = 0.0, total = 0.0;
    for (std::size_t i = 0; i < pw.size(); ++i) {
        total += pw[i];
        if (i < map.n_range)
            zero_row += pw[i];
    }
    EXPECT_NEAR(zero_row / total, 1.0, 1e-12);
}

TEST(SlowTime, PhaseRotationPeaksAtItsBin) {
    const std::size_t m = 32;
    for (std::size_t d0 : {1u, 5u, 20u}) {
        Cpi cpi;
        for (std::size_t s = 0; s < m; ++s) {
            const cdouble rot = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(d0 * s) / m);
            cpi.emplace_back(std::vector<cdouble>(8, rot), 1.0);
        }
        const auto bins = slow_time_dft(cpi);
        std::vector<double> e(m);
        for (std::size_t d = 0; d < m; ++d)
            e[d] = std::norm(bins[d].samples[0]);
        EXPECT_EQ(argmax(e), d0);
    }
}

TEST(SlowTime, ForwardInverseIdentity) {
    const Cpi cpi = random_cpi(24, 50, 1);
    const Cpi back = slow_time_dft(slow_time_dft(cpi), true);
    for (std::size_t i = 0; i < cpi.size(); ++i)
        for (std::size_t k = 0; k < 50; ++k)
            EXPECT_LT(std::abs(back[i].samples[k] - cpi[i].samples[k]), 1e-12 * 4.0);
}

TEST(RangeDoppler, Parseval) {
    const Cpi cpi = random_cpi(16, 96, 2);
    const auto pw = range_doppler(cpi).power();
    double map = 0.0;
    for (double p : pw)
        map += p;
    EXPECT_NEAR(map / total_power(cpi), 1.0, 1e-9);
}

TEST(RangeDoppler, FromBinsMatches) {
    const Cpi cpi = random_cpi(8, 40, 3);
    const auto a = range_doppler(cpi, Window::Hann);
    const auto b = range_doppler_from_bins(slow_time_dft(cpi), Window::Hann);
    ASSERT_EQ(a.cells.size(), b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i)
        EXPECT_LT(std::abs(a.cells[i] - b.cells[i]), 1e-12);
}

TEST(RangeDoppler, RejectsRaggedCpi) {
    Cpi cpi = random_cpi(4, 10, 4);
    cpi[2].samples.pop_back();
    EXPECT_THROW(range_doppler(cpi), Error);
}

TEST(MitigateCpi, EmptyGapIsIdentity) {
    const Cpi cpi = random_cpi(8, 64, 5);
    const auto res = mitigate_cpi(cpi, GapSpec::empty_at(10));
    const Cpi back = res.sweeps();
    for (std::size_t i = 0; i < cpi.size(); ++i)
        for (std::size_t k = 0; k < 64; ++k)
            EXPECT_LT(std::abs(back[i].samples[k] - cpi[i].samples[k]), 1e-12);
}

TEST(MitigateCpi, TouchesOnlyGapSamples) {
    auto cfg = point_target_scenario(20.0, 3);
    cfg.targets[0].velocity = 10.0;
    cfg.n_sweeps = 8;
    const auto sc = build_cpi_scenario(cfg);
    CpiConfig cc;
    cc.mitigation.mp.order = 3;
    cc.workers = 3;
    const auto res = mitigate_cpi(sc.contaminated, sc.truth_gap, cc);
    const Cpi bins = slow_time_dft(sc.contaminated);
    for (std::size_t d = 0; d < bins.size(); ++d) {
        EXPECT_FALSE(res.reports[d].failed);
        for (std::size_t k = 0; k < bins[d].size(); ++k)
            if (!sc.truth_gap.contains(k))
                ASSERT_EQ(res.doppler_bins[d].samples[k], bins[d].samples[k]);
    }
}

TEST(MitigateCpi, StaticSceneMatchesCoherentSum) {
    // With no motion every sweep is the same up to noise, so zero Doppler
    // carries the coherent sum and per-bin processing equals per-sweep
    // processing of that sum.
    auto cfg = point_target_scenario(kNoNoise, 3);
    cfg.n_sweeps = 4;
    auto sc = build_cpi_scenario(cfg);
    for (auto& s : sc.contaminated)
        s = sc.contaminated.front();
    CpiConfig cc;
    cc.mitigation.mp.order = 3;
    const auto res = mitigate_cpi(sc.contaminated, sc.truth_gap, cc);
    ComplexSeries sum = sc.contaminated.front();
    for (auto& x : sum.samples)
        x *= 2.0;  // sqrt(4) under the unitary DFT
    const auto direct = mitigate(sum, sc.truth_gap, cc.mitigation);
    for (std::size_t k = 0; k < sum.size(); ++k)
        EXPECT_LT(std::abs(res.doppler_bins[0].samples[k] - direct.series.samples[k]), 1e-9);
}

TEST(MitigateCpi, FailedBinFallsBackToZero) {
    const Cpi cpi = random_cpi(4, 64, 6);
    CpiConfig cc;
    cc.mitigation.mp.order = 20;  // too high for 4-sample segments
    const GapSpec g{4, 59};
    const auto res = mitigate_cpi(cpi, g, cc);
    for (std::size_t d = 0; d < 4; ++d) {
        EXPECT_TRUE(res.reports[d].failed);
        for (std::size_t k = 4; k <= 59; ++k)
            ASSERT_EQ(res.doppler_bins[d].samples[k], cdouble{});
    }
    cc.fallback_to_zero = false;
    EXPECT_THROW(mitigate_cpi(cpi, g, cc), Error);
}
