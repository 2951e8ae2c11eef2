#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "fmcw/error.hpp"
#include "fmcw/metrics.hpp"
#include "fmcw/mitigate.hpp"
#include "fmcw/rng.hpp"
#include "fmcw/synth.hpp"

using namespace fmcw;

namespace {

ComplexSeries tones(const std::vector<double>& angles, const std::vector<cdouble>& amps, std::size_t n) {
    ExpSumModel m;
    for (double a : angles)
        m.poles.push_back(std::polar(1.0, a));
    m.amplitudes = amps;
    return synthesize(m, n);
}

ComplexSeries white(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<cdouble> v(n);
    for (auto& x : v)
        x = rng.complex_normal(1.0);
    return {v, 1.0};
}

ComplexSeries plus(ComplexSeries a, const ComplexSeries& b, double scale = 1.0) {
    for (std::size_t k = 0; k < a.size(); ++k)
        a.samples[k] += scale * b.samples[k];
    return a;
}

}  // namespace

TEST(ZeroGap, Basic) {
    const ComplexSeries s({1, 2, 3, 4}, 1.0);
    EXPECT_EQ(zero_gap(s, {1, 2}).samples, (std::vector<cdouble>{1, 0, 0, 4}));
    EXPECT_EQ(zero_gap(zero_gap(s, {1, 2}), {1, 2}), zero_gap(s, {1, 2}));
    EXPECT_THROW(zero_gap(s, {2, 9}), Error);
}

TEST(Detect, CleanSweepHasNoInterference) {
    const auto sc = build_scenario(point_target_scenario(15.0, 1));
    try {
        detect_interference(sc.reference);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoInterference);
    }
}

TEST(Detect, TableOneScenarioCoversTruth) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto sc = build_scenario(point_target_scenario(15.0, seed));
        const GapSpec g = detect_interference(sc.contaminated);
        const auto& t = sc.truth_gap;
        EXPECT_LE(g.n1, t.n1);
        EXPECT_GE(g.n2, t.n2);
        EXPECT_GE(g.n1 + 2 * kDefaultDetectWindow, t.n1);
        EXPECT_LE(g.n2, t.n2 + 2 * kDefaultDetectWindow);
    }
}

TEST(Detect, RectangularBurst) {
    auto s = plus(tones({0.3}, {1.0}, 4000), white(4000, 2), 0.1);
    for (std::size_t k = 1500; k < 1600; ++k)
        s.samples[k] += 30.0;
    const GapSpec g = detect_interference(s);
    EXPECT_NEAR(static_cast<double>(g.n1), 1500.0, kDefaultDetectWindow);
    EXPECT_NEAR(static_cast<double>(g.n2), 1599.0, kDefaultDetectWindow);
}

TEST(Detect, WholeSweepIsUnusable) {
    auto s = white(1000, 3);
    for (std::size_t k = 0; k < 1000; ++k)
        if (k < 150 || k > 850)
            s.samples[k] *= 100.0;
    try {
        detect_interference(s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SweepUnusable);
    }
}

TEST(ReconstructMp, NoiselessThreeTonesExact) {
    const auto s = tones({0.4, 1.3, -2.2}, {1.0, 0.2, 0.1}, 3000);
    const GapSpec g{1200, 1799};
    const auto out = reconstruct_mp(zero_gap(s, g), g);
    EXPECT_GT(rsnr(s, out.series), 80.0);
    EXPECT_EQ(out.report.order_used, 3u);
}

TEST(ReconstructMp, EmptyGapIsIdentity) {
    const auto s = white(300, 4);
    const auto out = reconstruct_mp(s, GapSpec::empty_at(100));
    EXPECT_EQ(out.series, s);
}

TEST(ReconstructMp, RejectsZeroIterations) {
    const auto s = tones({0.4}, {1.0}, 300);
    MpConfig cfg;
    cfg.max_iter = 0;
    EXPECT_THROW(reconstruct_mp(s, {100, 149}, cfg), Error);
}

TEST(ReconstructMp, GapCoveringSweep) {
    const auto s = tones({0.4}, {1.0}, 300);
    try {
        reconstruct_mp(s, {0, 299});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoInterferenceFreeData);
    }
}

TEST(ReconstructMp, TooLittleDataForOrder) {
    const auto s = tones({0.4}, {1.0}, 300);
    MpConfig cfg;
    cfg.order = 5;
    try {
        reconstruct_mp(s, {4, 293}, cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientData);
    }
}

TEST(ReconstructMp, EdgeGapUsesOneSegment) {
    const auto s = tones({0.4, -1.0}, {1.0, 0.5}, 600);
    const GapSpec g{450, 599};
    const auto out = reconstruct_mp(zero_gap(s, g), g);
    EXPECT_GT(rsnr(s, out.series), 80.0);
}

TEST(MitigateProperty, OutsideGapBitIdenticalAndBestIterate) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto sc = build_scenario(point_target_scenario(15.0, seed));
        MpConfig cfg;
        cfg.order = 3;
        const auto out = reconstruct_mp(sc.contaminated, sc.truth_gap, cfg);
        for (std::size_t k = 0; k < 6000; ++k)
            if (!sc.truth_gap.contains(k))
                ASSERT_EQ(out.series.samples[k], sc.contaminated.samples[k]);
        const auto& h = out.report.epsilon_history;
        ASSERT_FALSE(h.empty());
        EXPECT_EQ(h[out.report.best_iteration], *std::min_element(h.begin(), h.end()));
        EXPECT_EQ(out.report.iterations, h.size());
    }
}

TEST(MitigateProperty, NoiselessExactness) {
    Rng rng(99);
    for (int t = 0; t < 25; ++t) {
        const std::size_t order = 1 + t % 5;
        std::vector<double> ang;
        while (ang.size() < order) {
            const double a = rng.uniform(-std::numbers::pi, std::numbers::pi);
            if (std::all_of(ang.begin(), ang.end(), [&](double b) { return std::abs(std::arg(std::polar(1.0, a - b))) > 0.1; }))
                ang.push_back(a);
        }
        std::vector<cdouble> amps;
        for (std::size_t i = 0; i < order; ++i)
            amps.push_back(std::polar(rng.uniform(0.2, 1.0), rng.uniform(-3.0, 3.0)));
        const std::size_t n = 1024;
        const auto s = tones(ang, amps, n);
        const std::size_t glen = static_cast<std::size_t>(rng.uniform(0.1, 0.5) * n);
        const std::size_t n1 = 50 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - glen - 100));
        const GapSpec g{n1, n1 + glen - 1};
        const auto out = reconstruct_mp(zero_gap(s, g), g);
        EXPECT_LT(relative_rms_error(s, out.series), 1e-6) << "trial " << t;
    }
}

TEST(Burg, SingleToneOrderOne) {
    const cdouble z = std::polar(1.0, 0.7);
    const auto s = tones({0.7}, {cdouble(0.5, 0.5)}, 200);
    const auto m = burg_ar_fit(s, 1);
    ASSERT_EQ(m.order(), 1u);
    EXPECT_LT(std::abs(-m.coeffs[0] - z), 1e-12);
    EXPECT_LT(m.error_power, 1e-20);
}

TEST(Burg, OrderTooLarge) {
    const auto s = tones({0.7}, {1.0}, 5);
    EXPECT_THROW(burg_ar_fit(s, 5), Error);
    EXPECT_THROW(burg_ar_fit(s, 0), Error);
}

TEST(Burg, WhiteNoiseReflectionSmall) {
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed)
        mean += std::abs(burg_ar_fit(white(2000, seed), 1).reflection[0]) / 50.0;
    EXPECT_LT(mean, 0.05);
}

TEST(Burg, ReflectionsInsideUnitDisc) {
    const auto m = burg_ar_fit(plus(tones({0.2, 1.1}, {1.0, 0.3}, 500), white(500, 7), 0.01), 8);
    for (const auto& k : m.reflection)
        EXPECT_LE(std::abs(k), 1.0);
}

TEST(Burg, NoiselessToneExactGapRecovery) {
    const auto s = tones({-0.9}, {cdouble(1.0, -0.4)}, 800);
    const GapSpec g{300, 499};
    const auto out = reconstruct_burg(zero_gap(s, g), g, 1);
    EXPECT_LT(relative_rms_error(s, out), 1e-10);
}

TEST(Burg, EdgeGapFallsBackToOneSide) {
    const auto s = tones({0.5}, {cdouble(1.0, 0.4)}, 400);
    for (const GapSpec g : {GapSpec{0, 99}, GapSpec{300, 399}}) {
        const auto out = reconstruct_burg(zero_gap(s, g), g, 1);
        EXPECT_LT(relative_rms_error(s, out), 1e-10);
    }
    try {
        reconstruct_burg(zero_gap(s, {1, 398}), {1, 398}, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientData);
    }
}

TEST(Burg, ExtrapolateNeedsHistory) {
    const auto m = burg_ar_fit(tones({0.3, 0.9}, {1.0, 1.0}, 100), 2);
    const std::vector<cdouble> h{1.0};
    EXPECT_THROW(ar_extrapolate(m, h, 3), Error);
}

TEST(Mitigate, DispatchesMethods) {
    const auto sc = build_scenario(point_target_scenario(15.0, 2));
    MitigateConfig cfg;
    cfg.mp.order = 3;
    cfg.method = Method::Zeroing;
    const auto z = mitigate(sc.contaminated, sc.truth_gap, cfg);
    EXPECT_EQ(z.report.method, Method::Zeroing);
    for (std::size_t k = sc.truth_gap.n1; k <= sc.truth_gap.n2; ++k)
        ASSERT_EQ(z.series.samples[k], cdouble{});
    cfg.method = Method::Burg;
    const auto b = mitigate(sc.contaminated, sc.truth_gap, cfg);
    EXPECT_EQ(b.report.order_used, 3u);
    cfg.method = Method::MP;
    const auto m = mitigate(sc.contaminated, sc.truth_gap, cfg);
    EXPECT_GT(rsnr(sc.clean, m.series), rsnr(sc.clean, b.series));
    EXPECT_GT(rsnr(sc.clean, b.series), rsnr(sc.clean, z.series));
}
