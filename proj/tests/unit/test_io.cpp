#include <gtest/gtest.h>

#include <cstring>
#include <sstream>

#include "fmcw/error.hpp"
#include "fmcw/io.hpp"
#include "fmcw/rng.hpp"

using namespace fmcw;

namespace {

Config parse(const std::string& text) {
    std::istringstream is(text);
    return Config::parse(is, "test.cfg");
}

SweepFile random_file(std::size_t m, std::size_t n) {
    SweepFile f{RadarParams::make(3e9, 40e6, 200e-6, 10.24e6), {}};
    Rng rng(1);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<cdouble> v(n);
        for (auto& x : v)
            x = rng.complex_normal(1.0);
        f.sweeps.emplace_back(v, f.radar.dt());
    }
    return f;
}

std::string expect_config_error(const std::string& text) {
    try {
        scenario_from_config(parse(text));
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config) << e.what();
        return e.what();
    }
    ADD_FAILURE() << "no error";
    return {};
}

const char* kRadar = "[radar]\nf0_hz = 2.98e9\nbandwidth_hz = 40e6\nsweep_time_s = 500e-6\nsample_rate_hz = 12e6\n";

}  // namespace

TEST(SweepFile, RoundTripIsBitIdentical) {
    const auto f = random_file(3, 17);
    std::stringstream ss;
    write_sweeps(ss, f);
    const auto g = read_sweeps(ss);
    EXPECT_EQ(g.sweeps.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i)
        EXPECT_EQ(std::memcmp(g.sweeps[i].samples.data(), f.sweeps[i].samples.data(), 17 * sizeof(cdouble)), 0);
    EXPECT_EQ(g.radar.sample_rate, f.radar.sample_rate);
    EXPECT_EQ(g.radar.f0, f.radar.f0);
}

TEST(SweepFile, HeaderLayout) {
    std::stringstream ss;
    write_sweeps(ss, random_file(2, 5));
    const std::string bytes = ss.str();
    ASSERT_EQ(bytes.size(), 4 + 4 + 8 + 8 + 4 * 8 + 2 * 5 * 16u);
    EXPECT_EQ(bytes.substr(0, 4), "FMCW");
    std::uint32_t version;
    std::uint64_t ns, n;
    std::memcpy(&version, bytes.data() + 4, 4);
    std::memcpy(&ns, bytes.data() + 8, 8);
    std::memcpy(&n, bytes.data() + 16, 8);
    EXPECT_EQ(version, 1u);
    EXPECT_EQ(ns, 2u);
    EXPECT_EQ(n, 5u);
    double fs;
    std::memcpy(&fs, bytes.data() + 24, 8);
    EXPECT_EQ(fs, 10.24e6);
}

TEST(SweepFile, RejectsBadInput) {
    std::stringstream bad_magic("FMCX\x01\0\0\0");
    EXPECT_THROW(read_sweeps(bad_magic), Error);
    std::stringstream ss;
    write_sweeps(ss, random_file(2, 5));
    std::string trunc = ss.str();
    trunc.resize(trunc.size() - 8);
    std::stringstream short_stream(trunc);
    try {
        read_sweeps(short_stream);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Data);
    }
    EXPECT_THROW(read_sweep_file("/nonexistent/x.fmcw"), Error);
}

TEST(Config, ParsesSectionsAndComments) {
    const auto c = parse("top = 1\n# comment\n[a]\nx = 2.5 ; trailing\ny = hello\nlist = 1, 2, inf\n");
    EXPECT_EQ(c.get_u64("top"), 1u);
    EXPECT_DOUBLE_EQ(c.get_double("a.x"), 2.5);
    EXPECT_EQ(c.get_string("a.y"), "hello");
    const auto l = c.get_doubles("a.list");
    ASSERT_EQ(l.size(), 3u);
    EXPECT_TRUE(std::isinf(l[2]));
    EXPECT_TRUE(c.has_section("a"));
    EXPECT_EQ(c.get_double("a.missing", 7.0), 7.0);
}

TEST(Config, DiagnosticsNameLineAndField) {
    try {
        parse("[a]\nx = 1\nnot a pair\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
        EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
    }
    const auto c = parse("[a]\nx = abc\n");
    try {
        c.get_double("a.x");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("a.x"), std::string::npos);
    }
    EXPECT_THROW(c.reject_unknown({"a.y"}), Error);
}

TEST(Config, MissingRequiredRadarField) {
    const std::string msg = expect_config_error("[radar]\nf0_hz = 3e9\nbandwidth_hz = 40e6\nsweep_time_s = 500e-6\n[targets]\nrange_m = 100\n");
    EXPECT_NE(msg.find("radar.sample_rate_hz"), std::string::npos) << msg;
}

TEST(Config, NeedsTargets) { expect_config_error(kRadar); }

TEST(Config, MismatchedTargetLists) {
    expect_config_error(std::string(kRadar) + "[targets]\nrange_m = 1, 2\namplitude = 1\n");
}

TEST(Config, ScenarioFields) {
    const auto sc = scenario_from_config(parse(std::string(kRadar) +
                                               "[targets]\nrange_m = 2000, 5000\namplitude = 1, 0.2\n"
                                               "[interference]\ncentre_hz = 3e9\nbandwidth_hz = -40e6\n"
                                               "delay_s = -75e-6\nsir_db = none\namplitude = 3\nlowpass_hz = 8e6\n"
                                               "[simulation]\nsnr_db = 15\nseed = 9\nguard = 4\n"));
    EXPECT_EQ(sc.targets.size(), 2u);
    ASSERT_TRUE(sc.interference.has_value());
    EXPECT_DOUBLE_EQ(sc.interference->f_start, 3.02e9);
    EXPECT_FALSE(sc.sir_db.has_value());
    EXPECT_DOUBLE_EQ(std::abs(sc.interference->amplitude), 3.0);
    EXPECT_EQ(sc.seed, 9u);
    EXPECT_EQ(sc.guard, 4u);
    EXPECT_DOUBLE_EQ(sc.snr_db, 15.0);
}

TEST(Config, MitigationAndStudy) {
    const auto c = parse(std::string(kRadar) + "[targets]\nrange_m = 2000\n[mitigation]\nmethod = burg\norder = 5\n"
                                               "[study]\nsnr_db = -10, 0\ngap_pct = 20\ntrials = 7\n");
    const auto m = mitigation_from_config(c);
    EXPECT_EQ(m.method, Method::Burg);
    EXPECT_EQ(m.mp.order, 5u);
    const auto st = study_from_config(c);
    EXPECT_EQ(st.snr_db, (std::vector<double>{-10.0, 0.0}));
    EXPECT_EQ(st.trials, 7u);
    EXPECT_THROW(mitigation_from_config(parse("[mitigation]\nmethod = prony\n")), Error);
}

TEST(BundledConfigs, PointTargetMatchesTableOne) {
    const auto sc = scenario_from_config(Config::load(FMCW_CONFIG_DIR "/point_target.cfg"));
    const auto ref = point_target_scenario();
    EXPECT_DOUBLE_EQ(sc.radar.f0, ref.radar.f0);
    EXPECT_DOUBLE_EQ(sc.radar.bandwidth, ref.radar.bandwidth);
    EXPECT_DOUBLE_EQ(sc.radar.sweep_time, ref.radar.sweep_time);
    EXPECT_DOUBLE_EQ(sc.radar.sample_rate, ref.radar.sample_rate);
    ASSERT_EQ(sc.targets.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_DOUBLE_EQ(sc.targets[i].range_m, ref.targets[i].range_m);
        EXPECT_DOUBLE_EQ(std::abs(sc.targets[i].amplitude), std::abs(ref.targets[i].amplitude));
    }
    EXPECT_DOUBLE_EQ(sc.snr_db, 15.0);
    const auto a = build_scenario(sc);
    const auto b = build_scenario(ref);
    EXPECT_EQ(a.truth_gap, b.truth_gap);
    for (std::size_t k = 0; k < 6000; ++k)
        EXPECT_NEAR(std::abs(a.contaminated.samples[k] - b.contaminated.samples[k]), 0.0, 1e-6);
}

TEST(BundledConfigs, StudyGrid) {
    const auto st = study_from_config(Config::load(FMCW_CONFIG_DIR "/gap_snr_study.cfg"));
    EXPECT_EQ(st.snr_db, (std::vector<double>{-30, -20, -10, 0, 10}));
    EXPECT_EQ(st.gap_pct, (std::vector<double>{10, 20, 30, 40, 50}));
    EXPECT_EQ(st.trials, 100u);
    EXPECT_EQ(st.mp.order, 3u);
}

TEST(BundledConfigs, AllParse) {
    for (const char* name : {"point_target", "extended_target", "gap_snr_study", "cpi_moving"})
        EXPECT_NO_THROW(scenario_from_config(Config::load(std::string(FMCW_CONFIG_DIR "/") + name + ".cfg")))
            << name;
}
