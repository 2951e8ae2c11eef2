#include "fmcw/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fmcw/error.hpp"
#include "fmcw/rng.hpp"

namespace fmcw {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double mean_power(std::span<const cdouble> s) {
    if (s.empty())
        return 0.0;
    double acc = 0.0;
    for (const auto& v : s)
        acc += std::norm(v);
    return acc / static_cast<double>(s.size());
}

void check_unambiguous(const RadarParams& params, const std::vector<Target>& targets) {
    const double k = params.chirp_rate();
    const double nyquist = params.sample_rate / 2.0;
    std::ostringstream offending;
    bool bad = false;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto& tg = targets[i];
        if (tg.range_m < 0.0 || !std::isfinite(std::abs(tg.amplitude))) {
            throw Error(ErrorKind::InvalidArgument,
                        "target " + std::to_string(i) + ": negative range or non-finite amplitude");
        }
        const double d_end = tg.range_m + tg.velocity * params.sweep_time;
        const double f_max = std::max(beat_frequency_from_range(tg.range_m, k),
                                      beat_frequency_from_range(std::abs(d_end), k));
        if (f_max >= nyquist) {
            offending << (bad ? ", " : "") << "#" << i << " (" << tg.range_m << " m)";
            bad = true;
        }
    }
    if (bad) {
        throw Error(ErrorKind::OutOfRange,
                    "targets beyond the unambiguous range " +
                        std::to_string(params.max_unambiguous_range()) + " m: " + offending.str());
    }
}

bool interference_kept(const RadarParams& params, const InterferenceParams& intf, double lowpass,
                       double t) {
    if (t < intf.delay || t > intf.delay + intf.sweep_time)
        return false;
    return std::abs(instantaneous_intf_freq(params, intf, t)) <= lowpass;
}

std::vector<Target> realise_targets(const ScenarioConfig& cfg, Rng& rng) {
    std::vector<Target> targets = cfg.targets;
    if (cfg.extended) {
        const auto& ext = *cfg.extended;
        for (std::size_t i = 0; i < ext.count; ++i) {
            const double frac =
                ext.count > 1 ? static_cast<double>(i) / static_cast<double>(ext.count - 1) : 0.0;
            Target t;
            t.range_m = ext.range_start + frac * (ext.range_end - ext.range_start);
            const double mag = rng.uniform(0.0, ext.max_amplitude);
            const double phase = rng.uniform(0.0, kTwoPi);
            t.amplitude = std::polar(mag, phase);
            targets.push_back(t);
        }
    }
    return targets;
}

std::optional<InterferenceParams> scaled_interferer(const ScenarioConfig& cfg,
                                                    const std::vector<Target>& targets) {
    if (!cfg.interference)
        return std::nullopt;
    InterferenceParams intf = *cfg.interference;
    if (cfg.sir_db && !targets.empty()) {
        double strongest = 0.0;
        for (const auto& t : targets)
            strongest = std::max(strongest, std::abs(t.amplitude));
        const double mag = strongest * std::pow(10.0, -*cfg.sir_db / 20.0);
        const double phase = std::abs(intf.amplitude) > 0.0 ? std::arg(intf.amplitude) : 0.0;
        intf.amplitude = std::polar(mag, phase);
    }
    return intf;
}

double effective_lowpass(const ScenarioConfig& cfg) {
    return cfg.lowpass_hz > 0.0 ? cfg.lowpass_hz : default_lowpass(cfg.radar);
}

ComplexSeries add_series(const ComplexSeries& a, const ComplexSeries& b) {
    ComplexSeries out = a;
    for (std::size_t k = 0; k < out.size(); ++k)
        out.samples[k] += b.samples[k];
    return out;
}

}  // namespace

ComplexSeries gen_target_beat(const RadarParams& params, const std::vector<Target>& targets) {
    params.validate();
    check_unambiguous(params, targets);
    const std::size_t n = params.n_samples;
    const double dt = params.dt();
    const double k = params.chirp_rate();
    std::vector<cdouble> out(n, cdouble{});
    for (const auto& tg : targets) {
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) * dt;
            const double fb = k * 2.0 * (tg.range_m + tg.velocity * t) / kSpeedOfLight;
            out[i] += tg.amplitude * std::polar(1.0, -kTwoPi * fb * t);
        }
    }
    return ComplexSeries(std::move(out), dt, 0.0);
}

double default_lowpass(const RadarParams& params) noexcept { return params.sample_rate / 3.0; }

InterferenceBeat gen_interference_beat(const RadarParams& params, const InterferenceParams& intf,
                                       double lowpass_hz) {
    params.validate();
    intf.validate();
    const double lowpass = lowpass_hz > 0.0 ? lowpass_hz : default_lowpass(params);
    const double k = params.chirp_rate();
    const double ki = intf.chirp_rate();
    const double ti = intf.delay;
    const std::size_t n = params.n_samples;
    const double dt = params.dt();

    // Phase and amplitude of the dechirped aggressor.
    const double quad = (ki - k) / 2.0;
    const double lin = intf.f_start - params.f0 - ki * ti;
    const cdouble a_i =
        intf.amplitude * std::polar(1.0, kTwoPi * (ki / 2.0 * ti * ti - intf.f_start * ti));

    InterferenceBeat out;
    out.series = ComplexSeries(std::vector<cdouble>(n, cdouble{}), dt, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        if (!interference_kept(params, intf, lowpass, t))
            continue;
        out.series.samples[i] = a_i * std::polar(1.0, kTwoPi * (quad * t * t + lin * t));
    }
    const double rel = std::abs(ki - k) / std::abs(k);
    const double band = std::abs(intf.bandwidth - params.bandwidth) / params.bandwidth;
    out.ghost_target = rel < 1e-9 && band < 1e-9;
    return out;
}

double instantaneous_intf_freq(const RadarParams& params, const InterferenceParams& intf, double t) {
    const double k1 = params.chirp_rate() - intf.chirp_rate();
    const double k2 = params.f0 - intf.f_start + intf.chirp_rate() * intf.delay;
    return k1 * t + k2;
}

GapSpec predicted_gap(const RadarParams& params, const InterferenceParams& intf, double lowpass_hz,
                      std::size_t guard) {
    params.validate();
    intf.validate();
    const double lowpass = lowpass_hz > 0.0 ? lowpass_hz : default_lowpass(params);
    const std::size_t n = params.n_samples;
    const double dt = params.dt();
    std::optional<std::size_t> first;
    std::size_t last = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (interference_kept(params, intf, lowpass, static_cast<double>(i) * dt)) {
            if (!first)
                first = i;
            last = i;
        }
    }
    if (!first)
        throw Error(ErrorKind::OutOfRange, "interference outside band");
    GapSpec gap;
    gap.n1 = *first > guard ? *first - guard : 0;
    gap.n2 = std::min(n - 1, last + guard);
    return gap;
}

double lowpass_for_duration(const RadarParams& params, const InterferenceParams& intf,
                            double fraction) {
    const double k1 = std::abs(params.chirp_rate() - intf.chirp_rate());
    return fraction * params.sweep_time * k1 / 2.0;
}

ComplexSeries add_noise(const ComplexSeries& series, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db) && snr_db > 0.0)
        return series;
    const double power = mean_power(series.samples);
    if (!(power > 0.0))
        throw Error(ErrorKind::InvalidArgument, "add_noise: series has zero power");
    const double noise_power = power / std::pow(10.0, snr_db / 10.0);
    Rng rng(seed);
    ComplexSeries out = series;
    for (auto& v : out.samples)
        v += rng.complex_normal(noise_power);
    return out;
}

RadarParams table1_radar() {
    const double bandwidth = 40e6;
    return RadarParams::make(3e9 - bandwidth / 2.0, bandwidth, 500e-6, 12e6);
}

ScenarioConfig point_target_scenario(double snr_db, std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.radar = table1_radar();
    cfg.targets = {{2000.0, {1.0, 0.0}, 0.0}, {5000.0, {0.2, 0.0}, 0.0}, {5100.0, {0.1, 0.0}, 0.0}};
    InterferenceParams intf;
    intf.bandwidth = -cfg.radar.bandwidth;
    intf.sweep_time = cfg.radar.sweep_time;
    intf.f_start = cfg.radar.f0 + cfg.radar.bandwidth;  // same centre, sweeping down
    intf.delay = -75e-6;
    intf.amplitude = {20.0, 0.0};
    cfg.interference = intf;
    cfg.lowpass_hz = 8e6;  // 100 us window for |K1| = 2K
    cfg.snr_db = snr_db;
    cfg.seed = seed;
    return cfg;
}

ScenarioConfig extended_target_scenario(double snr_db, std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.radar = table1_radar();
    cfg.extended = ExtendedTargetSpec{};
    InterferenceParams intf;
    intf.bandwidth = -0.98 * cfg.radar.bandwidth;
    intf.sweep_time = cfg.radar.sweep_time;
    const double centre = cfg.radar.f0 + cfg.radar.bandwidth / 2.0;
    intf.f_start = centre - intf.bandwidth / 2.0;
    intf.delay = -75e-6;
    intf.amplitude = {1.0, 0.0};
    cfg.interference = intf;
    cfg.lowpass_hz = lowpass_for_duration(cfg.radar, intf, 0.243);
    cfg.snr_db = snr_db;
    cfg.seed = seed;
    return cfg;
}

Scenario build_scenario(const ScenarioConfig& cfg) {
    cfg.radar.validate();
    Rng rng(derive_seed(cfg.seed, 0x7a26e7));
    Scenario sc;
    sc.targets = realise_targets(cfg, rng);
    sc.clean = gen_target_beat(cfg.radar, sc.targets);
    sc.reference = add_noise(sc.clean, cfg.snr_db, derive_seed(cfg.seed, 0x4015e));

    const auto intf = scaled_interferer(cfg, sc.targets);
    if (intf) {
        auto beat = gen_interference_beat(cfg.radar, *intf, effective_lowpass(cfg));
        sc.ghost_target = beat.ghost_target;
        sc.interference = std::move(beat.series);
        sc.truth_gap = predicted_gap(cfg.radar, *intf, effective_lowpass(cfg), cfg.guard);
    } else {
        sc.interference =
            ComplexSeries(std::vector<cdouble>(cfg.radar.n_samples), cfg.radar.dt(), 0.0);
        sc.truth_gap = GapSpec::empty_at(0);
    }
    sc.contaminated = add_series(sc.reference, sc.interference);
    return sc;
}

CpiScenario build_cpi_scenario(const ScenarioConfig& cfg) {
    cfg.radar.validate();
    if (cfg.n_sweeps == 0)
        throw Error(ErrorKind::InvalidArgument, "cpi: n_sweeps must be positive");
    Rng rng(derive_seed(cfg.seed, 0x7a26e7));
    const auto base = realise_targets(cfg, rng);
    const auto intf = scaled_interferer(cfg, base);

    CpiScenario out;
    std::optional<InterferenceBeat> beat;
    if (intf) {
        beat = gen_interference_beat(cfg.radar, *intf, effective_lowpass(cfg));
        out.truth_gap = predicted_gap(cfg.radar, *intf, effective_lowpass(cfg), cfg.guard);
    } else {
        out.truth_gap = GapSpec::empty_at(0);
    }

    for (std::size_t m = 0; m < cfg.n_sweeps; ++m) {
        const double t_start = static_cast<double>(m) * cfg.radar.sweep_time;
        std::vector<Target> sweep_targets = base;
        for (auto& tg : sweep_targets) {
            const double shift = tg.velocity * t_start;
            tg.range_m += shift;
            tg.amplitude *= std::polar(1.0, -kTwoPi * cfg.radar.f0 * 2.0 * shift / kSpeedOfLight);
        }
        auto clean = gen_target_beat(cfg.radar, sweep_targets);
        auto reference = add_noise(clean, cfg.snr_db, derive_seed(cfg.seed, 0x4015e, m));
        ComplexSeries contaminated = reference;
        if (beat) {
            const cdouble rot = std::polar(1.0, rng.uniform(0.0, kTwoPi));
            for (std::size_t k = 0; k < contaminated.size(); ++k)
                contaminated.samples[k] += rot * beat->series.samples[k];
        }
        out.clean.push_back(std::move(clean));
        out.reference.push_back(std::move(reference));
        out.contaminated.push_back(std::move(contaminated));
    }
    return out;
}

}  // namespace fmcw
