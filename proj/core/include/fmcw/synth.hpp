#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "fmcw/sigmodel.hpp"

namespace fmcw {

/// Dechirped target returns: s[k] = sum_i a_i exp(-j2*pi*f_b,i(t_k)*t_k) with
/// f_b,i(t) = K * 2 (d_i + v_i t) / c. Throws OutOfRange for a target whose
/// beat frequency reaches fs/2 anywhere in the sweep.
ComplexSeries gen_target_beat(const RadarParams& params, const std::vector<Target>& targets);

struct InterferenceBeat {
    ComplexSeries series;
    /// Same slope and band as the victim: the interferer shows up as a ghost tone.
    bool ghost_target = false;
};

/// Default low-pass cutoff used when none is given: fs / 3.
double default_lowpass(const RadarParams& params) noexcept;

/// Dechirped, low-passed interference. The low-pass is modelled as a time mask
/// keeping the samples whose instantaneous beat frequency satisfies
/// |f_b,I(t)| <= lowpass_hz while the aggressor is transmitting.
/// `lowpass_hz <= 0` selects default_lowpass().
InterferenceBeat gen_interference_beat(const RadarParams& params, const InterferenceParams& intf,
                                       double lowpass_hz = 0.0);

/// K1 * t + K2 with K1 = K - K_I and K2 = f0 - f_I0 + K_I * t_I.
double instantaneous_intf_freq(const RadarParams& params, const InterferenceParams& intf, double t);

/// Smallest index interval holding every sample the interference mask keeps,
/// widened by `guard` samples on each side and clamped to the sweep.
/// Throws OutOfRange when the interferer never enters the band.
GapSpec predicted_gap(const RadarParams& params, const InterferenceParams& intf, double lowpass_hz,
                      std::size_t guard = 0);

/// Cutoff that yields an interference window lasting `fraction` of the sweep.
double lowpass_for_duration(const RadarParams& params, const InterferenceParams& intf,
                            double fraction);

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// Adds circular complex white Gaussian noise at `snr_db` relative to the
/// measured mean power of `series`. `snr_db == +inf` returns the input.
ComplexSeries add_noise(const ComplexSeries& series, double snr_db, std::uint64_t seed);

struct ExtendedTargetSpec {
    std::size_t count = 15;
    double range_start = 3000.0;
    double range_end = 3025.0;
    double max_amplitude = 0.05;
};

/// Everything needed to synthesise one simulation scene.
struct ScenarioConfig {
    RadarParams radar;
    std::vector<Target> targets;
    std::optional<ExtendedTargetSpec> extended;
    std::optional<InterferenceParams> interference;
    double lowpass_hz = 0.0;  ///< <= 0 means default_lowpass()
    /// When set, the interferer amplitude is rescaled so that the strongest
    /// target sits `sir_db` relative to it (keeps the configured phase).
    std::optional<double> sir_db = -20.0 * 1.3010299956639812;  // 20x the strongest target
    double snr_db = kNoNoise;
    std::size_t guard = 0;
    std::uint64_t seed = 1;
    std::size_t n_sweeps = 1;
};

/// Table I radar (3 GHz centre, 40 MHz, 500 us, 12 MHz sampling).
RadarParams table1_radar();

/// Point-target scene: 2 / 5 / 5.1 km with amplitudes 1 / 0.2 / 0.1 and an
/// opposite-slope aggressor advanced by 75 us.
ScenarioConfig point_target_scenario(double snr_db = 15.0, std::uint64_t seed = 1);

/// Extended-target scene: 15 scatterers over 3-3.025 km with random amplitude
/// and phase, aggressor slope -0.98 K, 24.3 % interference duration.
ScenarioConfig extended_target_scenario(double snr_db = 15.0, std::uint64_t seed = 1);

struct Scenario {
    std::vector<Target> targets;   ///< realised target list (extended scatterers drawn)
    ComplexSeries clean;           ///< target beat, no noise
    ComplexSeries reference;       ///< clean + noise, interference-free
    ComplexSeries interference;    ///< dechirped interference alone
    ComplexSeries contaminated;    ///< reference + interference
    GapSpec truth_gap;             ///< predicted_gap with the configured guard
    bool ghost_target = false;
};

Scenario build_scenario(const ScenarioConfig& cfg);

/// Multi-sweep coherent processing interval, one row per sweep.
struct CpiScenario {
    std::vector<ComplexSeries> clean;
    std::vector<ComplexSeries> reference;
    std::vector<ComplexSeries> contaminated;
    GapSpec truth_gap;
};

/// Builds `cfg.n_sweeps` consecutive sweeps. Target ranges advance by v*T per
/// sweep and the carrier phase exp(-j2*pi*f0*2*d/c) tracks that motion, which
/// is what produces Doppler. The interferer keeps the same timing in every
/// sweep with an independent random phase.
CpiScenario build_cpi_scenario(const ScenarioConfig& cfg);

}  // namespace fmcw
