#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fmcw/mitigate.hpp"
#include "fmcw/sigmodel.hpp"
#include "fmcw/synth.hpp"

namespace fmcw {

inline constexpr double kRsnrCap = 300.0;

/// 20 log10(|s0| / |s0 - s_hat|), capped at kRsnrCap.
double rsnr(const ComplexSeries& reference, const ComplexSeries& estimate);

/// rho = s_hat^H s0 / (|s0| |s_hat|).
cdouble corr_coeff(const ComplexSeries& reference, const ComplexSeries& estimate);

/// |s0 - s_hat| / |s0|.
double relative_rms_error(const ComplexSeries& reference, const ComplexSeries& estimate);

struct TrialOutcome {
    bool failed = false;
    double rsnr_db = 0.0;
    cdouble rho{};
    MitigationReport report;
};

/// Mitigates `contaminated` over `gap` and scores it against `reference`.
/// Estimator errors are reported as a failed outcome.
TrialOutcome evaluate(const ComplexSeries& reference, const ComplexSeries& contaminated,
                      const GapSpec& gap, const MitigateConfig& cfg);

struct StudyConfig {
    ScenarioConfig base = point_target_scenario();
    std::vector<double> snr_db{-30.0, -20.0, -10.0, 0.0, 10.0};
    std::vector<double> gap_pct{10.0, 20.0, 30.0, 40.0, 50.0};
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    MpConfig mp = [] {
        MpConfig c;
        c.order = 3;
        return c;
    }();
    std::size_t burg_order = 3;
    std::vector<Method> methods{Method::MP, Method::Burg, Method::Zeroing};
    std::size_t workers = 1;
};

/// Scenario for one study cell: the interferer's low-pass window is sized so
/// the excised gap covers `gap_pct` percent of the sweep.
ScenarioConfig study_scenario(const StudyConfig& cfg, double snr_db, double gap_pct,
                              std::uint64_t seed);

struct StatsRow {
    double snr_db = 0.0;
    double gap_pct = 0.0;
    Method method = Method::MP;
    std::size_t trials = 0;
    std::size_t failures = 0;
    double mean_rsnr_db = 0.0;
    double mean_abs_rho = 0.0;
    double mean_arg_rho_rad = 0.0;
};

struct StatsTable {
    std::vector<StatsRow> rows;

    std::optional<StatsRow> find(double snr_db, double gap_pct, Method method) const;
    void write_csv(std::ostream& os) const;
};

/// Monte Carlo over the SNR x gap grid. Trial seeds are
/// derive_seed(seed, snr_index, gap_index, trial); results are bit-identical
/// for any worker count.
StatsTable monte_carlo(const StudyConfig& cfg);

}  // namespace fmcw
