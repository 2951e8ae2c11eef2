#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "fmcw/error.hpp"
#include "fmcw/mitigate.hpp"
#include "fmcw/spectra.hpp"

namespace fmcw::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kDataError = 3,
    kEstimatorError = 4,
};

int exit_code_for(ErrorKind kind) noexcept;

/// "n1:n2" -> GapSpec.
GapSpec parse_gap(const std::string& text);

struct SimulateOptions {
    std::filesystem::path config;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;
};

/// Writes clean.fmcw, reference.fmcw, contaminated.fmcw and truth.json.
int cmd_simulate(const SimulateOptions& opts, std::ostream& log);

struct GapSource {
    std::optional<GapSpec> gap;
    std::optional<std::filesystem::path> truth_json;
    bool detect = false;
    std::size_t detect_window = kDefaultDetectWindow;
    double detect_k_mad = kDefaultDetectKMad;
};

struct MitigateOptions {
    std::filesystem::path input;
    std::filesystem::path output;
    std::optional<std::filesystem::path> report_json;
    std::optional<std::filesystem::path> profile_csv;
    std::optional<std::filesystem::path> config;  ///< [mitigation] defaults
    MitigateConfig mitigation;
    GapSource gap;
    std::size_t workers = 1;
    std::size_t nfft = 0;
    Window window = Window::Rect;
};

/// Mitigates every sweep of the input file. Per-sweep failures are recorded in
/// the report and the sweep is passed through; the exit code is nonzero only
/// when no sweep could be processed.
int cmd_mitigate(const MitigateOptions& opts, std::ostream& log);

struct StudyOptions {
    std::filesystem::path config;
    std::filesystem::path output;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 1;
};

int cmd_study(const StudyOptions& opts, std::ostream& log);

struct RdOptions {
    std::filesystem::path input;
    std::filesystem::path out_dir;
    MitigateConfig mitigation;
    GapSource gap;
    bool no_mitigation = false;
    std::size_t workers = 1;
    Window window = Window::Rect;
};

/// Writes rd_before.csv, rd_after.csv, rd_diff.csv (after - before, dB) and
/// rd_report.json.
int cmd_rd(const RdOptions& opts, std::ostream& log);

/// Dense CSV: header row "doppler_hz\range_m,<ranges...>", then one row per
/// Doppler bin.
void write_rd_csv(std::ostream& os, const std::vector<double>& values, std::size_t n_doppler,
                  std::size_t n_range, const RadarParams& radar);

}  // namespace fmcw::cli
