#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fmcw/mitigate.hpp"
#include "fmcw/sigmodel.hpp"

namespace fmcw {

inline constexpr double kDbFloor = -200.0;

enum class Window { Rect, Hann, Hamming };

const char* to_string(Window w) noexcept;
Window window_from_string(const std::string& name);

/// Symmetric window of length n.
std::vector<double> make_window(Window w, std::size_t n);

/// 20 log10(mag), floored at kDbFloor.
double magnitude_db(double mag) noexcept;

struct RangeProfile {
    std::vector<double> range_m;
    std::vector<double> magnitude;

    /// dB relative to `reference` (the profile's own maximum when <= 0).
    std::vector<double> db(double reference = 0.0) const;
    double peak() const;
};

/// Unitary DFT of the windowed sweep over nfft bins (0 means N). The kernel
/// follows the beat convention exp(-j2*pi*f*t), so bin b holds beat frequency
/// b*fs/nfft and maps to range c*f/(2K).
RangeProfile range_profile(const ComplexSeries& series, const RadarParams& params,
                           Window window = Window::Rect, std::size_t nfft = 0);

/// Sweep-domain data of a CPI, one row per sweep.
using Cpi = std::vector<ComplexSeries>;

struct RdMap {
    std::size_t n_doppler = 0;
    std::size_t n_range = 0;
    std::vector<cdouble> cells;  ///< row-major [doppler][range]

    cdouble at(std::size_t d, std::size_t r) const { return cells[d * n_range + r]; }
    std::vector<double> power() const;
    std::vector<double> power_db() const;
};

/// Unitary slow-time DFT for every fast-time index. `inverse` undoes it.
Cpi slow_time_dft(const Cpi& cpi, bool inverse = false);

/// Slow-time DFT (Doppler) then fast-time DFT (range); unitary.
RdMap range_doppler(const Cpi& cpi, Window fast = Window::Rect, Window slow = Window::Rect);

/// Fast-time range transform of data already in the Doppler domain.
RdMap range_doppler_from_bins(const Cpi& doppler_bins, Window fast = Window::Rect);

struct CpiConfig {
    MitigateConfig mitigation;
    bool fallback_to_zero = true;  ///< a failed bin is zeroed instead of aborting
    std::size_t workers = 1;
};

struct BinReport {
    MitigationReport report;
    bool failed = false;
    std::string error;
};

struct CpiResult {
    Cpi doppler_bins;  ///< mitigated slow-time spectra, one row per Doppler bin
    std::vector<BinReport> reports;

    /// Inverse slow-time DFT back to sweeps.
    Cpi sweeps() const;
};

/// Slow-time DFT, then every Doppler-bin series is mitigated over `gap`.
CpiResult mitigate_cpi(const Cpi& cpi, const GapSpec& gap, const CpiConfig& cfg = {});

}  // namespace fmcw
