#include "fmcw/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fmcw/error.hpp"
#include "fmcw/fft.hpp"
#include "fmcw/parallel.hpp"

namespace fmcw {

namespace {

void check_rectangular(const Cpi& cpi) {
    if (cpi.empty() || cpi.front().empty())
        throw Error(ErrorKind::InvalidArgument, "cpi: empty");
    const std::size_t n = cpi.front().size();
    for (std::size_t m = 0; m < cpi.size(); ++m)
        if (cpi[m].size() != n)
            throw Error(ErrorKind::InvalidArgument,
                        "cpi: ragged input, sweep " + std::to_string(m) + " has " +
                            std::to_string(cpi[m].size()) + " samples, expected " +
                            std::to_string(n));
}

// Range transform: the beat convention puts a tone at +f under the inverse kernel.
std::vector<cdouble> range_transform(std::span<const cdouble> x, std::size_t nfft) {
    return fft::unitary(x, nfft, fft::Direction::Inverse);
}

}  // namespace

const char* to_string(Window w) noexcept {
    switch (w) {
    case Window::Rect: return "rect";
    case Window::Hann: return "hann";
    case Window::Hamming: return "hamming";
    }
    return "?";
}

Window window_from_string(const std::string& name) {
    if (name == "rect" || name == "none") return Window::Rect;
    if (name == "hann") return Window::Hann;
    if (name == "hamming") return Window::Hamming;
    throw Error(ErrorKind::InvalidArgument, "unknown window '" + name + "'");
}

std::vector<double> make_window(Window w, std::size_t n) {
    std::vector<double> out(n, 1.0);
    if (w == Window::Rect || n < 2)
        return out;
    const double a0 = w == Window::Hann ? 0.5 : 0.54;
    for (std::size_t k = 0; k < n; ++k)
        out[k] = a0 - (1.0 - a0) * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                            static_cast<double>(n - 1));
    return out;
}

double magnitude_db(double mag) noexcept {
    if (!(mag > 0.0))
        return kDbFloor;
    return std::max(kDbFloor, 20.0 * std::log10(mag));
}

std::vector<double> RangeProfile::db(double reference) const {
    const double ref = reference > 0.0 ? reference : peak();
    std::vector<double> out(magnitude.size());
    for (std::size_t i = 0; i < magnitude.size(); ++i)
        out[i] = ref > 0.0 ? magnitude_db(magnitude[i] / ref) : kDbFloor;
    return out;
}

double RangeProfile::peak() const {
    return magnitude.empty() ? 0.0 : *std::max_element(magnitude.begin(), magnitude.end());
}

RangeProfile range_profile(const ComplexSeries& series, const RadarParams& params, Window window,
                           std::size_t nfft) {
    const std::size_t n = series.size();
    if (nfft == 0)
        nfft = n;
    if (nfft < n)
        throw Error(ErrorKind::InvalidArgument, "range profile: nfft smaller than sweep length");
    const auto w = make_window(window, n);
    std::vector<cdouble> x(n);
    for (std::size_t k = 0; k < n; ++k)
        x[k] = series.samples[k] * w[k];
    const auto spec = range_transform(x, nfft);
    RangeProfile p;
    p.range_m.resize(nfft);
    p.magnitude.resize(nfft);
    const double fs = 1.0 / series.dt;
    for (std::size_t b = 0; b < nfft; ++b) {
        p.range_m[b] = range_from_beat_frequency(static_cast<double>(b) * fs / static_cast<double>(nfft),
                                                 params.chirp_rate());
        p.magnitude[b] = std::abs(spec[b]);
    }
    return p;
}

std::vector<double> RdMap::power() const {
    std::vector<double> out(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
        out[i] = std::norm(cells[i]);
    return out;
}

std::vector<double> RdMap::power_db() const {
    std::vector<double> out(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
        out[i] = magnitude_db(std::abs(cells[i]));
    return out;
}

Cpi slow_time_dft(const Cpi& cpi, bool inverse) {
    check_rectangular(cpi);
    const std::size_t m = cpi.size();
    const std::size_t n = cpi.front().size();
    Cpi out(m, ComplexSeries(std::vector<cdouble>(n), cpi.front().dt, cpi.front().t0));
    std::vector<cdouble> column(m);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t s = 0; s < m; ++s)
            column[s] = cpi[s].samples[k];
        const auto spec =
            fft::unitary(column, m, inverse ? fft::Direction::Inverse : fft::Direction::Forward);
        for (std::size_t s = 0; s < m; ++s)
            out[s].samples[k] = spec[s];
    }
    return out;
}

RdMap range_doppler_from_bins(const Cpi& bins, Window fast) {
    check_rectangular(bins);
    RdMap map;
    map.n_doppler = bins.size();
    map.n_range = bins.front().size();
    map.cells.resize(map.n_doppler * map.n_range);
    const auto w = make_window(fast, map.n_range);
    std::vector<cdouble> row(map.n_range);
    for (std::size_t d = 0; d < map.n_doppler; ++d) {
        for (std::size_t k = 0; k < map.n_range; ++k)
            row[k] = bins[d].samples[k] * w[k];
        const auto spec = range_transform(row, map.n_range);
        std::copy(spec.begin(), spec.end(), map.cells.begin() + static_cast<std::ptrdiff_t>(d * map.n_range));
    }
    return map;
}

RdMap range_doppler(const Cpi& cpi, Window fast, Window slow) {
    check_rectangular(cpi);
    Cpi weighted = cpi;
    const auto w = make_window(slow, cpi.size());
    for (std::size_t m = 0; m < cpi.size(); ++m)
        for (auto& v : weighted[m].samples)
            v *= w[m];
    return range_doppler_from_bins(slow_time_dft(weighted), fast);
}

Cpi CpiResult::sweeps() const { return slow_time_dft(doppler_bins, true); }

CpiResult mitigate_cpi(const Cpi& cpi, const GapSpec& gap, const CpiConfig& cfg) {
    check_rectangular(cpi);
    gap.validate(cpi.front().size());
    CpiResult res;
    const Cpi bins = slow_time_dft(cpi);
    res.doppler_bins = bins;
    res.reports.resize(bins.size());
    parallel_for(bins.size(), cfg.workers, [&](std::size_t d) {
        BinReport& rep = res.reports[d];
        try {
            auto out = mitigate(bins[d], gap, cfg.mitigation);
            res.doppler_bins[d] = std::move(out.series);
            rep.report = std::move(out.report);
        } catch (const Error& e) {
            if (!cfg.fallback_to_zero)
                throw;
            rep.failed = true;
            rep.error = e.what();
            rep.report.method = Method::Zeroing;
            res.doppler_bins[d] = zero_gap(bins[d], gap);
        }
    });
    return res;
}

}  // namespace fmcw
