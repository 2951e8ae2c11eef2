#include "fmcw/sigmodel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fmcw/error.hpp"

namespace fmcw {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::NoInterferenceFreeData: return "no interference-free data";
    case ErrorKind::InsufficientData: return "insufficient interference-free data";
    case ErrorKind::OutOfRange: return "out of range";
    case ErrorKind::RankDeficient: return "rank deficient";
    case ErrorKind::IllConditioned: return "ill-conditioned";
    case ErrorKind::NoInterference: return "no interference found";
    case ErrorKind::SweepUnusable: return "sweep unusable";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Data: return "data error";
    }
    return "unknown";
}

RadarParams RadarParams::make(double f0, double bandwidth, double sweep_time, double sample_rate) {
    RadarParams p;
    p.f0 = f0;
    p.bandwidth = bandwidth;
    p.sweep_time = sweep_time;
    p.sample_rate = sample_rate;
    p.n_samples = static_cast<std::size_t>(std::llround(sample_rate * sweep_time));
    p.validate();
    return p;
}

double RadarParams::max_unambiguous_range() const noexcept {
    return range_from_beat_frequency(sample_rate / 2.0, chirp_rate());
}

void RadarParams::validate() const {
    if (!(bandwidth > 0.0) || !(sweep_time > 0.0) || !(sample_rate > 0.0))
        throw Error(ErrorKind::InvalidArgument,
                    "radar: bandwidth, sweep_time and sample_rate must be positive");
    const auto expected = static_cast<std::size_t>(std::llround(sample_rate * sweep_time));
    if (n_samples != expected) {
        std::ostringstream os;
        os << "radar: n_samples " << n_samples << " != round(fs*T) = " << expected;
        throw Error(ErrorKind::InvalidArgument, os.str());
    }
}

void InterferenceParams::validate() const {
    if (!(sweep_time > 0.0))
        throw Error(ErrorKind::InvalidArgument, "interference: sweep_time must be positive");
    if (!std::isfinite(std::abs(amplitude)))
        throw Error(ErrorKind::InvalidArgument, "interference: amplitude must be finite");
}

void ComplexSeries::validate() const {
    if (!(dt > 0.0))
        throw Error(ErrorKind::InvalidArgument, "series: dt must be positive");
    for (const auto& s : samples) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
            throw Error(ErrorKind::Data, "series: non-finite sample");
    }
}

void GapSpec::validate(std::size_t n) const {
    if (is_empty()) {
        if (n1 > n)
            throw Error(ErrorKind::InvalidArgument, "gap: empty gap positioned beyond the sweep");
        return;
    }
    if (n1 > n2 || n2 >= n) {
        std::ostringstream os;
        os << "gap " << to_string(*this) << " invalid for sweep of " << n << " samples";
        throw Error(ErrorKind::InvalidArgument, os.str());
    }
}

std::string to_string(const GapSpec& gap) {
    if (gap.is_empty())
        return "[empty@" + std::to_string(gap.n1) + "]";
    return "[" + std::to_string(gap.n1) + ", " + std::to_string(gap.n2) + "]";
}

void ExpSumModel::validate() const {
    if (poles.size() != amplitudes.size())
        throw Error(ErrorKind::InvalidArgument, "model: poles and amplitudes differ in length");
}

const char* to_string(Method m) noexcept {
    switch (m) {
    case Method::Zeroing: return "zero";
    case Method::MP: return "mp";
    case Method::Burg: return "burg";
    }
    return "?";
}

Method method_from_string(const std::string& name) {
    if (name == "zero" || name == "zeroing") return Method::Zeroing;
    if (name == "mp") return Method::MP;
    if (name == "burg") return Method::Burg;
    throw Error(ErrorKind::InvalidArgument, "unknown method '" + name + "'");
}

SplitSweep split_at_gap(const ComplexSeries& series, const GapSpec& gap) {
    const std::size_t n = series.size();
    gap.validate(n);
    if (!gap.is_empty() && gap.n1 == 0 && gap.n2 + 1 == n)
        throw Error(ErrorKind::NoInterferenceFreeData,
                    "no interference-free data: gap covers the whole sweep");

    const auto begin = series.samples.begin();
    const std::size_t back_start = gap.is_empty() ? gap.n1 : gap.n2 + 1;
    SplitSweep out;
    out.front = ComplexSeries({begin, begin + static_cast<std::ptrdiff_t>(gap.n1)}, series.dt,
                              series.t0);
    out.back = ComplexSeries({begin + static_cast<std::ptrdiff_t>(back_start), series.samples.end()},
                             series.dt, series.time_at(back_start));
    return out;
}

ComplexSeries splice(const ComplexSeries& front, const ComplexSeries& gap_fill,
                     const ComplexSeries& back) {
    ComplexSeries out;
    out.dt = front.empty() ? (gap_fill.empty() ? back.dt : gap_fill.dt) : front.dt;
    out.t0 = front.empty() ? (gap_fill.empty() ? back.t0 : gap_fill.t0) : front.t0;
    out.samples.reserve(front.size() + gap_fill.size() + back.size());
    out.samples.insert(out.samples.end(), front.samples.begin(), front.samples.end());
    out.samples.insert(out.samples.end(), gap_fill.samples.begin(), gap_fill.samples.end());
    out.samples.insert(out.samples.end(), back.samples.begin(), back.samples.end());
    return out;
}

ComplexSeries splice(const ComplexSeries& front, const ComplexSeries& gap_fill,
                     const ComplexSeries& back, const GapSpec& gap, std::size_t n) {
    gap.validate(n);
    if (front.size() + gap_fill.size() + back.size() != n || front.size() != gap.front_length() ||
        gap_fill.size() != gap.length() || back.size() != gap.back_length(n)) {
        std::ostringstream os;
        os << "splice: part lengths " << front.size() << "+" << gap_fill.size() << "+" << back.size()
           << " do not match gap " << to_string(gap) << " in a sweep of " << n;
        throw Error(ErrorKind::InvalidArgument, os.str());
    }
    return splice(front, gap_fill, back);
}

cdouble pole_from_beat_frequency(double f_beat, double dt) {
    return std::polar(1.0, -2.0 * std::numbers::pi * f_beat * dt);
}

double beat_frequency_from_pole(cdouble pole, double dt) {
    return -std::arg(pole) / (2.0 * std::numbers::pi * dt);
}

double range_from_beat_frequency(double f_beat, double chirp_rate) {
    return kSpeedOfLight * f_beat / (2.0 * chirp_rate);
}

double beat_frequency_from_range(double range_m, double chirp_rate) {
    return chirp_rate * 2.0 * range_m / kSpeedOfLight;
}

double range_from_pole(cdouble pole, double dt, double chirp_rate) {
    return kSpeedOfLight * std::abs(std::arg(pole)) / (2.0 * std::numbers::pi * dt * 2.0 * chirp_rate);
}

}  // namespace fmcw
