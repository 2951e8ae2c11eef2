#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fmcw {

using cdouble = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;

/// Victim radar sweep description.
struct RadarParams {
    double f0 = 0.0;           ///< start frequency [Hz]
    double bandwidth = 0.0;    ///< sweep bandwidth B [Hz]
    double sweep_time = 0.0;   ///< sweep duration T [s]
    double sample_rate = 0.0;  ///< fs [Hz]
    std::size_t n_samples = 0; ///< N = round(fs * T)

    /// Builds parameters with n_samples derived from fs and T, then validates.
    static RadarParams make(double f0, double bandwidth, double sweep_time, double sample_rate);

    double chirp_rate() const noexcept { return bandwidth / sweep_time; }
    double dt() const noexcept { return 1.0 / sample_rate; }

    /// Largest range whose beat frequency stays below fs/2.
    double max_unambiguous_range() const noexcept;

    void validate() const;
};

struct Target {
    double range_m = 0.0;
    cdouble amplitude{1.0, 0.0};
    double velocity = 0.0;  ///< radial velocity [m/s]
};

/// Aggressor chirp. A negative bandwidth gives an opposite-slope interferer.
struct InterferenceParams {
    double f_start = 0.0;
    double bandwidth = 0.0;
    double sweep_time = 0.0;
    double delay = 0.0;  ///< t_I relative to victim sweep start; negative = advanced
    cdouble amplitude{1.0, 0.0};

    double chirp_rate() const noexcept { return bandwidth / sweep_time; }
    void validate() const;
};

/// Uniformly sampled complex sweep; sample k lives at t0 + k*dt.
struct ComplexSeries {
    std::vector<cdouble> samples;
    double dt = 1.0;
    double t0 = 0.0;

    ComplexSeries() = default;
    ComplexSeries(std::vector<cdouble> s, double dt_, double t0_ = 0.0)
        : samples(std::move(s)), dt(dt_), t0(t0_) {}

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
    std::span<const cdouble> view() const noexcept { return samples; }
    double time_at(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }

    void validate() const;

    friend bool operator==(const ComplexSeries&, const ComplexSeries&) = default;
};

/// Inclusive excised interval [n1, n2]. n1 == n2 + 1 denotes an empty gap.
struct GapSpec {
    std::size_t n1 = 0;
    std::size_t n2 = 0;

    static GapSpec empty_at(std::size_t n1) noexcept { return {n1, n1 - 1}; }

    bool is_empty() const noexcept { return n1 == n2 + 1; }
    std::size_t length() const noexcept { return is_empty() ? 0 : n2 - n1 + 1; }
    bool contains(std::size_t k) const noexcept { return !is_empty() && k >= n1 && k <= n2; }

    /// Front length M1 = n1.
    std::size_t front_length() const noexcept { return n1; }
    /// Back length M2 = N - n2 - 1.
    std::size_t back_length(std::size_t n) const noexcept { return n - n2 - 1; }

    void validate(std::size_t n) const;

    friend bool operator==(const GapSpec&, const GapSpec&) = default;
};

std::string to_string(const GapSpec& gap);

/// s[k] = sum_i a_i z_i^k.
struct ExpSumModel {
    std::vector<cdouble> poles;
    std::vector<cdouble> amplitudes;

    std::size_t order() const noexcept { return poles.size(); }
    void validate() const;
};

enum class Method { Zeroing, MP, Burg };

const char* to_string(Method m) noexcept;
Method method_from_string(const std::string& name);

struct MitigationReport {
    Method method = Method::MP;
    std::size_t order_used = 0;
    std::size_t pencil_L = 0;
    std::vector<double> epsilon_history;
    std::size_t iterations = 0;
    std::size_t best_iteration = 0;  ///< index into epsilon_history of the returned iterate
};

struct SplitSweep {
    ComplexSeries front;
    ComplexSeries back;
};

SplitSweep split_at_gap(const ComplexSeries& series, const GapSpec& gap);

ComplexSeries splice(const ComplexSeries& front, const ComplexSeries& gap_fill,
                     const ComplexSeries& back);

/// Checked variant: the three parts must match `gap` within a sweep of `n` samples.
ComplexSeries splice(const ComplexSeries& front, const ComplexSeries& gap_fill,
                     const ComplexSeries& back, const GapSpec& gap, std::size_t n);

/// Pole for a beat frequency under the exp(-j2*pi*f*t) convention.
cdouble pole_from_beat_frequency(double f_beat, double dt);
double beat_frequency_from_pole(cdouble pole, double dt);
double range_from_beat_frequency(double f_beat, double chirp_rate);
double beat_frequency_from_range(double range_m, double chirp_rate);
double range_from_pole(cdouble pole, double dt, double chirp_rate);

}  // namespace fmcw
