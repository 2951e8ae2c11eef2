#pragma once

#include <cstddef>
#include <vector>

#include "fmcw/pencil.hpp"
#include "fmcw/sigmodel.hpp"

namespace fmcw {

inline constexpr std::size_t kDefaultDetectWindow = 32;
inline constexpr double kDefaultDetectKMad = 10.0;

/// Sliding-window energy detector. Flags samples whose centred moving-average
/// power exceeds median + k_mad * MAD and returns the smallest interval
/// covering them.
GapSpec detect_interference(const ComplexSeries& series, std::size_t win = kDefaultDetectWindow,
                            double k_mad = kDefaultDetectKMad);

/// Samples inside the gap set to zero.
ComplexSeries zero_gap(const ComplexSeries& series, const GapSpec& gap);

struct MpConfig {
    std::size_t order = 0;  ///< 0 selects from the singular values
    std::size_t L = 0;      ///< 0 applies the default rule
    double sv_threshold = kDefaultSvThreshold;
    std::size_t max_iter = 20;
    double clamp_delta = kDefaultClampDelta;
    std::size_t contiguous_L = 0;  ///< 0 uses N/2 for the contiguous re-estimate
    /// Iteration stops once eps_i > eps_{i-1} * (1 - stall_tolerance); 0 gives
    /// the bare eps_i > eps_{i-1} rule.
    double stall_tolerance = 1e-4;
};

struct MitigationResult {
    ComplexSeries series;
    MitigationReport report;
};

/// Iterative two-segment matrix-pencil reconstruction of the samples in `gap`.
/// Measured samples outside the gap are returned bit-identical.
MitigationResult reconstruct_mp(const ComplexSeries& series, const GapSpec& gap,
                                const MpConfig& cfg = {});

struct ArModel {
    /// Prediction-error filter 1 + sum a_k q^-k; x[n] ~ -sum_{k=1..p} a[k-1] x[n-k].
    std::vector<cdouble> coeffs;
    std::vector<cdouble> reflection;
    double error_power = 0.0;

    std::size_t order() const noexcept { return coeffs.size(); }
};

/// Complex Burg recursion.
ArModel burg_ar_fit(const ComplexSeries& segment, std::size_t order);

/// Extends `history` by `count` predicted samples.
std::vector<cdouble> ar_extrapolate(const ArModel& model, std::span<const cdouble> history,
                                    std::size_t count);

/// Forward extrapolation from the front, backward from the back, raised-cosine
/// cross-fade across the gap. Edge gaps fall back to one side.
ComplexSeries reconstruct_burg(const ComplexSeries& series, const GapSpec& gap, std::size_t order);

struct MitigateConfig {
    Method method = Method::MP;
    MpConfig mp;
    std::size_t burg_order = 0;  ///< 0 reuses the order picked by the pencil
};

/// Dispatches to zeroing, MP or Burg.
MitigationResult mitigate(const ComplexSeries& series, const GapSpec& gap,
                          const MitigateConfig& cfg = {});

}  // namespace fmcw
