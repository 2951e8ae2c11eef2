#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fmcw/lowrank.hpp"
#include "fmcw/sigmodel.hpp"

namespace fmcw {

inline constexpr double kDefaultSvThreshold = 1e-2;
inline constexpr double kDefaultClampDelta = 1e-3;
inline constexpr double kSvFloor = 1e-12;
inline constexpr double kLsRankTolerance = 1e-10;
inline constexpr double kPoleMergeTolerance = 1e-9;

struct HankelPair {
    CMatrix h0;
    CMatrix h1;
};

/// H0 = [D_0 .. D_{L-1}], H1 = [D_1 .. D_L], D_k = s[k .. M-L-1+k]. Both (M-L) x L.
HankelPair hankel_pair(const ComplexSeries& segment, std::size_t L);

/// X0 = [H10; H20], X1 = [H11; H21]. An empty segment is skipped.
HankelPair stacked_pencil(const ComplexSeries& s1, const ComplexSeries& s2, std::size_t L);

/// Number of singular values with sigma_k / sigma_1 >= threshold, at least 1.
std::size_t select_order_sv(const CMatrix& x0, double threshold = kDefaultSvThreshold);
std::size_t select_order_sv(std::span<const double> singular_values,
                            double threshold = kDefaultSvThreshold);

/// Eigenvalues of Sigma0^-1 U0^H U1 Sigma1 V1^H V0 built from rank-`order`
/// truncations. Poles above 1 + clamp_delta in magnitude are pulled back radially.
std::vector<cdouble> estimate_poles(const CMatrix& x0, const CMatrix& x1, std::size_t order,
                                    double clamp_delta = kDefaultClampDelta);
std::vector<cdouble> estimate_poles(const TruncatedSvd& svd0, const TruncatedSvd& svd1,
                                    std::size_t order, double clamp_delta = kDefaultClampDelta);

/// Least-squares amplitudes over the gapped Vandermonde system; the front
/// segment holds powers 0..n1-1, the back segment powers n2+1..N-1.
std::vector<cdouble> fit_amplitudes(const ComplexSeries& s1, const ComplexSeries& s2,
                                    const GapSpec& gap, std::span<const cdouble> poles);

/// s[k] = sum_i a_i z_i^k, k < n. Time axis uses `dt`.
ComplexSeries synthesize(const ExpSumModel& model, std::size_t n, double dt = 1.0);

/// Merges near-duplicate poles, then sorts by descending |a| * sum_k |z|^k.
ExpSumModel order_by_energy(ExpSumModel model, std::size_t n);

/// Classic single-segment matrix pencil on contiguous samples.
ExpSumModel mp_contiguous(const ComplexSeries& series, std::size_t L, std::size_t order,
                          double clamp_delta = kDefaultClampDelta);

struct PencilOptions {
    std::size_t order = 0;  ///< 0 selects the order from the singular values
    std::size_t L = 0;      ///< 0 applies the default rule
    double sv_threshold = kDefaultSvThreshold;
    double clamp_delta = kDefaultClampDelta;
    std::size_t max_order = 64;
    /// Matrices with at most this many entries go through a dense SVD.
    std::size_t dense_limit = 200'000;
};

struct PencilEstimate {
    ExpSumModel model;
    std::size_t L = 0;
    std::vector<double> singular_values;  ///< leading normalised SVs of X0
};

/// Default pencil parameter for the given segment lengths: floor(min/3) when
/// both segments are usable, otherwise floor(longer/3) on the longer alone.
std::size_t default_pencil_L(std::size_t m1, std::size_t m2);

/// Clamps L into order < L < M - order for every used segment. Throws
/// InsufficientData when no such L exists.
std::size_t clamp_pencil_L(std::size_t L, std::size_t order, std::size_t m1, std::size_t m2);

/// Full gapped estimate: order selection, poles from the stacked pencil and
/// amplitudes from the gapped LS fit. Large problems use the FFT Hankel
/// operator and a randomized SVD; small ones use dense matrices.
PencilEstimate estimate_gapped(const ComplexSeries& s1, const ComplexSeries& s2, const GapSpec& gap,
                               std::size_t n, const PencilOptions& opts = {});

}  // namespace fmcw
