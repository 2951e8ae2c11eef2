#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fmcw/sigmodel.hpp"

namespace fmcw {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Leading singular triplets: A ~= U * diag(sigma) * V^H.
struct TruncatedSvd {
    CMatrix u;
    RVector sigma;
    CMatrix v;

    Eigen::Index rank() const noexcept { return sigma.size(); }
};

/// Vertically stacked Hankel matrices of one or more segments sharing the
/// pencil parameter L. Row block i is H_i with H_i(r, c) = s_i[r + c + shift],
/// r < M_i - L, c < L. Products are done through FFT correlation, so the
/// matrix is never formed.
class HankelStack {
public:
    HankelStack(std::vector<std::span<const cdouble>> segments, std::size_t L, std::size_t shift);

    Eigen::Index rows() const noexcept { return rows_; }
    Eigen::Index cols() const noexcept { return static_cast<Eigen::Index>(L_); }

    /// A * x for each column of x (L x k).
    CMatrix apply(const CMatrix& x) const;
    /// A^H * y for each column of y (rows x k).
    CMatrix apply_adjoint(const CMatrix& y) const;

    /// Explicit matrix; intended for tests and small problems.
    CMatrix dense() const;

private:
    struct Block {
        std::span<const cdouble> samples;
        std::size_t rows;
        std::size_t fft_size;
        std::vector<cdouble> spectrum;
        Eigen::Index row_offset;
    };
    std::vector<Block> blocks_;
    std::size_t L_;
    std::size_t shift_;
    Eigen::Index rows_ = 0;
};

/// Leading `k` triplets from a full dense SVD.
TruncatedSvd truncated_svd(const CMatrix& a, Eigen::Index k);

struct RandomizedSvdOptions {
    Eigen::Index oversample = 10;
    int power_iterations = 2;
    std::uint64_t seed = 0x6d70656e63696cULL;
};

/// Leading `k` triplets via a seeded randomized range finder with power
/// iterations. Deterministic for a fixed seed.
TruncatedSvd truncated_svd(const HankelStack& a, Eigen::Index k,
                           const RandomizedSvdOptions& opts = {});

/// Thin Q factor of a tall matrix.
CMatrix orthonormal_basis(const CMatrix& y);

}  // namespace fmcw
