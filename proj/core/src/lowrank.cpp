#include "fmcw/lowrank.hpp"

#include <algorithm>

#include "fmcw/error.hpp"
#include "fmcw/fft.hpp"
#include "fmcw/rng.hpp"

namespace fmcw {

HankelStack::HankelStack(std::vector<std::span<const cdouble>> segments, std::size_t L,
                         std::size_t shift)
    : L_(L), shift_(shift) {
    if (L == 0)
        throw Error(ErrorKind::InvalidArgument, "hankel: L must be at least 1");
    if (shift > 1)
        throw Error(ErrorKind::InvalidArgument, "hankel: shift must be 0 or 1");
    for (auto seg : segments) {
        if (seg.size() < L + 2)
            throw Error(ErrorKind::InsufficientData,
                        "hankel: segment of " + std::to_string(seg.size()) +
                            " samples too short for L=" + std::to_string(L));
        Block b;
        b.samples = seg;
        b.rows = seg.size() - L;
        b.fft_size = fft::good_size(seg.size());
        b.spectrum = fft::transform(seg, b.fft_size, fft::Direction::Forward);
        b.row_offset = rows_;
        rows_ += static_cast<Eigen::Index>(b.rows);
        blocks_.push_back(std::move(b));
    }
    if (blocks_.empty())
        throw Error(ErrorKind::InsufficientData, "hankel: no segments");
}

CMatrix HankelStack::apply(const CMatrix& x) const {
    if (x.rows() != cols())
        throw Error(ErrorKind::InvalidArgument, "hankel: apply dimension mismatch");
    CMatrix out(rows_, x.cols());
    std::vector<cdouble> buf;
    for (const auto& b : blocks_) {
        const double scale = 1.0 / static_cast<double>(b.fft_size);
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            // (H x)[r] = conv(s, reverse(x))[r + L - 1 + shift]; no wrap since fft_size >= M.
            buf.assign(b.fft_size, cdouble{});
            for (std::size_t c = 0; c < L_; ++c)
                buf[L_ - 1 - c] = x(static_cast<Eigen::Index>(c), j);
            fft::transform_inplace(buf, fft::Direction::Forward);
            for (std::size_t f = 0; f < b.fft_size; ++f)
                buf[f] *= b.spectrum[f];
            fft::transform_inplace(buf, fft::Direction::Inverse);
            for (std::size_t r = 0; r < b.rows; ++r)
                out(b.row_offset + static_cast<Eigen::Index>(r), j) = buf[r + L_ - 1 + shift_] * scale;
        }
    }
    return out;
}

CMatrix HankelStack::apply_adjoint(const CMatrix& y) const {
    if (y.rows() != rows_)
        throw Error(ErrorKind::InvalidArgument, "hankel: adjoint dimension mismatch");
    CMatrix out = CMatrix::Zero(cols(), y.cols());
    std::vector<cdouble> buf;
    for (const auto& b : blocks_) {
        const double scale = 1.0 / static_cast<double>(b.fft_size);
        for (Eigen::Index j = 0; j < y.cols(); ++j) {
            // (H^H y)[c] = conj(conv(s, reverse(conj(y)))[c + shift + R - 1]).
            buf.assign(b.fft_size, cdouble{});
            for (std::size_t r = 0; r < b.rows; ++r)
                buf[b.rows - 1 - r] = std::conj(y(b.row_offset + static_cast<Eigen::Index>(r), j));
            fft::transform_inplace(buf, fft::Direction::Forward);
            for (std::size_t f = 0; f < b.fft_size; ++f)
                buf[f] *= b.spectrum[f];
            fft::transform_inplace(buf, fft::Direction::Inverse);
            for (std::size_t c = 0; c < L_; ++c)
                out(static_cast<Eigen::Index>(c), j) += std::conj(buf[c + shift_ + b.rows - 1]) * scale;
        }
    }
    return out;
}

CMatrix HankelStack::dense() const {
    CMatrix out(rows_, cols());
    for (const auto& b : blocks_)
        for (std::size_t r = 0; r < b.rows; ++r)
            for (std::size_t c = 0; c < L_; ++c)
                out(b.row_offset + static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    b.samples[r + c + shift_];
    return out;
}

TruncatedSvd truncated_svd(const CMatrix& a, Eigen::Index k) {
    Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    k = std::min<Eigen::Index>(k, svd.singularValues().size());
    return {svd.matrixU().leftCols(k), svd.singularValues().head(k), svd.matrixV().leftCols(k)};
}

CMatrix orthonormal_basis(const CMatrix& y) {
    Eigen::HouseholderQR<CMatrix> qr(y);
    return qr.householderQ() * CMatrix::Identity(y.rows(), y.cols());
}

TruncatedSvd truncated_svd(const HankelStack& a, Eigen::Index k, const RandomizedSvdOptions& opts) {
    const Eigen::Index full = std::min(a.rows(), a.cols());
    k = std::min(k, full);
    const Eigen::Index sketch = std::min(full, k + opts.oversample);

    Rng rng(opts.seed);
    CMatrix omega(a.cols(), sketch);
    for (Eigen::Index j = 0; j < sketch; ++j)
        for (Eigen::Index i = 0; i < a.cols(); ++i)
            omega(i, j) = rng.complex_normal(1.0);

    CMatrix q = orthonormal_basis(a.apply(omega));
    for (int it = 0; it < opts.power_iterations; ++it) {
        const CMatrix z = orthonormal_basis(a.apply_adjoint(q));
        q = orthonormal_basis(a.apply(z));
    }
    // B = Q^H A, formed as (A^H Q)^H.
    const CMatrix b = a.apply_adjoint(q).adjoint();
    Eigen::BDCSVD<CMatrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    TruncatedSvd out;
    out.u = q * svd.matrixU().leftCols(k);
    out.sigma = svd.singularValues().head(k);
    out.v = svd.matrixV().leftCols(k);
    return out;
}

}  // namespace fmcw
