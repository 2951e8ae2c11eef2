#include "fmcw/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "fmcw/error.hpp"

namespace fmcw {

namespace {

using Segments = std::vector<std::span<const cdouble>>;

constexpr std::size_t kMinSegment = 8;

cdouble pole_power(cdouble z, std::size_t k) {
    const double kk = static_cast<double>(k);
    return std::polar(std::pow(std::abs(z), kk), std::arg(z) * kk);
}

// Sum_{k<n} r^k without cancellation trouble at r ~ 1.
double geometric_sum(double r, std::size_t n) {
    if (std::abs(r - 1.0) < 1e-12)
        return static_cast<double>(n);
    return -std::expm1(static_cast<double>(n) * std::log(r)) / (1.0 - r);
}

bool same_pole(cdouble a, cdouble b) {
    return std::abs(std::arg(a / b)) < kPoleMergeTolerance &&
           std::abs(std::abs(a) - std::abs(b)) < kPoleMergeTolerance;
}

std::vector<cdouble> dedupe(std::vector<cdouble> poles) {
    std::vector<cdouble> out;
    for (const auto& z : poles) {
        if (std::none_of(out.begin(), out.end(), [&](cdouble w) { return same_pole(z, w); }))
            out.push_back(z);
    }
    return out;
}

struct PoleResult {
    std::vector<cdouble> poles;
    std::vector<double> normalized_sv;
    std::size_t order = 0;
};

TruncatedSvd leading(const TruncatedSvd& s, Eigen::Index k) {
    return {s.u.leftCols(k), s.sigma.head(k), s.v.leftCols(k)};
}

std::vector<double> normalized(const RVector& sigma) {
    std::vector<double> out(static_cast<std::size_t>(sigma.size()));
    if (sigma.size() == 0 || sigma(0) <= 0.0)
        return out;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        out[static_cast<std::size_t>(i)] = sigma(i) / sigma(0);
    return out;
}

void check_order(std::size_t order, Eigen::Index rows, Eigen::Index cols) {
    if (order == 0)
        throw Error(ErrorKind::InvalidArgument, "pencil: order must be at least 1");
    if (static_cast<Eigen::Index>(order) > std::min(rows, cols)) {
        std::ostringstream os;
        os << "pencil: order " << order << " exceeds min(rows, L) = " << std::min(rows, cols);
        throw Error(ErrorKind::InvalidArgument, os.str());
    }
}

PoleResult pencil_poles(const Segments& segs, std::size_t L, std::size_t order,
                        const PencilOptions& opts) {
    HankelStack a0(segs, L, 0);
    HankelStack a1(segs, L, 1);
    const Eigen::Index full = std::min(a0.rows(), a0.cols());
    PoleResult out;

    if (static_cast<std::size_t>(a0.rows()) * L <= opts.dense_limit) {
        const CMatrix x0 = a0.dense();
        Eigen::BDCSVD<CMatrix> svd(x0, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.normalized_sv = normalized(svd.singularValues());
        if (order == 0)
            order = std::min(select_order_sv(out.normalized_sv, opts.sv_threshold), opts.max_order);
        check_order(order, a0.rows(), a0.cols());
        const auto k = static_cast<Eigen::Index>(order);
        TruncatedSvd s0{svd.matrixU().leftCols(k), svd.singularValues().head(k),
                        svd.matrixV().leftCols(k)};
        out.poles = estimate_poles(s0, truncated_svd(a1.dense(), k), order, opts.clamp_delta);
    } else {
        const Eigen::Index k0 =
            order == 0 ? std::min<Eigen::Index>(full, static_cast<Eigen::Index>(opts.max_order))
                       : static_cast<Eigen::Index>(order);
        const TruncatedSvd s0 = truncated_svd(a0, k0);
        out.normalized_sv = normalized(s0.sigma);
        if (order == 0)
            order = select_order_sv(out.normalized_sv, opts.sv_threshold);
        check_order(order, a0.rows(), a0.cols());
        const auto k = static_cast<Eigen::Index>(order);
        out.poles = estimate_poles(leading(s0, k), truncated_svd(a1, k), order, opts.clamp_delta);
    }
    out.order = order;
    return out;
}

}  // namespace

HankelPair hankel_pair(const ComplexSeries& segment, std::size_t L) {
    if (L == 0)
        throw Error(ErrorKind::InvalidArgument, "hankel: L must be at least 1");
    if (segment.size() < L + 2)
        throw Error(ErrorKind::InsufficientData,
                    "hankel: segment of " + std::to_string(segment.size()) +
                        " samples too short for L=" + std::to_string(L));
    const auto rows = static_cast<Eigen::Index>(segment.size() - L);
    const auto cols = static_cast<Eigen::Index>(L);
    HankelPair p{CMatrix(rows, cols), CMatrix(rows, cols)};
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            p.h0(r, c) = segment.samples[static_cast<std::size_t>(r + c)];
            p.h1(r, c) = segment.samples[static_cast<std::size_t>(r + c + 1)];
        }
    return p;
}

HankelPair stacked_pencil(const ComplexSeries& s1, const ComplexSeries& s2, std::size_t L) {
    std::vector<const ComplexSeries*> used;
    for (const auto* s : {&s1, &s2})
        if (!s->empty())
            used.push_back(s);
    if (used.empty() || std::any_of(used.begin(), used.end(),
                                    [&](const ComplexSeries* s) { return s->size() < L + 2; }))
        throw Error(ErrorKind::InsufficientData,
                    "insufficient interference-free data: segments too short for L=" +
                        std::to_string(L));
    if (used.size() == 1)
        return hankel_pair(*used[0], L);
    const HankelPair a = hankel_pair(s1, L);
    const HankelPair b = hankel_pair(s2, L);
    HankelPair out{CMatrix(a.h0.rows() + b.h0.rows(), a.h0.cols()),
                   CMatrix(a.h0.rows() + b.h0.rows(), a.h0.cols())};
    out.h0 << a.h0, b.h0;
    out.h1 << a.h1, b.h1;
    return out;
}

std::size_t select_order_sv(std::span<const double> sv, double threshold) {
    if (sv.empty() || !(sv[0] > 0.0))
        throw Error(ErrorKind::InvalidArgument, "order selection: zero matrix");
    if (!(threshold > 0.0))
        throw Error(ErrorKind::InvalidArgument, "order selection: threshold must be positive");
    const auto count = static_cast<std::size_t>(
        std::count_if(sv.begin(), sv.end(), [&](double s) { return s / sv[0] >= threshold; }));
    return std::max<std::size_t>(count, 1);
}

std::size_t select_order_sv(const CMatrix& x0, double threshold) {
    if (x0.size() == 0)
        throw Error(ErrorKind::InvalidArgument, "order selection: empty matrix");
    Eigen::BDCSVD<CMatrix> svd(x0);
    const RVector& s = svd.singularValues();
    return select_order_sv(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())),
                           threshold);
}

std::vector<cdouble> estimate_poles(const TruncatedSvd& s0, const TruncatedSvd& s1,
                                    std::size_t order, double clamp_delta) {
    check_order(order, s0.u.rows(), s0.v.rows());
    const auto k = static_cast<Eigen::Index>(order);
    if (s0.rank() < k || s1.rank() < k)
        throw Error(ErrorKind::InvalidArgument, "pencil: truncation shorter than order");
    if (!(s0.sigma(0) > 0.0))
        throw Error(ErrorKind::InvalidArgument, "pencil: zero matrix");
    const double ratio = s0.sigma(k - 1) / s0.sigma(0);
    if (ratio < kSvFloor) {
        std::ostringstream os;
        os << "pencil: rank deficient at order " << order << " (sigma ratio " << ratio
           << "); try a smaller order";
        throw Error(ErrorKind::RankDeficient, os.str());
    }
    const CMatrix a = s0.sigma.head(k).cwiseInverse().asDiagonal() *
                      (s0.u.leftCols(k).adjoint() * s1.u.leftCols(k)) *
                      s1.sigma.head(k).asDiagonal() *
                      (s1.v.leftCols(k).adjoint() * s0.v.leftCols(k));
    Eigen::ComplexEigenSolver<CMatrix> eig(a, false);
    if (eig.info() != Eigen::Success)
        throw Error(ErrorKind::IllConditioned, "pencil: eigenvalue solver did not converge");
    std::vector<cdouble> poles(eig.eigenvalues().data(), eig.eigenvalues().data() + k);
    const double limit = 1.0 + clamp_delta;
    for (auto& z : poles)
        if (std::abs(z) > limit)
            z *= limit / std::abs(z);
    std::sort(poles.begin(), poles.end(), [](cdouble a, cdouble b) {
        return std::arg(a) != std::arg(b) ? std::arg(a) < std::arg(b) : std::abs(a) < std::abs(b);
    });
    return dedupe(std::move(poles));
}

std::vector<cdouble> estimate_poles(const CMatrix& x0, const CMatrix& x1, std::size_t order,
                                    double clamp_delta) {
    if (x0.rows() != x1.rows() || x0.cols() != x1.cols())
        throw Error(ErrorKind::InvalidArgument, "pencil: X0 and X1 differ in shape");
    check_order(order, x0.rows(), x0.cols());
    const auto k = static_cast<Eigen::Index>(order);
    return estimate_poles(truncated_svd(x0, k), truncated_svd(x1, k), order, clamp_delta);
}

namespace {

struct LsSolution {
    std::vector<cdouble> amplitudes;
    Eigen::Index rank = 0;
    double condition = 0.0;
};

LsSolution solve_amplitudes(const ComplexSeries& s1, const ComplexSeries& s2, const GapSpec& gap,
                            std::span<const cdouble> poles) {
    const std::size_t m1 = s1.size();
    const std::size_t m2 = s2.size();
    if (poles.empty())
        throw Error(ErrorKind::InvalidArgument, "amplitudes: no poles");
    if (m1 != gap.front_length())
        throw Error(ErrorKind::InvalidArgument, "amplitudes: front segment does not match gap");
    if (m1 + m2 < poles.size())
        throw Error(ErrorKind::InsufficientData,
                    "amplitudes: " + std::to_string(poles.size()) + " poles but only " +
                        std::to_string(m1 + m2) + " samples");
    const std::size_t back0 = gap.is_empty() ? gap.n1 : gap.n2 + 1;
    const auto rows = static_cast<Eigen::Index>(m1 + m2);
    const auto cols = static_cast<Eigen::Index>(poles.size());
    CMatrix z(rows, cols);
    CVector m(rows);
    for (std::size_t r = 0; r < m1 + m2; ++r) {
        const std::size_t k = r < m1 ? r : back0 + (r - m1);
        m(static_cast<Eigen::Index>(r)) = r < m1 ? s1.samples[r] : s2.samples[r - m1];
        for (Eigen::Index c = 0; c < cols; ++c)
            z(static_cast<Eigen::Index>(r), c) = pole_power(poles[static_cast<std::size_t>(c)], k);
    }
    Eigen::ColPivHouseholderQR<CMatrix> qr(z);
    qr.setThreshold(kLsRankTolerance);
    LsSolution out;
    out.rank = qr.rank();
    const auto& r = qr.matrixQR();
    const double small = std::abs(r(cols - 1, cols - 1));
    out.condition = small > 0.0 ? std::abs(r(0, 0)) / small : INFINITY;
    if (out.rank == cols) {
        const CVector a = qr.solve(m);
        out.amplitudes.assign(a.data(), a.data() + a.size());
    }
    return out;
}

}  // namespace

std::vector<cdouble> fit_amplitudes(const ComplexSeries& s1, const ComplexSeries& s2,
                                    const GapSpec& gap, std::span<const cdouble> poles) {
    LsSolution ls = solve_amplitudes(s1, s2, gap, poles);
    if (ls.amplitudes.empty()) {
        std::ostringstream os;
        os << "amplitudes: Vandermonde system ill-conditioned (rank " << ls.rank << " of "
           << poles.size() << ", condition estimate " << ls.condition << ")";
        throw Error(ErrorKind::IllConditioned, os.str());
    }
    return std::move(ls.amplitudes);
}

ComplexSeries synthesize(const ExpSumModel& model, std::size_t n, double dt) {
    model.validate();
    std::vector<cdouble> out(n);
    for (std::size_t i = 0; i < model.order(); ++i) {
        const double r = std::abs(model.poles[i]);
        const double th = std::arg(model.poles[i]);
        const cdouble a = model.amplitudes[i];
        for (std::size_t k = 0; k < n; ++k) {
            const double kk = static_cast<double>(k);
            out[k] += a * std::polar(std::pow(r, kk), th * kk);
        }
    }
    return ComplexSeries(std::move(out), dt);
}

ExpSumModel order_by_energy(ExpSumModel model, std::size_t n) {
    model.validate();
    ExpSumModel merged;
    for (std::size_t i = 0; i < model.order(); ++i) {
        auto it = std::find_if(merged.poles.begin(), merged.poles.end(),
                               [&](cdouble w) { return same_pole(model.poles[i], w); });
        if (it == merged.poles.end()) {
            merged.poles.push_back(model.poles[i]);
            merged.amplitudes.push_back(model.amplitudes[i]);
        } else {
            merged.amplitudes[static_cast<std::size_t>(it - merged.poles.begin())] +=
                model.amplitudes[i];
        }
    }
    std::vector<std::size_t> idx(merged.order());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> energy(merged.order());
    for (std::size_t i = 0; i < merged.order(); ++i)
        energy[i] = std::abs(merged.amplitudes[i]) * geometric_sum(std::abs(merged.poles[i]), n);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return energy[a] > energy[b];
    });
    ExpSumModel out;
    for (auto i : idx) {
        out.poles.push_back(merged.poles[i]);
        out.amplitudes.push_back(merged.amplitudes[i]);
    }
    return out;
}

std::size_t default_pencil_L(std::size_t m1, std::size_t m2) {
    const std::size_t lo = std::min(m1, m2);
    const std::size_t hi = std::max(m1, m2);
    if (lo >= kMinSegment && lo >= hi / 8)
        return lo / 3;
    return hi / 3;
}

std::size_t clamp_pencil_L(std::size_t L, std::size_t order, std::size_t m1, std::size_t m2) {
    std::size_t upper = SIZE_MAX;  // exclusive
    for (std::size_t m : {m1, m2})
        if (m > 0)
            upper = std::min(upper, m > order ? m - order : 0);
    const std::size_t lower = order + 1;
    if (upper == SIZE_MAX || upper <= lower) {
        std::ostringstream os;
        os << "insufficient interference-free data: no pencil parameter with " << order
           << " < L < min(M - " << order << ") for segments of " << m1 << " and " << m2;
        throw Error(ErrorKind::InsufficientData, os.str());
    }
    return std::clamp(L, lower, upper - 1);
}

ExpSumModel mp_contiguous(const ComplexSeries& series, std::size_t L, std::size_t order,
                          double clamp_delta) {
    if (series.size() < L + 2)
        throw Error(ErrorKind::InsufficientData, "mp: series too short for L=" + std::to_string(L));
    PencilOptions opts;
    opts.clamp_delta = clamp_delta;
    const PoleResult pr = pencil_poles({series.view()}, L, order, opts);
    const ComplexSeries none({}, series.dt);
    ExpSumModel model{pr.poles, fit_amplitudes(series, none, GapSpec::empty_at(series.size()),
                                               pr.poles)};
    return order_by_energy(std::move(model), series.size());
}

PencilEstimate estimate_gapped(const ComplexSeries& s1, const ComplexSeries& s2, const GapSpec& gap,
                               std::size_t n, const PencilOptions& opts) {
    gap.validate(n);
    if (s1.size() != gap.front_length() || s2.size() != gap.back_length(n))
        throw Error(ErrorKind::InvalidArgument, "estimate: segments do not match gap");
    if (s1.empty() && s2.empty())
        throw Error(ErrorKind::NoInterferenceFreeData,
                    "no interference-free data: gap covers the whole sweep");

    std::size_t m1 = s1.size();
    std::size_t m2 = s2.size();
    // Drop a segment too short to contribute Hankel rows of useful length.
    if (default_pencil_L(m1, m2) * 3 > std::min(m1, m2) + 2) {
        if (m1 < m2)
            m1 = 0;
        else
            m2 = 0;
    }
    if (std::max(m1, m2) < 3)
        throw Error(ErrorKind::InsufficientData,
                    "insufficient interference-free data: " + std::to_string(s1.size() + s2.size()) +
                        " samples outside the gap");

    auto segments = [&] {
        Segments s;
        if (m1 > 0)
            s.push_back(s1.view());
        if (m2 > 0)
            s.push_back(s2.view());
        return s;
    };

    std::size_t L = opts.L ? opts.L : default_pencil_L(m1, m2);
    std::size_t order = opts.order;
    PoleResult pr;
    if (order == 0) {
        L = std::min(L, std::max<std::size_t>(1, std::min(m1 ? m1 : SIZE_MAX, m2 ? m2 : SIZE_MAX) - 2));
        pr = pencil_poles(segments(), L, 0, opts);
        order = pr.order;
    }
    const std::size_t clamped = clamp_pencil_L(L, order, m1, m2);
    if (opts.L && clamped != opts.L) {
        std::ostringstream os;
        os << "pencil: L=" << opts.L << " outside admissible range for order " << order;
        throw Error(ErrorKind::InvalidArgument, os.str());
    }
    if (pr.poles.empty() || clamped != L) {
        auto sv = std::move(pr.normalized_sv);
        pr = pencil_poles(segments(), clamped, order, opts);
        if (!sv.empty() && clamped != L)
            pr.normalized_sv = std::move(sv);
    }

    // With a selected order, noise poles can be damped so hard that the gapped
    // Vandermonde loses rank; retry at the rank the QR reveals.
    LsSolution ls = solve_amplitudes(s1, s2, gap, pr.poles);
    while (opts.order == 0 && ls.amplitudes.empty() && ls.rank >= 1 &&
           static_cast<std::size_t>(ls.rank) < pr.poles.size()) {
        auto sv = std::move(pr.normalized_sv);
        order = static_cast<std::size_t>(ls.rank);
        pr = pencil_poles(segments(), clamp_pencil_L(clamped, order, m1, m2), order, opts);
        pr.normalized_sv = std::move(sv);
        ls = solve_amplitudes(s1, s2, gap, pr.poles);
    }
    if (ls.amplitudes.empty())
        fit_amplitudes(s1, s2, gap, pr.poles);  // throws with the diagnostic

    PencilEstimate out;
    out.L = clamp_pencil_L(clamped, order, m1, m2);
    out.singular_values = std::move(pr.normalized_sv);
    ExpSumModel model{pr.poles, std::move(ls.amplitudes)};
    out.model = order_by_energy(std::move(model), n);
    return out;
}

}  // namespace fmcw
