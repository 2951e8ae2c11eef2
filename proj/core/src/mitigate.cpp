#include "fmcw/mitigate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fmcw/error.hpp"

namespace fmcw {

namespace {

double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
        m = 0.5 * (m + lo);
    }
    return m;
}

double residual_norm(std::span<const cdouble> est, std::span<const cdouble> meas) {
    double acc = 0.0;
    for (std::size_t i = 0; i < meas.size(); ++i)
        acc += std::norm(est[i] - meas[i]);
    return std::sqrt(acc);
}

std::size_t back_start(const GapSpec& gap) { return gap.is_empty() ? gap.n1 : gap.n2 + 1; }

ComplexSeries fill_gap(const ComplexSeries& series, const GapSpec& gap,
                       std::span<const cdouble> fill) {
    ComplexSeries out = series;
    for (std::size_t k = 0; k < gap.length(); ++k)
        out.samples[gap.n1 + k] = fill[k];
    return out;
}

}  // namespace

GapSpec detect_interference(const ComplexSeries& series, std::size_t win, double k_mad) {
    const std::size_t n = series.size();
    if (win == 0)
        throw Error(ErrorKind::InvalidArgument, "detect: window must be positive");
    if (n < 4 * win)
        throw Error(ErrorKind::InvalidArgument, "detect: sweep shorter than 4 windows");

    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        prefix[k + 1] = prefix[k] + std::norm(series.samples[k]);
    std::vector<double> env(n);
    const std::size_t half = win / 2;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t lo = k >= half ? k - half : 0;
        const std::size_t hi = std::min(n, lo + win);
        env[k] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    }
    const double med = median(env);
    std::vector<double> dev(n);
    for (std::size_t k = 0; k < n; ++k)
        dev[k] = std::abs(env[k] - med);
    const double mad = median(dev);
    const double threshold = med + k_mad * mad;

    std::size_t first = n, last = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (env[k] > threshold) {
            first = std::min(first, k);
            last = k;
        }
    if (first == n)
        throw Error(ErrorKind::NoInterference, "no interference found");
    if (first == 0 && last == n - 1)
        throw Error(ErrorKind::SweepUnusable, "sweep unusable: interference covers the whole sweep");
    return {first, last};
}

ComplexSeries zero_gap(const ComplexSeries& series, const GapSpec& gap) {
    gap.validate(series.size());
    ComplexSeries out = series;
    for (std::size_t k = 0; k < gap.length(); ++k)
        out.samples[gap.n1 + k] = cdouble{};
    return out;
}

MitigationResult reconstruct_mp(const ComplexSeries& series, const GapSpec& gap,
                                const MpConfig& cfg) {
    const std::size_t n = series.size();
    gap.validate(n);
    MitigationResult res{series, {}};
    res.report.method = Method::MP;
    if (gap.is_empty())
        return res;
    if (cfg.max_iter == 0)
        throw Error(ErrorKind::InvalidArgument, "mp: max_iter must be at least 1");

    const SplitSweep parts = split_at_gap(series, gap);
    PencilOptions opts;
    opts.order = cfg.order;
    opts.L = cfg.L;
    opts.sv_threshold = cfg.sv_threshold;
    opts.clamp_delta = cfg.clamp_delta;
    const PencilEstimate first = estimate_gapped(parts.front, parts.back, gap, n, opts);
    const std::size_t order = first.model.order();
    res.report.order_used = order;
    res.report.pencil_L = first.L;

    const std::size_t lc = cfg.contiguous_L ? cfg.contiguous_L : n / 2;
    const std::size_t b0 = back_start(gap);
    ExpSumModel model = first.model;
    double best = std::numeric_limits<double>::infinity();
    auto& hist = res.report.epsilon_history;
    for (std::size_t i = 0; i < cfg.max_iter; ++i) {
        const ComplexSeries est = synthesize(model, n, series.dt);
        const std::span<const cdouble> e(est.samples);
        const double eps = residual_norm(e.first(gap.n1), parts.front.samples) +
                           residual_norm(e.subspan(b0), parts.back.samples);
        hist.push_back(eps);
        ComplexSeries spliced = fill_gap(series, gap, e.subspan(gap.n1, gap.length()));
        if (eps < best) {
            best = eps;
            res.report.best_iteration = i;
            res.series = spliced;
        }
        if (i >= 1 && eps > hist[i - 1] * (1.0 - cfg.stall_tolerance))
            break;
        if (i + 1 == cfg.max_iter)
            break;
        try {
            model = mp_contiguous(spliced, std::min(lc, n - order - 1), order, cfg.clamp_delta);
        } catch (const Error&) {
            break;  // refinement failed; keep the best iterate so far
        }
    }
    res.report.iterations = hist.size();
    return res;
}

ArModel burg_ar_fit(const ComplexSeries& segment, std::size_t order) {
    const std::size_t n = segment.size();
    if (order == 0)
        throw Error(ErrorKind::InvalidArgument, "burg: order must be at least 1");
    if (n <= order)
        throw Error(ErrorKind::InsufficientData, "burg: segment of " + std::to_string(n) +
                                                     " samples too short for order " +
                                                     std::to_string(order));
    std::vector<cdouble> f(segment.samples), b(segment.samples);
    double e = 0.0;
    for (const auto& x : f)
        e += std::norm(x);
    e /= static_cast<double>(n);
    if (!(e > 0.0))
        throw Error(ErrorKind::InvalidArgument, "burg: all-zero segment");

    ArModel m;
    std::vector<cdouble> a;  // a[0..m-1] for lags 1..m
    for (std::size_t p = 1; p <= order; ++p) {
        cdouble num{};
        double den = 0.0;
        for (std::size_t k = p; k < n; ++k) {
            num += f[k] * std::conj(b[k - 1]);
            den += std::norm(f[k]) + std::norm(b[k - 1]);
        }
        const cdouble kp = den > 0.0 ? -2.0 * num / den : cdouble{};
        std::vector<cdouble> next(p);
        for (std::size_t i = 0; i + 1 < p; ++i)
            next[i] = a[i] + kp * std::conj(a[p - 2 - i]);
        next[p - 1] = kp;
        a = std::move(next);
        for (std::size_t k = n - 1; k >= p; --k) {
            const cdouble fk = f[k];
            f[k] = fk + kp * b[k - 1];
            b[k] = b[k - 1] + std::conj(kp) * fk;
        }
        e *= 1.0 - std::norm(kp);
        m.reflection.push_back(kp);
    }
    m.coeffs = std::move(a);
    m.error_power = e;
    return m;
}

std::vector<cdouble> ar_extrapolate(const ArModel& model, std::span<const cdouble> history,
                                    std::size_t count) {
    const std::size_t p = model.order();
    if (history.size() < p)
        throw Error(ErrorKind::InsufficientData, "burg: history shorter than model order");
    std::vector<cdouble> buf(history.end() - static_cast<std::ptrdiff_t>(p), history.end());
    std::vector<cdouble> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        cdouble x{};
        const std::size_t end = buf.size();
        for (std::size_t i = 0; i < p; ++i)
            x -= model.coeffs[i] * buf[end - 1 - i];
        buf.push_back(x);
        out.push_back(x);
    }
    return out;
}

ComplexSeries reconstruct_burg(const ComplexSeries& series, const GapSpec& gap, std::size_t order) {
    const std::size_t n = series.size();
    gap.validate(n);
    if (gap.is_empty())
        return series;
    const SplitSweep parts = split_at_gap(series, gap);
    const std::size_t g = gap.length();
    const bool use_front = parts.front.size() > order;
    const bool use_back = parts.back.size() > order;
    if (!use_front && !use_back)
        throw Error(ErrorKind::InsufficientData,
                    "insufficient interference-free data: both segments shorter than Burg order");

    std::vector<cdouble> fwd, bwd;
    if (use_front)
        fwd = ar_extrapolate(burg_ar_fit(parts.front, order), parts.front.samples, g);
    if (use_back) {
        ComplexSeries rev = parts.back;
        std::reverse(rev.samples.begin(), rev.samples.end());
        bwd = ar_extrapolate(burg_ar_fit(rev, order), rev.samples, g);
        std::reverse(bwd.begin(), bwd.end());
    }
    std::vector<cdouble> fill(g);
    for (std::size_t k = 0; k < g; ++k) {
        double w = use_front ? 1.0 : 0.0;
        if (use_front && use_back)
            w = 0.5 * (1.0 + std::cos(std::numbers::pi * static_cast<double>(k + 1) /
                                      static_cast<double>(g + 1)));
        fill[k] = (use_front ? w * fwd[k] : cdouble{}) + (use_back ? (1.0 - w) * bwd[k] : cdouble{});
    }
    return fill_gap(series, gap, fill);
}

MitigationResult mitigate(const ComplexSeries& series, const GapSpec& gap,
                          const MitigateConfig& cfg) {
    switch (cfg.method) {
    case Method::Zeroing: {
        MitigationResult r{zero_gap(series, gap), {}};
        r.report.method = Method::Zeroing;
        return r;
    }
    case Method::MP:
        return reconstruct_mp(series, gap, cfg.mp);
    case Method::Burg: {
        std::size_t order = cfg.burg_order ? cfg.burg_order : cfg.mp.order;
        MitigationResult r{series, {}};
        r.report.method = Method::Burg;
        if (gap.is_empty())
            return r;
        if (order == 0) {
            const SplitSweep parts = split_at_gap(series, gap);
            PencilOptions opts;
            opts.L = cfg.mp.L;
            opts.sv_threshold = cfg.mp.sv_threshold;
            order = estimate_gapped(parts.front, parts.back, gap, series.size(), opts).model.order();
        }
        r.series = reconstruct_burg(series, gap, order);
        r.report.order_used = order;
        return r;
    }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown method");
}

}  // namespace fmcw
