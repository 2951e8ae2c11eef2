#include "fmcw/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "fmcw/error.hpp"
#include "fmcw/parallel.hpp"
#include "fmcw/rng.hpp"

namespace fmcw {

namespace {

void check_lengths(const ComplexSeries& a, const ComplexSeries& b) {
    if (a.size() != b.size())
        throw Error(ErrorKind::InvalidArgument, "metrics: length mismatch (" +
                                                    std::to_string(a.size()) + " vs " +
                                                    std::to_string(b.size()) + ")");
}

double norm2(const ComplexSeries& s) {
    double acc = 0.0;
    for (const auto& v : s.samples)
        acc += std::norm(v);
    return std::sqrt(acc);
}

double diff_norm(const ComplexSeries& a, const ComplexSeries& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        acc += std::norm(a.samples[k] - b.samples[k]);
    return std::sqrt(acc);
}

}  // namespace

double rsnr(const ComplexSeries& reference, const ComplexSeries& estimate) {
    check_lengths(reference, estimate);
    const double ref = norm2(reference);
    if (!(ref > 0.0))
        throw Error(ErrorKind::InvalidArgument, "rsnr: zero reference");
    const double err = diff_norm(reference, estimate);
    if (!(err > 0.0))
        return kRsnrCap;
    return std::min(kRsnrCap, 20.0 * std::log10(ref / err));
}

cdouble corr_coeff(const ComplexSeries& reference, const ComplexSeries& estimate) {
    check_lengths(reference, estimate);
    const double a = norm2(reference);
    const double b = norm2(estimate);
    if (!(a > 0.0) || !(b > 0.0))
        throw Error(ErrorKind::InvalidArgument, "corr_coeff: zero-norm input");
    cdouble acc{};
    for (std::size_t k = 0; k < reference.size(); ++k)
        acc += std::conj(estimate.samples[k]) * reference.samples[k];
    return acc / (a * b);
}

double relative_rms_error(const ComplexSeries& reference, const ComplexSeries& estimate) {
    check_lengths(reference, estimate);
    const double ref = norm2(reference);
    if (!(ref > 0.0))
        throw Error(ErrorKind::InvalidArgument, "relative error: zero reference");
    return diff_norm(reference, estimate) / ref;
}

TrialOutcome evaluate(const ComplexSeries& reference, const ComplexSeries& contaminated,
                      const GapSpec& gap, const MitigateConfig& cfg) {
    TrialOutcome out;
    try {
        auto res = mitigate(contaminated, gap, cfg);
        out.rsnr_db = rsnr(reference, res.series);
        out.rho = corr_coeff(reference, res.series);
        out.report = std::move(res.report);
    } catch (const Error&) {
        out.failed = true;
    }
    return out;
}

ScenarioConfig study_scenario(const StudyConfig& cfg, double snr_db, double gap_pct,
                              std::uint64_t seed) {
    ScenarioConfig sc = cfg.base;
    sc.snr_db = snr_db;
    sc.seed = seed;
    if (!sc.interference)
        throw Error(ErrorKind::InvalidArgument, "study: base scenario has no interferer");
    sc.lowpass_hz = lowpass_for_duration(sc.radar, *sc.interference, gap_pct / 100.0);
    return sc;
}

std::optional<StatsRow> StatsTable::find(double snr_db, double gap_pct, Method method) const {
    for (const auto& r : rows)
        if (r.snr_db == snr_db && r.gap_pct == gap_pct && r.method == method)
            return r;
    return std::nullopt;
}

void StatsTable::write_csv(std::ostream& os) const {
    os << "snr_db,gap_pct,method,trials,failures,mean_rsnr_db,mean_abs_rho,mean_arg_rho_rad\n";
    const auto flags = os.flags();
    os << std::setprecision(10);
    for (const auto& r : rows)
        os << r.snr_db << ',' << r.gap_pct << ',' << to_string(r.method) << ',' << r.trials << ','
           << r.failures << ',' << r.mean_rsnr_db << ',' << r.mean_abs_rho << ','
           << r.mean_arg_rho_rad << '\n';
    os.flags(flags);
}

StatsTable monte_carlo(const StudyConfig& cfg) {
    if (cfg.trials == 0 || cfg.snr_db.empty() || cfg.gap_pct.empty() || cfg.methods.empty())
        throw Error(ErrorKind::InvalidArgument, "study: empty grid or zero trials");
    for (double g : cfg.gap_pct)
        if (!(g > 0.0 && g < 100.0))
            throw Error(ErrorKind::InvalidArgument, "study: gap percentage must lie in (0, 100)");

    const std::size_t ns = cfg.snr_db.size();
    const std::size_t ng = cfg.gap_pct.size();
    const std::size_t nm = cfg.methods.size();
    const std::size_t total = ns * ng * cfg.trials;
    std::vector<TrialOutcome> outcomes(total * nm);

    parallel_for(total, cfg.workers, [&](std::size_t task) {
        const std::size_t t = task % cfg.trials;
        const std::size_t gi = (task / cfg.trials) % ng;
        const std::size_t si = task / (cfg.trials * ng);
        const auto sc = build_scenario(
            study_scenario(cfg, cfg.snr_db[si], cfg.gap_pct[gi], derive_seed(cfg.seed, si, gi, t)));
        for (std::size_t mi = 0; mi < nm; ++mi) {
            MitigateConfig mc;
            mc.method = cfg.methods[mi];
            mc.mp = cfg.mp;
            mc.burg_order = cfg.burg_order;
            outcomes[task * nm + mi] = evaluate(sc.clean, sc.contaminated, sc.truth_gap, mc);
        }
    });

    StatsTable table;
    for (std::size_t si = 0; si < ns; ++si)
        for (std::size_t gi = 0; gi < ng; ++gi)
            for (std::size_t mi = 0; mi < nm; ++mi) {
                StatsRow row;
                row.snr_db = cfg.snr_db[si];
                row.gap_pct = cfg.gap_pct[gi];
                row.method = cfg.methods[mi];
                row.trials = cfg.trials;
                double sr = 0.0, sa = 0.0, sp = 0.0;
                std::size_t ok = 0;
                for (std::size_t t = 0; t < cfg.trials; ++t) {
                    const auto& o = outcomes[((si * ng + gi) * cfg.trials + t) * nm + mi];
                    if (o.failed) {
                        ++row.failures;
                        continue;
                    }
                    sr += o.rsnr_db;
                    sa += std::abs(o.rho);
                    sp += std::arg(o.rho);
                    ++ok;
                }
                if (ok > 0) {
                    row.mean_rsnr_db = sr / static_cast<double>(ok);
                    row.mean_abs_rho = sa / static_cast<double>(ok);
                    row.mean_arg_rho_rad = sp / static_cast<double>(ok);
                } else {
                    row.mean_rsnr_db = row.mean_abs_rho = row.mean_arg_rho_rad = std::nan("");
                }
                table.rows.push_back(row);
            }
    return table;
}

}  // namespace fmcw
