#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <mutex>

#include <json.hpp>

#include "fmcw/io.hpp"
#include "fmcw/metrics.hpp"
#include "fmcw/parallel.hpp"
#include "fmcw/synth.hpp"

namespace fmcw::cli {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os)
        throw Error(ErrorKind::Data, "cannot open " + path.string() + " for writing");
    return os;
}

json gap_json(const GapSpec& g) { return {{"n1", g.n1}, {"n2", g.n2}}; }

GapSpec gap_from_truth(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is)
        throw Error(ErrorKind::Config, "cannot open gap sidecar " + path.string());
    try {
        const json j = json::parse(is);
        return {j.at("gap").at("n1").get<std::size_t>(), j.at("gap").at("n2").get<std::size_t>()};
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, path.string() + ": " + e.what());
    }
}

json report_json(const MitigationReport& r) {
    return {{"method", to_string(r.method)},
            {"order_used", r.order_used},
            {"pencil_L", r.pencil_L},
            {"iterations", r.iterations},
            {"best_iteration", r.best_iteration},
            {"epsilon_history", r.epsilon_history}};
}

// Resolves a fixed gap (explicit or sidecar); nullopt means per-sweep detection.
std::optional<GapSpec> fixed_gap(const GapSource& src) {
    const int sources = int(src.gap.has_value()) + int(src.truth_json.has_value()) + int(src.detect);
    if (sources != 1)
        throw Error(ErrorKind::Config, "give exactly one of --gap, --gap-json or --detect");
    if (src.gap)
        return src.gap;
    if (src.truth_json)
        return gap_from_truth(*src.truth_json);
    return std::nullopt;
}

double doppler_hz(std::size_t d, std::size_t m, double sweep_time) {
    const double k = d < (m + 1) / 2 ? static_cast<double>(d) : static_cast<double>(d) - static_cast<double>(m);
    return k / (static_cast<double>(m) * sweep_time);
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::InvalidArgument:
    case ErrorKind::OutOfRange:
        return kConfigError;
    case ErrorKind::Data:
    case ErrorKind::NoInterference:
    case ErrorKind::SweepUnusable:
        return kDataError;
    case ErrorKind::NoInterferenceFreeData:
    case ErrorKind::InsufficientData:
    case ErrorKind::RankDeficient:
    case ErrorKind::IllConditioned:
        return kEstimatorError;
    }
    return kEstimatorError;
}

GapSpec parse_gap(const std::string& text) {
    const auto colon = text.find(':');
    auto bad = [&] { return Error(ErrorKind::Config, "bad gap '" + text + "', expected n1:n2"); };
    if (colon == std::string::npos)
        throw bad();
    const std::string a = text.substr(0, colon), b = text.substr(colon + 1);
    if (a.empty() || b.empty() || a.find_first_not_of("0123456789") != std::string::npos ||
        b.find_first_not_of("0123456789") != std::string::npos)
        throw bad();
    return {std::stoull(a), std::stoull(b)};
}

int cmd_simulate(const SimulateOptions& opts, std::ostream& log) {
    const Config cfg = Config::load(opts.config);
    ScenarioConfig sc = scenario_from_config(cfg);
    if (opts.seed)
        sc.seed = *opts.seed;
    std::filesystem::create_directories(opts.out_dir);

    SweepFile clean{sc.radar, {}}, reference{sc.radar, {}}, contaminated{sc.radar, {}};
    GapSpec truth;
    json targets = json::array();
    bool ghost = false;
    if (sc.n_sweeps == 1) {
        Scenario s = build_scenario(sc);
        clean.sweeps.push_back(s.clean);
        reference.sweeps.push_back(s.reference);
        contaminated.sweeps.push_back(s.contaminated);
        truth = s.truth_gap;
        ghost = s.ghost_target;
        for (const auto& t : s.targets)
            targets.push_back({{"range_m", t.range_m},
                               {"amplitude", std::abs(t.amplitude)},
                               {"phase_rad", std::arg(t.amplitude)},
                               {"velocity_mps", t.velocity}});
    } else {
        CpiScenario s = build_cpi_scenario(sc);
        clean.sweeps = std::move(s.clean);
        reference.sweeps = std::move(s.reference);
        contaminated.sweeps = std::move(s.contaminated);
        truth = s.truth_gap;
    }
    write_sweep_file(opts.out_dir / "clean.fmcw", clean);
    write_sweep_file(opts.out_dir / "reference.fmcw", reference);
    write_sweep_file(opts.out_dir / "contaminated.fmcw", contaminated);

    json sidecar = {{"gap", gap_json(truth)},
                    {"has_interference", sc.interference.has_value()},
                    {"ghost_target", ghost},
                    {"n_sweeps", sc.n_sweeps},
                    {"n_samples", sc.radar.n_samples},
                    {"seed", sc.seed},
                    {"snr_db", std::isfinite(sc.snr_db) ? json(sc.snr_db) : json("inf")},
                    {"targets", targets}};
    open_out(opts.out_dir / "truth.json") << sidecar.dump(2) << '\n';
    log << "simulated " << sc.n_sweeps << " sweep(s) of " << sc.radar.n_samples
        << " samples, gap " << to_string(truth) << " -> " << opts.out_dir.string() << '\n';
    return kOk;
}

int cmd_mitigate(const MitigateOptions& opts, std::ostream& log) {
    const std::optional<GapSpec> gap = fixed_gap(opts.gap);
    const SweepFile in = read_sweep_file(opts.input);
    if (in.sweeps.empty())
        throw Error(ErrorKind::Data, opts.input.string() + ": no sweeps");

    struct SweepOutcome {
        ComplexSeries series;
        GapSpec gap;
        MitigationReport report;
        std::string status = "ok";
        std::string error;
        ErrorKind kind = ErrorKind::Data;
    };
    std::vector<SweepOutcome> out(in.sweeps.size());
    parallel_for(in.sweeps.size(), opts.workers, [&](std::size_t i) {
        SweepOutcome& o = out[i];
        o.series = in.sweeps[i];
        try {
            o.gap = gap ? *gap
                        : detect_interference(in.sweeps[i], opts.gap.detect_window,
                                              opts.gap.detect_k_mad);
            auto res = mitigate(in.sweeps[i], o.gap, opts.mitigation);
            o.series = std::move(res.series);
            o.report = std::move(res.report);
        } catch (const Error& e) {
            o.status = e.kind() == ErrorKind::NoInterference ? "no interference" : "failed";
            o.error = e.what();
            o.kind = e.kind();
        }
    });

    SweepFile result{in.radar, {}};
    json sweeps = json::array();
    std::size_t failures = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        result.sweeps.push_back(out[i].series);
        json j = {{"index", i}, {"status", out[i].status}};
        if (out[i].status == "ok") {
            j["gap"] = gap_json(out[i].gap);
            j["report"] = report_json(out[i].report);
        } else {
            j["error"] = out[i].error;
            ++failures;
        }
        sweeps.push_back(j);
    }
    if (failures == out.size()) {
        log << "error: no sweep could be processed: " << out.front().error << '\n';
        return exit_code_for(out.front().kind);
    }

    write_sweep_file(opts.output, result);
    if (opts.report_json) {
        json rep = {{"input", opts.input.string()},
                    {"method", to_string(opts.mitigation.method)},
                    {"failures", failures},
                    {"sweeps", sweeps}};
        open_out(*opts.report_json) << rep.dump(2) << '\n';
    }
    if (opts.profile_csv) {
        auto os = open_out(*opts.profile_csv);
        std::vector<RangeProfile> profiles;
        for (const auto& s : result.sweeps)
            profiles.push_back(range_profile(s, in.radar, opts.window, opts.nfft));
        os << "range_m";
        for (std::size_t i = 0; i < profiles.size(); ++i)
            os << ",sweep" << i << "_db";
        os << '\n' << std::setprecision(10);
        std::vector<std::vector<double>> dbs;
        for (const auto& p : profiles)
            dbs.push_back(p.db());
        for (std::size_t b = 0; b < profiles.front().range_m.size(); ++b) {
            os << profiles.front().range_m[b];
            for (const auto& d : dbs)
                os << ',' << d[b];
            os << '\n';
        }
    }
    log << "mitigated " << out.size() - failures << "/" << out.size() << " sweep(s) with "
        << to_string(opts.mitigation.method) << '\n';
    return kOk;
}

int cmd_study(const StudyOptions& opts, std::ostream& log) {
    const Config cfg = Config::load(opts.config);
    StudyConfig st = study_from_config(cfg);
    if (opts.trials)
        st.trials = *opts.trials;
    if (opts.seed)
        st.seed = *opts.seed;
    st.workers = std::max<std::size_t>(opts.workers, 1);
    const StatsTable table = monte_carlo(st);
    auto os = open_out(opts.output);
    table.write_csv(os);
    log << "study: " << st.snr_db.size() << " SNRs x " << st.gap_pct.size() << " gaps x "
        << st.trials << " trials -> " << opts.output.string() << '\n';
    return kOk;
}

void write_rd_csv(std::ostream& os, const std::vector<double>& values, std::size_t n_doppler,
                  std::size_t n_range, const RadarParams& radar) {
    os << std::setprecision(10) << "doppler_hz\\range_m";
    const double fs = radar.sample_rate;
    for (std::size_t r = 0; r < n_range; ++r)
        os << ',' << range_from_beat_frequency(static_cast<double>(r) * fs / static_cast<double>(n_range),
                                               radar.chirp_rate());
    os << '\n';
    for (std::size_t d = 0; d < n_doppler; ++d) {
        os << doppler_hz(d, n_doppler, radar.sweep_time);
        for (std::size_t r = 0; r < n_range; ++r)
            os << ',' << values[d * n_range + r];
        os << '\n';
    }
}

int cmd_rd(const RdOptions& opts, std::ostream& log) {
    const SweepFile in = read_sweep_file(opts.input);
    if (in.sweeps.empty())
        throw Error(ErrorKind::Data, opts.input.string() + ": no sweeps");
    const RdMap before = range_doppler(in.sweeps, opts.window);
    RdMap after = before;
    json rep = {{"input", opts.input.string()}, {"mitigated", !opts.no_mitigation}};

    if (!opts.no_mitigation) {
        std::optional<GapSpec> gap = fixed_gap(opts.gap);
        if (!gap) {
            // Union of per-sweep detections; sweeps without interference are skipped.
            for (const auto& s : in.sweeps) {
                try {
                    const GapSpec g = detect_interference(s, opts.gap.detect_window, opts.gap.detect_k_mad);
                    gap = gap ? GapSpec{std::min(gap->n1, g.n1), std::max(gap->n2, g.n2)} : g;
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::NoInterference)
                        throw;
                }
            }
            if (!gap)
                throw Error(ErrorKind::NoInterference, "no interference found in any sweep");
        }
        CpiConfig cc;
        cc.mitigation = opts.mitigation;
        cc.workers = opts.workers;
        const CpiResult res = mitigate_cpi(in.sweeps, *gap, cc);
        after = range_doppler_from_bins(res.doppler_bins, opts.window);
        json bins = json::array();
        std::size_t failed = 0;
        for (const auto& b : res.reports) {
            json j = report_json(b.report);
            if (b.failed) {
                j["error"] = b.error;
                ++failed;
            }
            bins.push_back(j);
        }
        rep["gap"] = gap_json(*gap);
        rep["failed_bins"] = failed;
        rep["bins"] = bins;
    }

    std::filesystem::create_directories(opts.out_dir);
    const auto pb = before.power_db();
    const auto pa = after.power_db();
    std::vector<double> diff(pb.size());
    for (std::size_t i = 0; i < diff.size(); ++i)
        diff[i] = pa[i] - pb[i];
    {
        auto os = open_out(opts.out_dir / "rd_before.csv");
        write_rd_csv(os, pb, before.n_doppler, before.n_range, in.radar);
    }
    {
        auto os = open_out(opts.out_dir / "rd_after.csv");
        write_rd_csv(os, pa, after.n_doppler, after.n_range, in.radar);
    }
    {
        auto os = open_out(opts.out_dir / "rd_diff.csv");
        write_rd_csv(os, diff, after.n_doppler, after.n_range, in.radar);
    }
    open_out(opts.out_dir / "rd_report.json") << rep.dump(2) << '\n';
    log << "rd: " << before.n_doppler << " x " << before.n_range << " maps -> "
        << opts.out_dir.string() << '\n';
    return kOk;
}

}  // namespace fmcw::cli
