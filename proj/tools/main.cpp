#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "fmcw/io.hpp"
#include "fmcw/parallel.hpp"

namespace {

using namespace fmcw;
using namespace fmcw::cli;

// Flags shared by `mitigate` and `rd`; applied on top of an optional config.
struct MitigationFlags {
    std::string config;
    std::string method;
    std::optional<std::size_t> order, L, max_iter, burg_order;
    std::optional<double> sv_threshold;
    std::string gap, gap_json;
    bool detect = false;
    std::size_t detect_window = kDefaultDetectWindow;
    double detect_k_mad = kDefaultDetectKMad;

    void add_to(CLI::App& app) {
        app.add_option("--config", config, "Config file with a [mitigation] section");
        app.add_option("--method", method, "zero, mp or burg");
        app.add_option("--order", order, "Model order (0 selects from singular values)");
        app.add_option("--L", L, "Pencil parameter");
        app.add_option("--sv-threshold", sv_threshold, "Relative singular-value threshold");
        app.add_option("--max-iter", max_iter, "Maximum MP iterations");
        app.add_option("--burg-order", burg_order, "Burg AR order (0 reuses the MP order)");
        app.add_option("--gap", gap, "Excised interval n1:n2 (inclusive)");
        app.add_option("--gap-json", gap_json, "truth.json sidecar holding the gap");
        app.add_flag("--detect", detect, "Locate the gap with the energy detector");
        app.add_option("--detect-window", detect_window, "Detector window length");
        app.add_option("--detect-k", detect_k_mad, "Detector threshold in MADs");
    }

    MitigateConfig mitigation() const {
        MitigateConfig mc;
        if (!config.empty())
            mc = mitigation_from_config(Config::load(config));
        if (!method.empty())
            mc.method = method_from_string(method);
        if (order)
            mc.mp.order = *order;
        if (L)
            mc.mp.L = *L;
        if (sv_threshold)
            mc.mp.sv_threshold = *sv_threshold;
        if (max_iter)
            mc.mp.max_iter = *max_iter;
        if (burg_order)
            mc.burg_order = *burg_order;
        return mc;
    }

    GapSource gap_source() const {
        GapSource g;
        if (!gap.empty())
            g.gap = parse_gap(gap);
        if (!gap_json.empty())
            g.truth_json = gap_json;
        g.detect = detect;
        g.detect_window = detect_window;
        g.detect_k_mad = detect_k_mad;
        return g;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FMCW interference mitigation by gapped matrix-pencil reconstruction", "fmcw-mend"};
    app.require_subcommand(1);
    app.fallthrough();
    std::size_t workers = default_workers();
    app.add_option("--workers", workers, "Worker threads (default FMCW_MEND_WORKERS or 1)");

    SimulateOptions sim;
    std::optional<std::uint64_t> sim_seed;
    auto* simulate = app.add_subcommand("simulate", "Synthesise sweeps from a scenario config");
    simulate->add_option("config", sim.config, "Scenario config")->required();
    simulate->add_option("-o,--out", sim.out_dir, "Output directory")->required();
    simulate->add_option("--seed", sim_seed, "Override the scenario seed");

    MitigateOptions mit;
    MitigationFlags mit_flags;
    std::string mit_report, mit_profile, mit_window = "rect";
    auto* mitigate_cmd = app.add_subcommand("mitigate", "Reconstruct the excised samples of every sweep");
    mitigate_cmd->add_option("input", mit.input, "Input sweep file")->required();
    mitigate_cmd->add_option("-o,--out", mit.output, "Output sweep file")->required();
    mitigate_cmd->add_option("--report", mit_report, "Per-sweep report JSON");
    mitigate_cmd->add_option("--profile", mit_profile, "Range-profile CSV of the output");
    mitigate_cmd->add_option("--nfft", mit.nfft, "Range FFT length (0 = N)");
    mitigate_cmd->add_option("--window", mit_window, "rect, hann or hamming");
    mit_flags.add_to(*mitigate_cmd);

    StudyOptions st;
    auto* study = app.add_subcommand("study", "Monte Carlo study over SNR and gap size");
    study->add_option("config", st.config, "Study config")->required();
    study->add_option("-o,--out", st.output, "Output CSV")->required();
    study->add_option("--trials", st.trials, "Trials per cell");
    study->add_option("--seed", st.seed, "Base seed");

    RdOptions rd;
    MitigationFlags rd_flags;
    std::string rd_window = "rect";
    auto* rd_cmd = app.add_subcommand("rd", "Range-Doppler maps before and after mitigation");
    rd_cmd->add_option("input", rd.input, "CPI sweep file")->required();
    rd_cmd->add_option("-o,--out", rd.out_dir, "Output directory")->required();
    rd_cmd->add_flag("--no-mitigation", rd.no_mitigation, "Skip mitigation");
    rd_cmd->add_option("--window", rd_window, "Fast-time window: rect, hann or hamming");
    rd_flags.add_to(*rd_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (*simulate) {
            sim.seed = sim_seed;
            return cmd_simulate(sim, std::cerr);
        }
        if (*mitigate_cmd) {
            mit.mitigation = mit_flags.mitigation();
            mit.gap = mit_flags.gap_source();
            mit.workers = workers;
            mit.window = window_from_string(mit_window);
            if (!mit_report.empty())
                mit.report_json = mit_report;
            if (!mit_profile.empty())
                mit.profile_csv = mit_profile;
            return cmd_mitigate(mit, std::cerr);
        }
        if (*study) {
            st.workers = workers;
            return cmd_study(st, std::cerr);
        }
        if (*rd_cmd) {
            rd.mitigation = rd_flags.mitigation();
            if (!rd.no_mitigation)
                rd.gap = rd_flags.gap_source();
            rd.workers = workers;
            rd.window = window_from_string(rd_window);
            return cmd_rd(rd, std::cerr);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kOk;
}
