#include "fmcw/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "fmcw/error.hpp"

namespace fmcw {

namespace {

template <typename T>
void put_le(std::ostream& os, T value) {
    std::uint64_t bits = 0;
    if constexpr (std::is_same_v<T, double>)
        bits = std::bit_cast<std::uint64_t>(value);
    else
        bits = static_cast<std::uint64_t>(value);
    std::array<char, sizeof(T)> buf{};
    for (std::size_t i = 0; i < sizeof(T); ++i)
        buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    os.write(buf.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& is, const char* what) {
    std::array<unsigned char, sizeof(T)> buf{};
    if (!is.read(reinterpret_cast<char*>(buf.data()), sizeof(T)))
        throw Error(ErrorKind::Data, std::string("sweep file truncated while reading ") + what);
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    if constexpr (std::is_same_v<T, double>)
        return std::bit_cast<double>(bits);
    else
        return static_cast<T>(bits);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, bool& ok) {
    const std::string t = trim(text);
    ok = true;
    if (t == "inf" || t == "+inf")
        return std::numeric_limits<double>::infinity();
    if (t == "-inf")
        return -std::numeric_limits<double>::infinity();
    try {
        std::size_t pos = 0;
        const double v = std::stod(t, &pos);
        if (pos != t.size())
            ok = false;
        return v;
    } catch (const std::exception&) {
        ok = false;
        return 0.0;
    }
}

}  // namespace

void write_sweeps(std::ostream& os, const SweepFile& file) {
    const std::size_t n = file.sweeps.empty() ? file.radar.n_samples : file.sweeps.front().size();
    for (const auto& s : file.sweeps)
        if (s.size() != n)
            throw Error(ErrorKind::InvalidArgument, "sweep file: ragged sweeps");
    os.write("FMCW", 4);
    put_le<std::uint32_t>(os, kSweepFileVersion);
    put_le<std::uint64_t>(os, file.sweeps.size());
    put_le<std::uint64_t>(os, n);
    put_le(os, file.radar.sample_rate);
    put_le(os, file.radar.sweep_time);
    put_le(os, file.radar.f0);
    put_le(os, file.radar.bandwidth);
    for (const auto& s : file.sweeps)
        for (const auto& v : s.samples) {
            put_le(os, v.real());
            put_le(os, v.imag());
        }
    if (!os)
        throw Error(ErrorKind::Data, "sweep file: write failed");
}

SweepFile read_sweeps(std::istream& is) {
    char magic[4] = {};
    if (!is.read(magic, 4) || std::memcmp(magic, "FMCW", 4) != 0)
        throw Error(ErrorKind::Data, "sweep file: bad magic");
    const auto version = get_le<std::uint32_t>(is, "version");
    if (version != kSweepFileVersion)
        throw Error(ErrorKind::Data, "sweep file: unsupported version " + std::to_string(version));
    const auto n_sweeps = get_le<std::uint64_t>(is, "n_sweeps");
    const auto n_samples = get_le<std::uint64_t>(is, "n_samples");
    SweepFile f;
    f.radar.sample_rate = get_le<double>(is, "sample_rate_hz");
    f.radar.sweep_time = get_le<double>(is, "sweep_time_s");
    f.radar.f0 = get_le<double>(is, "f0_hz");
    f.radar.bandwidth = get_le<double>(is, "bandwidth_hz");
    f.radar.n_samples = n_samples;
    if (!(f.radar.sample_rate > 0.0))
        throw Error(ErrorKind::Data, "sweep file: sample rate must be positive");
    const double dt = 1.0 / f.radar.sample_rate;
    f.sweeps.reserve(n_sweeps);
    for (std::uint64_t m = 0; m < n_sweeps; ++m) {
        std::vector<cdouble> s(n_samples);
        for (auto& v : s) {
            const double re = get_le<double>(is, "samples");
            const double im = get_le<double>(is, "samples");
            v = {re, im};
        }
        f.sweeps.emplace_back(std::move(s), dt);
    }
    return f;
}

void write_sweep_file(const std::filesystem::path& path, const SweepFile& file) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw Error(ErrorKind::Data, "cannot open " + path.string() + " for writing");
    write_sweeps(os, file);
}

SweepFile read_sweep_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Error(ErrorKind::Data, "cannot open " + path.string());
    return read_sweeps(is);
}

Config Config::parse(std::istream& is, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        const std::string text = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (text.empty())
            continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                throw Error(ErrorKind::Config,
                            origin + ":" + std::to_string(lineno) + ": unterminated section header");
            section = trim(text.substr(1, text.size() - 2));
            cfg.sections_.insert(section);
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::Config,
                        origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(text.substr(0, eq));
        if (key.empty())
            throw Error(ErrorKind::Config, origin + ":" + std::to_string(lineno) + ": empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (cfg.entries_.count(full))
            throw Error(ErrorKind::Config,
                        origin + ":" + std::to_string(lineno) + ": duplicate key '" + full + "'");
        cfg.entries_[full] = {trim(text.substr(eq + 1)), lineno};
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is)
        throw Error(ErrorKind::Config, "cannot open config " + path.string());
    return parse(is, path.string());
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

bool Config::has_section(const std::string& section) const { return sections_.count(section) > 0; }

void Config::fail(const std::string& key, const std::string& msg) const {
    auto it = entries_.find(key);
    std::string where = origin_;
    if (it != entries_.end())
        where += ":" + std::to_string(it->second.line);
    throw Error(ErrorKind::Config, where + ": field '" + key + "': " + msg);
}

const Config::Entry& Config::entry(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end())
        throw Error(ErrorKind::Config, origin_ + ": missing required field '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string& key) const { return entry(key).value; }

double Config::get_double(const std::string& key) const {
    bool ok = false;
    const double v = parse_double(entry(key).value, ok);
    if (!ok)
        fail(key, "expected a number, got '" + entry(key).value + "'");
    return v;
}

std::uint64_t Config::get_u64(const std::string& key) const {
    const std::string& t = entry(key).value;
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
        fail(key, "expected a non-negative integer, got '" + t + "'");
    try {
        return std::stoull(t);
    } catch (const std::exception&) {
        fail(key, "integer out of range");
    }
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(entry(key).value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        bool ok = false;
        const double v = parse_double(item, ok);
        if (!ok)
            fail(key, "bad list element '" + trim(item) + "'");
        out.push_back(v);
    }
    if (out.empty())
        fail(key, "empty list");
    return out;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
}

void Config::reject_unknown(const std::set<std::string>& known) const {
    for (const auto& [key, e] : entries_)
        if (!known.count(key))
            throw Error(ErrorKind::Config,
                        origin_ + ":" + std::to_string(e.line) + ": unknown field '" + key + "'");
}

ScenarioConfig scenario_from_config(const Config& cfg) {
    ScenarioConfig sc;
    try {
        sc.radar = RadarParams::make(cfg.get_double("radar.f0_hz"), cfg.get_double("radar.bandwidth_hz"),
                                     cfg.get_double("radar.sweep_time_s"),
                                     cfg.get_double("radar.sample_rate_hz"));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config)
            throw;
        throw Error(ErrorKind::Config, cfg.origin() + ": [radar]: " + e.what());
    }

    if (cfg.has("targets.range_m")) {
        const auto ranges = cfg.get_doubles("targets.range_m");
        const auto amps = cfg.has("targets.amplitude") ? cfg.get_doubles("targets.amplitude")
                                                       : std::vector<double>(ranges.size(), 1.0);
        const auto phases = cfg.has("targets.phase_rad") ? cfg.get_doubles("targets.phase_rad")
                                                         : std::vector<double>(ranges.size(), 0.0);
        const auto vels = cfg.has("targets.velocity_mps") ? cfg.get_doubles("targets.velocity_mps")
                                                          : std::vector<double>(ranges.size(), 0.0);
        if (amps.size() != ranges.size() || phases.size() != ranges.size() ||
            vels.size() != ranges.size())
            throw Error(ErrorKind::Config,
                        cfg.origin() + ": [targets]: list lengths differ from range_m");
        for (std::size_t i = 0; i < ranges.size(); ++i)
            sc.targets.push_back({ranges[i], std::polar(amps[i], phases[i]), vels[i]});
    }

    if (cfg.has_section("extended")) {
        ExtendedTargetSpec ext;
        ext.count = cfg.get_u64("extended.count", ext.count);
        ext.range_start = cfg.get_double("extended.range_start_m", ext.range_start);
        ext.range_end = cfg.get_double("extended.range_end_m", ext.range_end);
        ext.max_amplitude = cfg.get_double("extended.max_amplitude", ext.max_amplitude);
        sc.extended = ext;
    }
    if (sc.targets.empty() && !sc.extended)
        throw Error(ErrorKind::Config, cfg.origin() + ": no targets: need [targets] or [extended]");

    if (cfg.has_section("interference")) {
        InterferenceParams intf;
        intf.bandwidth = cfg.get_double("interference.bandwidth_hz");
        intf.sweep_time = cfg.get_double("interference.sweep_time_s", sc.radar.sweep_time);
        if (cfg.has("interference.f_start_hz"))
            intf.f_start = cfg.get_double("interference.f_start_hz");
        else
            intf.f_start = cfg.get_double("interference.centre_hz") - intf.bandwidth / 2.0;
        intf.delay = cfg.get_double("interference.delay_s", 0.0);
        intf.amplitude = std::polar(cfg.get_double("interference.amplitude", 1.0),
                                    cfg.get_double("interference.phase_rad", 0.0));
        const std::string sir = cfg.get_string("interference.sir_db", "");
        if (sir == "none")
            sc.sir_db.reset();
        else if (!sir.empty())
            sc.sir_db = cfg.get_double("interference.sir_db");
        if (cfg.has("interference.lowpass_hz") && cfg.has("interference.duration_fraction"))
            throw Error(ErrorKind::Config, cfg.origin() +
                                               ": [interference]: give lowpass_hz or "
                                               "duration_fraction, not both");
        if (cfg.has("interference.duration_fraction"))
            sc.lowpass_hz = lowpass_for_duration(sc.radar, intf,
                                                 cfg.get_double("interference.duration_fraction"));
        else
            sc.lowpass_hz = cfg.get_double("interference.lowpass_hz", 0.0);
        sc.interference = intf;
    }

    sc.snr_db = cfg.get_double("simulation.snr_db", kNoNoise);
    sc.seed = cfg.get_u64("simulation.seed", sc.seed);
    sc.guard = cfg.get_u64("simulation.guard", sc.guard);
    sc.n_sweeps = cfg.get_u64("simulation.n_sweeps", sc.n_sweeps);
    if (sc.n_sweeps == 0)
        throw Error(ErrorKind::Config, cfg.origin() + ": field 'simulation.n_sweeps' must be >= 1");
    return sc;
}

MitigateConfig mitigation_from_config(const Config& cfg) {
    MitigateConfig mc;
    try {
        mc.method = method_from_string(cfg.get_string("mitigation.method", "mp"));
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, cfg.origin() + ": field 'mitigation.method': " + e.what());
    }
    mc.mp.order = cfg.get_u64("mitigation.order", 0);
    mc.mp.L = cfg.get_u64("mitigation.L", 0);
    mc.mp.sv_threshold = cfg.get_double("mitigation.sv_threshold", mc.mp.sv_threshold);
    mc.mp.max_iter = cfg.get_u64("mitigation.max_iter", mc.mp.max_iter);
    mc.mp.clamp_delta = cfg.get_double("mitigation.clamp_delta", mc.mp.clamp_delta);
    mc.mp.contiguous_L = cfg.get_u64("mitigation.contiguous_L", 0);
    mc.burg_order = cfg.get_u64("mitigation.burg_order", 0);
    return mc;
}

StudyConfig study_from_config(const Config& cfg) {
    StudyConfig st;
    st.base = scenario_from_config(cfg);
    if (cfg.has("study.snr_db"))
        st.snr_db = cfg.get_doubles("study.snr_db");
    if (cfg.has("study.gap_pct"))
        st.gap_pct = cfg.get_doubles("study.gap_pct");
    st.trials = cfg.get_u64("study.trials", st.trials);
    st.seed = cfg.get_u64("study.seed", st.base.seed);
    st.workers = cfg.get_u64("study.workers", st.workers);
    const MitigateConfig mc = mitigation_from_config(cfg);
    st.mp = mc.mp;
    if (st.mp.order == 0 && !cfg.has("mitigation.order"))
        st.mp.order = 3;
    st.burg_order = mc.burg_order ? mc.burg_order : st.mp.order;
    if (st.trials == 0)
        throw Error(ErrorKind::Config, cfg.origin() + ": field 'study.trials' must be >= 1");
    return st;
}

}  // namespace fmcw
