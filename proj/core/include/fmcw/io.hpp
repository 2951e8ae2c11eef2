#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "fmcw/metrics.hpp"
#include "fmcw/mitigate.hpp"
#include "fmcw/sigmodel.hpp"
#include "fmcw/synth.hpp"

namespace fmcw {

// Sweep file, little-endian:
//   "FMCW" | u32 version=1 | u64 n_sweeps | u64 n_samples |
//   f64 sample_rate_hz | f64 sweep_time_s | f64 f0_hz | f64 bandwidth_hz |
//   n_sweeps * n_samples * (f64 I, f64 Q), sweep-major.
inline constexpr std::uint32_t kSweepFileVersion = 1;

struct SweepFile {
    RadarParams radar;
    std::vector<ComplexSeries> sweeps;
};

void write_sweeps(std::ostream& os, const SweepFile& file);
SweepFile read_sweeps(std::istream& is);
void write_sweep_file(const std::filesystem::path& path, const SweepFile& file);
SweepFile read_sweep_file(const std::filesystem::path& path);

/// Flat key=value text with [section] headers; '#' and ';' start comments.
/// Keys are addressed as "section.key" (keys before any header have no prefix).
class Config {
public:
    static Config parse(std::istream& is, const std::string& origin = "<config>");
    static Config load(const std::filesystem::path& path);

    bool has(const std::string& key) const;
    bool has_section(const std::string& section) const;

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

    /// Throws Config error naming the first key not in `known`.
    void reject_unknown(const std::set<std::string>& known) const;

    const std::string& origin() const noexcept { return origin_; }

private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    const Entry& entry(const std::string& key) const;
    [[noreturn]] void fail(const std::string& key, const std::string& msg) const;

    std::string origin_;
    std::map<std::string, Entry> entries_;
    std::set<std::string> sections_;
};

/// [radar], [targets], [extended], [interference], [simulation].
ScenarioConfig scenario_from_config(const Config& cfg);

/// [mitigation] section; missing keys keep defaults.
MitigateConfig mitigation_from_config(const Config& cfg);

/// Scenario sections plus [study] and [mitigation].
StudyConfig study_from_config(const Config& cfg);

}  // namespace fmcw
