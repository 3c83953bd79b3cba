#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hom/montecarlo.hpp"

namespace hom {

/// Everything a CLI run reads from its config file: the experiment plus
/// analysis and oracle settings. Units: ns, MHz, ps.
struct RunConfig {
    ExperimentConfig experiment;

    // analysis
    double bin_width = 10.0;
    double valid_window = 85.0;
    double hist_range = 300.0;
    double t_c_raw = 25.0;
    double t_c_corrected = 75.0;
    double t_c_dip = 150.0;
    double wing_lo = 100.0;
    double wing_hi = 200.0;
    double dip_wing_lo = 200.0;
    double dip_wing_hi = 300.0;
    bool correct_accidentals = true;
    std::vector<double> delta_t_list;

    // oracle grids
    double dt_min = -100.0;
    double dt_max = 100.0;
    double dt_step = 1.0;
    double scan_min = -40.0;
    double scan_max = 40.0;
    double scan_step = 5.0;

    std::filesystem::path out_dir = ".";
    unsigned threads = 0;

    std::set<std::string> present;  // keys given in the file

    bool has(std::string_view key) const { return present.count(std::string(key)) != 0; }
    /// Throws ConfigError naming the first missing key.
    void require(std::initializer_list<std::string_view> keys) const;
    /// Range and consistency checks on every field, ConfigError on failure.
    void validate() const;
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys,
/// duplicates, malformed lines and unparsable values throw ConfigError
/// with the line number.
RunConfig parse_run_config(std::istream& is);
RunConfig load_run_config(const std::filesystem::path& path);

// Every recognised key, in file order.
const std::vector<std::string>& run_config_keys();

// Canonical text of every setting, one "key = value" per line.
std::string run_config_text(const RunConfig& config);

}  // namespace hom
