#include "hom/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <variant>

#include "hom/error.hpp"

namespace hom {
namespace {

using FieldPtr = std::variant<double*, std::uint64_t*, unsigned*, bool*, std::vector<double>*,
                              std::filesystem::path*>;

struct Field {
    const char* key;
    FieldPtr ptr;
};

std::vector<Field> fields(RunConfig& c)
{
    ExperimentConfig& e = c.experiment;
    return {
        {"n_triggers", &e.n_triggers},
        {"trigger_period", &e.trigger_period},
        {"eta_f", &e.eta_f},
        {"eta_s", &e.eta_s},
        {"tau_f", &e.tau_f},
        {"tau_s", &e.tau_s},
        {"delta_t", &e.delta_t},
        {"excitation_jitter_sigma", &e.excitation_jitter_sigma},
        {"detuning", &e.detuning},
        {"xi", &e.xi},
        {"bg_rate_a", &e.bg_rate_a},
        {"bg_rate_b", &e.bg_rate_b},
        {"window_length", &e.window_length},
        {"timestamp_resolution", &e.timestamp_resolution},
        {"offset_a", &e.offset_a},
        {"offset_b", &e.offset_b},
        {"seed", &e.seed},
        {"bin_width", &c.bin_width},
        {"valid_window", &c.valid_window},
        {"hist_range", &c.hist_range},
        {"t_c_raw", &c.t_c_raw},
        {"t_c_corrected", &c.t_c_corrected},
        {"t_c_dip", &c.t_c_dip},
        {"wing_lo", &c.wing_lo},
        {"wing_hi", &c.wing_hi},
        {"dip_wing_lo", &c.dip_wing_lo},
        {"dip_wing_hi", &c.dip_wing_hi},
        {"correct_accidentals", &c.correct_accidentals},
        {"delta_t_list", &c.delta_t_list},
        {"dt_min", &c.dt_min},
        {"dt_max", &c.dt_max},
        {"dt_step", &c.dt_step},
        {"scan_min", &c.scan_min},
        {"scan_max", &c.scan_max},
        {"scan_step", &c.scan_step},
        {"out_dir", &c.out_dir},
        {"threads", &c.threads},
    };
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::size_t line,
                            std::string_view expected)
{
    throw ConfigError("line " + std::to_string(line) + ": " + std::string(key) + ": expected " +
                      std::string(expected) + ", got '" + std::string(value) + "'");
}

template <class T>
bool parse_number(std::string_view text, T& out)
{
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    if constexpr (std::is_floating_point_v<T>) {
        if (ec == std::errc() && !std::isfinite(out)) return false;
    }
    return ec == std::errc() && ptr == end && !text.empty();
}

void assign(const Field& f, std::string_view value, std::size_t line)
{
    std::visit(
        [&](auto* p) {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, double>) {
                if (!parse_number(value, *p)) bad_value(f.key, value, line, "a number");
            } else if constexpr (std::is_same_v<T, std::uint64_t> || std::is_same_v<T, unsigned>) {
                if (!parse_number(value, *p)) bad_value(f.key, value, line, "a non-negative integer");
            } else if constexpr (std::is_same_v<T, bool>) {
                if (value == "true" || value == "1") *p = true;
                else if (value == "false" || value == "0") *p = false;
                else bad_value(f.key, value, line, "true or false");
            } else if constexpr (std::is_same_v<T, std::vector<double>>) {
                p->clear();
                std::string_view rest = value;
                while (!rest.empty()) {
                    const auto comma = rest.find(',');
                    const auto item = trim(rest.substr(0, comma));
                    double x = 0.0;
                    if (!parse_number(item, x)) bad_value(f.key, value, line, "a comma-separated list of numbers");
                    p->push_back(x);
                    if (comma == std::string_view::npos) break;
                    rest = rest.substr(comma + 1);
                    if (trim(rest).empty()) bad_value(f.key, value, line, "a comma-separated list of numbers");
                }
            } else {
                if (value.empty()) bad_value(f.key, value, line, "a path");
                *p = std::filesystem::path(std::string(value));
            }
        },
        f.ptr);
}

std::string format_value(const FieldPtr& ptr)
{
    return std::visit(
        [](auto* p) -> std::string {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, double>) {
                char buf[32];
                auto [end, ec] = std::to_chars(buf, buf + sizeof buf, *p);
                return std::string(buf, end);
            } else if constexpr (std::is_same_v<T, std::uint64_t> || std::is_same_v<T, unsigned>) {
                return std::to_string(*p);
            } else if constexpr (std::is_same_v<T, bool>) {
                return *p ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::vector<double>>) {
                std::string s;
                for (double x : *p) {
                    char buf[32];
                    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
                    if (!s.empty()) s += ", ";
                    s.append(buf, end);
                }
                return s;
            } else {
                return p->string();
            }
        },
        ptr);
}

void check(bool ok, const char* key, const char* rule)
{
    if (!ok) throw ConfigError(std::string(key) + ": " + rule);
}

}  // namespace

void RunConfig::require(std::initializer_list<std::string_view> keys) const
{
    for (auto key : keys) {
        if (!has(key)) throw ConfigError("missing required key '" + std::string(key) + "'");
    }
}

void RunConfig::validate() const
{
    experiment.validate();
    check(bin_width > 0.0, "bin_width", "must be positive");
    check(valid_window >= 0.0, "valid_window", "must be >= 0");
    check(hist_range >= bin_width, "hist_range", "must be at least bin_width");
    check(t_c_raw > 0.0, "t_c_raw", "must be positive");
    check(t_c_corrected > 0.0, "t_c_corrected", "must be positive");
    check(t_c_dip > 0.0, "t_c_dip", "must be positive");
    check(wing_lo >= 0.0 && wing_hi >= wing_lo, "wing_hi", "wing region must satisfy 0 <= wing_lo <= wing_hi");
    check(dip_wing_lo >= 0.0 && dip_wing_hi >= dip_wing_lo, "dip_wing_hi",
          "wing region must satisfy 0 <= dip_wing_lo <= dip_wing_hi");
    check(dt_step > 0.0, "dt_step", "must be positive");
    check(dt_max >= dt_min, "dt_max", "must be >= dt_min");
    check(scan_step > 0.0, "scan_step", "must be positive");
    check(scan_max >= scan_min, "scan_max", "must be >= scan_min");
    check((dt_max - dt_min) / dt_step < 1e7, "dt_step", "grid has more than 10^7 points");
    check((scan_max - scan_min) / scan_step < 1e7, "scan_step", "grid has more than 10^7 points");
}

RunConfig parse_run_config(std::istream& is)
{
    RunConfig config;
    const auto table = fields(config);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string_view text = raw;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        text = trim(text);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
        }
        const std::string key(trim(text.substr(0, eq)));
        const auto value = trim(text.substr(eq + 1));
        const Field* field = nullptr;
        for (const auto& f : table) {
            if (key == f.key) field = &f;
        }
        if (!field) throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
        if (!config.present.insert(key).second) {
            throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
        }
        assign(*field, value, line);
    }
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    return parse_run_config(in);
}

const std::vector<std::string>& run_config_keys()
{
    static const std::vector<std::string> keys = [] {
        RunConfig c;
        std::vector<std::string> out;
        for (const auto& f : fields(c)) out.emplace_back(f.key);
        return out;
    }();
    return keys;
}

std::string run_config_text(const RunConfig& config)
{
    RunConfig copy = config;
    std::ostringstream os;
    for (const auto& f : fields(copy)) os << f.key << " = " << format_value(f.ptr) << '\n';
    return os.str();
}

}  // namespace hom
