#include "hom/event_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "hom/error.hpp"

namespace hom {

void write_events_csv(std::ostream& os, std::span<const DetectionRecord> records)
{
    os << "detector,timestamp\n";
    std::string line;
    char buf[32];
    for (const auto& r : records) {
        line.clear();
        line.push_back(static_cast<char>(r.detector));
        line.push_back(',');
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, r.timestamp);
        line.append(buf, end);
        line.push_back('\n');
        os << line;
    }
}

std::vector<DetectionRecord> read_events_csv(std::istream& is)
{
    std::vector<DetectionRecord> out;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(is, line)) throw FormatError("empty event file", 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "detector,timestamp") {
        throw FormatError("expected header 'detector,timestamp', got '" + line + "'", lineno);
    }
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.size() < 3 || line[1] != ',') {
            throw FormatError("expected 'detector,timestamp', got '" + line + "'", lineno);
        }
        DetectionRecord r;
        switch (line[0]) {
        case 'T': r.detector = Detector::trigger; break;
        case 'A': r.detector = Detector::a; break;
        case 'B': r.detector = Detector::b; break;
        default: throw FormatError(std::string("unknown detector '") + line[0] + "'", lineno);
        }
        const char* first = line.data() + 2;
        const char* last = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(first, last, r.timestamp);
        if (ec != std::errc() || ptr != last || r.timestamp < 0) {
            throw FormatError("bad timestamp '" + line.substr(2) + "'", lineno);
        }
        out.push_back(r);
    }
    return out;
}

void write_sidecar(std::ostream& os, const ExperimentConfig& config, std::uint64_t n_records)
{
    nlohmann::json j;
    j["format"] = "hom-events/1";
    j["timestamp_resolution_ps"] = config.timestamp_resolution;
    j["config"] = nlohmann::json::parse(config_json(config));
    j["config_hash"] = config_hash(config);
    j["n_records"] = n_records;
    os << j.dump(2) << '\n';
}

EventSidecar read_sidecar(std::istream& is)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
        EventSidecar s;
        const auto& c = j.at("config");
        ExperimentConfig& e = s.config;
        e.n_triggers = c.at("n_triggers").get<std::uint64_t>();
        e.trigger_period = c.at("trigger_period").get<double>();
        e.eta_f = c.at("eta_f").get<double>();
        e.eta_s = c.at("eta_s").get<double>();
        e.tau_f = c.at("tau_f").get<double>();
        e.tau_s = c.at("tau_s").get<double>();
        e.delta_t = c.at("delta_t").get<double>();
        e.excitation_jitter_sigma = c.at("excitation_jitter_sigma").get<double>();
        e.detuning = c.at("detuning").get<double>();
        e.xi = c.at("xi").get<double>();
        e.bg_rate_a = c.at("bg_rate_a").get<double>();
        e.bg_rate_b = c.at("bg_rate_b").get<double>();
        e.window_length = c.at("window_length").get<double>();
        e.timestamp_resolution = c.at("timestamp_resolution").get<double>();
        e.offset_a = c.at("offset_a").get<double>();
        e.offset_b = c.at("offset_b").get<double>();
        e.seed = c.at("seed").get<std::uint64_t>();
        s.config_hash = j.at("config_hash").get<std::string>();
        s.n_records = j.at("n_records").get<std::uint64_t>();
        if (s.config_hash != config_hash(s.config)) {
            throw FormatError("sidecar config_hash " + s.config_hash + " does not match its config");
        }
        return s;
    } catch (const nlohmann::json::exception& ex) {
        throw FormatError(std::string("bad sidecar: ") + ex.what());
    }
}

std::filesystem::path sidecar_path(const std::filesystem::path& events_csv)
{
    auto p = events_csv;
    p.replace_extension(".json");
    return p;
}

}  // namespace hom
