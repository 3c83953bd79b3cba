#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hom/montecarlo.hpp"

namespace hom {

// CSV with header "detector,timestamp" and one "X,ticks" line per record.
void write_events_csv(std::ostream& os, std::span<const DetectionRecord> records);

/// Parses the CSV written above. Throws FormatError carrying the 1-based
/// line number of the first bad line.
std::vector<DetectionRecord> read_events_csv(std::istream& is);

struct EventSidecar {
    ExperimentConfig config;
    std::string config_hash;
    std::uint64_t n_records = 0;
};

// JSON sidecar next to an event file: resolution, full config and its hash.
void write_sidecar(std::ostream& os, const ExperimentConfig& config, std::uint64_t n_records);
// FormatError when the JSON is malformed or its hash does not match its config.
EventSidecar read_sidecar(std::istream& is);

// "<stem>.json" next to "<stem>.csv".
std::filesystem::path sidecar_path(const std::filesystem::path& events_csv);

}  // namespace hom
