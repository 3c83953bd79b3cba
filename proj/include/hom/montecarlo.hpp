#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hom {

enum class Detector : char { trigger = 'T', a = 'A', b = 'B' };

struct DetectionRecord {
    Detector detector = Detector::trigger;
    std::int64_t timestamp = 0;  // ticks of the timestamp resolution since run start

    friend bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

// Stream order: by timestamp, then T < A < B.
bool record_less(const DetectionRecord& x, const DetectionRecord& y);

/// One run of the experiment, trigger by trigger.
///
/// Trigger i fires at (i + 1) * trigger_period. The heralded photon starts
/// at the trigger, the atom photon at trigger - delta_t (plus Gaussian
/// jitter), so delta_t is t_f - t_s. Background clicks form a homogeneous
/// Poisson process on every detector. Each trigger owns the interval of
/// one period centred on it; photon clicks later than window_length after
/// the trigger are dropped.
struct ExperimentConfig {
    std::uint64_t n_triggers = 100000;
    double trigger_period = 1000.0;  // ns
    double eta_f = 0.005;            // heralded photon reaches a detector
    double eta_s = 0.005;            // atom photon reaches a detector
    double tau_f = 13.61;            // ns
    double tau_s = 26.18;            // ns
    double delta_t = 0.0;            // ns, t_f - t_s
    double excitation_jitter_sigma = 0.0;  // ns
    double detuning = 0.0;           // MHz, atom photon relative to heralded photon
    double xi = 1.0;
    double bg_rate_a = 0.0;          // clicks per ns
    double bg_rate_b = 0.0;
    double window_length = 400.0;    // ns
    double timestamp_resolution = 125.0;  // ps
    double offset_a = 0.0;           // ns, constant latency added to every A click
    double offset_b = 0.0;
    std::uint64_t seed = 1;

    /// Throws ConfigError naming the offending field.
    void validate() const;

    double trigger_time(std::uint64_t i) const
    {
        return static_cast<double>(i + 1) * trigger_period;
    }
};

/// floor(t_ns * 1000 / resolution_ps). Throws ConfigError for t < 0.
std::int64_t quantize(double t_ns, double resolution_ps);

/// Full run, sorted by record_less. The output does not depend on
/// `threads` (0 = hardware concurrency).
std::vector<DetectionRecord> simulate(const ExperimentConfig& config, unsigned threads = 0);

/// Trials [first, first + count) of the same run, sorted. Concatenating
/// consecutive ranges reproduces simulate().
std::vector<DetectionRecord> simulate_trials(const ExperimentConfig& config, std::uint64_t first,
                                             std::uint64_t count, unsigned threads = 0);

// Canonical JSON text of the configuration.
std::string config_json(const ExperimentConfig& config);

// 16 hex digits of the 64-bit FNV-1a hash of `text`.
std::string text_hash(std::string_view text);

// text_hash(config_json(config))
std::string config_hash(const ExperimentConfig& config);

}  // namespace hom
