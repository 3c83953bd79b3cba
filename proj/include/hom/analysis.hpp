#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hom/interference.hpp"
#include "hom/montecarlo.hpp"

namespace hom {

struct PairingOptions {
    double resolution_ps = 125.0;
    double valid_window = 85.0;  // ns after the trigger
    double offset_a = 0.0;       // ns subtracted from every A click
    double offset_b = 0.0;
    bool keep_sequences = true;  // fill PairedEvents::sequences
};

/// Clicks belonging to one trigger: the ones closer to it than to any
/// other trigger.
struct TriggerSequence {
    std::int64_t trigger = 0;
    std::optional<std::int64_t> first_a;
    std::optional<std::int64_t> first_b;
    std::uint32_t clicks_a = 0;
    std::uint32_t clicks_b = 0;
    bool valid = false;  // an A or B click within valid_window after the trigger
};

struct PairedEvents {
    std::vector<TriggerSequence> sequences;
    std::vector<double> delta_t;  // t_a - t_b in ns, earliest click on each side
    std::uint64_t n_triggers = 0;
    std::uint64_t n_valid = 0;
};

/// Single pass over a time-sorted record stream (std::invalid_argument if
/// it is not sorted). N_t counts every trigger, valid or not.
PairedEvents pair_events(std::span<const DetectionRecord> records, const PairingOptions& options = {});

/// G(dt) = N_ab(dt) / N_t in bins centred on dt = 0: bin k covers
/// [(k - 1/2) w, (k + 1/2) w).
struct CoincidenceHistogram {
    double bin_width = 10.0;
    std::vector<double> bin_centers;
    std::vector<std::uint64_t> counts;
    std::uint64_t n_triggers = 0;
    std::vector<double> values;

    std::size_t size() const noexcept { return counts.size(); }
};

/// Bins every dt with |bin centre| <= half_range; the rest are dropped.
CoincidenceHistogram histogram(std::span<const double> delta_t, std::uint64_t n_triggers,
                               double bin_width = 10.0, double half_range = 300.0);

struct AccidentalFloor {
    double value = 0.0;  // G per bin
    double sigma = 0.0;
    std::size_t n_bins = 0;
};

/// Mean of G over the wing bins, those with wing_lo <= |centre| <= wing_hi.
AccidentalFloor estimate_accidentals(const CoincidenceHistogram& h, double wing_lo = 100.0,
                                     double wing_hi = 200.0);

struct VisibilityResult {
    double v = 0.0;
    double sigma_v = 0.0;
    double t_c = 0.0;  // half-width of the window, ns
    double g_acc = 0.0;
    double g_acc_par = 0.0;
    double g_acc_perp = 0.0;
};

struct AccidentalCorrection {
    AccidentalFloor par;
    AccidentalFloor perp;
};

/// V = 1 - sum(G_par - g_par) / sum(G_perp - g_perp) over the bins with
/// |centre| <= t_c. The error propagates Poisson counts and the floor
/// uncertainties. Throws StatisticsError when the perpendicular sum is not
/// positive.
VisibilityResult visibility(const CoincidenceHistogram& h_par, const CoincidenceHistogram& h_perp,
                            double t_c, const AccidentalCorrection& correction = {});

// Same floor subtracted from both histograms.
VisibilityResult visibility(const CoincidenceHistogram& h_par, const CoincidenceHistogram& h_perp,
                            double t_c, double g_acc);

struct DipRun {
    double delta_t = 0.0;
    CoincidenceHistogram par;
    CoincidenceHistogram perp;
};

struct DipPoint {
    double delta_t = 0.0;
    double ratio = 0.0;  // P_par / P_perp = 1 - V
    double sigma = 0.0;
};

struct DipOptions {
    double t_c = 150.0;              // |dt| <= t_c
    bool correct_accidentals = true;
    double wing_lo = 200.0;
    double wing_hi = 300.0;
};

std::vector<DipPoint> dip_curve(std::span<const DipRun> runs, const DipOptions& options = {});

struct DataPoint {
    double x = 0.0;
    double y = 0.0;
};

struct ScaleFit {
    double scale = 0.0;   // A
    double offset = 0.0;  // G_acc, 0 unless fitted
};

/// Least squares y ~ A model(x), or y ~ offset + A model(x) when
/// with_offset. Throws ConfigError for fewer than two points or a model
/// that cannot determine the parameters.
ScaleFit fit_scale(const std::function<double(double)>& model, std::span<const DataPoint> data,
                   bool with_offset = false);

/// Expected G per trigger in each bin of h for one two-photon event per
/// trigger: the closed-form density averaged over the bin times its width.
std::vector<double> model_histogram(const SourcePair& pair, std::span<const double> bin_centers,
                                    double bin_width);

// "bin_center_ns,counts,value" with a leading "# config_hash: ..." line.
void write_histogram_csv(std::ostream& os, const CoincidenceHistogram& h, const std::string& hash);

}  // namespace hom
