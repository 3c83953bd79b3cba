#include "hom/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "hom/error.hpp"
#include "hom/kernels.hpp"

namespace hom {
namespace {

constexpr std::int64_t kNone = std::numeric_limits<std::int64_t>::max();

std::vector<std::size_t> window_bins(const CoincidenceHistogram& h, double t_c)
{
    std::vector<std::size_t> bins;
    const double limit = t_c + 1e-9 * h.bin_width;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (std::abs(h.bin_centers[i]) <= limit) bins.push_back(i);
    }
    if (bins.empty()) throw ConfigError("coincidence window contains no bins");
    return bins;
}

void require_same_binning(const CoincidenceHistogram& x, const CoincidenceHistogram& y)
{
    if (x.bin_width != y.bin_width || x.bin_centers != y.bin_centers) {
        throw ConfigError("histograms have different binning");
    }
}

struct WindowSum {
    double value = 0.0;
    double variance = 0.0;
};

WindowSum window_sum(const CoincidenceHistogram& h, std::span<const std::size_t> bins)
{
    WindowSum s;
    const double n = static_cast<double>(h.n_triggers);
    for (std::size_t i : bins) {
        s.value += h.values[i];
        s.variance += static_cast<double>(h.counts[i]) / (n * n);
    }
    return s;
}

std::string format_double(double x)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

}  // namespace

PairedEvents pair_events(std::span<const DetectionRecord> records, const PairingOptions& options)
{
    if (!(options.resolution_ps > 0.0)) throw ConfigError("resolution must be positive");
    if (!(options.valid_window >= 0.0)) throw ConfigError("valid_window must be >= 0");
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].timestamp < records[i - 1].timestamp) {
            throw std::invalid_argument("record stream not sorted by timestamp at index " +
                                        std::to_string(i));
        }
    }

    const double ticks_per_ns = 1000.0 / options.resolution_ps;
    const auto valid_ticks = static_cast<std::int64_t>(std::floor(options.valid_window * ticks_per_ns));
    const auto shift_a = static_cast<std::int64_t>(std::llround(options.offset_a * ticks_per_ns));
    const auto shift_b = static_cast<std::int64_t>(std::llround(options.offset_b * ticks_per_ns));

    std::vector<std::int64_t> triggers;
    for (const auto& r : records) {
        if (r.detector == Detector::trigger) triggers.push_back(r.timestamp);
    }
    PairedEvents out;
    out.n_triggers = triggers.size();
    if (triggers.empty()) return out;

    // cell i is [edges[i], edges[i + 1])
    const std::size_t m = triggers.size();
    std::vector<std::int64_t> edges(m + 1);
    for (std::size_t i = 1; i < m; ++i) {
        edges[i] = triggers[i - 1] + (triggers[i] - triggers[i - 1]) / 2;
    }
    if (m == 1) {
        edges[0] = std::numeric_limits<std::int64_t>::min();
        edges[1] = std::numeric_limits<std::int64_t>::max();
    } else {
        edges[0] = triggers[0] - (triggers[1] - triggers[0]) / 2;
        edges[m] = triggers[m - 1] + (triggers[m - 1] - triggers[m - 2]) / 2;
    }

    std::vector<std::int64_t> first_a(m, kNone), first_b(m, kNone);
    std::vector<std::uint32_t> clicks_a(m, 0), clicks_b(m, 0);
    std::vector<char> valid(m, 0);
    for (const auto& r : records) {
        if (r.detector == Detector::trigger) continue;
        const bool is_a = r.detector == Detector::a;
        const std::int64_t t = r.timestamp - (is_a ? shift_a : shift_b);
        const auto it = std::upper_bound(edges.begin(), edges.end(), t);
        if (it == edges.begin() || it == edges.end()) continue;
        const auto cell = static_cast<std::size_t>(it - edges.begin()) - 1;
        auto& first = is_a ? first_a[cell] : first_b[cell];
        first = std::min(first, t);
        ++(is_a ? clicks_a[cell] : clicks_b[cell]);
        const std::int64_t since = t - triggers[cell];
        if (since >= 0 && since <= valid_ticks) valid[cell] = 1;
    }

    const double ns_per_tick = options.resolution_ps / 1000.0;
    if (options.keep_sequences) out.sequences.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (options.keep_sequences) {
            auto& s = out.sequences[i];
            s.trigger = triggers[i];
            if (first_a[i] != kNone) s.first_a = first_a[i];
            if (first_b[i] != kNone) s.first_b = first_b[i];
            s.clicks_a = clicks_a[i];
            s.clicks_b = clicks_b[i];
            s.valid = valid[i] != 0;
        }
        if (!valid[i]) continue;
        ++out.n_valid;
        if (first_a[i] != kNone && first_b[i] != kNone) {
            out.delta_t.push_back(static_cast<double>(first_a[i] - first_b[i]) * ns_per_tick);
        }
    }
    return out;
}

CoincidenceHistogram histogram(std::span<const double> delta_t, std::uint64_t n_triggers,
                               double bin_width, double half_range)
{
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) throw ConfigError("bin_width must be positive");
    if (!(half_range > 0.0) || !std::isfinite(half_range)) throw ConfigError("histogram range is empty");
    if (n_triggers == 0) throw ConfigError("histogram needs n_triggers > 0");

    const auto half_bins = static_cast<std::int64_t>(std::floor(half_range / bin_width + 1e-9));
    const auto n_bins = static_cast<std::size_t>(2 * half_bins + 1);
    CoincidenceHistogram h;
    h.bin_width = bin_width;
    h.n_triggers = n_triggers;
    h.counts.assign(n_bins, 0);
    h.bin_centers.resize(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) {
        h.bin_centers[i] = static_cast<double>(static_cast<std::int64_t>(i) - half_bins) * bin_width;
    }

    std::vector<std::int64_t> index(delta_t.size());
    const double lo = -(static_cast<double>(half_bins) + 0.5) * bin_width;
    kernels::bin_index(delta_t, lo, bin_width, index);
    for (std::int64_t k : index) {
        if (k >= 0 && k < static_cast<std::int64_t>(n_bins)) ++h.counts[static_cast<std::size_t>(k)];
    }

    h.values.resize(n_bins);
    const double n = static_cast<double>(n_triggers);
    for (std::size_t i = 0; i < n_bins; ++i) h.values[i] = static_cast<double>(h.counts[i]) / n;
    return h;
}

AccidentalFloor estimate_accidentals(const CoincidenceHistogram& h, double wing_lo, double wing_hi)
{
    AccidentalFloor f;
    double sum = 0.0;
    double count_sum = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double c = std::abs(h.bin_centers[i]);
        if (c >= wing_lo && c <= wing_hi) {
            sum += h.values[i];
            count_sum += static_cast<double>(h.counts[i]);
            ++f.n_bins;
        }
    }
    if (f.n_bins == 0) {
        throw ConfigError("accidental wing region [" + format_double(wing_lo) + ", " +
                          format_double(wing_hi) + "] ns contains no bins");
    }
    const double m = static_cast<double>(f.n_bins);
    f.value = sum / m;
    f.sigma = std::sqrt(count_sum) / (static_cast<double>(h.n_triggers) * m);
    return f;
}

VisibilityResult visibility(const CoincidenceHistogram& h_par, const CoincidenceHistogram& h_perp,
                            double t_c, const AccidentalCorrection& correction)
{
    require_same_binning(h_par, h_perp);
    const auto bins = window_bins(h_par, t_c);
    const double k = static_cast<double>(bins.size());
    const WindowSum par = window_sum(h_par, bins);
    const WindowSum perp = window_sum(h_perp, bins);

    const double num = par.value - k * correction.par.value;
    const double den = perp.value - k * correction.perp.value;
    if (!(den > 0.0)) {
        throw StatisticsError("no perpendicular coincidences above the accidental floor in the window");
    }
    const double var_num = par.variance + k * k * correction.par.sigma * correction.par.sigma;
    const double var_den = perp.variance + k * k * correction.perp.sigma * correction.perp.sigma;

    VisibilityResult r;
    r.v = 1.0 - num / den;
    r.sigma_v = std::sqrt(var_num / (den * den) + num * num * var_den / (den * den * den * den));
    r.t_c = t_c;
    r.g_acc_par = correction.par.value;
    r.g_acc_perp = correction.perp.value;
    r.g_acc = 0.5 * (r.g_acc_par + r.g_acc_perp);
    return r;
}

VisibilityResult visibility(const CoincidenceHistogram& h_par, const CoincidenceHistogram& h_perp,
                            double t_c, double g_acc)
{
    AccidentalCorrection c;
    c.par.value = g_acc;
    c.perp.value = g_acc;
    return visibility(h_par, h_perp, t_c, c);
}

std::vector<DipPoint> dip_curve(std::span<const DipRun> runs, const DipOptions& options)
{
    std::vector<DipPoint> out;
    out.reserve(runs.size());
    for (const auto& run : runs) {
        if (!out.empty()) require_same_binning(runs.front().par, run.par);
        AccidentalCorrection corr;
        if (options.correct_accidentals) {
            corr.par = estimate_accidentals(run.par, options.wing_lo, options.wing_hi);
            corr.perp = estimate_accidentals(run.perp, options.wing_lo, options.wing_hi);
        }
        const auto v = visibility(run.par, run.perp, options.t_c, corr);
        out.push_back({run.delta_t, 1.0 - v.v, v.sigma_v});
    }
    return out;
}

ScaleFit fit_scale(const std::function<double(double)>& model, std::span<const DataPoint> data,
                   bool with_offset)
{
    if (data.size() < 2) throw ConfigError("fit needs at least two data points");
    std::vector<double> m(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) m[i] = model(data[i].x);

    ScaleFit fit;
    if (!with_offset) {
        double mm = 0.0, my = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            mm += m[i] * m[i];
            my += m[i] * data[i].y;
        }
        if (!(mm > 0.0)) throw ConfigError("degenerate fit: model is zero at every point");
        fit.scale = my / mm;
        return fit;
    }

    const double n = static_cast<double>(data.size());
    double m_mean = 0.0, y_mean = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        m_mean += m[i];
        y_mean += data[i].y;
    }
    m_mean /= n;
    y_mean /= n;
    double smm = 0.0, smy = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        smm += (m[i] - m_mean) * (m[i] - m_mean);
        smy += (m[i] - m_mean) * (data[i].y - y_mean);
        scale = std::max(scale, std::abs(m[i]));
    }
    if (!(smm > 1e-24 * scale * scale * n) || scale == 0.0) {
        throw ConfigError("degenerate fit: model takes the same value at every point");
    }
    fit.scale = smy / smm;
    fit.offset = y_mean - fit.scale * m_mean;
    return fit;
}

std::vector<double> model_histogram(const SourcePair& pair, std::span<const double> bin_centers,
                                    double bin_width)
{
    constexpr std::size_t kSub = 64;
    std::vector<double> grid(bin_centers.size() * kSub);
    for (std::size_t i = 0; i < bin_centers.size(); ++i) {
        const double lo = bin_centers[i] - 0.5 * bin_width;
        for (std::size_t j = 0; j < kSub; ++j) {
            grid[i * kSub + j] = lo + (static_cast<double>(j) + 0.5) * bin_width / kSub;
        }
    }
    std::vector<double> density(grid.size());
    coincidence_density(pair, grid, density);

    std::vector<double> out(bin_centers.size(), 0.0);
    for (std::size_t i = 0; i < bin_centers.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < kSub; ++j) s += density[i * kSub + j];
        out[i] = s * bin_width / kSub;
    }
    return out;
}

void write_histogram_csv(std::ostream& os, const CoincidenceHistogram& h, const std::string& hash)
{
    os << "# config_hash: " << hash << "\n";
    os << "bin_center_ns,counts,value\n";
    for (std::size_t i = 0; i < h.size(); ++i) {
        os << format_double(h.bin_centers[i]) << ',' << h.counts[i] << ',' << format_double(h.values[i])
           << '\n';
    }
}

}  // namespace hom
