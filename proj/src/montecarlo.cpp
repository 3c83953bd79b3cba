#include "hom/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include <json.hpp>

#include "hom/error.hpp"
#include "hom/interference.hpp"
#include "hom/kernels.hpp"
#include "hom/rng.hpp"

namespace hom {
namespace {

struct Click {
    Detector detector;
    double time;
};

void require(bool ok, const char* field, const std::string& rule)
{
    if (!ok) throw ConfigError(std::string(field) + ": " + rule);
}

int detector_rank(Detector d)
{
    switch (d) {
    case Detector::trigger: return 0;
    case Detector::a: return 1;
    case Detector::b: return 2;
    }
    return 3;
}

// Appends the clicks of trial i. The number and order of random draws for
// the photon part is fixed, so runs that differ only in xi see identical
// emission times.
void run_trial(const ExperimentConfig& c, std::uint64_t i, std::vector<Click>& out)
{
    TrialRng rng(c.seed, i);
    const double trigger = c.trigger_time(i);
    out.push_back({Detector::trigger, trigger});

    const bool fwm_live = rng.uniform() < c.eta_f;
    const bool atom_live = rng.uniform() < c.eta_s;
    const double u_fwm = rng.uniform();
    const double u_atom = rng.uniform();
    const double u_class = rng.uniform();
    const double u_route = rng.uniform();
    const double jitter = rng.normal() * c.excitation_jitter_sigma;

    // trial-relative times; the heralded photon starts at 0
    const Envelope fwm(c.tau_f, 0.0, 0.0);
    const Envelope atom(c.tau_s, -c.delta_t + jitter, c.detuning);
    const double t_fwm = sample_emission_time(fwm, u_fwm);
    const double t_atom = sample_emission_time(atom, u_atom);

    const double cell_lo = trigger - 0.5 * c.trigger_period;
    const double gate_hi = trigger + c.window_length;
    auto emit = [&](Detector d, double rel) {
        const double t = trigger + rel;
        if (t < cell_lo || t >= gate_hi) return;
        out.push_back({d, t + (d == Detector::a ? c.offset_a : c.offset_b)});
    };
    const Detector first = u_route < 0.5 ? Detector::a : Detector::b;
    const Detector second = first == Detector::a ? Detector::b : Detector::a;

    if (fwm_live && atom_live) {
        const auto probs = conditional_outcome_probs(SourcePair(fwm, atom, c.xi), t_fwm, t_atom);
        if (u_class < probs.coincidence) {
            emit(first, t_fwm);
            emit(second, t_atom);
        } else {
            const Detector both =
                u_class < probs.coincidence + probs.bunch_a ? Detector::a : Detector::b;
            emit(both, t_fwm);
            emit(both, t_atom);
        }
    } else if (fwm_live) {
        emit(first, t_fwm);
    } else if (atom_live) {
        emit(first, t_atom);
    }

    const double cell_hi = cell_lo + c.trigger_period;
    for (auto [d, rate] : {std::pair{Detector::a, c.bg_rate_a}, std::pair{Detector::b, c.bg_rate_b}}) {
        if (rate <= 0.0) continue;
        double t = cell_lo;
        while (true) {
            t -= std::log1p(-rng.uniform()) / rate;
            if (t >= cell_hi) break;
            out.push_back({d, t + (d == Detector::a ? c.offset_a : c.offset_b)});
        }
    }
}

std::vector<DetectionRecord> run_range(const ExperimentConfig& c, std::uint64_t first,
                                       std::uint64_t count)
{
    std::vector<Click> clicks;
    clicks.reserve(static_cast<std::size_t>(count) * 2);
    for (std::uint64_t i = first; i < first + count; ++i) run_trial(c, i, clicks);

    std::vector<double> times(clicks.size());
    std::vector<std::int64_t> ticks(clicks.size());
    std::transform(clicks.begin(), clicks.end(), times.begin(), [](const Click& k) { return k.time; });
    kernels::quantize(times, c.timestamp_resolution, ticks);

    std::vector<DetectionRecord> records(clicks.size());
    for (std::size_t k = 0; k < clicks.size(); ++k) records[k] = {clicks[k].detector, ticks[k]};
    std::sort(records.begin(), records.end(), record_less);
    return records;
}

}  // namespace

bool record_less(const DetectionRecord& x, const DetectionRecord& y)
{
    if (x.timestamp != y.timestamp) return x.timestamp < y.timestamp;
    return detector_rank(x.detector) < detector_rank(y.detector);
}

void ExperimentConfig::validate() const
{
    auto probability = [](double p) { return p >= 0.0 && p <= 1.0; };
    auto finite = [](double x) { return std::isfinite(x); };
    require(n_triggers > 0, "n_triggers", "must be positive");
    require(trigger_period > 0.0 && finite(trigger_period), "trigger_period", "must be positive");
    require(probability(eta_f), "eta_f", "must lie in [0, 1]");
    require(probability(eta_s), "eta_s", "must lie in [0, 1]");
    require(tau_f > 0.0 && finite(tau_f), "tau_f", "must be positive");
    require(tau_s > 0.0 && finite(tau_s), "tau_s", "must be positive");
    require(probability(xi), "xi", "must lie in [0, 1]");
    require(bg_rate_a >= 0.0 && finite(bg_rate_a), "bg_rate_a", "must be >= 0");
    require(bg_rate_b >= 0.0 && finite(bg_rate_b), "bg_rate_b", "must be >= 0");
    require(excitation_jitter_sigma >= 0.0 && finite(excitation_jitter_sigma),
            "excitation_jitter_sigma", "must be >= 0");
    require(finite(detuning), "detuning", "must be finite");
    require(timestamp_resolution > 0.0 && finite(timestamp_resolution), "timestamp_resolution",
            "must be positive");
    // trigger cells must not overlap: everything recorded for a trigger
    // stays within half a period of it
    require(window_length > 0.0 && window_length <= 0.5 * trigger_period, "window_length",
            "must lie in (0, trigger_period / 2]");
    require(std::abs(delta_t) < 0.5 * trigger_period, "delta_t",
            "must be smaller in magnitude than trigger_period / 2");
    require(std::abs(offset_a) < 0.5 * trigger_period, "offset_a",
            "must be smaller in magnitude than trigger_period / 2");
    require(std::abs(offset_b) < 0.5 * trigger_period, "offset_b",
            "must be smaller in magnitude than trigger_period / 2");
    // last trigger must stay representable in 2^52 ticks
    require(trigger_time(n_triggers) * 1000.0 / timestamp_resolution < 4.0e15, "n_triggers",
            "run too long for the timestamp range");
}

std::int64_t quantize(double t_ns, double resolution_ps)
{
    std::int64_t out = 0;
    kernels::quantize(std::span<const double>(&t_ns, 1), resolution_ps, std::span<std::int64_t>(&out, 1));
    return out;
}

std::vector<DetectionRecord> simulate(const ExperimentConfig& config, unsigned threads)
{
    return simulate_trials(config, 0, config.n_triggers, threads);
}

std::vector<DetectionRecord> simulate_trials(const ExperimentConfig& config, std::uint64_t first,
                                             std::uint64_t count, unsigned threads)
{
    config.validate();
    if (first + count > config.n_triggers) {
        throw ConfigError("trial range exceeds n_triggers");
    }
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const std::uint64_t workers = std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, count / 1024));

    std::vector<std::vector<DetectionRecord>> parts(workers);
    std::vector<std::thread> pool;
    const std::uint64_t base = count / workers;
    const std::uint64_t extra = count % workers;
    std::uint64_t begin = first;
    for (std::uint64_t w = 0; w < workers; ++w) {
        const std::uint64_t n = base + (w < extra ? 1 : 0);
        if (w + 1 == workers) {
            parts[w] = run_range(config, begin, n);
        } else {
            pool.emplace_back([&, w, begin, n] { parts[w] = run_range(config, begin, n); });
        }
        begin += n;
    }
    for (auto& t : pool) t.join();

    std::vector<DetectionRecord> out;
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    out.reserve(total);
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    // detector offsets can move clicks across part boundaries
    if (!std::is_sorted(out.begin(), out.end(), record_less)) {
        std::sort(out.begin(), out.end(), record_less);
    }
    return out;
}

std::string config_json(const ExperimentConfig& c)
{
    const nlohmann::json j = {
        {"n_triggers", c.n_triggers},
        {"trigger_period", c.trigger_period},
        {"eta_f", c.eta_f},
        {"eta_s", c.eta_s},
        {"tau_f", c.tau_f},
        {"tau_s", c.tau_s},
        {"delta_t", c.delta_t},
        {"excitation_jitter_sigma", c.excitation_jitter_sigma},
        {"detuning", c.detuning},
        {"xi", c.xi},
        {"bg_rate_a", c.bg_rate_a},
        {"bg_rate_b", c.bg_rate_b},
        {"window_length", c.window_length},
        {"timestamp_resolution", c.timestamp_resolution},
        {"offset_a", c.offset_a},
        {"offset_b", c.offset_b},
        {"seed", c.seed},
    };
    return j.dump();
}

std::string config_hash(const ExperimentConfig& config)
{
    return text_hash(config_json(config));
}

std::string text_hash(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace hom
