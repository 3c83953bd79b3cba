// hom: analytic oracle, event simulator and coincidence analysis for
// two-source Hong-Ou-Mandel experiments.
//
//   hom oracle   [--config FILE] [--out DIR]
//   hom simulate  --config FILE  [--seed N] [--out DIR]
//   hom analyze   --events FILE  [--reference FILE] [--config FILE] [--out DIR]
//   hom dip       --config FILE  [--seed N] [--out DIR]
//
// Exit status: 0 success, 1 configuration or usage error, 2 malformed
// input data, 3 too few counts for a visibility.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hom/analysis.hpp"
#include "hom/error.hpp"
#include "hom/event_io.hpp"
#include "hom/interference.hpp"
#include "hom/montecarlo.hpp"
#include "hom/run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string events;
    std::string reference;
};

hom::RunConfig load(const Options& o, std::initializer_list<std::string_view> required)
{
    hom::RunConfig rc;
    if (!o.config.empty()) rc = hom::load_run_config(o.config);
    rc.require(required);
    if (o.seed) rc.experiment.seed = *o.seed;
    if (!o.out.empty()) rc.out_dir = o.out;
    rc.validate();
    return rc;
}

std::ofstream open_out(const hom::RunConfig& rc, const std::string& name)
{
    fs::create_directories(rc.out_dir);
    const fs::path path = rc.out_dir / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw hom::ConfigError("cannot write " + path.string());
    return os;
}

std::vector<double> grid(double lo, double hi, double step)
{
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + static_cast<double>(i) * step;
    return out;
}

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

// Perpendicular companion of a run: same settings, xi = 0, next seed.
hom::ExperimentConfig reference_config(hom::ExperimentConfig c)
{
    c.xi = 0.0;
    c.seed += 1;
    return c;
}

hom::CoincidenceHistogram histogram_of(std::span<const hom::DetectionRecord> records,
                                       const hom::RunConfig& rc, double resolution_ps)
{
    hom::PairingOptions p;
    p.resolution_ps = resolution_ps;
    p.valid_window = rc.valid_window;
    p.offset_a = rc.experiment.offset_a;
    p.offset_b = rc.experiment.offset_b;
    p.keep_sequences = false;
    const auto paired = hom::pair_events(records, p);
    return hom::histogram(paired.delta_t, paired.n_triggers, rc.bin_width, rc.hist_range);
}

json to_json(const hom::VisibilityResult& v)
{
    return {{"v", v.v},           {"sigma_v", v.sigma_v},       {"t_c", v.t_c},
            {"g_acc", v.g_acc},   {"g_acc_par", v.g_acc_par},   {"g_acc_perp", v.g_acc_perp}};
}

json dip_table(std::span<const hom::DipPoint> points, const hom::ExperimentConfig& c)
{
    json rows = json::array();
    for (const auto& p : points) {
        const double model = hom::dip_ratio(p.delta_t, c.tau_s, c.tau_f);
        rows.push_back({{"delta_t", p.delta_t},
                        {"ratio", p.ratio},
                        {"sigma", p.sigma},
                        {"model", model},
                        {"pull", p.sigma > 0.0 ? (p.ratio - model) / p.sigma : 0.0}});
    }
    return rows;
}

std::vector<hom::DetectionRecord> read_events(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw hom::ConfigError("cannot read event file " + path.string());
    std::vector<hom::DetectionRecord> records;
    try {
        records = hom::read_events_csv(in);
    } catch (const hom::FormatError& e) {
        throw hom::FormatError(path.string() + ": " + e.what());
    }
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].timestamp < records[i - 1].timestamp) {
            // header is line 1, record i is line i + 2
            throw hom::FormatError(path.string() + ": timestamps out of order", i + 2);
        }
    }
    return records;
}

std::optional<hom::EventSidecar> read_sidecar_if_present(const fs::path& events)
{
    const fs::path path = hom::sidecar_path(events);
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
        return hom::read_sidecar(in);
    } catch (const hom::FormatError& e) {
        throw hom::FormatError(path.string() + ": " + e.what());
    }
}

int cmd_oracle(const Options& o)
{
    const auto rc = load(o, {});
    const auto& c = rc.experiment;
    const std::string hash = hom::text_hash(hom::run_config_text(rc));
    const hom::SourcePair base(hom::Envelope(c.tau_f), hom::Envelope(c.tau_s, 0.0, c.detuning), c.xi);
    const hom::SourcePair par = base.delayed(c.delta_t);
    const hom::SourcePair perp(par.fwm(), par.atom(), 0.0);

    {
        auto os = open_out(rc, "oracle_density.csv");
        os << "# config_hash: " << hash << "\n" << "dt_ns,g_perp,g_par\n";
        for (double dt : grid(rc.dt_min, rc.dt_max, rc.dt_step)) {
            os << num(dt) << ',' << num(hom::coincidence_density(perp, dt)) << ','
               << num(hom::coincidence_density(par, dt)) << '\n';
        }
    }
    const hom::SourcePair base_perp(base.fwm(), base.atom(), 0.0);
    std::size_t rows = 0;
    {
        auto os = open_out(rc, "oracle_dip.csv");
        os << "# config_hash: " << hash << "\n" << "delta_t_ns,dip_ratio,model_ratio\n";
        for (double d : grid(rc.scan_min, rc.scan_max, rc.scan_step)) {
            const double model = hom::coincidence_probability(base, d) / hom::coincidence_probability(base_perp, d);
            os << num(d) << ',' << num(hom::dip_ratio(d, c.tau_s, c.tau_f)) << ',' << num(model) << '\n';
            ++rows;
        }
    }
    const double v = hom::visibility_closed_form(c.tau_s, c.tau_f);
    const double p_par = hom::coincidence_probability(base, c.delta_t);
    const double p_perp = hom::coincidence_probability(base_perp, c.delta_t);
    {
        auto os = open_out(rc, "oracle_summary.csv");
        os << "# config_hash: " << hash << "\n" << "quantity,value\n"
           << "visibility," << num(v) << '\n'
           << "p_perp," << num(p_perp) << '\n'
           << "p_par," << num(p_par) << '\n'
           << "visibility_at_delta_t," << num(1.0 - p_par / p_perp) << '\n';
    }
    std::cout << "visibility " << num(v) << "\n"
              << "wrote oracle_density.csv, oracle_dip.csv (" << rows << " rows), oracle_summary.csv to "
              << rc.out_dir.string() << "\n";
    return 0;
}

int cmd_simulate(const Options& o)
{
    const auto rc = load(o, {"n_triggers"});
    const auto records = hom::simulate(rc.experiment, rc.threads);
    {
        auto os = open_out(rc, "events.csv");
        hom::write_events_csv(os, records);
    }
    {
        auto os = open_out(rc, "events.json");
        hom::write_sidecar(os, rc.experiment, records.size());
    }
    std::cout << records.size() << " records, config_hash " << hom::config_hash(rc.experiment) << ", wrote "
              << (rc.out_dir / "events.csv").string() << "\n";
    return 0;
}

int cmd_analyze(const Options& o)
{
    const auto rc = load(o, {});
    const fs::path events_path = o.events;
    const auto records = read_events(events_path);
    const auto sidecar = read_sidecar_if_present(events_path);
    const double resolution = sidecar ? sidecar->config.timestamp_resolution : rc.experiment.timestamp_resolution;

    std::vector<hom::DetectionRecord> reference;
    std::string reference_hash;
    double reference_resolution = resolution;
    if (!o.reference.empty()) {
        reference = read_events(o.reference);
        if (const auto ref_sidecar = read_sidecar_if_present(o.reference)) {
            reference_hash = ref_sidecar->config_hash;
            reference_resolution = ref_sidecar->config.timestamp_resolution;
        }
    } else if (sidecar) {
        const auto ref_config = reference_config(sidecar->config);
        reference = hom::simulate(ref_config, rc.threads);
        reference_hash = hom::config_hash(ref_config);
    } else {
        throw hom::ConfigError("analyze needs --reference or an events sidecar to regenerate the "
                               "perpendicular reference");
    }

    const auto h_par = histogram_of(records, rc, resolution);
    const auto h_perp = histogram_of(reference, rc, reference_resolution);

    const auto raw = hom::visibility(h_par, h_perp, rc.t_c_raw);
    hom::AccidentalCorrection correction;
    if (rc.correct_accidentals) {
        correction.par = hom::estimate_accidentals(h_par, rc.wing_lo, rc.wing_hi);
        correction.perp = hom::estimate_accidentals(h_perp, rc.wing_lo, rc.wing_hi);
    }
    const auto corrected = hom::visibility(h_par, h_perp, rc.t_c_corrected, correction);

    hom::DipOptions dip_options{rc.t_c_dip, rc.correct_accidentals, rc.dip_wing_lo, rc.dip_wing_hi};
    const hom::DipRun run{sidecar ? sidecar->config.delta_t : rc.experiment.delta_t, h_par, h_perp};
    const auto dip = hom::dip_curve(std::span(&run, 1), dip_options);

    const std::string hash = sidecar ? sidecar->config_hash : hom::text_hash(run_config_text(rc));
    {
        auto os = open_out(rc, "histogram_par.csv");
        hom::write_histogram_csv(os, h_par, hash);
    }
    {
        auto os = open_out(rc, "histogram_perp.csv");
        hom::write_histogram_csv(os, h_perp, reference_hash.empty() ? hash : reference_hash);
    }
    json j = to_json(corrected);
    j["config_hash"] = hash;
    j["reference_config_hash"] = reference_hash;
    j["analysis_config_hash"] = hom::text_hash(hom::run_config_text(rc));
    j["n_triggers"] = h_par.n_triggers;
    j["raw"] = to_json(raw);
    j["dip"] = dip_table(dip, sidecar ? sidecar->config : rc.experiment);
    {
        auto os = open_out(rc, "visibility.json");
        os << j.dump(2) << '\n';
    }
    std::cout << "V_raw = " << num(raw.v) << " +- " << num(raw.sigma_v) << "  (|dt| <= " << num(raw.t_c)
              << " ns)\n"
              << "V     = " << num(corrected.v) << " +- " << num(corrected.sigma_v) << "  (|dt| <= "
              << num(corrected.t_c) << " ns" << (rc.correct_accidentals ? ", accidentals subtracted" : "")
              << ")\n";
    return 0;
}

int cmd_dip(const Options& o)
{
    const auto rc = load(o, {"n_triggers", "delta_t_list"});
    if (rc.delta_t_list.empty()) throw hom::ConfigError("delta_t_list: needs at least one delay");
    std::vector<hom::DipRun> runs;
    for (double d : rc.delta_t_list) {
        hom::ExperimentConfig c = rc.experiment;
        c.delta_t = d;
        const auto par = hom::simulate(c, rc.threads);
        const auto perp = hom::simulate(reference_config(c), rc.threads);
        runs.push_back({d, histogram_of(par, rc, c.timestamp_resolution),
                        histogram_of(perp, rc, c.timestamp_resolution)});
    }
    hom::DipOptions dip_options{rc.t_c_dip, rc.correct_accidentals, rc.dip_wing_lo, rc.dip_wing_hi};
    const auto points = hom::dip_curve(runs, dip_options);
    const json table = dip_table(points, rc.experiment);
    const std::string hash = hom::text_hash(hom::run_config_text(rc));
    {
        auto os = open_out(rc, "dip.csv");
        os << "# config_hash: " << hash << "\n" << "delta_t_ns,ratio,sigma,model,pull\n";
        for (const auto& row : table) {
            os << num(row["delta_t"]) << ',' << num(row["ratio"]) << ',' << num(row["sigma"]) << ','
               << num(row["model"]) << ',' << num(row["pull"]) << '\n';
        }
    }
    {
        auto os = open_out(rc, "dip.json");
        const json j = {{"config_hash", hash}, {"t_c", rc.t_c_dip}, {"dip", table}};
        os << j.dump(2) << '\n';
    }
    std::cout << "delta_t   ratio      sigma      model\n";
    for (const auto& row : table) {
        std::printf("%7.2f   %-9.5f  %-9.5f  %-9.5f\n", row["delta_t"].get<double>(), row["ratio"].get<double>(),
                    row["sigma"].get<double>(), row["model"].get<double>());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hong-Ou-Mandel oracle, simulator and coincidence analysis"};
    app.require_subcommand(1);
    Options o;

    auto* oracle = app.add_subcommand("oracle", "Tabulate the analytic densities, dip and visibility");
    oracle->add_option("--config", o.config, "key = value settings file")->check(CLI::ExistingFile);
    oracle->add_option("--out", o.out, "Output directory");

    auto* simulate = app.add_subcommand("simulate", "Generate a timestamped event file");
    simulate->add_option("--config", o.config, "key = value settings file")->required()->check(CLI::ExistingFile);
    simulate->add_option("--seed", o.seed, "Override the seed");
    simulate->add_option("--out", o.out, "Output directory");

    auto* analyze = app.add_subcommand("analyze", "Histogram an event file and compute the visibility");
    analyze->add_option("--events", o.events, "Event CSV (interfering setting)")->required()->check(CLI::ExistingFile);
    analyze->add_option("--reference", o.reference, "Event CSV of the perpendicular setting")
        ->check(CLI::ExistingFile);
    analyze->add_option("--config", o.config, "key = value analysis settings")->check(CLI::ExistingFile);
    analyze->add_option("--out", o.out, "Output directory");

    auto* dip = app.add_subcommand("dip", "Simulate and analyse a delay scan");
    dip->add_option("--config", o.config, "key = value settings file with delta_t_list")->required()
        ->check(CLI::ExistingFile);
    dip->add_option("--seed", o.seed, "Override the seed");
    dip->add_option("--out", o.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*oracle) return cmd_oracle(o);
        if (*simulate) return cmd_simulate(o);
        if (*analyze) return cmd_analyze(o);
        if (*dip) return cmd_dip(o);
    } catch (const hom::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const hom::FormatError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const hom::StatisticsError& e) {
        std::cerr << "insufficient statistics: " << e.what() << "\n";
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
