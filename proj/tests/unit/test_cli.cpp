#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hom/interference.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::path(HOM_TEST_TMP) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Result run(const fs::path& dir, const std::string& args)
{
    const std::string cmd = "cd '" + dir.string() + "' && '" HOM_CLI_PATH "' " + args + " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(dir / "stdout.txt");
    r.err = slurp(dir / "stderr.txt");
    return r;
}

void write(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("oracle")
{
    const auto dir = scratch("oracle");
    auto r = run(dir, "oracle --out o");
    REQUIRE(r.code == 0);
    const auto summary = csv_rows(dir / "o/oracle_summary.csv");
    REQUIRE(summary.size() >= 2);
    CHECK(summary[1][0] == "visibility");
    CHECK(std::stod(summary[1][1]) == doctest::Approx(0.900).epsilon(0.001 / 0.9));

    const auto dip = csv_rows(dir / "o/oracle_dip.csv");
    REQUIRE(dip.size() == 18);  // header + -40..40 step 5
    for (std::size_t i = 1; i < dip.size(); ++i) {
        const double d = std::stod(dip[i][0]);
        CHECK(std::stod(dip[i][1]) == doctest::Approx(hom::dip_ratio(d, 26.18, 13.61)).epsilon(1e-9));
        CHECK(std::stod(dip[i][2]) == doctest::Approx(std::stod(dip[i][1])).epsilon(1e-8));
    }
    CHECK(slurp(dir / "o/oracle_density.csv").rfind("# config_hash: ", 0) == 0);
    CHECK(csv_rows(dir / "o/oracle_density.csv")[0] == std::vector<std::string>{"dt_ns", "g_perp", "g_par"});

    write(dir / "equal.cfg", "tau_s = 20\ntau_f = 20\nscan_min = 0\nscan_max = 0\n");
    r = run(dir, "oracle --config equal.cfg --out e");
    REQUIRE(r.code == 0);
    const auto equal = csv_rows(dir / "e/oracle_dip.csv");
    REQUIRE(equal.size() == 2);
    CHECK(std::stod(equal[1][1]) == 0.0);

    write(dir / "bad.cfg", "tau_s = -1\n");
    r = run(dir, "oracle --config bad.cfg --out b");
    CHECK(r.code == 1);
    CHECK(r.err.find("tau_s") != std::string::npos);
}

TEST_CASE("simulate")
{
    const auto dir = scratch("simulate");
    write(dir / "c.cfg", "n_triggers = 1000\neta_f = 0.3\neta_s = 0.3\nbg_rate_a = 1e-4\nseed = 5\n");
    REQUIRE(run(dir, "simulate --config c.cfg --out one").code == 0);
    REQUIRE(run(dir, "simulate --config c.cfg --out two").code == 0);
    CHECK(slurp(dir / "one/events.csv") == slurp(dir / "two/events.csv"));
    CHECK(slurp(dir / "one/events.json") == slurp(dir / "two/events.json"));
    REQUIRE(run(dir, "simulate --config c.cfg --seed 6 --out three").code == 0);
    CHECK(slurp(dir / "one/events.csv") != slurp(dir / "three/events.csv"));
    const auto side = read_json(dir / "one/events.json");
    CHECK(side["timestamp_resolution_ps"] == 125.0);
    CHECK(side["config"]["seed"] == 5);
    CHECK(side["config_hash"].get<std::string>().size() == 16);

    write(dir / "dark.cfg", "n_triggers = 1000\neta_f = 0\neta_s = 0\n");
    REQUIRE(run(dir, "simulate --config dark.cfg --out dark").code == 0);
    const auto dark = csv_rows(dir / "dark/events.csv");
    CHECK(dark.size() == 1001);
    for (std::size_t i = 1; i < dark.size(); ++i) CHECK(dark[i][0] == "T");

    write(dir / "bg.cfg", "n_triggers = 1000\neta_f = 0\neta_s = 0\nbg_rate_a = 5e-4\nbg_rate_b = 5e-4\n");
    REQUIRE(run(dir, "simulate --config bg.cfg --out bg").code == 0);
    double clicks = 0;
    for (const auto& row : csv_rows(dir / "bg/events.csv")) clicks += row[0] == "A" || row[0] == "B";
    const double expected = 2 * 5e-4 * 1000.0 * 1000;  // rate x trigger period x triggers, both detectors
    CHECK(std::abs(clicks - expected) < 3.0 * std::sqrt(expected));
}

TEST_CASE("config errors exit with status 1")
{
    const auto dir = scratch("config_errors");
    write(dir / "unknown.cfg", "n_triggers = 10\nflux_capacitor = 1\n");
    auto r = run(dir, "simulate --config unknown.cfg");
    CHECK(r.code == 1);
    CHECK(r.err.find("flux_capacitor") != std::string::npos);

    write(dir / "missing.cfg", "eta_f = 0.5\n");
    r = run(dir, "simulate --config missing.cfg");
    CHECK(r.code == 1);
    CHECK(r.err.find("n_triggers") != std::string::npos);

    write(dir / "range.cfg", "n_triggers = 10\nxi = 3\n");
    CHECK(run(dir, "simulate --config range.cfg").code == 1);
    CHECK(run(dir, "simulate").code == 1);
    CHECK(run(dir, "frobnicate").code == 1);
    CHECK(run(dir, "simulate --config does_not_exist.cfg").code == 1);
    CHECK(run(dir, "--help").code == 0);
}

TEST_CASE("analyze")
{
    const auto dir = scratch("analyze");
    write(dir / "par.cfg", "n_triggers = 1000000\neta_f = 1\neta_s = 1\nxi = 1\nseed = 11\n");
    write(dir / "perp.cfg", "n_triggers = 1000000\neta_f = 1\neta_s = 1\nxi = 0\nseed = 11\n");
    write(dir / "ideal_analysis.cfg", "correct_accidentals = false\nt_c_corrected = 250\n");
    REQUIRE(run(dir, "simulate --config par.cfg --out par").code == 0);
    REQUIRE(run(dir, "simulate --config perp.cfg --out perp").code == 0);

    auto r = run(dir, "analyze --events par/events.csv --config ideal_analysis.cfg --out a");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("V     = ") != std::string::npos);
    auto v = read_json(dir / "a/visibility.json");
    CHECK(v["config_hash"] == read_json(dir / "par/events.json")["config_hash"]);
    CHECK(v["t_c"] == 250.0);
    CHECK(std::abs(v["v"].get<double>() - 0.900201807) < 3.0 * v["sigma_v"].get<double>());
    CHECK(v["raw"]["t_c"] == 25.0);
    CHECK(v["dip"].size() == 1);
    CHECK(slurp(dir / "a/histogram_par.csv").find("bin_center_ns,counts,value\n") != std::string::npos);
    CHECK(slurp(dir / "a/histogram_par.csv").find(v["config_hash"].get<std::string>()) != std::string::npos);

    r = run(dir, "analyze --events perp/events.csv --config ideal_analysis.cfg --out b");
    REQUIRE(r.code == 0);
    v = read_json(dir / "b/visibility.json");
    CHECK(std::abs(v["v"].get<double>()) < 3.0 * v["sigma_v"].get<double>());

    // explicit reference file
    r = run(dir, "analyze --events par/events.csv --reference perp/events.csv --config ideal_analysis.cfg --out c");
    REQUIRE(r.code == 0);
    v = read_json(dir / "c/visibility.json");
    CHECK(v["reference_config_hash"] == read_json(dir / "perp/events.json")["config_hash"]);
    CHECK(std::abs(v["v"].get<double>() - 0.900201807) < 3.0 * v["sigma_v"].get<double>());
}

TEST_CASE("analyze reports data errors and missing statistics")
{
    const auto dir = scratch("analyze_errors");
    write(dir / "broken.csv", "detector,timestamp\nT,8000\nA,8010\nZ,9000\n");
    write(dir / "ok.csv", "detector,timestamp\nT,8000\n");
    auto r = run(dir, "analyze --events broken.csv --reference ok.csv");
    CHECK(r.code == 2);
    CHECK(r.err.find("line 4") != std::string::npos);

    write(dir / "unsorted.csv", "detector,timestamp\nT,8000\nA,10\n");
    r = run(dir, "analyze --events unsorted.csv --reference ok.csv");
    CHECK(r.code == 2);
    CHECK(r.err.find("line 3") != std::string::npos);

    r = run(dir, "analyze --events ok.csv --reference ok.csv");
    CHECK(r.code == 3);
    r = run(dir, "analyze --events ok.csv");
    CHECK(r.code == 1);

    write(dir / "dark.cfg", "n_triggers = 2000\neta_f = 0\neta_s = 0\n");
    REQUIRE(run(dir, "simulate --config dark.cfg --out dark").code == 0);
    CHECK(run(dir, "analyze --events dark/events.csv").code == 3);
}

TEST_CASE("simulate then analyze completes quickly" * doctest::timeout(60))
{
    const auto dir = scratch("round_trip");
    write(dir / "c.cfg", "n_triggers = 2000000\neta_f = 0.05\neta_s = 0.05\nbg_rate_a = 3e-5\nbg_rate_b = 3e-5\n");
    REQUIRE(run(dir, "simulate --config c.cfg --out s").code == 0);
    const auto r = run(dir, "analyze --events s/events.csv --out a");
    REQUIRE(r.code == 0);
    const auto v = read_json(dir / "a/visibility.json");
    CHECK(std::abs(v["v"].get<double>() - 0.900201807) < 3.0 * v["sigma_v"].get<double>());
}

TEST_CASE("dip")
{
    const auto dir = scratch("dip");
    write(dir / "scan.cfg", "n_triggers = 40000\neta_f = 1\neta_s = 1\ndelta_t_list = -40, -20, -10, 0, 10, 20, 40\n");
    auto r = run(dir, "dip --config scan.cfg --seed 3 --out d");
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(dir / "d/dip.csv");
    REQUIRE(rows.size() == 8);
    CHECK(rows[0] == std::vector<std::string>{"delta_t_ns", "ratio", "sigma", "model", "pull"});
    int within = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) within += std::abs(std::stod(rows[i][4])) <= 3.0;
    CHECK(within >= 6);
    const auto j = read_json(dir / "d/dip.json");
    CHECK(j["dip"].size() == 7);
    CHECK(j["config_hash"].get<std::string>().size() == 16);

    // one point equals analyze on the same run
    write(dir / "one.cfg", "n_triggers = 40000\neta_f = 1\neta_s = 1\ndelta_t_list = 0\n");
    write(dir / "sim.cfg", "n_triggers = 40000\neta_f = 1\neta_s = 1\n");
    REQUIRE(run(dir, "dip --config one.cfg --seed 9 --out one").code == 0);
    REQUIRE(run(dir, "simulate --config sim.cfg --seed 9 --out sim").code == 0);
    REQUIRE(run(dir, "analyze --events sim/events.csv --out an").code == 0);
    const auto dip_point = read_json(dir / "one/dip.json")["dip"][0];
    const auto an_point = read_json(dir / "an/visibility.json")["dip"][0];
    CHECK(dip_point["ratio"].get<double>() == an_point["ratio"].get<double>());
    CHECK(dip_point["sigma"].get<double>() == an_point["sigma"].get<double>());

    write(dir / "empty.cfg", "n_triggers = 100\ndelta_t_list =\n");
    r = run(dir, "dip --config empty.cfg");
    CHECK(r.code == 1);
    CHECK(r.err.find("delta_t_list") != std::string::npos);
    write(dir / "nolist.cfg", "n_triggers = 100\n");
    CHECK(run(dir, "dip --config nolist.cfg").code == 1);
}

}
