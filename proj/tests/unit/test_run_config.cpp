#include <doctest.h>

#include <sstream>

#include "hom/error.hpp"
#include "hom/run_config.hpp"

using namespace hom;

namespace {

RunConfig parse(const std::string& text)
{
    std::istringstream is(text);
    return parse_run_config(is);
}

std::string error_of(const std::string& text)
{
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_SUITE("run_config") {

TEST_CASE("parses keys, comments and lists")
{
    const auto c = parse("# scan\n"
                         "n_triggers = 5000   # per point\n"
                         "eta_f=0.5\n"
                         "  xi = 0\n"
                         "\n"
                         "delta_t_list = -40, -20,0 , 10\n"
                         "correct_accidentals = false\n"
                         "out_dir = results/run 1\n"
                         "threads = 3\n"
                         "seed = 18446744073709551615\n");
    CHECK(c.experiment.n_triggers == 5000);
    CHECK(c.experiment.eta_f == 0.5);
    CHECK(c.experiment.xi == 0.0);
    CHECK(c.delta_t_list == std::vector<double>{-40.0, -20.0, 0.0, 10.0});
    CHECK_FALSE(c.correct_accidentals);
    CHECK(c.out_dir == std::filesystem::path("results/run 1"));
    CHECK(c.threads == 3);
    CHECK(c.experiment.seed == 18446744073709551615ULL);
    CHECK(c.has("eta_f"));
    CHECK_FALSE(c.has("eta_s"));
    CHECK(c.experiment.eta_s == 0.005);
}

TEST_CASE("rejects bad input with the key and line")
{
    CHECK(error_of("n_triggers = 10\ncolour = blue\n").find("line 2: unknown key 'colour'") != std::string::npos);
    CHECK(error_of("xi = 1\nxi = 0\n").find("duplicate key 'xi'") != std::string::npos);
    CHECK(error_of("just words\n").find("line 1") != std::string::npos);
    CHECK(error_of("eta_f = half\n").find("eta_f") != std::string::npos);
    CHECK(error_of("n_triggers = -5\n").find("n_triggers") != std::string::npos);
    CHECK(error_of("n_triggers = 1.5\n").find("n_triggers") != std::string::npos);
    CHECK(error_of("tau_s = nan\n").find("tau_s") != std::string::npos);
    CHECK(error_of("correct_accidentals = maybe\n").find("correct_accidentals") != std::string::npos);
    CHECK(error_of("delta_t_list = 1,,2\n").find("delta_t_list") != std::string::npos);
    CHECK(error_of("delta_t_list = 1, 2,\n").find("delta_t_list") != std::string::npos);
    CHECK(error_of("out_dir =\n").find("out_dir") != std::string::npos);
    CHECK(error_of("= 4\n").find("unknown key ''") != std::string::npos);
    CHECK(parse("delta_t_list =\n").delta_t_list.empty());
}

TEST_CASE("required keys and validation")
{
    const auto c = parse("eta_f = 0.1\n");
    CHECK_THROWS_WITH_AS(c.require({"n_triggers"}), "missing required key 'n_triggers'", ConfigError);
    CHECK_NOTHROW(c.require({"eta_f"}));
    CHECK_NOTHROW(c.validate());
    CHECK_THROWS_WITH_AS(parse("eta_s = 3\n").validate(), doctest::Contains("eta_s"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("bin_width = 0\n").validate(), doctest::Contains("bin_width"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("wing_lo = 300\n").validate(), doctest::Contains("wing"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("scan_step = 0\n").validate(), doctest::Contains("scan_step"), ConfigError);
}

TEST_CASE("canonical text round trips")
{
    const auto c = parse("n_triggers = 123\neta_s = 0.25\ndelta_t_list = 1.5, -2\ntau_s = 26.18\n");
    const std::string text = run_config_text(c);
    const auto again = parse(text);
    CHECK(run_config_text(again) == text);
    CHECK(again.experiment.eta_s == 0.25);
    CHECK(again.delta_t_list == c.delta_t_list);
    CHECK(run_config_keys().size() == again.present.size());
    CHECK(text.find("tau_s = 26.18\n") != std::string::npos);
}

}
