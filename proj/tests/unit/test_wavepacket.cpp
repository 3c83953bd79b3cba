#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hom/error.hpp"
#include "hom/rng.hpp"
#include "hom/wavepacket.hpp"
#include "support/gen.hpp"

using namespace hom;
using hom::test::for_all;
using hom::test::Gen;

TEST_SUITE("wavepacket") {

TEST_CASE("amplitude values")
{
    const Envelope slow(26.18);
    CHECK(amplitude(slow, -1.0) == std::complex<double>(0.0, 0.0));
    // frozen from tests/oracles/hom_oracle.py
    CHECK(amplitude(slow, 0.0).real() == doctest::Approx(0.195440776248526).epsilon(1e-13));
    CHECK(amplitude(slow, 0.0).imag() == 0.0);

    const Envelope fast(13.61);
    CHECK(amplitude(fast, 13.61).real() == doctest::Approx(0.164408284000570).epsilon(1e-13));
    CHECK(intensity(fast, 13.61) == doctest::Approx(std::norm(amplitude(fast, 13.61))).epsilon(1e-14));
}

TEST_CASE("amplitude is zero before the start")
{
    for_all(2000, 11, [](Gen& g) {
        const Envelope env(g.log_uniform(0.1, 1000.0), g.uniform(-500.0, 500.0), g.uniform(-200.0, 200.0));
        const double t = env.t0() - g.log_uniform(1e-9, 1e4);
        CAPTURE(env.tau());
        CAPTURE(env.t0());
        CAPTURE(t);
        CHECK(amplitude(env, t) == std::complex<double>(0.0, 0.0));
        CHECK(intensity(env, t) == 0.0);
    });
}

TEST_CASE("detuning changes only the phase")
{
    for_all(2000, 12, [](Gen& g) {
        const double tau = g.log_uniform(0.1, 1000.0);
        const double t0 = g.uniform(-100.0, 100.0);
        const double t = t0 + g.uniform(0.0, 20.0 * tau);
        const auto a0 = amplitude(Envelope(tau, t0, 0.0), t);
        const auto a76 = amplitude(Envelope(tau, t0, 76.0), t);
        CAPTURE(tau);
        CAPTURE(t - t0);
        CHECK(std::abs(a76) == doctest::Approx(std::abs(a0)).epsilon(1e-14));
    });
    const Envelope env(20.0, 5.0, 76.0);
    const double t = 9.0;
    const double expected = -76.0 * kRadPerNsPerMHz * (t - 5.0);
    CHECK(std::arg(amplitude(env, t)) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("invalid envelopes are rejected")
{
    CHECK_THROWS_AS(Envelope(0.0), ConfigError);
    CHECK_THROWS_AS(Envelope(-1.0), ConfigError);
    CHECK_THROWS_AS(Envelope(std::nan("")), ConfigError);
    CHECK_THROWS_AS(Envelope(1.0, INFINITY), ConfigError);
    CHECK_THROWS_AS(Envelope(1.0, 0.0, std::nan("")), ConfigError);
}

TEST_CASE("sample_emission_time")
{
    const Envelope env(26.18, 3.0);
    CHECK(sample_emission_time(env, 0.0) == 3.0);
    CHECK(sample_emission_time(Envelope(26.18), 0.5) == doctest::Approx(18.1465931870594).epsilon(1e-13));

    TrialRng rng(2024, 0);
    const Envelope fast(13.61);
    double sum = 0.0;
    constexpr int n = 1000000;
    for (int i = 0; i < n; ++i) sum += sample_emission_time(fast, rng.uniform());
    CHECK(std::abs(sum / n - 13.61) < 0.05);
}

TEST_CASE("sampled times follow the exponential law")
{
    for_all(6, 13, [](Gen& g) {
        const Envelope env(g.log_uniform(0.1, 1000.0), g.uniform(-50.0, 50.0));
        TrialRng rng(static_cast<std::uint64_t>(g.integer(0, 1 << 30)), 1);
        std::vector<double> t(100000);
        for (auto& x : t) x = sample_emission_time(env, rng.uniform());
        std::sort(t.begin(), t.end());
        double ks = 0.0;
        const double n = static_cast<double>(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double cdf = -std::expm1(-(t[i] - env.t0()) / env.tau());
            ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / n),
                           std::abs(cdf - static_cast<double>(i + 1) / n)});
        }
        CAPTURE(env.tau());
        CHECK(ks < 0.01);
    });
}

TEST_CASE("normalization")
{
    CHECK(norm(Envelope(26.18)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(norm(Envelope(13.61, 0.0), 13.61) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-9));
    CHECK(norm(Envelope(5.0, 2.0), 1.0) == 0.0);

    for (double tau : {0.1, 0.3, 1.0, 13.61, 26.18, 100.0, 1000.0}) {
        CAPTURE(tau);
        CHECK(std::abs(norm(Envelope(tau, 7.0, 76.0)) - 1.0) < 1e-9);
    }
    for_all(200, 14, [](Gen& g) {
        const Envelope env(g.log_uniform(0.1, 1000.0), g.uniform(-1e3, 1e3), g.uniform(-100.0, 100.0));
        CAPTURE(env.tau());
        CHECK(std::abs(norm(env) - 1.0) < 1e-9);
    });
}

}
