#include <doctest.h>

#include <cmath>
#include <vector>

#include "covertq/covertness.hpp"
#include "covertq/protosim.hpp"

using namespace covertq;
using namespace covertq::protosim;

namespace {

channel::CovertParams params(channel::NoiseKind kind, double eta, double nbar, double q, double N)
{
    channel::CovertParams p;
    p.N = N;
    p.d = q * N;
    p.noise = {kind, eta, nbar};
    return p;
}

SimConfig config(channel::Encoding enc, double tau, double noise, std::uint64_t trials)
{
    SimConfig c;
    c.params = params(channel::NoiseKind::LabThermal, 0.5, 0.01, 0.01, 100);
    c.params.encoding = enc;
    c.tau = tau;
    c.bob_noise_nbar = noise;
    c.trials = trials;
    c.master_seed = {1, 2, 3};
    return c;
}

// Exact sifted error rate of the detector model: threshold detectors,
// geometric noise per detector, double clicks resolved by a fair coin.
double model_qber(channel::Encoding enc, double tau, double noise)
{
    const double c = noise / (1 + noise);  // noise click probability per detector
    if (enc.kind == channel::EncodingKind::SinglePhoton) {
        const double err = tau * c / 2 + (1 - tau) * (c * (1 - c) + c * c / 2);
        const double det = tau + (1 - tau) * (1 - (1 - c) * (1 - c));
        return err / det;
    }
    const double r = 1 - std::exp(-tau * enc.mu) * (1 - c);  // correct detector clicks
    const double err = c * (1 - r) + c * r / 2;
    const double det = 1 - (1 - r) * (1 - c);
    return err / det;
}

}  // namespace

TEST_CASE("trial seeds depend only on the master seed and index")
{
    const std::vector<std::uint8_t> a = {1, 2, 3};
    const std::vector<std::uint8_t> b = {1, 2, 4};
    CHECK(trial_seed(a, 5) == trial_seed(a, 5));
    CHECK(trial_seed(a, 5) != trial_seed(a, 6));
    CHECK(trial_seed(a, 5) != trial_seed(b, 5));
}

TEST_CASE("noiseless single photons give no errors")
{
    const auto r = simulate_qkd(config(channel::Encoding::single_photon(), 1.0, 0.0, 20000));
    CHECK(r.empirical_qber == 0.0);
    CHECK(r.error_count == 0);
    CHECK(r.empirical_detection_rate_R == 1.0);
    CHECK(r.sifted_count > 9000);
}

TEST_CASE("reports do not depend on the worker count")
{
    auto c = config(channel::Encoding::coherent(0.2), 0.7, 0.01, 30000);
    const auto one = simulate_qkd(c);
    c.workers = 4;
    const auto four = simulate_qkd(c);
    CHECK(one.error_count == four.error_count);
    CHECK(one.sifted_count == four.sifted_count);
    CHECK(one.empirical_detection_rate_R == four.empirical_detection_rate_R);
    CHECK(one.empirical_qber == four.empirical_qber);
}

TEST_CASE("simulated QBER agrees with the detector model")
{
    struct Case {
        channel::Encoding enc;
        double tau;
        double noise;
    };
    for (const auto& k : {Case{channel::Encoding::single_photon(), 0.5, 0.02},
                          Case{channel::Encoding::single_photon(), 0.9, 0.05},
                          Case{channel::Encoding::coherent(0.1), 0.5, 5e-4},
                          Case{channel::Encoding::coherent(0.5), 0.8, 0.01}}) {
        const auto r = simulate_qkd(config(k.enc, k.tau, k.noise, 200000));
        const double expected = model_qber(k.enc, k.tau, k.noise);
        CHECK(std::abs(r.empirical_qber - expected) < 4 * r.qber_stderr);
    }
}

TEST_CASE("noise-consistent mapping")
{
    const auto p = params(channel::NoiseKind::LabThermal, 0.4, 5e-3, 0.01, 100);
    const auto c = noise_consistent_config(p, 1.0, 10, {0});
    CHECK(c.tau == doctest::Approx(0.4));
    CHECK(c.bob_noise_nbar == doctest::Approx(0.6 * 5e-3));
    // noise per delivered signal equals the (1/eta - 1) nbar of the prediction
    CHECK(c.bob_noise_nbar / c.tau == doctest::Approx((1 / 0.4 - 1) * 5e-3));
}

TEST_CASE("detection rate falls with channel loss")
{
    double previous = 2.0;
    for (double tau : {1.0, 0.8, 0.5, 0.2, 0.05}) {
        const auto r = simulate_qkd(config(channel::Encoding::single_photon(), tau, 1e-3, 20000));
        CHECK(r.empirical_detection_rate_R < previous);
        previous = r.empirical_detection_rate_R;
    }
}

TEST_CASE("no sifted events is flagged")
{
    const auto r = simulate_qkd(config(channel::Encoding::single_photon(), 1e-12, 0.0, 10));
    CHECK(r.degenerate);
    CHECK(r.sifted_count == 0);
    CHECK_THROWS_AS(simulate_qkd(config(channel::Encoding::single_photon(), 0.0, 0.0, 10)), DomainError);
}

TEST_CASE("exact oracle chain")
{
    SUBCASE("one copy is the Helstrom error")
    {
        const auto p = params(channel::NoiseKind::LabThermal, 0.5, 0.1, 0.1, 10);
        const auto chain = eve_exact_oracle(p, 1, 2);
        const auto w = channel::worst_case_signal(p, 4, 2);
        const auto st = channel::eve_states(p, w.signal, 2);
        CHECK(chain.p_e_exact == doctest::Approx(covertness::helstrom_error(st.no_signal, st.communicating)).epsilon(1e-12));
    }
    SUBCASE("q = 0")
    {
        const auto chain = eve_exact_oracle(params(channel::NoiseKind::LabThermal, 0.5, 0.1, 0.0, 10), 2, 2);
        CHECK(chain.p_e_exact == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("chain holds for both models")
    {
        for (auto kind : {channel::NoiseKind::LabThermal, channel::NoiseKind::EnvironmentThermal}) {
            for (int n = 1; n <= 3; ++n) {
                const auto chain = eve_exact_oracle(params(kind, 0.5, 0.1, 0.1, 10), n, 2);
                CHECK(chain.holds);
                CHECK(chain.slack_exact_vs_helstrom >= -1e-9);
                CHECK(chain.slack_helstrom_vs_pinsker >= -1e-9);
                CHECK(chain.relative_entropy_joint == doctest::Approx(n * chain.relative_entropy_per_bin).epsilon(1e-8));
            }
        }
    }
    CHECK_THROWS_AS(eve_exact_oracle(params(channel::NoiseKind::LabThermal, 0.5, 0.1, 0.1, 10), 6, 3), ResourceError);
    CHECK_THROWS_AS(eve_exact_oracle(params(channel::NoiseKind::LabThermal, 0.5, 0.1, 0.1, 10), 7, 1), DomainError);
}

TEST_CASE("product attack")
{
    const std::vector<std::uint8_t> seed = {9};
    SUBCASE("q = 0 is degenerate")
    {
        const auto r = eve_product_attack(params(channel::NoiseKind::LabThermal, 0.5, 0.05, 0.0, 50), 100, seed);
        CHECK(r.degenerate);
        CHECK(*r.p_e_empirical == 0.5);
    }
    SUBCASE("stays above the collective bounds")
    {
        const auto r = eve_product_attack(params(channel::NoiseKind::LabThermal, 0.5, 0.05, 0.2, 50), 10000, seed);
        CHECK(*r.p_e_empirical < 0.5);
        CHECK(*r.p_e_empirical >= *r.helstrom_lower_bound - 3 * *r.p_e_stderr);

        const auto p3 = params(channel::NoiseKind::LabThermal, 0.5, 0.05, 0.2, 3);
        const auto small = eve_product_attack(p3, 20000, seed, 2);
        const auto exact = eve_exact_oracle(p3, 3, 2);
        CHECK(*small.p_e_empirical >= exact.p_e_exact - 3 * *small.p_e_stderr);
    }
    SUBCASE("more bins help Eve")
    {
        double previous = 1.0;
        for (double n : {25.0, 50.0, 100.0, 200.0}) {
            const auto r = eve_product_attack(params(channel::NoiseKind::LabThermal, 0.5, 0.05, 0.2, n), 10000, seed);
            CHECK(*r.p_e_empirical < previous + 3 * *r.p_e_stderr);
            previous = *r.p_e_empirical;
        }
    }
    SUBCASE("independent of the worker count")
    {
        const auto p = params(channel::NoiseKind::EnvironmentThermal, 0.5, 0.05, 0.2, 20);
        const auto a = eve_product_attack(p, 3000, seed, 0, 1);
        const auto b = eve_product_attack(p, 3000, seed, 0, 3);
        CHECK(*a.p_fa == *b.p_fa);
        CHECK(*a.p_md == *b.p_md);
    }
}
