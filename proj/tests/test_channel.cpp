#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "covertq/channel.hpp"
#include "covertq/covertness.hpp"
#include "support.hpp"

using namespace covertq;
using namespace covertq::channel;
using covertq::testing::max_abs;

namespace {

NoiseModel lab(double eta, double nbar) { return {NoiseKind::LabThermal, eta, nbar}; }
NoiseModel env(double eta, double nbar) { return {NoiseKind::EnvironmentThermal, eta, nbar}; }

CovertParams sp_params(NoiseModel noise, double q)
{
    CovertParams p;
    p.N = 1000;
    p.d = q * p.N;
    p.noise = noise;
    return p;
}

// Photon statistics of a displaced thermal state D(beta) rho_th(m) D(beta)^dag.
double displaced_thermal_probability(int n, double beta2, double m)
{
    if (m == 0.0) {
        return std::exp(-beta2) * std::pow(beta2, n) / std::tgamma(n + 1.0);
    }
    const double x = -beta2 / (m * (1 + m));
    double prev = 1.0;
    double lag = 1.0;
    if (n >= 1) {
        lag = 1.0 - x;
    }
    for (int k = 1; k < n; ++k) {
        const double next = ((2 * k + 1 - x) * lag - k * prev) / (k + 1);
        prev = lag;
        lag = next;
    }
    return std::pow(m, n) / std::pow(1 + m, n + 1) * std::exp(-beta2 / (1 + m)) * lag;
}

}  // namespace

TEST_CASE("noise model bookkeeping")
{
    CHECK(env(0.5, 0.02).eve_nbar() == doctest::Approx(0.01));
    CHECK(lab(0.3, 0.1).eve_nbar() == doctest::Approx(0.07));
    CHECK(env(0.3, 0.1).eve_signal_fraction() == doctest::Approx(0.7));
    CHECK(lab(0.3, 0.1).eve_signal_fraction() == doctest::Approx(0.3));
    CHECK_THROWS_AS(lab(1.1, 0.1).validate(), DomainError);
    CHECK_THROWS_AS(lab(0.5, -1.0).validate(), DomainError);
    CHECK(parse_noise_kind("A") == NoiseKind::EnvironmentThermal);
    CHECK(parse_noise_kind("lab") == NoiseKind::LabThermal);
    CHECK_THROWS_AS(parse_encoding_kind("laser"), DomainError);
}

TEST_CASE("eve_no_signal")
{
    const auto vac = eve_no_signal(env(0.5, 0.0));
    CHECK(vac.matrix()(0, 0).real() == doctest::Approx(1.0));
    CHECK(eve_no_signal(env(0.5, 0.02)).mean_photon_number("E_H") == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(eve_no_signal(lab(0.3, 0.1)).mean_photon_number("E_V") == doctest::Approx(0.07).epsilon(1e-9));
}

TEST_CASE("single-photon Eve state agrees with the four-mode construction")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto kind : {NoiseKind::LabThermal, NoiseKind::EnvironmentThermal}) {
        for (double eta : {0.1, 0.5, 0.83}) {
            for (int c : {2, 3}) {
                const NoiseModel noise{kind, eta, 0.15};
                const auto s = fock::QubitSignal::from_bloch(std::acos(1 - 2 * u(rng)), 2 * std::numbers::pi * u(rng));
                const auto fast = eve_signal(noise, Encoding::single_photon(), s, c);
                const auto ref = eve_signal_reference(noise, s, c);
                CHECK(max_abs(fast.matrix() - ref.matrix()) < 1e-12);
            }
        }
    }
}

TEST_CASE("single-photon Eve state examples")
{
    const auto lossless = eve_signal(lab(1.0, 0.0), Encoding::single_photon(), {1.0, 0.0});
    const int p10[] = {1, 0};
    const auto i10 = lossless.space().index_of(p10);
    CHECK(lossless.matrix()(i10, i10).real() == doctest::Approx(1.0));
    CHECK(std::abs(lossless.purity() - 1.0) < 1e-12);

    for (double eta : {0.2, 0.5, 0.9}) {
        const auto s = fock::QubitSignal::from_bloch(1.1, 0.4);
        const auto a = eve_signal(env(eta, 0.0), Encoding::single_photon(), s);
        CHECK(a.total_mean_photon_number() == doctest::Approx(1 - eta).epsilon(1e-12));
    }
}

TEST_CASE("model A at eta equals model B at 1 - eta")
{
    for (double eta : {0.1, 0.37, 0.5, 0.9}) {
        for (double nbar : {1e-3, 0.05, 0.5}) {
            const auto s = fock::QubitSignal::from_bloch(0.9, 2.1);
            const auto a = eve_signal(env(eta, nbar), Encoding::single_photon(), s, 4);
            const auto b = eve_signal(lab(1 - eta, nbar), Encoding::single_photon(), s, 4);
            CHECK(max_abs(a.matrix() - b.matrix()) < 1e-10);
            const auto ca = eve_signal(env(eta, nbar), Encoding::coherent(0.02), s, 6);
            const auto cb = eve_signal(lab(1 - eta, nbar), Encoding::coherent(0.02), s, 6);
            CHECK(max_abs(ca.matrix() - cb.matrix()) < 1e-10);
        }
    }
}

TEST_CASE("vacuum in the signal port reproduces eve_no_signal")
{
    for (auto noise : {lab(0.3, 0.05), env(0.3, 0.05), lab(0.8, 0.01)}) {
        const int c = 6;
        auto joint = fock::tensor(fock::tensor(fock::vacuum(c, "S_H"), fock::thermal_state(noise.nbar, c, "T_H")),
                                  fock::tensor(fock::vacuum(c, "S_V"), fock::thermal_state(noise.nbar, c, "T_V")));
        joint = fock::beamsplitter(joint, noise.eta, {"S_H", "T_H"});
        joint = fock::beamsplitter(joint, noise.eta, {"S_V", "T_V"});
        const bool signal_port = noise.kind == NoiseKind::LabThermal;
        const auto eve = fock::partial_trace(
            joint, signal_port ? std::vector<std::string>{"S_H", "S_V"} : std::vector<std::string>{"T_H", "T_V"});
        const auto expected = eve_no_signal(noise, Encoding::single_photon(), c);
        // Exact in every block below the cutoff; compare those.
        CHECK(max_abs(eve.matrix().topLeftCorner(4, 4) - expected.matrix().topLeftCorner(4, 4)) < 1e-8);
    }
    // An Eve port receiving none of the signal sees only noise.
    const auto s = fock::QubitSignal::from_bloch(0.3, 0.3);
    const auto none = eve_signal(lab(0.0, 0.2), Encoding::single_photon(), s);
    const auto no_sig = eve_no_signal(lab(0.0, 0.2), Encoding::single_photon(), none.space().cutoff());
    CHECK(max_abs(none.matrix() - no_sig.matrix()) < 1e-10);
    const auto coh_none = eve_signal(env(1.0, 0.2), Encoding::coherent(0.1), s);
    const auto coh_ref = eve_no_signal(env(1.0, 0.2), Encoding::coherent(0.1), coh_none.space().cutoff());
    CHECK(max_abs(coh_none.matrix() - coh_ref.matrix()) < 1e-9);
}

TEST_CASE("coherent Eve state is a product of displaced thermal states")
{
    SUBCASE("noiseless: coherent states with means eta mu |lambda_i|^2")
    {
        const auto s = fock::QubitSignal::from_bloch(1.0, 0.5);
        const auto e = eve_signal(lab(0.5, 0.0), Encoding::coherent(0.01), s);
        CHECK(e.mean_photon_number("E_H") == doctest::Approx(0.5 * 0.01 * std::norm(s.lambda1)).epsilon(1e-9));
        CHECK(e.mean_photon_number("E_V") == doctest::Approx(0.5 * 0.01 * std::norm(s.lambda2)).epsilon(1e-9));
        CHECK(std::abs(e.purity() - 1.0) < 1e-9);
    }
    SUBCASE("thermal background")
    {
        const double mu = 0.3;
        for (auto noise : {lab(0.6, 0.1), env(0.6, 0.1)}) {
            const auto s = fock::QubitSignal::from_bloch(0.7, 0.0);
            const auto e = eve_signal(noise, Encoding::coherent(mu), s);
            const double f = noise.eve_signal_fraction();
            const double m = noise.eve_nbar();
            const auto h = fock::partial_trace(e, {"E_H"});
            const double beta2 = f * mu * std::norm(s.lambda1);
            for (int n = 0; n <= 4; ++n) {
                CHECK(h.matrix()(n, n).real() ==
                      doctest::Approx(displaced_thermal_probability(n, beta2, m)).epsilon(1e-8));
            }
            CHECK(h.mean_photon_number("E_H") == doctest::Approx(beta2 + m).epsilon(1e-8));
        }
    }
}

TEST_CASE("communicating mixture")
{
    const auto s = fock::QubitSignal::from_bloch(0.4, 1.2);
    const auto zero = eve_states(sp_params(lab(0.5, 0.05), 0.0), s);
    CHECK(max_abs(zero.communicating.matrix() - zero.no_signal.matrix()) == 0.0);

    const auto one = eve_states(sp_params(lab(0.5, 0.05), 1.0), s);
    const auto rho_s = eve_signal(lab(0.5, 0.05), Encoding::single_photon(), s, one.no_signal.space().cutoff());
    CHECK(max_abs(one.communicating.matrix() - rho_s.matrix()) < 1e-14);

    const auto mid = eve_states(sp_params(lab(0.5, 0.05), 0.1), s);
    CHECK(std::abs(mid.communicating.trace() - 1.0) < 1e-12);
    CHECK_NOTHROW(mid.communicating.validate());
    const auto ev = fock::eig_hermitian(mid.communicating.matrix()).values;
    const auto ev_rho = fock::eig_hermitian(mid.no_signal.matrix()).values;
    const auto ev_s = fock::eig_hermitian(rho_s.matrix()).values;
    CHECK(ev.maxCoeff() <= std::max(ev_rho.maxCoeff(), ev_s.maxCoeff()) + 1e-12);
    CHECK(ev.minCoeff() >= std::min(ev_rho.minCoeff(), ev_s.minCoeff()) - 1e-12);

    CovertParams coh = sp_params(lab(0.5, 0.05), 0.1);
    coh.encoding = Encoding::coherent(0.05);
    CHECK_THROWS_AS(eve_states(coh, s), PreconditionError);
}

TEST_CASE("mean photon number rises by q times the delivered signal")
{
    for (auto noise : {lab(0.3, 0.05), env(0.3, 0.05)}) {
        const auto s = fock::QubitSignal::from_bloch(2.0, 0.7);
        const double q = 0.02;
        const auto st = eve_states(sp_params(noise, q), s);
        const double delta = st.communicating.total_mean_photon_number() - st.no_signal.total_mean_photon_number();
        CHECK(std::abs(delta - q * noise.eve_signal_fraction()) < 1e-9);

        CovertParams coh = sp_params(noise, q);
        coh.encoding = Encoding::coherent(0.5);
        const auto sc = eve_states(coh, s);
        const double dc = sc.communicating.total_mean_photon_number() - sc.no_signal.total_mean_photon_number();
        CHECK(std::abs(dc - q * noise.eve_signal_fraction()) < 1e-9);
    }
}

TEST_CASE("worst-case search")
{
    const auto p = sp_params(lab(0.5, 0.05), 0.01);
    const auto full = worst_case_signal(p, 16);
    CHECK(full.points == 18);
    CHECK(full.spread < 1e-9);
    const auto poles = worst_case_over(p, {{0.0, 0.0}});
    CHECK(std::abs(poles.d_max - full.d_max) <= 1e-9);

    const auto zero = worst_case_signal(sp_params(lab(0.5, 0.05), 0.0), 8);
    CHECK(zero.d_max == 0.0);

    // Polarization rotations of the signal leave D unchanged.
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto st0 = eve_states(p, {1.0, 0.0});
    const double d0 = covertness::relative_entropy(st0.no_signal, st0.communicating);
    for (int i = 0; i < 10; ++i) {
        const auto s = fock::QubitSignal::from_bloch(std::acos(1 - 2 * u(rng)), 2 * std::numbers::pi * u(rng));
        const auto st = eve_states(p, s);
        CHECK(std::abs(covertness::relative_entropy(st.no_signal, st.communicating) - d0) < 1e-9);
    }
    CHECK_THROWS_AS(worst_case_signal(p, 3), DomainError);
}

TEST_CASE("automatic cutoff keeps the tails below tolerance")
{
    const auto noise = lab(0.5, 0.3);
    const int c = auto_cutoff(noise, Encoding::single_photon());
    CHECK(fock::thermal_tail(0.3, c - 1) < 1e-10);
    CHECK(fock::thermal_tail(0.3, c - 2) >= 1e-10);
    const int cc = auto_cutoff(noise, Encoding::coherent(0.1));
    CHECK(cc > c - 1);
}
