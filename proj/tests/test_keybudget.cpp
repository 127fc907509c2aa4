#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <openssl/evp.h>

#include "covertq/drbg.hpp"
#include "covertq/keybudget.hpp"
#include "covertq/qkd.hpp"

using namespace covertq;
using namespace covertq::keybudget;

namespace {

std::vector<std::uint8_t> sha384(const std::vector<std::uint8_t>& data)
{
    std::vector<std::uint8_t> out(48);
    unsigned int len = 0;
    REQUIRE(EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha384(), nullptr) == 1);
    return out;
}

// Threshold sampler applied to a DRBG keystream, written out independently.
std::vector<std::uint8_t> schedule_from_stream(const std::vector<std::uint8_t>& entropy, std::size_t n, double q)
{
    const auto stream = drbg::keystream(entropy, 4 * n, 1);
    const auto threshold = static_cast<std::uint64_t>(q * 4294967296.0);
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t w = 0;
        for (int b = 3; b >= 0; --b) {
            w = (w << 8) | stream[4 * i + static_cast<std::size_t>(b)];
        }
        bits[i] = w < threshold;
    }
    return bits;
}

}  // namespace

TEST_CASE("schedule cost and deficit")
{
    CHECK(schedule_cost(100, 0.0) == 0.0);
    CHECK(schedule_cost(100, 0.5) == doctest::Approx(100.0));
    const auto r = regeneration_deficit(1e6, 1e-3);
    CHECK(r.deficit > 0);
    CHECK(r.consumed_bits == doctest::Approx(1e6 * qkd::binary_entropy(1e-3)));
    CHECK(r.produced_bits_max == doctest::Approx(1000.0));
    CHECK(r.sampler_keystream_bits == 32e6);
    CHECK(r.prng_seed_bits == 440);
    CHECK(r.prng_output_bits_per_call == 524288);
    CHECK(r.regeneration_feasible);
    CHECK_THROWS_AS(regeneration_deficit(1e6, 0.5), DomainError);
    CHECK_THROWS_AS(regeneration_deficit(1e6, 0.0), DomainError);
}

TEST_CASE("cost ratio for very sparse schedules is about 35")
{
    const auto r = regeneration_deficit(1e12, 1e-10);
    CHECK(std::abs(r.cost_ratio - 34.7) < 0.1);
    // -log2(q) + log2(e) to first order
    CHECK(r.cost_ratio == doctest::Approx(-std::log2(1e-10) + 1 / std::log(2.0)).epsilon(1e-8));
}

TEST_CASE("schedules always cost more than they return")
{
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    int violations = 0;
    for (int i = 0; i < 10000; ++i) {
        double q = u(rng);
        if (q == 0.0) {
            continue;
        }
        if (!(qkd::binary_entropy(q) > q) || !(regeneration_deficit(1000, q).deficit > 0)) {
            ++violations;
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("expansion ratio")
{
    CHECK(expansion_ratio(440, 524288, 0.5) == doctest::Approx(524288.0 / 440 / 2));
    CHECK(expansion_ratio(1000, 1000, 0.01) < 1.0);
    CHECK_THROWS_AS(expansion_ratio(0, 10, 0.1), DomainError);
}

TEST_CASE("threshold")
{
    CHECK(threshold_for(0.0) == 0);
    CHECK(threshold_for(0.5) == 2147483648u);
    CHECK(threshold_for(0.3) == 1288490188u);
    CHECK_THROWS_AS(threshold_for(1.0), DomainError);
}

TEST_CASE("schedule matches the threshold sampler on the keystream")
{
    std::vector<std::uint8_t> seed48(48);
    std::iota(seed48.begin(), seed48.end(), 3);
    const auto key = make_schedule_key(0.2, seed48);
    CHECK(prng_schedule(key, 5000) == schedule_from_stream(seed48, 5000, 0.2));

    const std::vector<std::uint8_t> short_seed = {0xde, 0xad, 0xbe, 0xef};
    const auto key2 = make_schedule_key(0.2, short_seed);
    CHECK(prng_schedule(key2, 5000) == schedule_from_stream(sha384(short_seed), 5000, 0.2));
}

TEST_CASE("schedule determinism and statistics")
{
    const auto key = make_schedule_key(0.01, parse_hex("00112233445566778899aabbccddeeff"));
    const std::uint64_t n = 1000000;
    const auto a = prng_schedule(key, n, 1);
    CHECK(a == prng_schedule(key, n, 1));
    CHECK(a == prng_schedule(key, n, 8));
    const double ones = std::accumulate(a.begin(), a.end(), 0.0);
    const double p = key.threshold / 4294967296.0;
    CHECK(std::abs(ones - n * p) < 4 * std::sqrt(n * p * (1 - p)));

    auto other = key;
    other.seed[0] ^= 1;
    CHECK(prng_schedule(other, 1000) != prng_schedule(key, 1000));

    auto unknown = key;
    unknown.algorithm_id = "rot13";
    CHECK_THROWS_AS(prng_schedule(unknown, 10), ConfigError);
}

TEST_CASE("schedule file round trip")
{
    const auto key = make_schedule_key(0.3, parse_hex("0102"));
    const auto bits = prng_schedule(key, 200);
    std::ostringstream os;
    write_schedule(os, key, bits);
    const std::string text = os.str();
    CHECK(text.rfind("covertq-schedule v1, ctr-drbg-aes256, 200, 1288490188\n", 0) == 0);
    std::istringstream is(text);
    const auto parsed = read_schedule(is);
    CHECK(parsed.algorithm_id == key.algorithm_id);
    CHECK(parsed.N == 200);
    CHECK(parsed.threshold == key.threshold);
    std::vector<std::uint64_t> expected;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) {
            expected.push_back(i);
        }
    }
    CHECK(parsed.selected == expected);

    std::istringstream bad("covertq-schedule v1, x, 10, 5\n3\n2\n");
    CHECK_THROWS_AS(read_schedule(bad), DomainError);
    std::istringstream junk("hello\n");
    CHECK_THROWS_AS(read_schedule(junk), DomainError);
}

TEST_CASE("hex")
{
    CHECK(parse_hex("00ffA1") == std::vector<std::uint8_t>{0x00, 0xff, 0xa1});
    CHECK(to_hex(parse_hex("00ffa1")) == "00ffa1");
    CHECK_THROWS_AS(parse_hex("abc"), DomainError);
    CHECK_THROWS_AS(parse_hex("+1"), DomainError);
    CHECK_THROWS_AS(parse_hex("zz"), DomainError);
}
