#include <doctest.h>

#include <algorithm>
#include <memory>
#include <numeric>
#include <vector>

#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/params.h>

#include "covertq/config.hpp"
#include "covertq/drbg.hpp"

using namespace covertq;

namespace {

struct RandCtxDeleter {
    void operator()(EVP_RAND_CTX* c) const { EVP_RAND_CTX_free(c); }
};
struct RandDeleter {
    void operator()(EVP_RAND* r) const { EVP_RAND_free(r); }
};
using RandCtx = std::unique_ptr<EVP_RAND_CTX, RandCtxDeleter>;
using Rand = std::unique_ptr<EVP_RAND, RandDeleter>;

// OpenSSL's own CTR-DRBG (AES-256, no derivation function) fed from a fixed
// entropy buffer.
class OpenSslDrbg {
public:
    OpenSslDrbg(std::vector<std::uint8_t> entropy, const std::vector<std::uint8_t>& personalization)
        : entropy_(std::move(entropy))
    {
        Rand test(EVP_RAND_fetch(nullptr, "TEST-RAND", nullptr));
        REQUIRE(test);
        parent_.reset(EVP_RAND_CTX_new(test.get(), nullptr));
        unsigned int strength = 256;
        OSSL_PARAM parent_params[] = {
            OSSL_PARAM_construct_uint(OSSL_RAND_PARAM_STRENGTH, &strength),
            OSSL_PARAM_construct_octet_string(OSSL_RAND_PARAM_TEST_ENTROPY, entropy_.data(), entropy_.size()),
            OSSL_PARAM_construct_end(),
        };
        REQUIRE(EVP_RAND_CTX_set_params(parent_.get(), parent_params) == 1);
        REQUIRE(EVP_RAND_instantiate(parent_.get(), strength, 0, nullptr, 0, nullptr) == 1);

        Rand ctr(EVP_RAND_fetch(nullptr, "CTR-DRBG", nullptr));
        REQUIRE(ctr);
        drbg_.reset(EVP_RAND_CTX_new(ctr.get(), parent_.get()));
        char cipher[] = "AES-256-CTR";
        int use_df = 0;
        OSSL_PARAM params[] = {
            OSSL_PARAM_construct_utf8_string(OSSL_DRBG_PARAM_CIPHER, cipher, 0),
            OSSL_PARAM_construct_int(OSSL_DRBG_PARAM_USE_DF, &use_df),
            OSSL_PARAM_construct_end(),
        };
        // OpenSSL substitutes its own string for an absent personalization; 48
        // zero bytes are equivalent to none without a derivation function.
        std::vector<std::uint8_t> pers = personalization;
        if (pers.empty()) {
            pers.assign(48, 0);
        }
        REQUIRE(EVP_RAND_instantiate(drbg_.get(), strength, 0, pers.data(), pers.size(), params) == 1);
    }

    std::vector<std::uint8_t> generate(std::size_t n)
    {
        std::vector<std::uint8_t> out(n);
        REQUIRE(EVP_RAND_generate(drbg_.get(), out.data(), n, 256, 0, nullptr, 0) == 1);
        return out;
    }

private:
    std::vector<std::uint8_t> entropy_;
    RandCtx parent_;
    RandCtx drbg_;
};

std::vector<std::uint8_t> pattern(std::size_t n, std::uint8_t start)
{
    std::vector<std::uint8_t> v(n);
    std::iota(v.begin(), v.end(), start);
    return v;
}

}  // namespace

TEST_CASE("output matches OpenSSL's CTR-DRBG")
{
    for (const auto& pers : {std::vector<std::uint8_t>{}, pattern(20, 0xa0), pattern(48, 0x10)}) {
        const auto entropy = pattern(48, 7);
        OpenSslDrbg reference(entropy, pers);
        drbg::CtrDrbg ours(entropy, pers);
        for (std::size_t n : {std::size_t{16}, std::size_t{5}, std::size_t{65536}, std::size_t{1000}}) {
            std::vector<std::uint8_t> mine(n);
            ours.generate(mine);
            CHECK(mine == reference.generate(n));
        }
        CHECK(ours.reseed_counter() == 5);
    }
}

TEST_CASE("skip advances exactly one request")
{
    const auto entropy = pattern(48, 99);
    drbg::CtrDrbg a(entropy);
    drbg::CtrDrbg b(entropy);
    std::vector<std::uint8_t> sink(777);
    a.generate(sink);
    b.skip(777);
    std::vector<std::uint8_t> x(64);
    std::vector<std::uint8_t> y(64);
    a.generate(x);
    b.generate(y);
    CHECK(x == y);
}

TEST_CASE("keystream is the concatenation of maximal requests, independent of worker count")
{
    const auto entropy = pattern(48, 1);
    const std::size_t total = 3 * drbg::kMaxRequestBytes + 12345;
    drbg::CtrDrbg sequential(entropy);
    std::vector<std::uint8_t> expected;
    for (std::size_t done = 0; done < total;) {
        const std::size_t n = std::min(drbg::kMaxRequestBytes, total - done);
        std::vector<std::uint8_t> block(n);
        sequential.generate(block);
        expected.insert(expected.end(), block.begin(), block.end());
        done += n;
    }
    CHECK(drbg::keystream(entropy, total, 1) == expected);
    CHECK(drbg::keystream(entropy, total, 4) == expected);
    CHECK(drbg::keystream(entropy, total, 16) == expected);
    CHECK(drbg::keystream(entropy, 0, 3).empty());
}

TEST_CASE("argument checks")
{
    const auto entropy = pattern(48, 0);
    CHECK_THROWS_AS(drbg::CtrDrbg(pattern(32, 0)), DomainError);
    CHECK_THROWS_AS(drbg::CtrDrbg(entropy, pattern(49, 0)), DomainError);
    drbg::CtrDrbg d(entropy);
    std::vector<std::uint8_t> big(drbg::kMaxRequestBytes + 1);
    CHECK_THROWS_AS(d.generate(big), DomainError);
}
