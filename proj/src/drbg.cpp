#include "covertq/drbg.hpp"

#include <algorithm>
#include <memory>
#include <thread>

#include <openssl/evp.h>

#include "covertq/config.hpp"

namespace covertq::drbg {

namespace {

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

class Aes256 {
public:
    explicit Aes256(std::span<const std::uint8_t, kKeyBytes> key) : ctx_(EVP_CIPHER_CTX_new(), &EVP_CIPHER_CTX_free)
    {
        if (!ctx_ || EVP_EncryptInit_ex(ctx_.get(), EVP_aes_256_ecb(), nullptr, key.data(), nullptr) != 1) {
            throw NumericalError("AES-256 initialisation failed");
        }
        EVP_CIPHER_CTX_set_padding(ctx_.get(), 0);
    }

    // Encrypts consecutive 16-byte blocks in place.
    void encrypt(std::span<std::uint8_t> blocks)
    {
        int len = 0;
        if (EVP_EncryptUpdate(ctx_.get(), blocks.data(), &len, blocks.data(), static_cast<int>(blocks.size())) != 1 ||
            static_cast<std::size_t>(len) != blocks.size()) {
            throw NumericalError("AES-256 encryption failed");
        }
    }

private:
    CipherCtx ctx_;
};

void increment(std::array<std::uint8_t, kBlockBytes>& v, std::uint64_t by = 1)
{
    // big-endian 128-bit add
    std::uint64_t carry = by;
    for (int i = static_cast<int>(kBlockBytes) - 1; i >= 0 && carry != 0; --i) {
        const std::uint64_t sum = v[static_cast<std::size_t>(i)] + (carry & 0xff);
        v[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(sum);
        carry = (carry >> 8) + (sum >> 8);
    }
}

// Counter-mode blocks Key(V+1), Key(V+2), ... into out (multiple of 16 or truncated tail).
void counter_blocks(const std::array<std::uint8_t, kKeyBytes>& key, std::array<std::uint8_t, kBlockBytes> v,
                    std::span<std::uint8_t> out)
{
    const std::size_t blocks = (out.size() + kBlockBytes - 1) / kBlockBytes;
    std::vector<std::uint8_t> buf(blocks * kBlockBytes);
    for (std::size_t b = 0; b < blocks; ++b) {
        increment(v);
        std::copy(v.begin(), v.end(), buf.begin() + static_cast<std::ptrdiff_t>(b * kBlockBytes));
    }
    Aes256 aes(key);
    aes.encrypt(buf);
    std::copy_n(buf.begin(), out.size(), out.begin());
}

}  // namespace

CtrDrbg::CtrDrbg(std::span<const std::uint8_t> entropy, std::span<const std::uint8_t> personalization)
{
    if (entropy.size() != kSeedBytes) {
        throw DomainError("CTR_DRBG without derivation function needs exactly 48 bytes of entropy");
    }
    if (personalization.size() > kSeedBytes) {
        throw DomainError("personalization string longer than 48 bytes");
    }
    std::array<std::uint8_t, kSeedBytes> seed{};
    std::copy(entropy.begin(), entropy.end(), seed.begin());
    for (std::size_t i = 0; i < personalization.size(); ++i) {
        seed[i] ^= personalization[i];
    }
    update(seed);
    reseed_counter_ = 1;
}

void CtrDrbg::update(std::span<const std::uint8_t> provided)
{
    std::array<std::uint8_t, kSeedBytes> temp{};
    counter_blocks(key_, v_, temp);
    for (std::size_t i = 0; i < kSeedBytes; ++i) {
        temp[i] ^= provided[i];
    }
    std::copy_n(temp.begin(), kKeyBytes, key_.begin());
    std::copy_n(temp.begin() + kKeyBytes, kBlockBytes, v_.begin());
}

void CtrDrbg::generate(std::span<std::uint8_t> out)
{
    if (out.size() > kMaxRequestBytes) {
        throw DomainError("CTR_DRBG request exceeds 2^19 bits");
    }
    counter_blocks(key_, v_, out);
    skip(out.size());
}

void CtrDrbg::skip(std::size_t bytes)
{
    increment(v_, (bytes + kBlockBytes - 1) / kBlockBytes);
    const std::array<std::uint8_t, kSeedBytes> zeros{};
    update(zeros);
    ++reseed_counter_;
}

std::vector<std::uint8_t> keystream(std::span<const std::uint8_t> entropy, std::size_t total_bytes, unsigned workers)
{
    std::vector<std::uint8_t> out(total_bytes);
    const std::size_t requests = (total_bytes + kMaxRequestBytes - 1) / kMaxRequestBytes;
    if (requests == 0) {
        return out;
    }
    // Walk the state chain cheaply, keeping one generator snapshot per request.
    std::vector<CtrDrbg> states;
    states.reserve(requests);
    CtrDrbg drbg(entropy);
    for (std::size_t r = 0; r < requests; ++r) {
        states.push_back(drbg);
        drbg.skip(std::min(kMaxRequestBytes, total_bytes - r * kMaxRequestBytes));
    }
    auto fill = [&](std::size_t first, std::size_t stride) {
        for (std::size_t r = first; r < requests; r += stride) {
            const std::size_t offset = r * kMaxRequestBytes;
            const std::size_t len = std::min(kMaxRequestBytes, total_bytes - offset);
            states[r].generate(std::span<std::uint8_t>(out.data() + offset, len));
        }
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(requests)));
    if (workers == 1) {
        fill(0, 1);
        return out;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(fill, w, workers);
    }
    for (auto& t : pool) {
        t.join();
    }
    return out;
}

}  // namespace covertq::drbg
