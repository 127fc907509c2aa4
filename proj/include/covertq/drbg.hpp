#pragma once

// CTR_DRBG (NIST SP 800-90A) over AES-256 without a derivation function.
// The block cipher comes from OpenSSL; the DRBG state machine lives here so
// that keystreams can be generated in parallel by request index.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace covertq::drbg {

inline constexpr std::size_t kKeyBytes = 32;
inline constexpr std::size_t kBlockBytes = 16;
inline constexpr std::size_t kSeedBytes = kKeyBytes + kBlockBytes;  // seedlen = 384 bits
/// max_number_of_bits_per_request = 2^19
inline constexpr std::size_t kMaxRequestBytes = std::size_t{1} << 16;

class CtrDrbg {
public:
    /// `entropy` must be exactly kSeedBytes; personalization at most kSeedBytes.
    explicit CtrDrbg(std::span<const std::uint8_t> entropy, std::span<const std::uint8_t> personalization = {});

    /// One generate request of at most kMaxRequestBytes, no additional input.
    void generate(std::span<std::uint8_t> out);

    /// Skips one request of `bytes` without producing output.
    void skip(std::size_t bytes);

    std::uint64_t reseed_counter() const noexcept { return reseed_counter_; }

private:
    void update(std::span<const std::uint8_t> provided);

    std::array<std::uint8_t, kKeyBytes> key_{};
    std::array<std::uint8_t, kBlockBytes> v_{};
    std::uint64_t reseed_counter_ = 0;
};

/// Concatenated output of consecutive maximal requests, `total_bytes` long.
/// Requests are independent once the state chain is known, so they are split
/// across `workers` threads; the result does not depend on the worker count.
std::vector<std::uint8_t> keystream(std::span<const std::uint8_t> entropy, std::size_t total_bytes,
                                    unsigned workers = 1);

}  // namespace covertq::drbg
