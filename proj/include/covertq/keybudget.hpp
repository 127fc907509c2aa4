#pragma once

// Key accounting for covert protocols and the PRNG-driven time-bin schedule.
//
// Choosing which of N bins carry a signal, each independently with
// probability q, costs N h(q) bits of shared secret on average, while at most
// N q key bits come back. Since h(q) > q below q = 1/2, a covert protocol
// never pays for its own schedule. Expanding a short seed with a secure PRNG
// breaks that loop: the schedule is only as hidden as the PRNG output is
// indistinguishable from random (anyone who could spot the covert traffic
// could use that ability to tell the PRNG output from a random string),
// while the distilled key keeps its information-theoretic security.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace covertq::keybudget {

inline constexpr const char* kCtrDrbgAes256 = "ctr-drbg-aes256";
inline constexpr std::uint64_t kDefaultSeedBits = 440;
inline constexpr std::uint64_t kDefaultOutputBitsPerCall = std::uint64_t{1} << 19;

/// N h(q) in bits; zero at q in {0, 1}.
double schedule_cost(double N, double q);

struct PrngParams {
    std::uint64_t seed_bits = kDefaultSeedBits;
    std::uint64_t output_bits_per_call = kDefaultOutputBitsPerCall;
};

struct KeyBudgetReport {
    double N = 0.0;
    double q = 0.0;
    double consumed_bits = 0.0;        // N h(q), entropy-optimal schedule cost
    double produced_bits_max = 0.0;    // N q
    double deficit = 0.0;              // consumed - produced
    double cost_ratio = 0.0;           // h(q) / q
    double sampler_keystream_bits = 0.0;  // 32 N, what the threshold sampler actually draws
    std::uint64_t prng_seed_bits = 0;
    std::uint64_t prng_output_bits_per_call = 0;
    double expansion_factor = 0.0;     // (output / seed) / (h(q) / q)
    bool regeneration_feasible = false;
};

KeyBudgetReport regeneration_deficit(double N, double q, const PrngParams& prng = {});

/// (output_bits_per_call / seed_bits) / (h(q) / q): net key multiplication per
/// regeneration cycle. Greater than 1 means regeneration is self-sustaining.
double expansion_ratio(std::uint64_t seed_bits, std::uint64_t output_bits_per_call, double q);

struct ScheduleKey {
    std::string algorithm_id = kCtrDrbgAes256;
    std::vector<std::uint8_t> seed;
    std::uint32_t threshold = 0;  // floor(q 2^32)
};

std::uint32_t threshold_for(double q);
ScheduleKey make_schedule_key(double q, std::vector<std::uint8_t> seed, std::string algorithm_id = kCtrDrbgAes256);

/// Bit i is 1 iff the i-th little-endian 32-bit keystream word is below the
/// threshold. Deterministic in (algorithm_id, seed, N, threshold).
std::vector<std::uint8_t> prng_schedule(const ScheduleKey& key, std::uint64_t N, unsigned workers = 1);

/// Header `covertq-schedule v1, <algorithm_id>, <N>, <threshold>` then one
/// selected bin index per line.
void write_schedule(std::ostream& os, const ScheduleKey& key, std::span<const std::uint8_t> bits);

struct ParsedSchedule {
    std::string algorithm_id;
    std::uint64_t N = 0;
    std::uint32_t threshold = 0;
    std::vector<std::uint64_t> selected;
};
ParsedSchedule read_schedule(std::istream& is);

std::vector<std::uint8_t> parse_hex(const std::string& hex);
std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace covertq::keybudget
