#include "covertq/keybudget.hpp"

#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include "covertq/config.hpp"
#include "covertq/drbg.hpp"
#include "covertq/qkd.hpp"

namespace covertq::keybudget {

namespace {

// CTR_DRBG entropy input: the seed itself when it is 48 bytes, else SHA-384(seed).
std::vector<std::uint8_t> drbg_entropy(std::span<const std::uint8_t> seed)
{
    if (seed.size() == drbg::kSeedBytes) {
        return {seed.begin(), seed.end()};
    }
    std::vector<std::uint8_t> digest(EVP_MAX_MD_SIZE);
    unsigned int len = 0;
    if (EVP_Digest(seed.data(), seed.size(), digest.data(), &len, EVP_sha384(), nullptr) != 1 ||
        len != drbg::kSeedBytes) {
        throw NumericalError("SHA-384 failed");
    }
    digest.resize(len);
    return digest;
}

std::uint64_t parse_count(std::string text)
{
    const auto first = text.find_first_not_of(' ');
    const auto last = text.find_last_not_of(" \r");
    text = first == std::string::npos ? "" : text.substr(first, last - first + 1);
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
        throw DomainError("malformed schedule field '" + text + "'");
    }
    try {
        return std::stoull(text);
    } catch (const std::out_of_range&) {
        throw DomainError("schedule field out of range '" + text + "'");
    }
}

}  // namespace

double schedule_cost(double N, double q)
{
    if (!(N >= 0.0)) {
        throw DomainError("N must be >= 0");
    }
    if (!(q >= 0.0 && q <= 1.0)) {
        throw DomainError("q must lie in [0,1]");
    }
    return N * qkd::binary_entropy(q);
}

double expansion_ratio(std::uint64_t seed_bits, std::uint64_t output_bits_per_call, double q)
{
    if (seed_bits == 0 || output_bits_per_call == 0) {
        throw DomainError("PRNG seed and output sizes must be positive");
    }
    if (!(q > 0.0 && q <= 0.5)) {
        throw DomainError("q must lie in (0, 1/2]");
    }
    const double prng_gain = static_cast<double>(output_bits_per_call) / static_cast<double>(seed_bits);
    return prng_gain / (qkd::binary_entropy(q) / q);
}

KeyBudgetReport regeneration_deficit(double N, double q, const PrngParams& prng)
{
    if (!(q > 0.0 && q < 0.5)) {
        throw DomainError("covert regime needs 0 < q < 1/2, got q = " + std::to_string(q));
    }
    if (!(N >= 1.0)) {
        throw DomainError("N must be >= 1");
    }
    KeyBudgetReport r;
    r.N = N;
    r.q = q;
    r.consumed_bits = schedule_cost(N, q);
    r.produced_bits_max = N * q;
    r.deficit = r.consumed_bits - r.produced_bits_max;
    r.cost_ratio = qkd::binary_entropy(q) / q;
    r.sampler_keystream_bits = 32.0 * N;
    r.prng_seed_bits = prng.seed_bits;
    r.prng_output_bits_per_call = prng.output_bits_per_call;
    r.expansion_factor = expansion_ratio(prng.seed_bits, prng.output_bits_per_call, q);
    r.regeneration_feasible = r.expansion_factor > 1.0;
    return r;
}

std::uint32_t threshold_for(double q)
{
    if (!(q >= 0.0 && q < 1.0)) {
        throw DomainError("schedule probability must lie in [0,1), got " + std::to_string(q));
    }
    return static_cast<std::uint32_t>(std::floor(std::ldexp(q, 32)));
}

ScheduleKey make_schedule_key(double q, std::vector<std::uint8_t> seed, std::string algorithm_id)
{
    return ScheduleKey{std::move(algorithm_id), std::move(seed), threshold_for(q)};
}

std::vector<std::uint8_t> prng_schedule(const ScheduleKey& key, std::uint64_t N, unsigned workers)
{
    if (key.algorithm_id != kCtrDrbgAes256) {
        throw ConfigError("unknown schedule algorithm '" + key.algorithm_id + "' (supported: " + kCtrDrbgAes256 + ")");
    }
    if (N < 1) {
        throw DomainError("schedule length must be >= 1");
    }
    const auto entropy = drbg_entropy(key.seed);
    const auto stream = drbg::keystream(entropy, static_cast<std::size_t>(N) * 4, workers);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(N));
    for (std::size_t i = 0; i < bits.size(); ++i) {
        const std::uint8_t* w = stream.data() + 4 * i;
        const std::uint32_t word = static_cast<std::uint32_t>(w[0]) | (static_cast<std::uint32_t>(w[1]) << 8) |
                                   (static_cast<std::uint32_t>(w[2]) << 16) | (static_cast<std::uint32_t>(w[3]) << 24);
        bits[i] = word < key.threshold ? 1 : 0;
    }
    return bits;
}

void write_schedule(std::ostream& os, const ScheduleKey& key, std::span<const std::uint8_t> bits)
{
    os << "covertq-schedule v1, " << key.algorithm_id << ", " << bits.size() << ", " << key.threshold << '\n';
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != 0) {
            os << i << '\n';
        }
    }
}

ParsedSchedule read_schedule(std::istream& is)
{
    std::string header;
    if (!std::getline(is, header)) {
        throw DomainError("empty schedule file");
    }
    const std::string magic = "covertq-schedule v1, ";
    if (header.rfind(magic, 0) != 0) {
        throw DomainError("not a covertq-schedule v1 file");
    }
    ParsedSchedule s;
    std::istringstream fields(header.substr(magic.size()));
    std::string alg;
    std::string n;
    std::string thr;
    if (!std::getline(fields, alg, ',') || !std::getline(fields, n, ',') || !std::getline(fields, thr)) {
        throw DomainError("malformed schedule header");
    }
    s.algorithm_id = alg;
    s.N = parse_count(n);
    const auto threshold = parse_count(thr);
    if (threshold > 0xffffffffULL) {
        throw DomainError("schedule threshold does not fit in 32 bits");
    }
    s.threshold = static_cast<std::uint32_t>(threshold);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty()) {
            const auto index = parse_count(line);
            if (index >= s.N || (!s.selected.empty() && index <= s.selected.back())) {
                throw DomainError("schedule indices must be increasing and below N");
            }
            s.selected.push_back(index);
        }
    }
    return s;
}

std::vector<std::uint8_t> parse_hex(const std::string& hex)
{
    if (hex.size() % 2 != 0) {
        throw DomainError("hex string must have an even number of digits");
    }
    std::vector<std::uint8_t> out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        const std::string pair = hex.substr(i, 2);
        if (!std::isxdigit(static_cast<unsigned char>(pair[0])) || !std::isxdigit(static_cast<unsigned char>(pair[1]))) {
            throw DomainError("invalid hex digits '" + pair + "'");
        }
        const int byte = std::stoi(pair, nullptr, 16);
        out.push_back(static_cast<std::uint8_t>(byte));
    }
    return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes)
{
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        s.push_back(kDigits[b >> 4]);
        s.push_back(kDigits[b & 0xf]);
    }
    return s;
}

}  // namespace covertq::keybudget
