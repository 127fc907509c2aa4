#pragma once

// Monte Carlo of covert BB84 rounds and exact small-N discrimination checks.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "covertq/channel.hpp"

namespace covertq::protosim {

struct SimConfig {
    channel::CovertParams params;
    double tau = 1.0;             // signal transmissivity Alice -> Bob
    double bob_noise_nbar = 0.0;  // thermal photons per detector mode at Bob
    std::uint64_t trials = 1;
    std::vector<std::uint8_t> master_seed;
    unsigned workers = 1;

    void validate() const;
};

/// Bob-side setting matching thermal noise mixed in before transmission:
/// the signal reaches Bob with eta * channel_tau and the noise per mode is
/// channel_tau * (1 - eta) * nbar.
SimConfig noise_consistent_config(const channel::CovertParams& params, double channel_tau, std::uint64_t trials,
                                  std::vector<std::uint8_t> master_seed);

struct SimReport {
    double empirical_qber = 0.0;
    double qber_stderr = 0.0;
    double empirical_detection_rate_R = 0.0;
    std::uint64_t sifted_count = 0;
    std::uint64_t error_count = 0;
    std::uint64_t trials = 0;
    double predicted_qber = 0.0;
    bool degenerate = false;  // no sifted events, or sigma_E == rho_E for the attack
    std::optional<double> p_fa;
    std::optional<double> p_md;
    std::optional<double> p_e_empirical;
    std::optional<double> p_e_stderr;
    std::optional<double> helstrom_lower_bound;
};

/// 64-bit seed for trial `index`, derived from the master seed only.
std::uint64_t trial_seed(std::span<const std::uint8_t> master_seed, std::uint64_t index);

SimReport simulate_qkd(const SimConfig& config);

struct BoundChain {
    int copies = 0;
    int cutoff = 0;
    double p_e_exact = 0.0;             // from the optimal measurement's error probabilities
    double p_fa = 0.0;
    double p_md = 0.0;
    double trace_norm = 0.0;            // ||rho^N - sigma^N||_1
    double helstrom = 0.0;              // 1/2 - trace_norm / 4
    double relative_entropy_per_bin = 0.0;
    double relative_entropy_joint = 0.0;  // D(rho^N || sigma^N), direct
    double pinsker = 0.0;               // 1/2 - sqrt(N D / 8)
    double slack_exact_vs_helstrom = 0.0;
    double slack_helstrom_vs_pinsker = 0.0;
    bool holds = false;                 // both slacks >= -1e-9
};

/// Builds rho_E^{(x)N} and sigma_E^{(x)N} explicitly and checks
/// P_e >= 1/2 - ||rho - sigma||_1 / 4 >= 1/2 - sqrt(N D / 8).
BoundChain eve_exact_oracle(const channel::CovertParams& params, int copies, int cutoff);

/// Eve measures every bin in the eigenbasis of sigma_E - rho_E and thresholds
/// the summed log-likelihood ratio. Uses params.N bins per trial.
SimReport eve_product_attack(const channel::CovertParams& params, std::uint64_t trials,
                             std::span<const std::uint8_t> master_seed, int cutoff = 0, unsigned workers = 1);

}  // namespace covertq::protosim
