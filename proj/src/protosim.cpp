#include "covertq/protosim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "covertq/covertness.hpp"
#include "covertq/qkd.hpp"

namespace covertq::protosim {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Runs body(first, last, slot) over [0, total) split into `workers`
// contiguous ranges; slot indexes per-worker accumulators.
template <class Body>
void parallel_ranges(std::uint64_t total, unsigned workers, Body body)
{
    workers = std::max(1u, workers);
    if (workers == 1 || total < workers) {
        body(0, total, 0u);
        return;
    }
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (total + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t first = std::min(total, w * chunk);
        const std::uint64_t last = std::min(total, first + chunk);
        pool.emplace_back(body, first, last, w);
    }
    for (auto& t : pool) {
        t.join();
    }
}

struct QkdCounts {
    std::uint64_t detections = 0;
    std::uint64_t sifted = 0;
    std::uint64_t errors = 0;
};

struct AttackCounts {
    std::uint64_t false_alarms = 0;
    std::uint64_t missed = 0;
};

}  // namespace

void SimConfig::validate() const
{
    params.validate();
    if (!(tau > 0.0 && tau <= 1.0)) {
        throw DomainError("tau must lie in (0,1], got " + std::to_string(tau));
    }
    if (!(bob_noise_nbar >= 0.0) || !std::isfinite(bob_noise_nbar)) {
        throw DomainError("bob_noise_nbar must be finite and >= 0");
    }
    if (trials < 1) {
        throw DomainError("trials must be >= 1");
    }
}

SimConfig noise_consistent_config(const channel::CovertParams& params, double channel_tau, std::uint64_t trials,
                                  std::vector<std::uint8_t> master_seed)
{
    params.validate();
    SimConfig c;
    c.params = params;
    c.tau = params.noise.eta * channel_tau;
    c.bob_noise_nbar = channel_tau * (1.0 - params.noise.eta) * params.noise.nbar;
    c.trials = trials;
    c.master_seed = std::move(master_seed);
    return c;
}

std::uint64_t trial_seed(std::span<const std::uint8_t> master_seed, std::uint64_t index)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (auto b : master_seed) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(h ^ splitmix64(index));
}

SimReport simulate_qkd(const SimConfig& config)
{
    config.validate();
    const bool coherent = config.params.encoding.kind == channel::EncodingKind::Coherent;
    const double mean_signal = coherent ? config.tau * config.params.encoding.mu : 0.0;
    const double noise = config.bob_noise_nbar;

    std::vector<QkdCounts> partial(std::max(1u, config.workers));
    parallel_ranges(config.trials, config.workers, [&](std::uint64_t first, std::uint64_t last, unsigned slot) {
        QkdCounts counts;
        std::bernoulli_distribution coin(0.5);
        std::bernoulli_distribution arrives(config.tau);
        std::geometric_distribution<int> thermal(1.0 / (1.0 + noise));
        for (std::uint64_t t = first; t < last; ++t) {
            std::mt19937_64 rng(trial_seed(config.master_seed, t));
            const bool alice_basis = coin(rng);
            const int alice_bit = coin(rng) ? 1 : 0;
            const bool bob_basis = coin(rng);
            const bool matched = alice_basis == bob_basis;

            int photons[2] = {0, 0};
            if (coherent) {
                if (matched) {
                    photons[alice_bit] += std::poisson_distribution<int>(mean_signal)(rng);
                } else {
                    std::poisson_distribution<int> half(mean_signal / 2.0);
                    photons[0] += half(rng);
                    photons[1] += half(rng);
                }
            } else if (arrives(rng)) {
                const int port = matched ? alice_bit : (coin(rng) ? 1 : 0);
                photons[port] += 1;
            }
            if (noise > 0.0) {
                photons[0] += thermal(rng);
                photons[1] += thermal(rng);
            }
            const bool click0 = photons[0] > 0;
            const bool click1 = photons[1] > 0;
            if (!click0 && !click1) {
                continue;
            }
            ++counts.detections;
            if (!matched) {
                continue;
            }
            ++counts.sifted;
            int bob_bit = click1 ? 1 : 0;
            if (click0 && click1) {
                bob_bit = coin(rng) ? 1 : 0;
            }
            if (bob_bit != alice_bit) {
                ++counts.errors;
            }
        }
        partial[slot] = counts;
    });

    QkdCounts total;
    for (const auto& p : partial) {
        total.detections += p.detections;
        total.sifted += p.sifted;
        total.errors += p.errors;
    }
    SimReport r;
    r.trials = config.trials;
    r.sifted_count = total.sifted;
    r.error_count = total.errors;
    r.empirical_detection_rate_R = static_cast<double>(total.detections) / static_cast<double>(config.trials);
    if (config.params.noise.eta > 0.0) {
        r.predicted_qber = qkd::qber(config.params.noise, config.params.encoding).value;
    }
    if (total.sifted == 0) {
        r.degenerate = true;
        return r;
    }
    const double n = static_cast<double>(total.sifted);
    r.empirical_qber = static_cast<double>(total.errors) / n;
    r.qber_stderr = std::sqrt(r.empirical_qber * (1.0 - r.empirical_qber) / n);
    return r;
}

BoundChain eve_exact_oracle(const channel::CovertParams& params, int copies, int cutoff)
{
    if (copies < 1 || copies > 6) {
        throw DomainError("exact oracle supports 1..6 copies");
    }
    if (cutoff < 1 || cutoff > 3) {
        throw DomainError("exact oracle supports cutoff 1..3");
    }
    const auto worst = channel::worst_case_signal(params, 4, cutoff);
    const auto states = channel::eve_states(params, worst.signal, cutoff);
    const auto rho = fock::tensor_power(states.no_signal, copies);
    const auto sigma = fock::tensor_power(states.communicating, copies);

    BoundChain chain;
    chain.copies = copies;
    chain.cutoff = cutoff;

    // Optimal test: guess "no signal" on the positive part of rho - sigma.
    const auto diff = fock::eig_hermitian(rho.matrix() - sigma.matrix());
    Matrix positive = Matrix::Zero(diff.vectors.rows(), diff.vectors.cols());
    for (Eigen::Index i = 0; i < diff.values.size(); ++i) {
        if (diff.values(i) > 0.0) {
            positive += diff.vectors.col(i) * diff.vectors.col(i).adjoint();
        }
    }
    const double pass_rho = (rho.matrix() * positive).trace().real();
    const double pass_sigma = (sigma.matrix() * positive).trace().real();
    chain.p_fa = 1.0 - pass_rho;
    chain.p_md = pass_sigma;
    chain.p_e_exact = 0.5 * (chain.p_fa + chain.p_md);

    chain.trace_norm = diff.values.cwiseAbs().sum();
    chain.helstrom = 0.5 - 0.25 * chain.trace_norm;
    chain.relative_entropy_per_bin = covertness::relative_entropy(states.no_signal, states.communicating);
    chain.relative_entropy_joint = covertness::relative_entropy(rho, sigma);
    chain.pinsker = 0.5 - std::sqrt(copies * chain.relative_entropy_per_bin / 8.0);
    chain.slack_exact_vs_helstrom = chain.p_e_exact - chain.helstrom;
    chain.slack_helstrom_vs_pinsker = chain.helstrom - chain.pinsker;
    chain.holds = chain.slack_exact_vs_helstrom >= -1e-9 && chain.slack_helstrom_vs_pinsker >= -1e-9;
    return chain;
}

SimReport eve_product_attack(const channel::CovertParams& params, std::uint64_t trials,
                             std::span<const std::uint8_t> master_seed, int cutoff, unsigned workers)
{
    params.validate();
    if (trials < 1) {
        throw DomainError("trials must be >= 1");
    }
    const auto bins = static_cast<std::uint64_t>(params.N);
    const auto worst = channel::worst_case_signal(params, 4, cutoff);
    const auto states = channel::eve_states(params, worst.signal, cutoff);
    const Matrix& rho = states.no_signal.matrix();
    const Matrix& sigma = states.communicating.matrix();

    SimReport r;
    r.trials = trials;
    const double d_bin = covertness::relative_entropy(states.no_signal, states.communicating);
    const double fid = covertness::fidelity(rho, sigma);
    const double fvdg = 0.5 * (1.0 - std::sqrt(std::max(0.0, 1.0 - std::pow(fid, 2.0 * params.N))));
    r.helstrom_lower_bound = std::max(0.5 - std::sqrt(params.N * d_bin / 8.0), fvdg);

    if (covertness::trace_distance(states.no_signal, states.communicating) < 1e-15) {
        r.degenerate = true;
        r.p_fa = 0.5;
        r.p_md = 0.5;
        r.p_e_empirical = 0.5;
        r.p_e_stderr = 0.0;
        return r;
    }

    const auto basis = fock::eig_hermitian(sigma - rho).vectors;
    const Eigen::VectorXd p_rho = (basis.adjoint() * rho * basis).diagonal().real().cwiseMax(0.0);
    const Eigen::VectorXd p_sigma = (basis.adjoint() * sigma * basis).diagonal().real().cwiseMax(0.0);
    const std::vector<double> w_rho(p_rho.data(), p_rho.data() + p_rho.size());
    const std::vector<double> w_sigma(p_sigma.data(), p_sigma.data() + p_sigma.size());
    std::vector<double> llr(w_rho.size());
    for (std::size_t k = 0; k < llr.size(); ++k) {
        if (w_sigma[k] > 0.0 && w_rho[k] > 0.0) {
            llr[k] = std::log(w_sigma[k] / w_rho[k]);
        } else if (w_sigma[k] > 0.0) {
            llr[k] = std::numeric_limits<double>::infinity();
        } else {
            llr[k] = -std::numeric_limits<double>::infinity();
        }
    }

    std::vector<AttackCounts> partial(std::max(1u, workers));
    parallel_ranges(trials, workers, [&](std::uint64_t first, std::uint64_t last, unsigned slot) {
        AttackCounts counts;
        std::discrete_distribution<std::size_t> draw_rho(w_rho.begin(), w_rho.end());
        std::discrete_distribution<std::size_t> draw_sigma(w_sigma.begin(), w_sigma.end());
        std::bernoulli_distribution coin(0.5);
        auto decide_signal = [&](std::mt19937_64& rng, auto& draw) {
            double total = 0.0;
            for (std::uint64_t b = 0; b < bins; ++b) {
                total += llr[draw(rng)];
            }
            if (total == 0.0 || std::isnan(total)) {
                return coin(rng);
            }
            return total > 0.0;
        };
        for (std::uint64_t t = first; t < last; ++t) {
            std::mt19937_64 rng(trial_seed(master_seed, t));
            if (decide_signal(rng, draw_rho)) {
                ++counts.false_alarms;
            }
            if (!decide_signal(rng, draw_sigma)) {
                ++counts.missed;
            }
        }
        partial[slot] = counts;
    });

    AttackCounts total;
    for (const auto& p : partial) {
        total.false_alarms += p.false_alarms;
        total.missed += p.missed;
    }
    const double n = static_cast<double>(trials);
    const double pfa = static_cast<double>(total.false_alarms) / n;
    const double pmd = static_cast<double>(total.missed) / n;
    r.p_fa = pfa;
    r.p_md = pmd;
    r.p_e_empirical = 0.5 * (pfa + pmd);
    r.p_e_stderr = 0.5 * std::sqrt(pfa * (1.0 - pfa) / n + pmd * (1.0 - pmd) / n);
    return r;
}

}  // namespace covertq::protosim
