#pragma once

// Distinguishability of Eve's hypotheses and detection-bias bounds.
//
// Relative entropies are in nats (so that 1/4 ||rho - sigma||_1 <= sqrt(D/8)),
// trace distances are the Schatten-1 norm without a 1/2 factor.

#include <optional>
#include <string>
#include <vector>

#include "covertq/channel.hpp"
#include "covertq/fock.hpp"

namespace covertq::covertness {

double trace_distance(const fock::DensityMatrix& rho, const fock::DensityMatrix& sigma);
double trace_norm(const Matrix& hermitian);

/// D(rho || sigma) in nats; +infinity when rho has weight outside supp(sigma).
double relative_entropy(const fock::DensityMatrix& rho, const fock::DensityMatrix& sigma);
double relative_entropy(const Matrix& rho, const Matrix& sigma);

/// Optimal equal-prior discrimination error 1/2 - ||rho - sigma||_1 / 4.
double helstrom_error(const fock::DensityMatrix& rho, const fock::DensityMatrix& sigma);

/// Uhlmann fidelity ||sqrt(rho) sqrt(sigma)||_1 (not squared).
double fidelity(const Matrix& rho, const Matrix& sigma);

struct BiasReport {
    std::optional<double> epsilon_numeric;
    double epsilon_analytic = 0.0;
    double epsilon_asymptotic = 0.0;
    double epsilon_floor = 0.0;
    std::optional<double> relative_entropy_per_bin;
    std::optional<double> trace_distance_per_bin;
    std::optional<double> worst_case_spread;
    std::optional<int> cutoff;
    bool asymptotic_in_regime = false;
    bool degenerate = false;
    std::vector<std::string> warnings;
    channel::CovertParams params;
};

/// Range of (nbar, q) where the Fock-space route is numerically trustworthy.
bool in_numeric_domain(const channel::CovertParams& params);

/// Closed-form bound coefficients, eps^2 = linear * d + quadratic * d^2 / N.
struct BoundCoefficients {
    double linear = 0.0;
    double quadratic = 0.0;
};
BoundCoefficients bound_coefficients(const channel::Encoding& encoding, double nbar);

double bias_analytic(const channel::CovertParams& params);

struct Asymptotic {
    double value = 0.0;
    bool in_regime = false;
};
Asymptotic bias_asymptotic(const channel::CovertParams& params);

/// sqrt(d nbar^2 / (8 (1 + nbar)^3)), the single-photon floor.
double bias_floor(double d, double nbar);
/// Floor for the given encoding: sqrt(linear * d).
double bias_floor(const channel::Encoding& encoding, double d, double nbar);

/// Closed forms only; numeric fields left empty.
BiasReport bias_closed_form(const channel::CovertParams& params);

/// sqrt(N/8 * max_signal D(rho_E || sigma_E)) plus every closed form.
BiasReport bias_numeric(const channel::CovertParams& params, int cutoff = 0, int grid_resolution = 16);

}  // namespace covertq::covertness
