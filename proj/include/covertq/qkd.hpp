#pragma once

// Asymptotic BB84 key rates under noise-only errors, and the number of
// time-bins needed to reach a target detection bias.

#include <optional>
#include <string>
#include <vector>

#include "covertq/channel.hpp"

namespace covertq::qkd {

/// h(x) in bits.
double binary_entropy(double x);

struct QberEstimate {
    double value = 0.0;
    bool clipped = false;                  // raw value exceeded 1/2
    bool approximation_warning = false;    // coherent: nbar not << mu
};

/// Noise-induced error rate with thermal noise added before transmission:
///   single photon  (1/eta - 1) nbar
///   coherent       (1/eta - 1) nbar / mu
QberEstimate qber(const channel::NoiseModel& noise, const channel::Encoding& encoding);

struct KeyRateParams {
    double R = 1.0;      // detection rate per signal
    double Q = 0.0;      // quantum bit error rate
    double mu = 0.0;     // coherent only
    double tau = 1.0;    // total transmissivity, coherent only
};

struct KeyRateReport {
    double K = 0.0;
    double Q_used = 0.0;
    std::optional<double> Y1;
    bool positive = false;
    bool clipped = false;  // Q/Y1 clipped to 1/2
    std::vector<std::string> notes;
};

/// Shown alongside coherent-state key rates: what the formula gives at the
/// commonly quoted operating point, so readers comparing against 0.47 R
/// are not surprised.
extern const char* const kCoherentRateNote;

/// K = R (1 - 2 h(Q))
KeyRateReport key_rate_single_photon(const KeyRateParams& p);
/// K = R [Y1 (1 - h(Q/Y1)) - h(Q)],  Y1 = max(0, 1 - mu / (2 tau))
KeyRateReport key_rate_coherent(const KeyRateParams& p);

struct BinsResult {
    bool feasible = false;
    double N = 0.0;       // valid when feasible
    double floor = 0.0;   // encoding's bias floor sqrt(linear * d)
};

/// Smallest N with bias_analytic(d, N) <= epsilon_target.
BinsResult required_bins(double d, double nbar, const channel::Encoding& encoding, double epsilon_target);

}  // namespace covertq::qkd
