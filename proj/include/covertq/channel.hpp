#pragma once

// Eve's per-time-bin states for the two thermal-noise placements and the two
// signal encodings.
//
// Both noise models mix each polarization mode of Alice's output with a
// thermal mode on a beamsplitter of transmissivity eta. They differ in which
// output port Eve holds:
//   EnvironmentThermal  the loss port: (1 - eta) of the signal, eta * nbar thermal
//   LabThermal          the transmitted port: eta of the signal, (1 - eta) * nbar thermal

#include <string>
#include <vector>

#include "covertq/fock.hpp"

namespace covertq::channel {

enum class NoiseKind { EnvironmentThermal, LabThermal };

struct NoiseModel {
    NoiseKind kind = NoiseKind::LabThermal;
    double eta = 0.5;
    double nbar = 0.0;

    void validate() const;
    /// Mean thermal photons per mode reaching Eve with no signal.
    double eve_nbar() const;
    /// Fraction of Alice's signal intensity reaching Eve.
    double eve_signal_fraction() const;
};

enum class EncodingKind { SinglePhoton, Coherent };

struct Encoding {
    EncodingKind kind = EncodingKind::SinglePhoton;
    double mu = 0.0;  // total mean photon number, Coherent only

    static Encoding single_photon() { return {EncodingKind::SinglePhoton, 0.0}; }
    static Encoding coherent(double mu) { return {EncodingKind::Coherent, mu}; }
    void validate() const;
};

/// Protocol operating point: N time-bins and d expected signals, q = d/N.
struct CovertParams {
    double N = 1.0;
    double d = 0.0;
    Encoding encoding{};
    NoiseModel noise{};

    double q() const { return d / N; }
    /// Per-bin send probability: q for single photons, q/mu for coherent states.
    double send_probability() const;
    void validate() const;
};

std::string to_string(NoiseKind kind);
std::string to_string(EncodingKind kind);
NoiseKind parse_noise_kind(const std::string& s);
EncodingKind parse_encoding_kind(const std::string& s);

/// Per-mode cutoff for Eve's modes: smallest truncation with every input tail
/// below the tolerance, plus room for the signal.
int auto_cutoff(const NoiseModel& noise, const Encoding& encoding);

/// thermal(eve_nbar) (x) thermal(eve_nbar) on modes E_H, E_V. cutoff <= 0 selects auto_cutoff.
fock::DensityMatrix eve_no_signal(const NoiseModel& noise, const Encoding& encoding = Encoding::single_photon(),
                                  int cutoff = 0);

/// Eve's two-mode state when Alice sends `signal` in the given encoding.
fock::DensityMatrix eve_signal(const NoiseModel& noise, const Encoding& encoding, const fock::QubitSignal& signal,
                               int cutoff = 0);

/// The same single-photon state built the long way: tensor the four input
/// modes, apply both beamsplitters, trace out Bob. Only practical at small
/// cutoffs; used to cross-check eve_signal.
fock::DensityMatrix eve_signal_reference(const NoiseModel& noise, const fock::QubitSignal& signal, int cutoff);

/// (1 - w) rho_E + w rho_s with w the per-bin send probability.
fock::DensityMatrix eve_comm_mixture(const CovertParams& params, const fock::QubitSignal& signal, int cutoff = 0);

/// Pair of Eve states sharing one cutoff.
struct EveStates {
    fock::DensityMatrix no_signal;
    fock::DensityMatrix communicating;
};
EveStates eve_states(const CovertParams& params, const fock::QubitSignal& signal, int cutoff = 0);

struct GridPoint {
    double theta = 0.0;
    double phi = 0.0;
};

/// Fibonacci-sphere points plus the two poles (poles first).
std::vector<GridPoint> bloch_grid(int resolution);

struct WorstCase {
    fock::QubitSignal signal;
    double theta = 0.0;
    double phi = 0.0;
    double d_max = 0.0;   // nats
    double d_min = 0.0;
    double spread = 0.0;  // d_max - d_min over the grid
    int points = 0;
};

/// Maximizes D(rho_E || sigma_E) over the given signals.
WorstCase worst_case_over(const CovertParams& params, const std::vector<GridPoint>& grid, int cutoff = 0);
WorstCase worst_case_signal(const CovertParams& params, int grid_resolution, int cutoff = 0);

}  // namespace covertq::channel
