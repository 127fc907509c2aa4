#pragma once

// Dense density matrices over a truncated multimode Fock basis.
//
// A ModeSpace holds `mode_count` bosonic modes, each truncated to photon
// numbers {0..cutoff}. Basis states are ordered lexicographically by their
// photon-number tuple with the first mode most significant, so the tensor
// product of two states is the Kronecker product of their matrices.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "covertq/config.hpp"

namespace covertq::fock {

class ModeSpace {
public:
    ModeSpace(std::vector<std::string> labels, int cutoff);

    int mode_count() const noexcept { return static_cast<int>(labels_.size()); }
    int cutoff() const noexcept { return cutoff_; }
    int levels() const noexcept { return cutoff_ + 1; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::size_t dimension() const noexcept { return dimension_; }

    /// Position of a mode label; throws DomainError for unknown labels.
    int mode_index(const std::string& label) const;
    bool has_mode(const std::string& label) const;

    std::size_t index_of(std::span<const int> occupation) const;
    std::vector<int> occupation(std::size_t index) const;

    bool operator==(const ModeSpace& other) const = default;

private:
    std::vector<std::string> labels_;
    int cutoff_;
    std::size_t dimension_;
};

/// Hermitian, unit-trace, positive semidefinite operator on a ModeSpace.
/// `tail_mass` is the probability that truncation removed before the state
/// was renormalized.
class DensityMatrix {
public:
    /// Validates hermiticity and unit trace (not positivity; see validate()).
    DensityMatrix(ModeSpace space, Matrix entries, double tail_mass = 0.0);

    const ModeSpace& space() const noexcept { return space_; }
    const Matrix& matrix() const noexcept { return entries_; }
    double tail_mass() const noexcept { return tail_mass_; }
    std::size_t dimension() const noexcept { return space_.dimension(); }

    double trace() const { return entries_.trace().real(); }
    double purity() const;

    /// Photon-number distribution of one mode.
    std::vector<double> photon_distribution(const std::string& label) const;
    double mean_photon_number(const std::string& label) const;
    double total_mean_photon_number() const;

    /// Full check including positivity; throws NumericalError on failure.
    void validate() const;

    /// Same state, modes renamed.
    DensityMatrix relabeled(std::vector<std::string> labels) const;

private:
    ModeSpace space_;
    Matrix entries_;
    double tail_mass_;
};

struct QubitSignal {
    Complex lambda1{1.0, 0.0};  // amplitude of the photon in the H mode
    Complex lambda2{0.0, 0.0};  // amplitude of the photon in the V mode

    /// cos(theta/2)|H> + e^{i phi} sin(theta/2)|V>
    static QubitSignal from_bloch(double theta, double phi);
    void validate() const;
};

DensityMatrix vacuum(int cutoff, const std::string& label = "m");
DensityMatrix fock_state(int n, int cutoff, const std::string& label = "m");

/// Geometric photon statistics with mean `nbar`, truncated at `cutoff`.
DensityMatrix thermal_state(double nbar, int cutoff, const std::string& label = "m");
/// Probability of n > cutoff for a thermal state.
double thermal_tail(double nbar, int cutoff);
/// Smallest cutoff whose thermal tail is below `tol`.
int thermal_cutoff(double nbar, double tol);

/// |alpha><alpha|; throws CutoffError when the Poisson tail beyond cutoff
/// exceeds the tail tolerance.
DensityMatrix coherent_state(Complex alpha, int cutoff, const std::string& label = "m");
/// Normalized truncated amplitudes e^{-|a|^2/2} a^n / sqrt(n!) and the tail mass.
std::pair<Vector, double> coherent_amplitudes(Complex alpha, int cutoff);
int coherent_cutoff(double mean_photons, double tol);

DensityMatrix single_photon_qubit(const QubitSignal& signal, int cutoff,
                                  const std::pair<std::string, std::string>& labels = {"S_H", "S_V"});

/// Kronecker product on the concatenated mode list. Labels must be disjoint
/// and cutoffs equal.
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
/// `rho` tensored with itself `copies` times; copy k gets the suffix "#k".
DensityMatrix tensor_power(const DensityMatrix& rho, int copies);

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);

/// Raises every mode's cutoff, padding with zeros.
DensityMatrix embed(const DensityMatrix& rho, int cutoff);

/// (1 - weight) a + weight b
DensityMatrix mix(const DensityMatrix& a, const DensityMatrix& b, double weight);

/// Two-mode unitary on levels (cutoff+1)^2 implementing
///   a_out = sqrt(eta) a + sqrt(1-eta) b,  b_out = sqrt(1-eta) a - sqrt(eta) b,
/// built as exp(theta (a^dag b - a b^dag)) followed by a pi phase on the
/// second input port. Photon-number blocks with total <= cutoff are exact.
Matrix beamsplitter_unitary(double eta, int cutoff);
/// exp(theta (a^dag b - a b^dag)) on the truncated two-mode space.
Matrix rotation_unitary(double theta, int cutoff);

DensityMatrix beamsplitter(const DensityMatrix& rho, double eta,
                           const std::pair<std::string, std::string>& pair);
DensityMatrix rotate_pair(const DensityMatrix& rho, double theta,
                          const std::pair<std::string, std::string>& pair);
/// Applies a two-mode unitary (levels^2 square) to the named pair.
DensityMatrix apply_two_mode(const DensityMatrix& rho, const Matrix& unitary,
                             const std::pair<std::string, std::string>& pair);

struct EigenDecomposition {
    Eigen::VectorXd values;  // descending
    Matrix vectors;          // columns, same order as values
};

/// Throws DomainError if `m` is not Hermitian within tolerance.
EigenDecomposition eig_hermitian(const Matrix& m);

}  // namespace covertq::fock
