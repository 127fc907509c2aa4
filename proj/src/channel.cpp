#include "covertq/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "covertq/covertness.hpp"

namespace covertq::channel {

namespace {

const std::pair<std::string, std::string> kEveLabels{"E_H", "E_V"};

Matrix kron(const Matrix& a, const Matrix& b)
{
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

// Smallest support s >= 0 with tail mass beyond s below tol.
int thermal_support(double nbar, double tol)
{
    int s = 0;
    while (fock::thermal_tail(nbar, s) >= tol) {
        ++s;
    }
    return s;
}

int coherent_support(double mu, double tol)
{
    if (mu == 0.0) {
        return 0;
    }
    int s = 1;
    while (fock::coherent_amplitudes(Complex(std::sqrt(mu), 0.0), s).second >= tol) {
        ++s;
    }
    return s;
}

std::vector<double> truncated_thermal_weights(double nbar, int support)
{
    std::vector<double> w(static_cast<std::size_t>(support + 1));
    const double ratio = nbar / (1.0 + nbar);
    double p = 1.0 / (1.0 + nbar);
    double total = 0.0;
    for (auto& x : w) {
        x = p;
        total += p;
        p *= ratio;
    }
    for (auto& x : w) {
        x /= total;
    }
    return w;
}

struct Supports {
    int cutoff = 1;
    int thermal = 0;
    int coherent = 0;
};

Supports choose_supports(const NoiseModel& noise, const Encoding& encoding, int cutoff)
{
    const double tol = tolerances().tail;
    Supports s;
    if (encoding.kind == EncodingKind::SinglePhoton) {
        if (cutoff <= 0) {
            s.thermal = thermal_support(noise.nbar, tol);
            s.cutoff = s.thermal + 1;
        } else {
            s.cutoff = cutoff;
            s.thermal = cutoff - 1;
        }
        return s;
    }
    const int coh = coherent_support(encoding.mu, tol);
    if (cutoff <= 0) {
        s.thermal = thermal_support(noise.nbar, tol);
        s.coherent = coh;
        s.cutoff = std::max(1, s.thermal + s.coherent);
    } else {
        s.cutoff = cutoff;
        s.coherent = std::min(coh, cutoff);
        s.thermal = cutoff - s.coherent;
    }
    return s;
}

// Eve's share of the beamsplitter output for input |input_pair>, arranged as
// a (traced port) x (Eve port) matrix.
Matrix eve_amplitudes(const Matrix& unitary, const Vector& input, int levels, bool eve_holds_first_port)
{
    const Vector out = unitary * input;
    Matrix w(levels, levels);  // w(a, b): a = signal-side port, b = thermal-side port
    for (int a = 0; a < levels; ++a) {
        for (int b = 0; b < levels; ++b) {
            w(a, b) = out(a * levels + b);
        }
    }
    if (eve_holds_first_port) {
        return w.transpose();
    }
    return w;
}

bool eve_holds_signal_port(const NoiseModel& noise)
{
    return noise.kind == NoiseKind::LabThermal;
}

// Per-polarization Gram blocks M_jk = sum_m p_m A_{j,m}^T conj(A_{k,m}) for a
// single photon (j, k in {0, 1}) entering the signal port.
struct PhotonBlocks {
    std::array<std::array<Matrix, 2>, 2> m;
    double tail = 0.0;
};

PhotonBlocks photon_blocks(const NoiseModel& noise, const Supports& sup)
{
    const int levels = sup.cutoff + 1;
    const Matrix u = fock::beamsplitter_unitary(noise.eta, sup.cutoff);
    const auto weights = truncated_thermal_weights(noise.nbar, sup.thermal);
    const bool first = eve_holds_signal_port(noise);

    PhotonBlocks blocks;
    for (auto& row : blocks.m) {
        for (auto& mat : row) {
            mat = Matrix::Zero(levels, levels);
        }
    }
    for (int th = 0; th <= sup.thermal; ++th) {
        std::array<Matrix, 2> amp;
        for (int k = 0; k < 2; ++k) {
            Vector in = Vector::Zero(levels * levels);
            in(k * levels + th) = 1.0;
            amp[static_cast<std::size_t>(k)] = eve_amplitudes(u, in, levels, first);
        }
        const double p = weights[static_cast<std::size_t>(th)];
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t k = 0; k < 2; ++k) {
                blocks.m[j][k] += p * (amp[j].transpose() * amp[k].conjugate());
            }
        }
    }
    blocks.tail = fock::thermal_tail(noise.nbar, sup.thermal);
    return blocks;
}

// Eve's single-mode state for coherent amplitude `alpha` mixed with thermal noise.
Matrix coherent_mode_state(const NoiseModel& noise, const Supports& sup, const Matrix& unitary, Complex alpha,
                           double& tail)
{
    const int levels = sup.cutoff + 1;
    const auto weights = truncated_thermal_weights(noise.nbar, sup.thermal);
    const bool first = eve_holds_signal_port(noise);
    Vector amp = Vector::Zero(sup.coherent + 1);
    double coh_tail = 0.0;
    if (sup.coherent == 0) {
        amp(0) = 1.0;
        coh_tail = 1.0 - std::exp(-std::norm(alpha));
    } else {
        auto [a, t] = fock::coherent_amplitudes(alpha, sup.coherent);
        amp = a;
        coh_tail = t;
    }
    Matrix rho = Matrix::Zero(levels, levels);
    for (int th = 0; th <= sup.thermal; ++th) {
        Vector in = Vector::Zero(levels * levels);
        for (int n = 0; n <= sup.coherent; ++n) {
            in(n * levels + th) = amp(n);
        }
        const Matrix a = eve_amplitudes(unitary, in, levels, first);
        rho += weights[static_cast<std::size_t>(th)] * (a.transpose() * a.conjugate());
    }
    tail = 1.0 - (1.0 - coh_tail) * (1.0 - fock::thermal_tail(noise.nbar, sup.thermal));
    return rho;
}

fock::DensityMatrix two_mode_state(Matrix m, int cutoff, double tail)
{
    m /= m.trace().real();
    return fock::DensityMatrix(fock::ModeSpace({kEveLabels.first, kEveLabels.second}, cutoff), std::move(m),
                               std::clamp(tail, 0.0, 1.0));
}

// Precomputed pieces for evaluating many signals at one operating point.
class EveModel {
public:
    EveModel(const NoiseModel& noise, const Encoding& encoding, int cutoff)
        : noise_(noise), encoding_(encoding), sup_(choose_supports(noise, encoding, cutoff))
    {
        noise_.validate();
        encoding_.validate();
        if (encoding_.kind == EncodingKind::SinglePhoton) {
            blocks_ = photon_blocks(noise_, sup_);
        } else {
            unitary_ = fock::beamsplitter_unitary(noise_.eta, sup_.cutoff);
        }
    }

    int cutoff() const { return sup_.cutoff; }

    fock::DensityMatrix signal_state(const fock::QubitSignal& s) const
    {
        s.validate();
        if (encoding_.kind == EncodingKind::SinglePhoton) {
            const auto& m = blocks_.m;
            Matrix rho = std::norm(s.lambda1) * kron(m[1][1], m[0][0]) + std::norm(s.lambda2) * kron(m[0][0], m[1][1]) +
                         (s.lambda1 * std::conj(s.lambda2)) * kron(m[1][0], m[0][1]) +
                         (s.lambda2 * std::conj(s.lambda1)) * kron(m[0][1], m[1][0]);
            return two_mode_state(std::move(rho), sup_.cutoff, blocks_.tail);
        }
        const Complex alpha(std::sqrt(encoding_.mu), 0.0);
        double tail_h = 0.0;
        double tail_v = 0.0;
        Matrix h = coherent_mode_state(noise_, sup_, unitary_, alpha * s.lambda1, tail_h);
        Matrix v = coherent_mode_state(noise_, sup_, unitary_, alpha * s.lambda2, tail_v);
        h /= h.trace().real();
        v /= v.trace().real();
        return two_mode_state(kron(h, v), sup_.cutoff, 1.0 - (1.0 - tail_h) * (1.0 - tail_v));
    }

private:
    NoiseModel noise_;
    Encoding encoding_;
    Supports sup_;
    PhotonBlocks blocks_;
    Matrix unitary_;
};

}  // namespace

// ---------------------------------------------------------------------------

void NoiseModel::validate() const
{
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw DomainError("eta must lie in [0,1], got " + std::to_string(eta));
    }
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
        throw DomainError("nbar must be finite and >= 0, got " + std::to_string(nbar));
    }
}

double NoiseModel::eve_nbar() const
{
    return kind == NoiseKind::EnvironmentThermal ? eta * nbar : (1.0 - eta) * nbar;
}

double NoiseModel::eve_signal_fraction() const
{
    return kind == NoiseKind::EnvironmentThermal ? 1.0 - eta : eta;
}

void Encoding::validate() const
{
    if (kind == EncodingKind::Coherent && !(mu > 0.0 && std::isfinite(mu))) {
        throw DomainError("coherent encoding needs mu > 0, got " + std::to_string(mu));
    }
}

double CovertParams::send_probability() const
{
    return encoding.kind == EncodingKind::Coherent ? q() / encoding.mu : q();
}

void CovertParams::validate() const
{
    if (!(N >= 1.0) || !std::isfinite(N)) {
        throw DomainError("N must be >= 1, got " + std::to_string(N));
    }
    if (!(d >= 0.0) || !std::isfinite(d)) {
        throw DomainError("d must be finite and >= 0, got " + std::to_string(d));
    }
    if (d > N) {
        throw DomainError("d must not exceed N (q = d/N <= 1)");
    }
    encoding.validate();
    noise.validate();
    if (send_probability() > 1.0) {
        throw PreconditionError("coherent send probability q/mu = " + std::to_string(send_probability()) +
                                " exceeds 1; need q = mu * q' with q' <= 1, i.e. d/N <= mu");
    }
}

std::string to_string(NoiseKind kind)
{
    return kind == NoiseKind::EnvironmentThermal ? "env" : "lab";
}

std::string to_string(EncodingKind kind)
{
    return kind == EncodingKind::SinglePhoton ? "sp" : "coh";
}

NoiseKind parse_noise_kind(const std::string& s)
{
    if (s == "env" || s == "environment" || s == "A" || s == "a") {
        return NoiseKind::EnvironmentThermal;
    }
    if (s == "lab" || s == "B" || s == "b") {
        return NoiseKind::LabThermal;
    }
    throw DomainError("unknown noise model '" + s + "' (expected env|lab)");
}

EncodingKind parse_encoding_kind(const std::string& s)
{
    if (s == "sp" || s == "single-photon" || s == "single_photon") {
        return EncodingKind::SinglePhoton;
    }
    if (s == "coh" || s == "coherent") {
        return EncodingKind::Coherent;
    }
    throw DomainError("unknown encoding '" + s + "' (expected sp|coh)");
}

int auto_cutoff(const NoiseModel& noise, const Encoding& encoding)
{
    return choose_supports(noise, encoding, 0).cutoff;
}

fock::DensityMatrix eve_no_signal(const NoiseModel& noise, const Encoding& encoding, int cutoff)
{
    noise.validate();
    const int c = cutoff > 0 ? cutoff : auto_cutoff(noise, encoding);
    return fock::tensor(fock::thermal_state(noise.eve_nbar(), c, kEveLabels.first),
                        fock::thermal_state(noise.eve_nbar(), c, kEveLabels.second));
}

fock::DensityMatrix eve_signal(const NoiseModel& noise, const Encoding& encoding, const fock::QubitSignal& signal,
                               int cutoff)
{
    return EveModel(noise, encoding, cutoff).signal_state(signal);
}

fock::DensityMatrix eve_signal_reference(const NoiseModel& noise, const fock::QubitSignal& signal, int cutoff)
{
    noise.validate();
    if (cutoff < 2) {
        throw DomainError("reference construction needs cutoff >= 2");
    }
    const auto photon = fock::single_photon_qubit(signal, cutoff, {"S_H", "S_V"});
    const auto th_h = fock::embed(fock::thermal_state(noise.nbar, cutoff - 1, "T_H"), cutoff);
    const auto th_v = fock::embed(fock::thermal_state(noise.nbar, cutoff - 1, "T_V"), cutoff);
    auto joint = fock::tensor(fock::tensor(photon, th_h), th_v);
    joint = fock::beamsplitter(joint, noise.eta, {"S_H", "T_H"});
    joint = fock::beamsplitter(joint, noise.eta, {"S_V", "T_V"});
    const std::vector<std::string> keep =
        eve_holds_signal_port(noise) ? std::vector<std::string>{"S_H", "S_V"} : std::vector<std::string>{"T_H", "T_V"};
    return fock::partial_trace(joint, keep).relabeled({kEveLabels.first, kEveLabels.second});
}

EveStates eve_states(const CovertParams& params, const fock::QubitSignal& signal, int cutoff)
{
    params.validate();
    const EveModel model(params.noise, params.encoding, cutoff);
    auto rho_e = eve_no_signal(params.noise, params.encoding, model.cutoff());
    auto sigma = fock::mix(rho_e, model.signal_state(signal), params.send_probability());
    return {std::move(rho_e), std::move(sigma)};
}

fock::DensityMatrix eve_comm_mixture(const CovertParams& params, const fock::QubitSignal& signal, int cutoff)
{
    return eve_states(params, signal, cutoff).communicating;
}

std::vector<GridPoint> bloch_grid(int resolution)
{
    if (resolution < 1) {
        throw DomainError("grid resolution must be positive");
    }
    std::vector<GridPoint> grid{{0.0, 0.0}, {std::numbers::pi, 0.0}};
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < resolution; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / resolution;
        grid.push_back({std::acos(z), std::fmod(golden * i, 2.0 * std::numbers::pi)});
    }
    return grid;
}

WorstCase worst_case_over(const CovertParams& params, const std::vector<GridPoint>& grid, int cutoff)
{
    params.validate();
    if (grid.empty()) {
        throw DomainError("empty signal grid");
    }
    const EveModel model(params.noise, params.encoding, cutoff);
    const auto rho_e = eve_no_signal(params.noise, params.encoding, model.cutoff());
    const double w = params.send_probability();

    WorstCase best;
    best.d_max = -1.0;
    best.d_min = std::numeric_limits<double>::infinity();
    for (const auto& pt : grid) {
        const auto signal = fock::QubitSignal::from_bloch(pt.theta, pt.phi);
        const auto sigma = fock::mix(rho_e, model.signal_state(signal), w);
        const double d = covertness::relative_entropy(rho_e, sigma);
        if (d > best.d_max) {
            best.d_max = d;
            best.signal = signal;
            best.theta = pt.theta;
            best.phi = pt.phi;
        }
        best.d_min = std::min(best.d_min, d);
    }
    best.points = static_cast<int>(grid.size());
    best.spread = best.d_max - best.d_min;
    return best;
}

WorstCase worst_case_signal(const CovertParams& params, int grid_resolution, int cutoff)
{
    if (grid_resolution < 4) {
        throw DomainError("grid resolution must be >= 4");
    }
    return worst_case_over(params, bloch_grid(grid_resolution), cutoff);
}

}  // namespace covertq::channel
