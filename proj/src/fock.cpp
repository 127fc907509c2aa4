#include "covertq/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

namespace covertq::fock {

namespace {

std::size_t checked_power(int base, int exponent)
{
    std::size_t dim = 1;
    const std::size_t limit = max_dimension();
    for (int k = 0; k < exponent; ++k) {
        dim *= static_cast<std::size_t>(base);
        if (dim > limit) {
            throw ResourceError("state dimension exceeds the configured maximum (" + std::to_string(limit) +
                                    "); raise COVERTQ_MAX_DIM or lower the cutoff",
                                dim, limit);
        }
    }
    return dim;
}

double max_antihermitian(const Matrix& m)
{
    if (m.size() == 0) {
        return 0.0;
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void require_cutoff(int cutoff)
{
    if (cutoff < 1) {
        throw DomainError("cutoff must be >= 1, got " + std::to_string(cutoff));
    }
}

DensityMatrix diagonal_state(std::vector<double> weights, int cutoff, const std::string& label, double tail)
{
    double total = 0.0;
    for (double w : weights) {
        total += w;
    }
    Matrix m = Matrix::Zero(cutoff + 1, cutoff + 1);
    for (int n = 0; n <= cutoff; ++n) {
        m(n, n) = weights[static_cast<std::size_t>(n)] / total;
    }
    return DensityMatrix(ModeSpace({label}, cutoff), std::move(m), tail);
}

// Index of each basis state split into (pair index, rest index); the pair
// index is (n_first * levels + n_second).
struct PairSplit {
    std::vector<std::size_t> pair_index;
    std::vector<std::size_t> rest_index;
    std::size_t rest_dim = 1;
};

PairSplit split_pair(const ModeSpace& space, int first, int second)
{
    PairSplit s;
    const std::size_t dim = space.dimension();
    const int levels = space.levels();
    s.pair_index.resize(dim);
    s.rest_index.resize(dim);
    s.rest_dim = dim / static_cast<std::size_t>(levels * levels);
    for (std::size_t i = 0; i < dim; ++i) {
        const auto occ = space.occupation(i);
        s.pair_index[i] = static_cast<std::size_t>(occ[first] * levels + occ[second]);
        std::size_t rest = 0;
        for (int k = 0; k < space.mode_count(); ++k) {
            if (k == first || k == second) {
                continue;
            }
            rest = rest * static_cast<std::size_t>(levels) + static_cast<std::size_t>(occ[k]);
        }
        s.rest_index[i] = rest;
    }
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// ModeSpace

ModeSpace::ModeSpace(std::vector<std::string> labels, int cutoff)
    : labels_(std::move(labels)), cutoff_(cutoff), dimension_(0)
{
    if (labels_.empty()) {
        throw DomainError("a mode space needs at least one mode");
    }
    require_cutoff(cutoff_);
    std::set<std::string> seen;
    for (const auto& l : labels_) {
        if (!seen.insert(l).second) {
            throw DomainError("duplicate mode label '" + l + "'");
        }
    }
    dimension_ = checked_power(cutoff_ + 1, mode_count());
}

int ModeSpace::mode_index(const std::string& label) const
{
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        throw DomainError("unknown mode label '" + label + "'");
    }
    return static_cast<int>(it - labels_.begin());
}

bool ModeSpace::has_mode(const std::string& label) const
{
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t ModeSpace::index_of(std::span<const int> occupation) const
{
    if (static_cast<int>(occupation.size()) != mode_count()) {
        throw DomainError("occupation tuple has wrong length");
    }
    std::size_t idx = 0;
    for (int n : occupation) {
        if (n < 0 || n > cutoff_) {
            throw DomainError("photon number " + std::to_string(n) + " outside {0.." + std::to_string(cutoff_) + "}");
        }
        idx = idx * static_cast<std::size_t>(levels()) + static_cast<std::size_t>(n);
    }
    return idx;
}

std::vector<int> ModeSpace::occupation(std::size_t index) const
{
    std::vector<int> occ(static_cast<std::size_t>(mode_count()));
    for (int k = mode_count() - 1; k >= 0; --k) {
        occ[static_cast<std::size_t>(k)] = static_cast<int>(index % static_cast<std::size_t>(levels()));
        index /= static_cast<std::size_t>(levels());
    }
    return occ;
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(ModeSpace space, Matrix entries, double tail_mass)
    : space_(std::move(space)), entries_(std::move(entries)), tail_mass_(tail_mass)
{
    const auto dim = static_cast<Eigen::Index>(space_.dimension());
    if (entries_.rows() != dim || entries_.cols() != dim) {
        throw DomainError("matrix shape does not match the mode space dimension");
    }
    const auto& tol = tolerances();
    if (max_antihermitian(entries_) > tol.hermitian) {
        throw DomainError("density matrix is not Hermitian");
    }
    if (std::abs(entries_.trace().real() - 1.0) > tol.trace || std::abs(entries_.trace().imag()) > tol.trace) {
        throw DomainError("density matrix trace differs from 1");
    }
    if (!(tail_mass_ >= 0.0 && tail_mass_ <= 1.0)) {
        throw DomainError("tail mass must lie in [0,1]");
    }
    entries_ = 0.5 * (entries_ + entries_.adjoint()).eval();
}

double DensityMatrix::purity() const
{
    return (entries_ * entries_).trace().real();
}

std::vector<double> DensityMatrix::photon_distribution(const std::string& label) const
{
    const int mode = space_.mode_index(label);
    std::vector<double> p(static_cast<std::size_t>(space_.levels()), 0.0);
    for (std::size_t i = 0; i < space_.dimension(); ++i) {
        const auto occ = space_.occupation(i);
        p[static_cast<std::size_t>(occ[mode])] += entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    }
    return p;
}

double DensityMatrix::mean_photon_number(const std::string& label) const
{
    const auto p = photon_distribution(label);
    double mean = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        mean += static_cast<double>(n) * p[n];
    }
    return mean;
}

double DensityMatrix::total_mean_photon_number() const
{
    double mean = 0.0;
    for (const auto& l : space_.labels()) {
        mean += mean_photon_number(l);
    }
    return mean;
}

void DensityMatrix::validate() const
{
    const auto& tol = tolerances();
    if (max_antihermitian(entries_) > tol.hermitian) {
        throw NumericalError("density matrix is not Hermitian");
    }
    if (std::abs(trace() - 1.0) > tol.trace) {
        throw NumericalError("density matrix trace differs from 1");
    }
    const double min_eig = eig_hermitian(entries_).values.minCoeff();
    if (min_eig < -tol.psd) {
        throw NumericalError("density matrix has negative eigenvalue " + std::to_string(min_eig));
    }
}

DensityMatrix DensityMatrix::relabeled(std::vector<std::string> labels) const
{
    return DensityMatrix(ModeSpace(std::move(labels), space_.cutoff()), entries_, tail_mass_);
}

// ---------------------------------------------------------------------------
// QubitSignal

QubitSignal QubitSignal::from_bloch(double theta, double phi)
{
    return QubitSignal{Complex(std::cos(theta / 2.0), 0.0), std::polar(std::sin(theta / 2.0), phi)};
}

void QubitSignal::validate() const
{
    const double norm = std::norm(lambda1) + std::norm(lambda2);
    if (std::abs(norm - 1.0) > tolerances().qubit_norm) {
        throw DomainError("qubit signal is not normalized: |l1|^2 + |l2|^2 = " + std::to_string(norm));
    }
}

// ---------------------------------------------------------------------------
// Constructors

DensityMatrix vacuum(int cutoff, const std::string& label)
{
    return fock_state(0, cutoff, label);
}

DensityMatrix fock_state(int n, int cutoff, const std::string& label)
{
    require_cutoff(cutoff);
    if (n < 0 || n > cutoff) {
        throw DomainError("Fock state |" + std::to_string(n) + "> does not fit under cutoff " + std::to_string(cutoff));
    }
    std::vector<double> w(static_cast<std::size_t>(cutoff + 1), 0.0);
    w[static_cast<std::size_t>(n)] = 1.0;
    return diagonal_state(std::move(w), cutoff, label, 0.0);
}

double thermal_tail(double nbar, int cutoff)
{
    if (nbar == 0.0) {
        return 0.0;
    }
    return std::pow(nbar / (1.0 + nbar), cutoff + 1);
}

int thermal_cutoff(double nbar, double tol)
{
    if (nbar < 0.0) {
        throw DomainError("mean photon number must be >= 0");
    }
    int c = 1;
    while (thermal_tail(nbar, c) >= tol) {
        ++c;
    }
    return c;
}

DensityMatrix thermal_state(double nbar, int cutoff, const std::string& label)
{
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
        throw DomainError("thermal mean photon number must be finite and >= 0, got " + std::to_string(nbar));
    }
    require_cutoff(cutoff);
    const double ratio = nbar / (1.0 + nbar);
    std::vector<double> w(static_cast<std::size_t>(cutoff + 1));
    double p = 1.0 / (1.0 + nbar);
    for (int n = 0; n <= cutoff; ++n) {
        w[static_cast<std::size_t>(n)] = p;
        p *= ratio;
    }
    return diagonal_state(std::move(w), cutoff, label, thermal_tail(nbar, cutoff));
}

std::pair<Vector, double> coherent_amplitudes(Complex alpha, int cutoff)
{
    require_cutoff(cutoff);
    const double mean = std::norm(alpha);
    Vector amp(cutoff + 1);
    Complex c = std::exp(-mean / 2.0);
    for (int n = 0; n <= cutoff; ++n) {
        amp(n) = c;
        c *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    // Poisson mass beyond the cutoff, summed directly to avoid 1 - (1 - tiny).
    double term = std::norm(c);
    double tail = 0.0;
    for (int n = cutoff + 1; n < cutoff + 400 && term > 0.0; ++n) {
        tail += term;
        term *= mean / static_cast<double>(n + 1);
        if (term < tail * 1e-18) {
            break;
        }
    }
    amp /= amp.norm();
    return {amp, std::min(tail, 1.0)};
}

int coherent_cutoff(double mean_photons, double tol)
{
    int c = 1;
    while (coherent_amplitudes(Complex(std::sqrt(mean_photons), 0.0), c).second >= tol) {
        ++c;
    }
    return c;
}

DensityMatrix coherent_state(Complex alpha, int cutoff, const std::string& label)
{
    auto [amp, tail] = coherent_amplitudes(alpha, cutoff);
    const double tol = tolerances().tail;
    if (tail >= tol) {
        const int suggested = coherent_cutoff(std::norm(alpha), tol);
        throw CutoffError("coherent state tail " + std::to_string(tail) + " beyond cutoff " + std::to_string(cutoff) +
                              " exceeds tolerance; use cutoff >= " + std::to_string(suggested),
                          suggested);
    }
    return DensityMatrix(ModeSpace({label}, cutoff), amp * amp.adjoint(), tail);
}

DensityMatrix single_photon_qubit(const QubitSignal& signal, int cutoff,
                                  const std::pair<std::string, std::string>& labels)
{
    signal.validate();
    ModeSpace space({labels.first, labels.second}, cutoff);
    Vector psi = Vector::Zero(static_cast<Eigen::Index>(space.dimension()));
    const int one_zero[] = {1, 0};
    const int zero_one[] = {0, 1};
    psi(static_cast<Eigen::Index>(space.index_of(one_zero))) = signal.lambda1;
    psi(static_cast<Eigen::Index>(space.index_of(zero_one))) = signal.lambda2;
    psi /= psi.norm();
    return DensityMatrix(std::move(space), psi * psi.adjoint(), 0.0);
}

// ---------------------------------------------------------------------------
// Structure

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b)
{
    if (a.space().cutoff() != b.space().cutoff()) {
        throw DomainError("tensor requires equal cutoffs (" + std::to_string(a.space().cutoff()) + " vs " +
                          std::to_string(b.space().cutoff()) + "); embed one operand first");
    }
    std::vector<std::string> labels = a.space().labels();
    labels.insert(labels.end(), b.space().labels().begin(), b.space().labels().end());
    ModeSpace space(std::move(labels), a.space().cutoff());

    const Matrix& ma = a.matrix();
    const Matrix& mb = b.matrix();
    const Eigen::Index db = mb.rows();
    Matrix out(ma.rows() * db, ma.cols() * db);
    for (Eigen::Index i = 0; i < ma.rows(); ++i) {
        for (Eigen::Index j = 0; j < ma.cols(); ++j) {
            out.block(i * db, j * db, db, db) = ma(i, j) * mb;
        }
    }
    const double tail = 1.0 - (1.0 - a.tail_mass()) * (1.0 - b.tail_mass());
    return DensityMatrix(std::move(space), std::move(out), tail);
}

DensityMatrix tensor_power(const DensityMatrix& rho, int copies)
{
    if (copies < 1) {
        throw DomainError("tensor power needs at least one copy");
    }
    auto tagged = [&](int k) {
        std::vector<std::string> labels;
        for (const auto& l : rho.space().labels()) {
            labels.push_back(l + "#" + std::to_string(k));
        }
        return rho.relabeled(std::move(labels));
    };
    DensityMatrix out = tagged(1);
    for (int k = 2; k <= copies; ++k) {
        out = tensor(out, tagged(k));
    }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep)
{
    if (keep.empty()) {
        throw DomainError("partial trace must keep at least one mode");
    }
    const ModeSpace& space = rho.space();
    std::vector<int> kept_modes;
    for (const auto& l : keep) {
        kept_modes.push_back(space.mode_index(l));
    }
    ModeSpace reduced(keep, space.cutoff());

    std::vector<bool> is_kept(static_cast<std::size_t>(space.mode_count()), false);
    for (int k : kept_modes) {
        is_kept[static_cast<std::size_t>(k)] = true;
    }

    const std::size_t dim = space.dimension();
    std::vector<std::size_t> keep_idx(dim);
    std::vector<std::size_t> trace_idx(dim);
    std::vector<int> sub(kept_modes.size());
    for (std::size_t i = 0; i < dim; ++i) {
        const auto occ = space.occupation(i);
        for (std::size_t k = 0; k < kept_modes.size(); ++k) {
            sub[k] = occ[static_cast<std::size_t>(kept_modes[k])];
        }
        keep_idx[i] = reduced.index_of(sub);
        std::size_t t = 0;
        for (int k = 0; k < space.mode_count(); ++k) {
            if (!is_kept[static_cast<std::size_t>(k)]) {
                t = t * static_cast<std::size_t>(space.levels()) + static_cast<std::size_t>(occ[k]);
            }
        }
        trace_idx[i] = t;
    }

    const std::size_t rdim = reduced.dimension();
    const std::size_t tdim = dim / rdim;
    // Basis index of (kept, traced) pair, so the sum over traced indices is direct.
    std::vector<std::size_t> lookup(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        lookup[keep_idx[i] * tdim + trace_idx[i]] = i;
    }
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rdim), static_cast<Eigen::Index>(rdim));
    const Matrix& m = rho.matrix();
    for (std::size_t r = 0; r < rdim; ++r) {
        for (std::size_t c = 0; c < rdim; ++c) {
            Complex acc{0.0, 0.0};
            for (std::size_t t = 0; t < tdim; ++t) {
                acc += m(static_cast<Eigen::Index>(lookup[r * tdim + t]), static_cast<Eigen::Index>(lookup[c * tdim + t]));
            }
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
        }
    }
    return DensityMatrix(std::move(reduced), std::move(out), rho.tail_mass());
}

DensityMatrix embed(const DensityMatrix& rho, int cutoff)
{
    const ModeSpace& from = rho.space();
    if (cutoff < from.cutoff()) {
        throw DomainError("embed cannot lower the cutoff");
    }
    ModeSpace to(from.labels(), cutoff);
    const std::size_t dim = from.dimension();
    std::vector<Eigen::Index> map(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        map[i] = static_cast<Eigen::Index>(to.index_of(from.occupation(i)));
    }
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(to.dimension()), static_cast<Eigen::Index>(to.dimension()));
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            out(map[i], map[j]) = rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return DensityMatrix(std::move(to), std::move(out), rho.tail_mass());
}

DensityMatrix mix(const DensityMatrix& a, const DensityMatrix& b, double weight)
{
    if (!(weight >= 0.0 && weight <= 1.0)) {
        throw DomainError("mixture weight must lie in [0,1]");
    }
    if (!(a.space() == b.space())) {
        throw DomainError("mixture components live on different mode spaces");
    }
    if (weight == 0.0) {
        return a;
    }
    if (weight == 1.0) {
        return b;
    }
    Matrix m = (1.0 - weight) * a.matrix() + weight * b.matrix();
    const double tail = (1.0 - weight) * a.tail_mass() + weight * b.tail_mass();
    return DensityMatrix(a.space(), std::move(m), tail);
}

// ---------------------------------------------------------------------------
// Beamsplitter

Matrix rotation_unitary(double theta, int cutoff)
{
    require_cutoff(cutoff);
    const int levels = cutoff + 1;
    const int dim = levels * levels;
    // Generator a^dag b - a b^dag is real antisymmetric in the Fock basis.
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(dim, dim);
    for (int na = 0; na < levels; ++na) {
        for (int nb = 0; nb < levels; ++nb) {
            const int col = na * levels + nb;
            // a^dag b |na, nb> = sqrt(na+1) sqrt(nb) |na+1, nb-1>
            if (na + 1 < levels && nb > 0) {
                const int row = (na + 1) * levels + (nb - 1);
                gen(row, col) += std::sqrt(static_cast<double>(na + 1) * nb);
            }
            // a b^dag |na, nb> = sqrt(na) sqrt(nb+1) |na-1, nb+1>
            if (na > 0 && nb + 1 < levels) {
                const int row = (na - 1) * levels + (nb + 1);
                gen(row, col) -= std::sqrt(static_cast<double>(na) * (nb + 1));
            }
        }
    }
    const Eigen::MatrixXd u = (theta * gen).exp();
    return u.cast<Complex>();
}

Matrix beamsplitter_unitary(double eta, int cutoff)
{
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw DomainError("beamsplitter transmissivity must lie in [0,1], got " + std::to_string(eta));
    }
    const int levels = cutoff + 1;
    Matrix u = rotation_unitary(-std::acos(std::sqrt(eta)), cutoff);
    // pi phase on the second input port: column (na, nb) picks up (-1)^nb.
    for (int na = 0; na < levels; ++na) {
        for (int nb = 1; nb < levels; nb += 2) {
            u.col(na * levels + nb) *= -1.0;
        }
    }
    return u;
}

DensityMatrix apply_two_mode(const DensityMatrix& rho, const Matrix& unitary,
                             const std::pair<std::string, std::string>& pair)
{
    const ModeSpace& space = rho.space();
    const int first = space.mode_index(pair.first);
    const int second = space.mode_index(pair.second);
    if (first == second) {
        throw DomainError("beamsplitter needs two distinct modes");
    }
    const int levels = space.levels();
    if (unitary.rows() != levels * levels || unitary.cols() != levels * levels) {
        throw DomainError("two-mode unitary does not match the mode cutoff");
    }
    const PairSplit split = split_pair(space, first, second);
    const std::size_t dim = space.dimension();

    // Lookup basis index by (pair, rest).
    std::vector<std::size_t> lookup(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        lookup[split.pair_index[i] * split.rest_dim + split.rest_index[i]] = i;
    }
    std::vector<Eigen::Triplet<Complex>> triplets;
    triplets.reserve(static_cast<std::size_t>(levels * levels) * dim);
    const auto pdim = static_cast<std::size_t>(levels * levels);
    for (std::size_t col = 0; col < dim; ++col) {
        const std::size_t p_in = split.pair_index[col];
        const std::size_t rest = split.rest_index[col];
        for (std::size_t p_out = 0; p_out < pdim; ++p_out) {
            const Complex u = unitary(static_cast<Eigen::Index>(p_out), static_cast<Eigen::Index>(p_in));
            if (u != Complex(0.0, 0.0)) {
                triplets.emplace_back(static_cast<int>(lookup[p_out * split.rest_dim + rest]), static_cast<int>(col), u);
            }
        }
    }
    Eigen::SparseMatrix<Complex> w(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    w.setFromTriplets(triplets.begin(), triplets.end());
    const Matrix left = w * rho.matrix();
    Matrix out = (w * left.adjoint()).adjoint();
    // Renormalize against roundoff; the truncated unitary is exact on the populated blocks.
    out /= out.trace().real();
    return DensityMatrix(space, std::move(out), rho.tail_mass());
}

DensityMatrix beamsplitter(const DensityMatrix& rho, double eta, const std::pair<std::string, std::string>& pair)
{
    return apply_two_mode(rho, beamsplitter_unitary(eta, rho.space().cutoff()), pair);
}

DensityMatrix rotate_pair(const DensityMatrix& rho, double theta, const std::pair<std::string, std::string>& pair)
{
    return apply_two_mode(rho, rotation_unitary(theta, rho.space().cutoff()), pair);
}

// ---------------------------------------------------------------------------
// Spectral decomposition

EigenDecomposition eig_hermitian(const Matrix& m)
{
    if (m.rows() != m.cols()) {
        throw DomainError("eigendecomposition needs a square matrix");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (max_antihermitian(m) > tolerances().hermitian * scale) {
        throw DomainError("matrix is not Hermitian");
    }
    const Matrix herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("Hermitian eigensolver did not converge");
    }
    EigenDecomposition out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

}  // namespace covertq::fock
