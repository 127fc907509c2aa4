#include "covertq/covertness.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace covertq::covertness {

namespace {

void require_same_space(const fock::DensityMatrix& rho, const fock::DensityMatrix& sigma)
{
    if (rho.dimension() != sigma.dimension() || rho.space().cutoff() != sigma.space().cutoff()) {
        throw DomainError("states live on different mode spaces");
    }
}

void require_in_domain(const channel::CovertParams& params)
{
    params.validate();
    if (!(params.noise.nbar > 0.0)) {
        throw DomainError("closed-form bounds are singular at nbar = 0");
    }
}

}  // namespace

double trace_norm(const Matrix& hermitian)
{
    return fock::eig_hermitian(hermitian).values.cwiseAbs().sum();
}

double trace_distance(const fock::DensityMatrix& rho, const fock::DensityMatrix& sigma)
{
    require_same_space(rho, sigma);
    return trace_norm(rho.matrix() - sigma.matrix());
}

double relative_entropy(const Matrix& rho, const Matrix& sigma)
{
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
        throw DomainError("relative entropy of matrices with different shapes");
    }
    const auto& tol = tolerances();
    const auto r = fock::eig_hermitian(rho);
    const auto s = fock::eig_hermitian(sigma);
    if (r.values.minCoeff() < -tol.psd || s.values.minCoeff() < -tol.psd) {
        throw DomainError("relative entropy needs positive semidefinite arguments");
    }

    double entropy_term = 0.0;
    for (Eigen::Index i = 0; i < r.values.size(); ++i) {
        const double x = r.values(i);
        if (x > tol.eig_floor) {
            entropy_term += x * std::log(x);
        }
    }
    // <s_j| rho |s_j> for each eigenvector of sigma
    const Eigen::VectorXd weight = (s.vectors.adjoint() * rho * s.vectors).diagonal().real();
    double cross_term = 0.0;
    double outside = 0.0;
    for (Eigen::Index j = 0; j < s.values.size(); ++j) {
        const double y = s.values(j);
        if (y > tol.eig_floor) {
            cross_term += weight(j) * std::log(y);
        } else {
            outside += weight(j);
        }
    }
    if (outside > tol.support) {
        return std::numeric_limits<double>::infinity();
    }
    return std::max(0.0, entropy_term - cross_term);
}

double relative_entropy(const fock::DensityMatrix& rho, const fock::DensityMatrix& sigma)
{
    require_same_space(rho, sigma);
    return relative_entropy(rho.matrix(), sigma.matrix());
}

double helstrom_error(const fock::DensityMatrix& rho, const fock::DensityMatrix& sigma)
{
    return 0.5 - 0.25 * trace_distance(rho, sigma);
}

double fidelity(const Matrix& rho, const Matrix& sigma)
{
    auto sqrt_psd = [](const Matrix& m) {
        const auto e = fock::eig_hermitian(m);
        const Eigen::VectorXd root = e.values.cwiseMax(0.0).cwiseSqrt();
        return Matrix(e.vectors * root.asDiagonal() * e.vectors.adjoint());
    };
    const Matrix prod = sqrt_psd(rho) * sqrt_psd(sigma);
    Eigen::JacobiSVD<Matrix> svd(prod);
    return std::min(1.0, svd.singularValues().sum());
}

bool in_numeric_domain(const channel::CovertParams& params)
{
    const double nbar = params.noise.nbar;
    const double q = params.q();
    return nbar >= 1e-3 && nbar <= 1.0 && q >= 1e-4 && q <= 0.5;
}

BoundCoefficients bound_coefficients(const channel::Encoding& encoding, double nbar)
{
    if (!(nbar > 0.0)) {
        throw DomainError("closed-form bounds are singular at nbar = 0");
    }
    const double n = nbar;
    const double p1 = 1.0 + n;
    BoundCoefficients c;
    if (encoding.kind == channel::EncodingKind::SinglePhoton) {
        c.linear = n * n / (8.0 * p1 * p1 * p1);
        c.quadratic = (1.0 + 4.0 * n + 5.0 * n * n + 3.0 * n * n * n) / (16.0 * n * p1 * p1 * p1);
        return c;
    }
    encoding.validate();
    const double mu = encoding.mu;
    const double p2 = p1 * p1;
    const double p4 = p2 * p2;
    c.linear = (n * n * (1.0 + 2.0 * n) / (mu * p4) + n / p2 + n * mu / (3.0 * p2)) / 8.0;
    c.quadratic = ((n * (1.0 + 2.0 * n) + 2.0 * n) / (2.0 * mu * mu * p4) +
                   (1.0 + 7.0 * n + 16.0 * n * n + 12.0 * n * n * n) / (2.0 * n * p2 * p1)) /
                  8.0;
    return c;
}

double bias_analytic(const channel::CovertParams& params)
{
    require_in_domain(params);
    const auto c = bound_coefficients(params.encoding, params.noise.nbar);
    return std::sqrt(c.linear * params.d + c.quadratic * params.d * params.d / params.N);
}

Asymptotic bias_asymptotic(const channel::CovertParams& params)
{
    require_in_domain(params);
    constexpr double kMuchLess = 0.1;
    const double n = params.noise.nbar;
    const double d = params.d;
    const double N = params.N;
    Asymptotic a;
    if (params.encoding.kind == channel::EncodingKind::SinglePhoton) {
        a.value = d / 4.0 * std::sqrt(1.0 / (n * N));
        a.in_regime = n <= kMuchLess && params.q() > n * n;
    } else {
        const double mu = params.encoding.mu;
        a.value = std::sqrt(d * d / (16.0 * N * n) + d * n / 8.0);
        a.in_regime = n <= kMuchLess && mu <= kMuchLess && n <= kMuchLess * mu;
    }
    return a;
}

double bias_floor(double d, double nbar)
{
    if (!(d >= 0.0) || !(nbar >= 0.0)) {
        throw DomainError("bias floor needs d >= 0 and nbar >= 0");
    }
    const double p1 = 1.0 + nbar;
    return std::sqrt(d * nbar * nbar / (8.0 * p1 * p1 * p1));
}

double bias_floor(const channel::Encoding& encoding, double d, double nbar)
{
    if (encoding.kind == channel::EncodingKind::SinglePhoton || nbar == 0.0) {
        return bias_floor(d, nbar);
    }
    return std::sqrt(bound_coefficients(encoding, nbar).linear * d);
}

BiasReport bias_closed_form(const channel::CovertParams& params)
{
    params.validate();
    BiasReport report;
    report.params = params;
    report.epsilon_floor = bias_floor(params.encoding, params.d, params.noise.nbar);
    if (params.noise.nbar == 0.0) {
        report.epsilon_analytic = std::numeric_limits<double>::infinity();
        report.epsilon_asymptotic = std::numeric_limits<double>::infinity();
        report.warnings.emplace_back("closed-form bounds are singular at nbar = 0");
        return report;
    }
    report.epsilon_analytic = bias_analytic(params);
    const auto asym = bias_asymptotic(params);
    report.epsilon_asymptotic = asym.value;
    report.asymptotic_in_regime = asym.in_regime;
    if (!asym.in_regime) {
        report.warnings.emplace_back("parameters are outside the asymptotic approximation's regime");
    }
    return report;
}

BiasReport bias_numeric(const channel::CovertParams& params, int cutoff, int grid_resolution)
{
    BiasReport report = bias_closed_form(params);
    if (!in_numeric_domain(params)) {
        report.warnings.emplace_back(
            "outside the numeric validity domain nbar in [1e-3, 1], q in [1e-4, 0.5]; result may be dominated by roundoff");
    }
    const auto worst = channel::worst_case_signal(params, grid_resolution, cutoff);
    const auto states = channel::eve_states(params, worst.signal, cutoff);
    report.cutoff = states.no_signal.space().cutoff();
    report.relative_entropy_per_bin = worst.d_max;
    report.worst_case_spread = worst.spread;
    report.trace_distance_per_bin = trace_distance(states.no_signal, states.communicating);
    if (std::isinf(worst.d_max)) {
        report.degenerate = true;
        report.epsilon_numeric = std::numeric_limits<double>::infinity();
        report.warnings.emplace_back("rho_E has support outside sigma_E; relative entropy is infinite");
        return report;
    }
    report.epsilon_numeric = std::sqrt(params.N / 8.0 * worst.d_max);
    if (std::isfinite(report.epsilon_analytic) && *report.epsilon_numeric > 1.05 * report.epsilon_analytic) {
        std::ostringstream msg;
        msg << "numeric bound exceeds the closed form by a factor " << *report.epsilon_numeric / report.epsilon_analytic;
        report.warnings.push_back(msg.str());
    }
    return report;
}

}  // namespace covertq::covertness
