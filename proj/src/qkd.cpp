#include "covertq/qkd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "covertq/covertness.hpp"

namespace covertq::qkd {

const char* const kCoherentRateNote =
    "K_C is the verbatim evaluation of R[Y1(1-h(Q/Y1)) - h(Q)]. At Q = 0.01, mu = tau (Y1 = 0.5) it gives "
    "0.3485 R, not the 0.47 R sometimes quoted for that operating point; no extra parameter is introduced "
    "to reconcile the two.";

double binary_entropy(double x)
{
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("binary entropy argument must lie in [0,1], got " + std::to_string(x));
    }
    if (x == 0.0 || x == 1.0) {
        return 0.0;
    }
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

QberEstimate qber(const channel::NoiseModel& noise, const channel::Encoding& encoding)
{
    noise.validate();
    encoding.validate();
    if (noise.eta == 0.0) {
        throw DomainError("QBER is undefined for eta = 0 (no signal reaches Bob)");
    }
    QberEstimate q;
    double raw = (1.0 / noise.eta - 1.0) * noise.nbar;
    if (encoding.kind == channel::EncodingKind::Coherent) {
        raw /= encoding.mu;
        q.approximation_warning = noise.nbar > 0.1 * encoding.mu;
    }
    q.clipped = raw > 0.5;
    q.value = q.clipped ? 0.5 : raw;
    return q;
}

KeyRateReport key_rate_single_photon(const KeyRateParams& p)
{
    if (!(p.R >= 0.0) || !(p.Q >= 0.0 && p.Q <= 0.5)) {
        throw DomainError("key rate needs R >= 0 and Q in [0, 1/2]");
    }
    KeyRateReport r;
    r.Q_used = p.Q;
    r.K = p.R * (1.0 - 2.0 * binary_entropy(p.Q));
    r.positive = r.K > 0.0;
    return r;
}

KeyRateReport key_rate_coherent(const KeyRateParams& p)
{
    if (!(p.R >= 0.0) || !(p.Q >= 0.0 && p.Q <= 0.5)) {
        throw DomainError("key rate needs R >= 0 and Q in [0, 1/2]");
    }
    if (!(p.tau > 0.0 && p.tau <= 1.0) || !(p.mu > 0.0)) {
        throw DomainError("coherent key rate needs tau in (0,1] and mu > 0");
    }
    KeyRateReport r;
    r.Q_used = p.Q;
    const double y1 = std::max(0.0, 1.0 - p.mu / (2.0 * p.tau));
    r.Y1 = y1;
    if (y1 == 0.0) {
        r.K = -p.R * binary_entropy(p.Q);
    } else {
        double ratio = p.Q / y1;
        if (ratio > 0.5) {
            ratio = 0.5;
            r.clipped = true;
        }
        r.K = p.R * (y1 * (1.0 - binary_entropy(ratio)) - binary_entropy(p.Q));
    }
    r.positive = r.K > 0.0;
    r.notes.emplace_back(kCoherentRateNote);
    return r;
}

BinsResult required_bins(double d, double nbar, const channel::Encoding& encoding, double epsilon_target)
{
    if (!(d > 0.0) || !(epsilon_target > 0.0)) {
        throw DomainError("required_bins needs d > 0 and a positive target");
    }
    const auto c = covertness::bound_coefficients(encoding, nbar);
    BinsResult out;
    out.floor = std::sqrt(c.linear * d);
    const double headroom = epsilon_target * epsilon_target - c.linear * d;
    if (!(headroom > 0.0)) {
        return out;
    }
    double n = c.quadratic * d * d / headroom;
    n = std::max(n, d);
    auto eps_at = [&](double bins) { return std::sqrt(c.linear * d + c.quadratic * d * d / bins); };
    while (eps_at(n) > epsilon_target) {
        n = std::nextafter(n, std::numeric_limits<double>::infinity());
    }
    out.feasible = true;
    out.N = n;
    return out;
}

}  // namespace covertq::qkd
