#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "covertq/channel.hpp"
#include "covertq/cli.hpp"
#include "covertq/covertness.hpp"
#include "covertq/keybudget.hpp"
#include "covertq/protosim.hpp"
#include "covertq/qkd.hpp"
#include "covertq/report_io.hpp"

namespace py = pybind11;
using namespace covertq;

namespace {

py::object to_python(const io::Json& j)
{
    switch (j.type()) {
    case io::Json::value_t::null:
        return py::none();
    case io::Json::value_t::boolean:
        return py::bool_(j.get<bool>());
    case io::Json::value_t::number_integer:
        return py::int_(j.get<std::int64_t>());
    case io::Json::value_t::number_unsigned:
        return py::int_(j.get<std::uint64_t>());
    case io::Json::value_t::number_float:
        return py::float_(j.get<double>());
    case io::Json::value_t::string:
        return py::str(j.get<std::string>());
    case io::Json::value_t::array: {
        py::list out;
        for (const auto& v : j) {
            out.append(to_python(v));
        }
        return out;
    }
    default: {
        py::dict out;
        for (const auto& [k, v] : j.items()) {
            out[py::str(k)] = to_python(v);
        }
        return out;
    }
    }
}

channel::CovertParams make_params(const std::string& model, double eta, double nbar, double d, double N,
                                  const std::string& encoding, double mu)
{
    channel::CovertParams p;
    p.N = N;
    p.d = d;
    p.noise = {channel::parse_noise_kind(model), eta, nbar};
    p.encoding = channel::parse_encoding_kind(encoding) == channel::EncodingKind::Coherent
                     ? channel::Encoding::coherent(mu)
                     : channel::Encoding::single_photon();
    p.validate();
    return p;
}

}  // namespace

PYBIND11_MODULE(covertq, m)
{
    m.doc() = "Covert quantum key distribution: Eve's states, detection bias, key rates and schedules.";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_RuntimeError);

    m.def(
        "bias",
        [](const std::string& model, double eta, double nbar, double d, double N, const std::string& encoding,
           double mu, bool numeric, int cutoff, int grid) {
            const auto p = make_params(model, eta, nbar, d, N, encoding, mu);
            const auto r = numeric ? covertness::bias_numeric(p, cutoff, grid) : covertness::bias_closed_form(p);
            return to_python(io::to_json(r));
        },
        py::arg("model") = "lab", py::arg("eta") = 0.5, py::arg("nbar") = 1e-5, py::arg("d") = 20.0,
        py::arg("N") = 1e10, py::arg("encoding") = "sp", py::arg("mu") = 1e-3, py::arg("numeric") = false,
        py::arg("cutoff") = 0, py::arg("grid") = 16, "Detection-bias report as a dict.");

    m.def("binary_entropy", &qkd::binary_entropy, py::arg("x"));
    m.def(
        "qber",
        [](const std::string& model, double eta, double nbar, const std::string& encoding, double mu) {
            const auto p = make_params(model, eta, nbar, 0.0, 1.0, encoding, mu);
            return qkd::qber(p.noise, p.encoding).value;
        },
        py::arg("model") = "lab", py::arg("eta") = 0.5, py::arg("nbar") = 1e-5, py::arg("encoding") = "sp",
        py::arg("mu") = 1e-3);
    m.def(
        "key_rate_single_photon",
        [](double R, double Q) { return to_python(io::to_json(qkd::key_rate_single_photon({R, Q, 0.0, 1.0}))); },
        py::arg("R"), py::arg("Q"));
    m.def(
        "key_rate_coherent",
        [](double R, double Q, double mu, double tau) {
            return to_python(io::to_json(qkd::key_rate_coherent({R, Q, mu, tau})));
        },
        py::arg("R"), py::arg("Q"), py::arg("mu"), py::arg("tau"));
    m.def(
        "required_bins",
        [](double d, double nbar, const std::string& encoding, double mu, double target) -> py::object {
            const auto enc = channel::parse_encoding_kind(encoding) == channel::EncodingKind::Coherent
                                 ? channel::Encoding::coherent(mu)
                                 : channel::Encoding::single_photon();
            const auto r = qkd::required_bins(d, nbar, enc, target);
            if (!r.feasible) {
                return py::none();
            }
            return py::float_(r.N);
        },
        py::arg("d"), py::arg("nbar"), py::arg("encoding") = "sp", py::arg("mu") = 1e-3, py::arg("target"),
        "Smallest N reaching the target bias, or None below the encoding's floor.");

    m.def(
        "budget",
        [](double N, double q, std::uint64_t seed_bits, std::uint64_t output_bits) {
            return to_python(io::to_json(keybudget::regeneration_deficit(N, q, {seed_bits, output_bits})));
        },
        py::arg("N"), py::arg("q"), py::arg("seed_bits") = keybudget::kDefaultSeedBits,
        py::arg("output_bits") = keybudget::kDefaultOutputBitsPerCall);
    m.def(
        "schedule",
        [](double q, const std::string& seed_hex, std::uint64_t N, unsigned workers) {
            const auto key = keybudget::make_schedule_key(q, keybudget::parse_hex(seed_hex));
            const auto bits = keybudget::prng_schedule(key, N, workers);
            std::vector<std::uint64_t> selected;
            for (std::uint64_t i = 0; i < bits.size(); ++i) {
                if (bits[i]) {
                    selected.push_back(i);
                }
            }
            return selected;
        },
        py::arg("q"), py::arg("seed"), py::arg("N"), py::arg("workers") = 1, "Indices of the selected time-bins.");

    m.def(
        "simulate",
        [](const std::string& model, double eta, double nbar, const std::string& encoding, double mu,
           std::uint64_t trials, const std::string& seed_hex, unsigned workers) {
            const auto p = make_params(model, eta, nbar, 1.0, 1.0, encoding, mu);
            auto config = protosim::noise_consistent_config(p, 1.0, trials, keybudget::parse_hex(seed_hex));
            config.workers = workers;
            return to_python(io::to_json(protosim::simulate_qkd(config)));
        },
        py::arg("model") = "lab", py::arg("eta") = 0.5, py::arg("nbar") = 5e-3, py::arg("encoding") = "sp",
        py::arg("mu") = 0.1, py::arg("trials") = 100000, py::arg("seed") = "00", py::arg("workers") = 1);
    m.def(
        "oracle",
        [](const std::string& model, double eta, double nbar, double q, int copies, int cutoff) {
            const auto p = make_params(model, eta, nbar, q * copies, copies, "sp", 0.0);
            return to_python(io::to_json(protosim::eve_exact_oracle(p, copies, cutoff)));
        },
        py::arg("model") = "lab", py::arg("eta") = 0.5, py::arg("nbar") = 0.1, py::arg("q") = 0.1,
        py::arg("copies") = 1, py::arg("cutoff") = 2);

    m.def(
        "relative_entropy", [](const Matrix& rho, const Matrix& sigma) { return covertness::relative_entropy(rho, sigma); },
        py::arg("rho"), py::arg("sigma"), "D(rho || sigma) in nats.");
    m.def(
        "trace_norm", [](const Matrix& h) { return covertness::trace_norm(h); }, py::arg("hermitian"));

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out;
            std::ostringstream err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs a covertq subcommand in-process; returns (exit_code, stdout, stderr).");
}
