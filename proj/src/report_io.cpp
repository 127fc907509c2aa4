#include "covertq/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace covertq::io {

namespace {

Json optional_real(const std::optional<double>& x)
{
    if (!x || !std::isfinite(*x)) {
        return nullptr;
    }
    return *x;
}

Json real(double x)
{
    if (!std::isfinite(x)) {
        return nullptr;
    }
    return x;
}

void flatten(const Json& obj, const std::string& prefix, Json& out)
{
    for (const auto& [key, value] : obj.items()) {
        const std::string name = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            flatten(value, name, out);
        } else {
            out[name] = value;
        }
    }
}

std::string quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') {
            q += '"';
        }
        q += c;
    }
    return q + "\"";
}

std::string cell(const Json& v)
{
    if (v.is_null()) {
        return "";
    }
    if (v.is_boolean()) {
        return v.get<bool>() ? "true" : "false";
    }
    if (v.is_number_integer() || v.is_number_unsigned()) {
        return v.dump();
    }
    if (v.is_number_float()) {
        return format_real(v.get<double>());
    }
    if (v.is_string()) {
        return quote(v.get<std::string>());
    }
    if (v.is_array()) {
        std::string joined;
        for (const auto& e : v) {
            if (!joined.empty()) {
                joined += "; ";
            }
            joined += e.is_string() ? e.get<std::string>() : e.dump();
        }
        return quote(joined);
    }
    return quote(v.dump());
}

}  // namespace

std::string format_real(double x)
{
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9e", x);
    return buf;
}

Json to_json(const channel::CovertParams& p)
{
    Json j;
    j["N"] = p.N;
    j["d"] = p.d;
    j["q"] = p.q();
    j["encoding"] = channel::to_string(p.encoding.kind);
    if (p.encoding.kind == channel::EncodingKind::Coherent) {
        j["mu"] = p.encoding.mu;
    }
    j["model"] = channel::to_string(p.noise.kind);
    j["eta"] = p.noise.eta;
    j["nbar"] = p.noise.nbar;
    return j;
}

Json to_json(const covertness::BiasReport& r)
{
    Json j;
    j["epsilon_numeric"] = optional_real(r.epsilon_numeric);
    j["epsilon_analytic"] = real(r.epsilon_analytic);
    j["epsilon_asymptotic"] = real(r.epsilon_asymptotic);
    j["epsilon_floor"] = real(r.epsilon_floor);
    j["relative_entropy_per_bin"] = optional_real(r.relative_entropy_per_bin);
    j["trace_distance_per_bin"] = optional_real(r.trace_distance_per_bin);
    j["worst_case_spread"] = optional_real(r.worst_case_spread);
    j["cutoff"] = r.cutoff ? Json(*r.cutoff) : Json(nullptr);
    j["asymptotic_in_regime"] = r.asymptotic_in_regime;
    j["degenerate"] = r.degenerate;
    j["warnings"] = r.warnings;
    j["params_echo"] = to_json(r.params);
    return j;
}

Json to_json(const qkd::KeyRateReport& r)
{
    Json j;
    j["K"] = r.K;
    j["Q_used"] = r.Q_used;
    j["Y1"] = optional_real(r.Y1);
    j["positive"] = r.positive;
    j["clipped"] = r.clipped;
    j["notes"] = r.notes;
    return j;
}

Json to_json(const keybudget::KeyBudgetReport& r)
{
    Json j;
    j["N"] = r.N;
    j["q"] = r.q;
    j["consumed_bits"] = r.consumed_bits;
    j["produced_bits_max"] = r.produced_bits_max;
    j["deficit"] = r.deficit;
    j["cost_ratio"] = r.cost_ratio;
    j["sampler_keystream_bits"] = r.sampler_keystream_bits;
    j["prng_seed_bits"] = r.prng_seed_bits;
    j["prng_output_bits_per_call"] = r.prng_output_bits_per_call;
    j["expansion_factor"] = r.expansion_factor;
    j["regeneration_feasible"] = r.regeneration_feasible;
    return j;
}

Json to_json(const protosim::SimReport& r)
{
    Json j;
    j["empirical_qber"] = r.empirical_qber;
    j["qber_stderr"] = r.qber_stderr;
    j["empirical_detection_rate_R"] = r.empirical_detection_rate_R;
    j["sifted_count"] = r.sifted_count;
    j["error_count"] = r.error_count;
    j["trials"] = r.trials;
    j["predicted_qber"] = r.predicted_qber;
    j["degenerate"] = r.degenerate;
    j["p_fa"] = optional_real(r.p_fa);
    j["p_md"] = optional_real(r.p_md);
    j["p_e_empirical"] = optional_real(r.p_e_empirical);
    j["p_e_stderr"] = optional_real(r.p_e_stderr);
    j["helstrom_lower_bound"] = optional_real(r.helstrom_lower_bound);
    return j;
}

Json to_json(const protosim::BoundChain& c)
{
    Json j;
    j["copies"] = c.copies;
    j["cutoff"] = c.cutoff;
    j["p_e_exact"] = c.p_e_exact;
    j["p_fa"] = c.p_fa;
    j["p_md"] = c.p_md;
    j["trace_norm"] = c.trace_norm;
    j["helstrom"] = c.helstrom;
    j["relative_entropy_per_bin"] = real(c.relative_entropy_per_bin);
    j["relative_entropy_joint"] = real(c.relative_entropy_joint);
    j["pinsker"] = real(c.pinsker);
    j["slack_exact_vs_helstrom"] = c.slack_exact_vs_helstrom;
    j["slack_helstrom_vs_pinsker"] = real(c.slack_helstrom_vs_pinsker);
    j["holds"] = c.holds;
    return j;
}

std::string to_csv(const Json& rows)
{
    std::vector<Json> flat;
    if (rows.is_array()) {
        for (const auto& r : rows) {
            Json f;
            flatten(r, "", f);
            flat.push_back(std::move(f));
        }
    } else {
        Json f;
        flatten(rows, "", f);
        flat.push_back(std::move(f));
    }
    std::ostringstream os;
    if (flat.empty()) {
        return "";
    }
    bool first = true;
    for (const auto& [key, value] : flat.front().items()) {
        os << (first ? "" : ",") << key;
        first = false;
    }
    os << '\n';
    for (const auto& row : flat) {
        first = true;
        for (const auto& [key, value] : flat.front().items()) {
            os << (first ? "" : ",") << (row.contains(key) ? cell(row.at(key)) : "");
            first = false;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace covertq::io
