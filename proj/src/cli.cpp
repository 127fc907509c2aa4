#include "covertq/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "covertq/channel.hpp"
#include "covertq/config.hpp"
#include "covertq/covertness.hpp"
#include "covertq/keybudget.hpp"
#include "covertq/protosim.hpp"
#include "covertq/qkd.hpp"
#include "covertq/report_io.hpp"

namespace covertq::cli {

namespace {

using io::Json;

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Kind { Real, Integer, Text, Switch };

struct Range {
    double lo = -kInf;
    double hi = kInf;
    bool lo_open = false;
    bool hi_open = false;
};

struct FlagSpec {
    std::string key;      // flag name without dashes; also the --params key
    Kind kind = Kind::Real;
    std::string fallback; // empty: no default
    Range range{};
    std::vector<std::string> choices;
    std::string help;
    bool required = false;
};

std::string option_name(const std::string& key)
{
    if (key == "output") {
        return "-o,--output";
    }
    return (key.size() == 1 ? "-" : "--") + key;
}

std::string token_for(const std::string& key)
{
    return (key.size() == 1 ? "-" : "--") + key;
}

std::optional<double> parse_real(const std::string& s)
{
    if (s.empty()) {
        return std::nullopt;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::logic_error&) {
        return std::nullopt;
    }
    if (used != s.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

std::string describe(const Range& r)
{
    std::ostringstream os;
    os << (r.lo_open ? "(" : "[") << r.lo << ", " << r.hi << (r.hi_open ? ")" : "]");
    return os.str();
}

CLI::Validator make_validator(const FlagSpec& spec)
{
    return CLI::Validator(
        [spec](std::string& value) -> std::string {
            if (spec.kind == Kind::Text) {
                if (!spec.choices.empty() &&
                    std::find(spec.choices.begin(), spec.choices.end(), value) == spec.choices.end()) {
                    std::string all;
                    for (const auto& c : spec.choices) {
                        all += (all.empty() ? "" : ", ") + c;
                    }
                    return "value '" + value + "' is not one of {" + all + "}";
                }
                return {};
            }
            const auto v = parse_real(value);
            if (!v) {
                return "value '" + value + "' is not a finite number";
            }
            if (spec.kind == Kind::Integer && std::floor(*v) != *v) {
                return "value '" + value + "' is not an integer";
            }
            const Range& r = spec.range;
            const bool below = r.lo_open ? !(*v > r.lo) : !(*v >= r.lo);
            const bool above = r.hi_open ? !(*v < r.hi) : !(*v <= r.hi);
            if (below || above) {
                return "value " + value + " outside the valid range " + describe(r);
            }
            return {};
        },
        "", "");
}

Range closed(double lo, double hi) { return {lo, hi, false, false}; }
Range at_least(double lo) { return {lo, kInf, false, false}; }
Range above(double lo) { return {lo, kInf, true, false}; }

FlagSpec real(std::string key, std::string fallback, Range r, std::string help)
{
    return {std::move(key), Kind::Real, std::move(fallback), r, {}, std::move(help)};
}

FlagSpec integer(std::string key, std::string fallback, Range r, std::string help)
{
    return {std::move(key), Kind::Integer, std::move(fallback), r, {}, std::move(help)};
}

FlagSpec text(std::string key, std::string fallback, std::vector<std::string> choices, std::string help)
{
    return {std::move(key), Kind::Text, std::move(fallback), {}, std::move(choices), std::move(help)};
}

FlagSpec toggle(std::string key, std::string help)
{
    return {std::move(key), Kind::Switch, "", {}, {}, std::move(help)};
}

FlagSpec need(FlagSpec s)
{
    s.required = true;
    return s;
}

const std::vector<std::string> kModels = {"lab", "B", "env", "environment", "A"};
const std::vector<std::string> kEncodings = {"sp", "coh"};

std::vector<FlagSpec> point_flags(bool with_encoding)
{
    std::vector<FlagSpec> v = {
        text("model", "lab", kModels, "thermal noise placement: lab (B) or env (A)"),
        real("eta", "0.5", closed(0, 1), "beamsplitter transmissivity"),
        real("nbar", "1e-5", at_least(0), "thermal mean photon number"),
        real("mu", "1e-3", above(0), "coherent mean photon number"),
        real("d", "20", at_least(0), "expected number of signals"),
        real("N", "1e10", at_least(1), "number of time-bins (floored)"),
    };
    if (with_encoding) {
        v.push_back(text("encoding", "sp", kEncodings, "signal encoding: sp or coh"));
    }
    return v;
}

std::vector<FlagSpec> common_flags()
{
    return {
        text("format", "json", {"json", "csv"}, "output format"),
        text("output", "", {}, "output file (default stdout)"),
    };
}

std::map<std::string, std::vector<FlagSpec>> command_table()
{
    std::map<std::string, std::vector<FlagSpec>> t;

    auto bias = point_flags(true);
    bias.push_back(real("q", "", closed(0, 1), "send probability; sets d = q N"));
    bias.push_back(toggle("numeric", "also compute the Fock-space bound"));
    bias.push_back(integer("cutoff", "0", closed(0, 64), "per-mode photon cutoff, 0 = automatic"));
    bias.push_back(integer("grid", "16", closed(4, 4096), "Bloch-sphere grid size for the worst case"));
    bias.push_back(real("target-eps", "", above(0), "report the N needed for this bias"));
    t["bias"] = bias;

    auto sweep = point_flags(false);
    sweep.push_back(text("param", "N", {"N", "d", "nbar", "mu"}, "swept parameter"));
    sweep.push_back(need(real("from", "", {}, "first value")));
    sweep.push_back(need(real("to", "", {}, "last value")));
    sweep.push_back(integer("points", "9", closed(1, 1e6), "number of values"));
    sweep.push_back(toggle("log", "logarithmic spacing"));
    t["sweep"] = sweep;

    t["keyrate"] = {
        text("encoding", "sp", kEncodings, "signal encoding: sp or coh"),
        real("eta", "0.5", closed(0, 1), "beamsplitter transmissivity"),
        real("nbar", "1e-5", at_least(0), "thermal mean photon number"),
        real("mu", "1e-3", above(0), "coherent mean photon number"),
        real("R", "1", at_least(0), "detection rate per signal"),
        real("tau", "", {0, 1, true, false}, "total transmissivity (coherent; default mu)"),
        real("Q", "", closed(0, 0.5), "bit error rate (default: noise-only estimate)"),
    };

    t["budget"] = {
        real("N", "1e6", at_least(1), "number of time-bins (floored)"),
        real("q", "1e-3", {0, 0.5, true, true}, "send probability"),
        integer("seed-bits", "440", closed(1, 1e15), "PRNG seed length in bits"),
        integer("output-bits", "524288", closed(1, 1e15), "PRNG output bits per call"),
    };

    t["schedule"] = {
        need(real("N", "", closed(1, 4294967296.0), "number of time-bins (floored)")),
        need(real("q", "", {0, 1, false, true}, "send probability")),
        need(text("seed", "", {}, "seed, hex")),
        text("algorithm", keybudget::kCtrDrbgAes256, {}, "keystream algorithm id"),
        integer("workers", "1", closed(1, 256), "worker threads"),
    };

    auto simulate = point_flags(true);
    simulate.push_back(real("q", "", closed(0, 1), "send probability; sets d = q N"));
    simulate.push_back(real("tau", "1", {0, 1, true, false}, "channel transmissivity after the noise beamsplitter"));
    simulate.push_back(real("bob-nbar", "", at_least(0), "override thermal photons per detector mode"));
    simulate.push_back(integer("trials", "100000", closed(1, 1e12), "signal rounds"));
    simulate.push_back(text("seed", "00", {}, "master seed, hex"));
    simulate.push_back(integer("workers", "1", closed(1, 256), "worker threads"));
    simulate.push_back(toggle("attack", "also run Eve's product-measurement attack over N bins"));
    simulate.push_back(integer("attack-trials", "1000", closed(1, 1e9), "attack trials per hypothesis"));
    simulate.push_back(integer("cutoff", "0", closed(0, 64), "per-mode photon cutoff for the attack, 0 = automatic"));
    t["simulate"] = simulate;

    auto oracle = point_flags(true);
    oracle.push_back(real("q", "", closed(0, 1), "send probability; sets d = q N"));
    oracle.push_back(integer("n-small", "1", closed(1, 6), "number of time-bins held jointly"));
    oracle.push_back(integer("cutoff", "2", closed(1, 3), "per-mode photon cutoff"));
    t["oracle"] = oracle;

    for (auto& [name, flags] : t) {
        auto extra = common_flags();
        flags.insert(flags.end(), extra.begin(), extra.end());
    }
    return t;
}

std::string json_token(const nlohmann::json& v, const std::string& key)
{
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number_integer() || v.is_number_unsigned()) {
        return v.dump();
    }
    if (v.is_number_float()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    throw UsageError("--params: key '" + key + "' must be a number, string or boolean");
}

// Moves the contents of --params ahead of the explicit flags so that the
// latter win under the take-last policy.
std::vector<std::string> merge_params_file(const std::vector<std::string>& args)
{
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--params") {
            if (i + 1 >= args.size()) {
                throw UsageError("--params: requires a file path");
            }
            path = args[i + 1];
        } else if (args[i].rfind("--params=", 0) == 0) {
            path = args[i].substr(9);
        }
    }
    if (!path || args.empty()) {
        return args;
    }
    std::ifstream in(*path);
    if (!in) {
        throw UsageError("--params: cannot read '" + *path + "'");
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("--params: '" + *path + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) {
        throw UsageError("--params: '" + *path + "' must hold a JSON object");
    }
    std::vector<std::string> tokens;
    for (const auto& [key, value] : doc.items()) {
        if (key == "params" || key.empty()) {
            throw UsageError("--params: key '" + key + "' is not allowed in a params file");
        }
        if (value.is_null()) {
            continue;
        }
        if (value.is_boolean()) {
            if (value.get<bool>()) {
                tokens.push_back(token_for(key));
            }
            continue;
        }
        tokens.push_back(token_for(key));
        tokens.push_back(json_token(value, key));
    }
    std::vector<std::string> merged;
    merged.push_back(args.front());
    merged.insert(merged.end(), tokens.begin(), tokens.end());
    merged.insert(merged.end(), args.begin() + 1, args.end());
    return merged;
}

double get_real(const CommandRequest& r, const std::string& key)
{
    return *parse_real(r.flags.at(key));
}

bool has(const CommandRequest& r, const std::string& key)
{
    return r.flags.count(key) != 0;
}

bool get_switch(const CommandRequest& r, const std::string& key)
{
    return has(r, key) && r.flags.at(key) == "true";
}

std::uint64_t get_count(const CommandRequest& r, const std::string& key)
{
    return static_cast<std::uint64_t>(get_real(r, key));
}

channel::Encoding encoding_of(const CommandRequest& r)
{
    if (has(r, "encoding") && channel::parse_encoding_kind(r.flags.at("encoding")) == channel::EncodingKind::Coherent) {
        return channel::Encoding::coherent(get_real(r, "mu"));
    }
    return channel::Encoding::single_photon();
}

channel::NoiseModel noise_of(const CommandRequest& r)
{
    channel::NoiseModel n;
    n.kind = has(r, "model") ? channel::parse_noise_kind(r.flags.at("model")) : channel::NoiseKind::LabThermal;
    n.eta = get_real(r, "eta");
    n.nbar = get_real(r, "nbar");
    return n;
}

channel::CovertParams point_of(const CommandRequest& r)
{
    channel::CovertParams p;
    p.N = get_real(r, "N");
    p.d = get_real(r, "d");
    p.encoding = encoding_of(r);
    p.noise = noise_of(r);
    return p;
}

std::vector<std::uint8_t> seed_of(const CommandRequest& r)
{
    return keybudget::parse_hex(r.flags.at("seed"));
}

void validate_request(const CommandRequest& r)
{
    const auto& cmd = r.subcommand;
    if (cmd == "bias" || cmd == "simulate" || cmd == "oracle") {
        point_of(r).validate();
    }
    if (cmd == "sweep") {
        const double from = get_real(r, "from");
        const double to = get_real(r, "to");
        if (get_switch(r, "log") && !(from > 0.0 && to > 0.0)) {
            throw UsageError("--from/--to: logarithmic sweeps need positive endpoints");
        }
        const auto& param = r.flags.at("param");
        const bool positive = param == "N" || param == "mu";
        if (positive && !(std::min(from, to) > 0.0)) {
            throw UsageError("--from/--to: " + param + " must stay positive");
        }
        if (!(std::min(from, to) >= 0.0)) {
            throw UsageError("--from/--to: " + param + " must be >= 0");
        }
        if (param == "N" && std::min(from, to) < 1.0) {
            throw UsageError("--from/--to: N must be >= 1");
        }
    }
    if (cmd == "schedule") {
        if (seed_of(r).empty()) {
            throw UsageError("--seed: must hold at least one byte");
        }
        if (r.flags.at("algorithm") != keybudget::kCtrDrbgAes256) {
            throw UsageError("--algorithm: unknown algorithm '" + r.flags.at("algorithm") + "' (valid: " +
                             keybudget::kCtrDrbgAes256 + ")");
        }
    }
    if (cmd == "simulate") {
        seed_of(r);
        if (get_switch(r, "attack") && get_real(r, "N") > 1e6) {
            throw UsageError("--attack: simulates every bin, so N must be <= 1e6");
        }
        if (get_real(r, "eta") == 0.0 && !has(r, "bob-nbar")) {
            throw UsageError("--eta: simulate needs eta in (0, 1] for the noise-consistent setting");
        }
    }
}

Json bias_command(const CommandRequest& r)
{
    auto p = point_of(r);
    std::optional<double> required_n;
    if (has(r, "target-eps")) {
        const double target = get_real(r, "target-eps");
        const auto bins = qkd::required_bins(p.d, p.noise.nbar, p.encoding, target);
        if (!bins.feasible) {
            std::ostringstream msg;
            msg << "target bias " << target << " is not above the bias floor " << bins.floor;
            throw InfeasibleError(msg.str(), bins.floor);
        }
        required_n = std::ceil(bins.N);
        p.N = *required_n;
    }
    const auto report = get_switch(r, "numeric")
                            ? covertness::bias_numeric(p, static_cast<int>(get_real(r, "cutoff")),
                                                       static_cast<int>(get_real(r, "grid")))
                            : covertness::bias_closed_form(p);
    if (report.degenerate) {
        throw NumericalError("rho_E has support outside sigma_E; the relative entropy is infinite");
    }
    Json doc = io::to_json(report);
    if (required_n) {
        doc["target_epsilon"] = get_real(r, "target-eps");
        doc["required_N"] = *required_n;
    }
    return doc;
}

Json sweep_command(const CommandRequest& r)
{
    const auto values = sweep_values(get_real(r, "from"), get_real(r, "to"),
                                     static_cast<int>(get_real(r, "points")), get_switch(r, "log"));
    const auto& param = r.flags.at("param");
    Json rows = Json::array();
    for (double v : values) {
        CommandRequest point = r;
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        point.flags[param] = buf;
        auto sp = point_of(point);
        if (param == "N") {
            sp.N = v;
        }
        auto coh = sp;
        coh.encoding = channel::Encoding::coherent(get_real(point, "mu"));
        Json row;
        row["N"] = sp.N;
        row["q"] = sp.q();
        row["eps_analytic_sp"] = covertness::bias_analytic(sp);
        row["eps_asymptotic_sp"] = covertness::bias_asymptotic(sp).value;
        row["eps_analytic_coh"] = covertness::bias_analytic(coh);
        row["eps_asymptotic_coh"] = covertness::bias_asymptotic(coh).value;
        row["eps_floor"] = covertness::bias_floor(sp.d, sp.noise.nbar);
        rows.push_back(std::move(row));
    }
    return rows;
}

Json keyrate_command(const CommandRequest& r)
{
    const auto encoding = encoding_of(r);
    qkd::KeyRateParams kp;
    kp.R = get_real(r, "R");
    std::vector<std::string> notes;
    if (has(r, "Q")) {
        kp.Q = get_real(r, "Q");
    } else {
        channel::NoiseModel noise;
        noise.eta = get_real(r, "eta");
        noise.nbar = get_real(r, "nbar");
        const auto est = qkd::qber(noise, encoding);
        kp.Q = est.value;
        notes.emplace_back("Q estimated from thermal noise alone");
        if (est.clipped) {
            notes.emplace_back("noise-only Q exceeded 1/2 and was clipped");
        }
        if (est.approximation_warning) {
            notes.emplace_back("nbar is not much smaller than mu; the noise-only Q is a rough estimate");
        }
    }
    qkd::KeyRateReport report;
    if (encoding.kind == channel::EncodingKind::Coherent) {
        kp.mu = encoding.mu;
        kp.tau = has(r, "tau") ? get_real(r, "tau") : std::min(1.0, encoding.mu);
        report = qkd::key_rate_coherent(kp);
    } else {
        report = qkd::key_rate_single_photon(kp);
    }
    report.notes.insert(report.notes.begin(), notes.begin(), notes.end());
    return io::to_json(report);
}

Json budget_command(const CommandRequest& r)
{
    keybudget::PrngParams prng;
    prng.seed_bits = get_count(r, "seed-bits");
    prng.output_bits_per_call = get_count(r, "output-bits");
    return io::to_json(keybudget::regeneration_deficit(get_real(r, "N"), get_real(r, "q"), prng));
}

std::string schedule_command(const CommandRequest& r)
{
    const auto key = keybudget::make_schedule_key(get_real(r, "q"), seed_of(r), r.flags.at("algorithm"));
    const auto bits = keybudget::prng_schedule(key, get_count(r, "N"), static_cast<unsigned>(get_real(r, "workers")));
    std::ostringstream os;
    keybudget::write_schedule(os, key, bits);
    return os.str();
}

Json simulate_command(const CommandRequest& r)
{
    const auto p = point_of(r);
    const auto seed = seed_of(r);
    const auto workers = static_cast<unsigned>(get_real(r, "workers"));
    auto config = protosim::noise_consistent_config(p, get_real(r, "tau"), get_count(r, "trials"), seed);
    if (has(r, "bob-nbar")) {
        config.bob_noise_nbar = get_real(r, "bob-nbar");
    }
    config.workers = workers;
    auto report = protosim::simulate_qkd(config);
    if (get_switch(r, "attack")) {
        const auto attack = protosim::eve_product_attack(p, get_count(r, "attack-trials"), seed,
                                                         static_cast<int>(get_real(r, "cutoff")), workers);
        report.p_fa = attack.p_fa;
        report.p_md = attack.p_md;
        report.p_e_empirical = attack.p_e_empirical;
        report.p_e_stderr = attack.p_e_stderr;
        report.helstrom_lower_bound = attack.helstrom_lower_bound;
    }
    return io::to_json(report);
}

Json oracle_command(const CommandRequest& r)
{
    const auto chain = protosim::eve_exact_oracle(point_of(r), static_cast<int>(get_real(r, "n-small")),
                                                  static_cast<int>(get_real(r, "cutoff")));
    Json doc = io::to_json(chain);
    doc["params_echo"] = io::to_json(point_of(r));
    return doc;
}

std::string render(const CommandRequest& r, const Json& doc)
{
    if (r.output_format == "csv") {
        return io::to_csv(doc);
    }
    return doc.dump(2) + "\n";
}

}  // namespace

std::vector<double> sweep_values(double from, double to, int points, bool log_spaced)
{
    if (points < 1) {
        throw DomainError("a sweep needs at least one point");
    }
    if (log_spaced && !(from > 0.0 && to > 0.0)) {
        throw DomainError("logarithmic sweeps need positive endpoints");
    }
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
        const double t = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
        if (log_spaced) {
            const double a = std::log10(from);
            const double b = std::log10(to);
            v[static_cast<std::size_t>(k)] = std::pow(10.0, a + (b - a) * t);
        } else {
            v[static_cast<std::size_t>(k)] = from + (to - from) * t;
        }
    }
    v.front() = from;
    if (points > 1) {
        v.back() = to;
    }
    return v;
}

CommandRequest parse_and_validate(const std::vector<std::string>& raw_args)
{
    const auto args = merge_params_file(raw_args);
    const auto table = command_table();

    CLI::App app{"Covert quantum communication bounds, key rates and simulations", "covertq"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "help for every subcommand");

    struct Storage {
        std::map<std::string, std::string> values;
        std::map<std::string, bool> switches;
        std::map<std::string, CLI::Option*> options;
        std::string params_path;
    };
    std::map<std::string, Storage> storage;
    std::map<std::string, CLI::App*> subs;

    for (const auto& [name, flags] : table) {
        auto* sub = app.add_subcommand(name);
        subs[name] = sub;
        auto& st = storage[name];
        for (const auto& spec : flags) {
            CLI::Option* opt = nullptr;
            if (spec.kind == Kind::Switch) {
                opt = sub->add_flag(option_name(spec.key), st.switches[spec.key], spec.help);
            } else {
                opt = sub->add_option(option_name(spec.key), st.values[spec.key], spec.help);
                opt->check(make_validator(spec));
                opt->allow_extra_args(false);
                if (spec.required) {
                    opt->required();
                }
                if (!spec.fallback.empty()) {
                    opt->default_str(spec.fallback);
                }
            }
            opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
            st.options[spec.key] = opt;
        }
        sub->add_option("--params", st.params_path, "JSON file of flag values; explicit flags win");
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::ostringstream out;
        std::ostringstream err;
        app.exit(e, out, err);
        throw HelpRequested(out.str());
    } catch (const CLI::CallForAllHelp& e) {
        std::ostringstream out;
        std::ostringstream err;
        app.exit(e, out, err);
        throw HelpRequested(out.str());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    CommandRequest request;
    for (const auto& [name, sub] : subs) {
        if (sub->parsed()) {
            request.subcommand = name;
        }
    }
    const auto& st = storage.at(request.subcommand);
    for (const auto& spec : table.at(request.subcommand)) {
        const auto* opt = st.options.at(spec.key);
        if (spec.kind == Kind::Switch) {
            request.flags[spec.key] = st.switches.at(spec.key) ? "true" : "false";
        } else if (opt->count() > 0) {
            request.flags[spec.key] = st.values.at(spec.key);
        } else if (!spec.fallback.empty()) {
            request.flags[spec.key] = spec.fallback;
        }
    }

    if (has(request, "q") && (request.subcommand == "bias" || request.subcommand == "simulate" ||
                              request.subcommand == "oracle")) {
        if (st.options.at("d")->count() > 0) {
            throw UsageError("-q: give either -d or -q, not both");
        }
    }
    if (has(request, "N")) {
        const double n = get_real(request, "N");
        if (std::floor(n) != n) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", std::floor(n));
            request.warnings.push_back("-N " + request.flags.at("N") + " is not an integer; using " + buf);
            request.flags["N"] = buf;
        }
    }
    if (has(request, "q") && has(request, "d")) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", get_real(request, "q") * get_real(request, "N"));
        request.flags["d"] = buf;
    }

    request.output_format = request.flags.at("format");
    if (has(request, "output") && !request.flags.at("output").empty()) {
        request.output_path = request.flags.at("output");
    }

    try {
        validate_request(request);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    return request;
}

CommandResult execute(const CommandRequest& request)
{
    CommandResult result;
    for (const auto& w : request.warnings) {
        result.diagnostics.push_back("warning: " + w);
    }
    try {
        const auto& cmd = request.subcommand;
        if (cmd == "bias") {
            result.document = render(request, bias_command(request));
        } else if (cmd == "sweep") {
            result.document = render(request, sweep_command(request));
        } else if (cmd == "keyrate") {
            result.document = render(request, keyrate_command(request));
        } else if (cmd == "budget") {
            result.document = render(request, budget_command(request));
        } else if (cmd == "schedule") {
            result.document = schedule_command(request);
        } else if (cmd == "simulate") {
            result.document = render(request, simulate_command(request));
        } else if (cmd == "oracle") {
            result.document = render(request, oracle_command(request));
        } else {
            throw UsageError("unknown subcommand '" + cmd + "'");
        }
    } catch (const InfeasibleError& e) {
        result.exit_code = 3;
        result.diagnostics.push_back(std::string("infeasible: ") + e.what());
    } catch (const NumericalError& e) {
        result.exit_code = 2;
        result.diagnostics.push_back(std::string("numerical failure: ") + e.what());
    } catch (const DomainError& e) {
        result.exit_code = 1;
        result.diagnostics.push_back(std::string("error: ") + e.what());
    } catch (const ConfigError& e) {
        result.exit_code = 1;
        result.diagnostics.push_back(std::string("configuration error: ") + e.what());
    } catch (const UsageError& e) {
        result.exit_code = 1;
        result.diagnostics.push_back(std::string("error: ") + e.what());
    } catch (const std::exception& e) {
        result.exit_code = 2;
        result.diagnostics.push_back(std::string("numerical failure: ") + e.what());
    }
    if (result.exit_code != 0) {
        result.document.clear();
    }
    return result;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CommandRequest request;
    try {
        request = parse_and_validate(args);
    } catch (const HelpRequested& h) {
        out << h.what();
        return 0;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    const auto result = execute(request);
    for (const auto& d : result.diagnostics) {
        err << d << "\n";
    }
    if (result.exit_code != 0) {
        return result.exit_code;
    }
    if (request.output_path) {
        std::ofstream file(*request.output_path, std::ios::binary);
        if (!file || !(file << result.document) || !file.flush()) {
            err << "error: cannot write '" << *request.output_path << "'\n";
            return 1;
        }
    } else {
        out << result.document;
    }
    return 0;
}

}  // namespace covertq::cli
