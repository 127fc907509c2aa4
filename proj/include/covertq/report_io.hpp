#pragma once

// JSON and CSV encodings of the result records. Field names are stable;
// CSV reals use scientific notation with 10 significant digits.

#include <string>

#include <nlohmann/json.hpp>

#include "covertq/channel.hpp"
#include "covertq/covertness.hpp"
#include "covertq/keybudget.hpp"
#include "covertq/protosim.hpp"
#include "covertq/qkd.hpp"

namespace covertq::io {

using Json = nlohmann::ordered_json;

Json to_json(const channel::CovertParams& p);
Json to_json(const covertness::BiasReport& r);
Json to_json(const qkd::KeyRateReport& r);
Json to_json(const keybudget::KeyBudgetReport& r);
Json to_json(const protosim::SimReport& r);
Json to_json(const protosim::BoundChain& c);

/// "%.9e"; non-finite values become inf/-inf/nan.
std::string format_real(double x);

/// Header line plus one row per element. `rows` is an object or an array of
/// flat objects sharing keys; nested params are flattened with a dot.
std::string to_csv(const Json& rows);

}  // namespace covertq::io
