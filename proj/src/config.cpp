#include "covertq/config.hpp"

#include <cstdlib>
#include <string>

namespace covertq {

const Tolerances& tolerances()
{
    static const Tolerances tol{};
    return tol;
}

std::size_t max_dimension()
{
    constexpr std::size_t kDefault = 4096;
    const char* env = std::getenv("COVERTQ_MAX_DIM");
    if (env == nullptr || *env == '\0') {
        return kDefault;
    }
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(env, &pos);
        if (pos != std::string(env).size() || v == 0 || env[0] < '0' || env[0] > '9') {
            throw ConfigError("COVERTQ_MAX_DIM must be a positive integer, got '" + std::string(env) + "'");
        }
        return static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
        throw ConfigError("COVERTQ_MAX_DIM must be a positive integer, got '" + std::string(env) + "'");
    }
}

}  // namespace covertq
