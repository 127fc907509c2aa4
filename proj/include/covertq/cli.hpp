#pragma once

// Command-line surface: subcommands bias, sweep, keyrate, budget, schedule,
// simulate and oracle.
//
// Exit codes: 0 success, 1 argument or domain error, 2 numerical failure
// (support violation, dimension guard), 3 infeasible target (bias floor).

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace covertq::cli {

struct CommandRequest {
    std::string subcommand;
    std::map<std::string, std::string> flags;  // effective values keyed by flag name without dashes
    std::string output_format = "json";
    std::optional<std::string> output_path;
    std::vector<std::string> warnings;         // raised while parsing, e.g. a floored N
};

/// Thrown by parse_and_validate; maps to exit code 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown for --help; carries the help text.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// `args` excludes the program name. `--params file.json` merges a JSON
/// object whose keys are flag names; explicit flags take precedence.
CommandRequest parse_and_validate(const std::vector<std::string>& args);

struct CommandResult {
    int exit_code = 0;
    std::string document;                  // empty on failure
    std::vector<std::string> diagnostics;  // warnings and error messages
};

CommandResult execute(const CommandRequest& request);

/// Parse, execute, write the document to -o or `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Evenly spaced (or log-spaced) values, endpoints included.
std::vector<double> sweep_values(double from, double to, int points, bool log_spaced);

}  // namespace covertq::cli
