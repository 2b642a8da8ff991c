#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gammasum/core_cdf.hpp"

namespace gammasum::cli {

enum class ExitCode : int {
    ok = 0,
    internal = 1,
    validation = 2,
    non_convergence = 3,
};

enum class Command { gamma_sum, qform, mvgamma, quantile, selfcheck };
enum class OutputFormat { json, csv, plain };

/// One unit of work, from command-line flags or one batch line:
///   {"command": "gamma-sum", "params": {...}, "quadrature": {...},
///    "output_format": "json"}
struct JobSpec {
    Command command = Command::gamma_sum;
    nlohmann::json params = nlohmann::json::object();
    nlohmann::json quadrature_echo;  ///< overrides as given, null when absent
    QuadratureConfig quadrature;
    OutputFormat output_format = OutputFormat::json;
};

inline constexpr std::uint64_t kDefaultSeed = 20201;

/// Validates a record against the schema of its command. Throws ValidationError.
JobSpec parse_job(const nlohmann::json& record);

/// Result object with the stable keys
///   command, input_echo, cdf | quantile, err_estimate, converged, r_used,
///   nodes_used, warnings
/// Non-convergence is reported in the object (converged = false), not thrown.
nlohmann::json execute_job(const JobSpec& job);

/// Entry point; argv excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gammasum::cli
