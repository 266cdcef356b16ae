#pragma once

// Command orchestration shared by the hypdyn binary and the tests: a JSON
// run configuration goes in, a JSON report and an exit code come out.

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace hypdyn {

inline constexpr const char* kToolVersion = "1.0.0";

struct Report {
  nlohmann::json json;
  int exit_code = 0;
};

const std::vector<std::string>& command_names();

/// Keys of a run configuration:
///   system     system description (torus or sft)
///   logscale   {"epsilon0", "n_max"}
///   sample     {"side", "window", "spacing", "depth"}
///   options    command specific values (beta, matrix, s_rad, ...)
///   seed, threads
/// CSV side files are written when options.csv / options.edges name a path.
Report run_command(const std::string& command, const nlohmann::json& config);

/// Recursively rounds numbers to 12 significant digits and renders
/// non-finite values as the strings "inf", "-inf" and "nan".
nlohmann::json round_numbers(const nlohmann::json& value);

/// "2,1;1,1" -> [[2,1],[1,1]].
nlohmann::json parse_matrix(const std::string& text);
std::vector<double> parse_list(const std::string& text);

}  // namespace hypdyn
