// Command-line front end. Exit codes: 0 success or validation pass,
// 1 validation failure, 2 usage or parse error, 3 solver failure.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace amamm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolverFailure = 3;

inline constexpr std::string_view kToolVersion = "0.1.0";

struct RunManifest {
  std::string command;
  std::string config_hash = "none";  // FNV-1a 64 of the config file bytes, or "none"
  std::uint64_t seed = 0;
  std::string version{kToolVersion};
  std::vector<std::string> outputs;

  // "# manifest {...}" line placed at the top of every CSV output.
  std::string header_line() const;
};

std::string fnv1a_64_hex(std::string_view bytes);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace amamm
