#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace mopkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumeric = 2;
inline constexpr int kExitVerification = 3;

enum class Command { mop, typeI, kernel, density, sample, verify, equilibrium, compare };

std::optional<Command> parse_command(const std::string& name);
std::string to_string(Command c);

struct RunFlags {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<int> samples;
  bool quiet = false;
};

/// Runs one command; artifacts and manifest.json go to the output directory.
int run(Command command, const std::string& config_path, const RunFlags& flags, std::ostream& log,
        std::ostream& err);

/// Prints diagnostics; exit 1 when any diagnostic is an error.
int validate(const std::string& config_path, std::ostream& out, std::ostream& err);

}  // namespace mopkit::cli
