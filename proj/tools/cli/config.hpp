#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include <mopkit/mopkit.hpp>

namespace mopkit::cli {

// Thrown for unreadable or schema-invalid configs (exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct Schedule {
  std::vector<double> ratios;
  std::vector<int> degrees;
};

struct ExperimentConfig {
  nlohmann::json raw;
  std::string kind;
  std::vector<WeightSpec> weights;
  std::vector<WeightSpec> generators;
  std::optional<MultiIndex> nvec;
  std::optional<Schedule> schedule;
  std::uint64_t seed = 20240101;
  std::string output = "mopkit_out";

  SamplerConfig sampler;
  int grid = 0;  // 0: command default
  std::vector<std::complex<double>> z;
  double z_tolerance = 3.0;
  double residual_tolerance = 1e-9;

  std::vector<double> equilibrium_ratios;
  int equilibrium_grid = 2000;
  int equilibrium_iterations = 20000;

  WeightSystem build_system() const;
  /// The fixed multi-index; throws ConfigError when the config has none.
  const MultiIndex& multi_index() const;
  /// Equilibrium supports for the system kind.
  std::vector<Interval> equilibrium_intervals(const WeightSystem& ws) const;
};

nlohmann::json read_json(const std::string& path);

/// Throws ConfigError on schema violations.
ExperimentConfig parse_config(const nlohmann::json& j);

struct Diagnostic {
  enum class Level { error, warning } level;
  std::string message;
};

/// Schema violations and semantic inconsistencies, without building anything heavy.
std::vector<Diagnostic> validate_config(const nlohmann::json& j);

}  // namespace mopkit::cli
