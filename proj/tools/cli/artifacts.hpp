#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace mopkit::cli {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Shortest round-trip decimal form ("%.17g"), '.' as decimal separator.
std::string format_number(double v);

/// RFC 4180 style writer. Comment lines start with '#'.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  void comment(const std::string& text);
  void header(const std::vector<std::string>& names);
  CsvWriter& field(const std::string& text);
  CsvWriter& field(double v);
  CsvWriter& field(long long v);
  CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
  void end_row();

 private:
  std::ofstream out_;
  bool first_ = true;
};

struct StepRecord {
  std::string name;
  std::string status;
  std::string message;
};

/// Collects the manifest of one run and writes it as manifest.json.
class RunManifest {
 public:
  RunManifest(std::string command, std::string config_path, const std::string& config_text, std::uint64_t seed);

  void step(std::string name, std::string status, std::string message = {});
  void output(const std::filesystem::path& file);
  /// Writes manifest.json into dir; returns its path.
  std::filesystem::path write(const std::filesystem::path& dir, int exit_code);

  const std::string& config_hash() const noexcept { return hash_; }

 private:
  std::string command_;
  std::string config_path_;
  std::string hash_;
  std::uint64_t seed_;
  std::string started_;
  std::vector<StepRecord> steps_;
  std::vector<std::filesystem::path> outputs_;
};

std::string utc_timestamp();

}  // namespace mopkit::cli
