#include "artifacts.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iterator>
#include <mopkit/error.hpp>

namespace mopkit::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return sha256_hex(std::string(std::istreambuf_iterator<char>(in), {}));
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw Error("I/O error: cannot write " + path.string());
}

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << "\r\n"; }

void CsvWriter::header(const std::vector<std::string>& names) {
  for (const auto& n : names) field(n);
  end_row();
}

CsvWriter& CsvWriter::field(const std::string& text) {
  if (!first_) out_ << ',';
  first_ = false;
  if (text.find_first_of(",\"\r\n") == std::string::npos) {
    out_ << text;
  } else {
    out_ << '"';
    for (char ch : text) {
      if (ch == '"') out_ << '"';
      out_ << ch;
    }
    out_ << '"';
  }
  return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(format_number(v)); }

CsvWriter& CsvWriter::field(long long v) { return field(std::to_string(v)); }

void CsvWriter::end_row() {
  out_ << "\r\n";
  first_ = true;
}

RunManifest::RunManifest(std::string command, std::string config_path, const std::string& config_text,
                         std::uint64_t seed)
    : command_(std::move(command)),
      config_path_(std::move(config_path)),
      hash_(sha256_hex(config_text)),
      seed_(seed),
      started_(utc_timestamp()) {}

void RunManifest::step(std::string name, std::string status, std::string message) {
  steps_.push_back({std::move(name), std::move(status), std::move(message)});
}

void RunManifest::output(const std::filesystem::path& file) { outputs_.push_back(file); }

std::filesystem::path RunManifest::write(const std::filesystem::path& dir, int exit_code) {
  nlohmann::json j;
  j["command"] = command_;
  j["config"] = config_path_;
  j["config_sha256"] = hash_;
  j["toolkit_version"] = MOPKIT_VERSION;
  j["seed"] = seed_;
  j["started"] = started_;
  j["finished"] = utc_timestamp();
  j["exit_code"] = exit_code;
  j["steps"] = nlohmann::json::array();
  for (const auto& s : steps_) j["steps"].push_back({{"name", s.name}, {"status", s.status}, {"message", s.message}});
  j["outputs"] = nlohmann::json::array();
  for (const auto& f : outputs_) {
    const bool present = std::filesystem::exists(f);
    j["outputs"].push_back({{"file", f.filename().string()},
                            {"bytes", present ? std::filesystem::file_size(f) : 0},
                            {"sha256", present ? sha256_file(f) : ""}});
  }
  const auto path = dir / "manifest.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("I/O error: cannot write " + path.string());
  out << j.dump(2) << '\n';
  return path;
}

}  // namespace mopkit::cli
