#include <filesystem>
#include <fstream>
#include <sstream>

#include "artifacts.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace mopkit::cli;
using nlohmann::json;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    static int counter = 0;
    dir = fs::temp_directory_path() / ("mopkit_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string config(const json& j, const std::string& name = "config.json") const {
    std::ofstream(dir / name) << j.dump();
    return (dir / name).string();
  }
};

json legendre(int n) {
  return {{"kind", "general"},
          {"weights", {{{"family", "constant"}, {"interval", {-1, 1}}}}},
          {"multi_index", {n}},
          {"seed", 7},
          {"sampler", {{"samples", 2000}, {"burn_in", 500}}}};
}

json angelesco11() {
  return {{"kind", "angelesco"},
          {"weights", {{{"family", "constant"}, {"interval", {-1, 0}}}, {{"family", "constant"}, {"interval", {0, 1}}}}},
          {"multi_index", {1, 1}},
          {"seed", 11},
          {"sampler", {{"samples", 20000}, {"burn_in", 2000}}}};
}

json nikishin(std::vector<int> nv) {
  return {{"kind", "nikishin"},
          {"weights", {{{"family", "constant"}, {"interval", {1, 2}}}}},
          {"generators", {{{"family", "constant"}, {"interval", {-1, 0}}}}},
          {"multi_index", nv}};
}

int run_quiet(Command c, const std::string& cfg, const fs::path& out, RunFlags flags = {}) {
  flags.out = out.string();
  flags.quiet = true;
  std::ostringstream log, err;
  return run(c, cfg, flags, log, err);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string csv_body(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::string line, body;
  while (std::getline(in, line))
    if (line.empty() || line[0] != '#') body += line + "\n";
  return body;
}

}  // namespace

TEST_CASE("mop emits the monic Legendre coefficients") {
  Scratch s;
  REQUIRE(run_quiet(Command::mop, s.config(legendre(2)), s.dir / "out") == kExitOk);
  const json j = json::parse(slurp(s.dir / "out" / "mop.json"));
  const auto c = j["coefficients"].get<std::vector<double>>();
  REQUIRE(c.size() == 3);
  CHECK(c[0] == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  CHECK(c[1] == doctest::Approx(0.0));
  CHECK(c[2] == 1.0);
  CHECK(j["max_residual"].get<double>() <= 1e-12);
  CHECK(fs::file_size(s.dir / "out" / "residuals.csv") > 0);
}

TEST_CASE("typeI emits coefficients and small residuals") {
  Scratch s;
  REQUIRE(run_quiet(Command::typeI, s.config(nikishin({2, 1})), s.dir / "out") == kExitOk);
  const json j = json::parse(slurp(s.dir / "out" / "typeI.json"));
  CHECK(j["polynomials"].size() == 2);
  CHECK(j["max_residual"].get<double>() <= 1e-9);
}

TEST_CASE("verify passes and a zero tolerance forces exit 3") {
  Scratch s;
  CHECK(run_quiet(Command::verify, s.config(angelesco11()), s.dir / "ok") == kExitOk);
  auto broken = angelesco11();
  broken["verify"] = {{"z_tolerance", 0.0}};
  CHECK(run_quiet(Command::verify, s.config(broken, "broken.json"), s.dir / "broken") == kExitVerification);
  const json report = json::parse(slurp(s.dir / "broken" / "report.json"));
  CHECK_FALSE(report["passed"].get<bool>());
}

TEST_CASE("equilibrium density at the center of [-1, 1]") {
  Scratch s;
  json cfg = legendre(1);
  cfg["equilibrium"] = {{"grid", 2000}};
  REQUIRE(run_quiet(Command::equilibrium, s.config(cfg), s.dir / "out") == kExitOk);
  std::istringstream in(slurp(s.dir / "out" / "equilibrium.csv"));
  std::string line;
  int hits = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("component", 0) == 0) continue;
    std::vector<double> v;
    std::stringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) v.push_back(std::stod(f));
    if (std::abs(v[1]) < 1e-3) {
      CHECK(v[3] == doctest::Approx(0.3183).epsilon(0.01 / 0.3183));
      ++hits;
    }
  }
  CHECK(hits == 2);
}

TEST_CASE("kernel, density and sample write CSV grids") {
  Scratch s;
  const auto cfg = s.config(angelesco11());
  RunFlags f;
  f.grid = 11;
  REQUIRE(run_quiet(Command::kernel, cfg, s.dir / "k", f) == kExitOk);
  REQUIRE(run_quiet(Command::density, cfg, s.dir / "d", f) == kExitOk);
  f.samples = 1000;
  REQUIRE(run_quiet(Command::sample, cfg, s.dir / "s", f) == kExitOk);
  std::istringstream k(csv_body(s.dir / "k" / "kernel.csv"));
  int rows = 0;
  for (std::string line; std::getline(k, line);) ++rows;
  CHECK(rows == 1 + 11 * 11);
  std::istringstream smp(csv_body(s.dir / "s" / "samples.csv"));
  std::string header;
  std::getline(smp, header);
  CHECK(header == "sample,chain,x1,x2\r");
}

TEST_CASE("identical config and seed reproduce CSV bodies") {
  Scratch s;
  const auto cfg = s.config(angelesco11());
  RunFlags f;
  f.samples = 2000;
  f.seed = 99;
  REQUIRE(run_quiet(Command::sample, cfg, s.dir / "a", f) == kExitOk);
  REQUIRE(run_quiet(Command::sample, cfg, s.dir / "b", f) == kExitOk);
  CHECK(csv_body(s.dir / "a" / "samples.csv") == csv_body(s.dir / "b" / "samples.csv"));
  f.seed = 100;
  REQUIRE(run_quiet(Command::sample, cfg, s.dir / "c", f) == kExitOk);
  CHECK(csv_body(s.dir / "a" / "samples.csv") != csv_body(s.dir / "c" / "samples.csv"));
}

TEST_CASE("manifest lists every output and they are non-empty") {
  Scratch s;
  REQUIRE(run_quiet(Command::mop, s.config(angelesco11()), s.dir / "out") == kExitOk);
  const json m = json::parse(slurp(s.dir / "out" / "manifest.json"));
  CHECK(m["exit_code"] == 0);
  CHECK(m["config_sha256"].get<std::string>().size() == 64);
  CHECK(m["outputs"].size() == 2);
  for (const auto& o : m["outputs"]) {
    const fs::path p = s.dir / "out" / o["file"].get<std::string>();
    REQUIRE(fs::exists(p));
    CHECK(fs::file_size(p) > 0);
    CHECK(o["sha256"] == sha256_file(p));
  }
}

TEST_CASE("exit codes for validation and numeric failures") {
  Scratch s;
  CHECK(run_quiet(Command::mop, (s.dir / "missing.json").string(), s.dir / "x") == kExitValidation);
  json bad = legendre(2);
  bad["weights"][0]["family"] = "gaussian";
  CHECK(run_quiet(Command::mop, s.config(bad, "bad.json"), s.dir / "x") == kExitValidation);
  json same = {{"kind", "general"},
               {"weights", {{{"family", "constant"}, {"interval", {-1, 1}}}, {{"family", "constant"}, {"interval", {-1, 1}}}}},
               {"multi_index", {1, 1}}};
  CHECK(run_quiet(Command::mop, s.config(same, "same.json"), s.dir / "x") == kExitNumeric);
  CHECK(run_quiet(Command::compare, s.config(legendre(2), "nosched.json"), s.dir / "x") == kExitValidation);
}

TEST_CASE("validate diagnostics") {
  Scratch s;
  std::ostringstream out, err;
  CHECK(validate(s.config(angelesco11()), out, err) == kExitOk);
  CHECK(out.str().empty());

  auto overlap = angelesco11();
  overlap["weights"][1]["interval"] = {-0.5, 1};
  std::ostringstream o2;
  CHECK(validate(s.config(overlap, "overlap.json"), o2, err) == kExitValidation);
  const auto diags = validate_config(overlap);
  REQUIRE(diags.size() == 1);
  CAPTURE(diags[0].message);
  CHECK(diags[0].message.find("[-1, 0]") != std::string::npos);
  CHECK(diags[0].message.find("[-0.5, 1]") != std::string::npos);

  const auto nik = validate_config(nikishin({1, 3}));
  REQUIRE(nik.size() == 1);
  CHECK(nik[0].level == Diagnostic::Level::warning);
  CHECK(nik[0].message.find("n_j >= n_{j+1} - 1") != std::string::npos);
  CHECK(validate_config(nikishin({2, 3})).empty());

  std::ostringstream o3, e3;
  CHECK(validate((s.dir / "nope.json").string(), o3, e3) == kExitValidation);
  CHECK(e3.str().find("I/O error") != std::string::npos);
}

TEST_CASE("csv quoting and number format") {
  Scratch s;
  {
    CsvWriter w(s.dir / "q.csv");
    w.comment("note");
    w.field("a,b").field("say \"hi\"").field(0.1).end_row();
  }
  CHECK(slurp(s.dir / "q.csv") == "# note\r\n\"a,b\",\"say \"\"hi\"\"\",0.10000000000000001\r\n");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
