#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "artifacts.hpp"
#include "config.hpp"

namespace mopkit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class VerificationFailure : public Error {
 public:
  using Error::Error;
};

struct Context {
  const ExperimentConfig& cfg;
  const WeightSystem& ws;
  const RunFlags& flags;
  fs::path dir;
  RunManifest& manifest;
  std::ostream& log;

  std::uint64_t seed() const { return flags.seed.value_or(cfg.seed); }
  int grid(int fallback) const { return flags.grid ? *flags.grid : (cfg.grid > 0 ? cfg.grid : fallback); }
  void info(const std::string& s) const {
    if (!flags.quiet) log << s << '\n';
  }
  fs::path file(const std::string& name) const {
    manifest.output(dir / name);
    return dir / name;
  }
  void write_json(const std::string& name, const json& j) const {
    std::ofstream out(file(name), std::ios::trunc);
    if (!out) throw Error("I/O error: cannot write " + (dir / name).string());
    out << j.dump(2) << '\n';
  }
  void stamp(CsvWriter& w) const {
    w.comment("mopkit " MOPKIT_VERSION);
    w.comment("config_sha256 " + manifest.config_hash());
    w.comment("system " + mopkit::to_string(ws.kind()) + " p=" + std::to_string(ws.p()));
  }
};

json frame_json(const AffineFrame& f) { return {{"center", f.center}, {"scale", f.scale}}; }

std::string index_string(const MultiIndex& nv) {
  std::string s;
  for (std::size_t j = 0; j < nv.p(); ++j) s += (j ? ";" : "") + std::to_string(nv[j]);
  return s;
}

TypeIIResult solve_type2(const WeightSystem& ws, const MultiIndex& nv) {
  MomentOptions opt;
  opt.basis = MomentBasis::legendre;
  return type2_mop(moment_table(ws, required_moment_order(nv), opt), nv);
}

std::vector<double> hull_grid(const WeightSystem& ws, int m) {
  if (m < 1) throw ArgumentError("grid must be positive");
  const Interval h = ws.hull();
  std::vector<double> x(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) x[static_cast<std::size_t>(i)] = h.a() + (i + 0.5) * h.length() / m;
  return x;
}

std::vector<std::complex<double>> verify_points(const ExperimentConfig& cfg, const WeightSystem& ws) {
  if (!cfg.z.empty()) return cfg.z;
  const Interval h = ws.hull();
  const double c = h.midpoint(), r = 0.5 * h.length();
  using C = std::complex<double>;
  return {C(c + 1.5 * r, 0.0), C(c - 1.25 * r, 0.0), C(c, 2.0 * r), C(c + 0.5 * r, r), C(c - 0.3 * r, 0.7 * r)};
}

std::vector<double> equilibrium_ratios(const ExperimentConfig& cfg, const WeightSystem& ws) {
  if (!cfg.equilibrium_ratios.empty()) return cfg.equilibrium_ratios;
  if (cfg.schedule) return cfg.schedule->ratios;
  std::vector<double> r(ws.p(), 1.0 / static_cast<double>(ws.p()));
  if (cfg.nvec)
    for (std::size_t j = 0; j < ws.p(); ++j) r[j] = static_cast<double>((*cfg.nvec)[j]) / cfg.nvec->total();
  return r;
}

EquilibriumResult solve_equilibrium(const Context& ctx, int grid) {
  const auto intervals = ctx.cfg.equilibrium_intervals(ctx.ws);
  const auto ratios = equilibrium_ratios(ctx.cfg, ctx.ws);
  EquilibriumProblem prob = ctx.ws.kind() == SystemKind::nikishin
                                ? EquilibriumProblem::nikishin(intervals, ratios, grid)
                                : EquilibriumProblem::angelesco(intervals, ratios, grid);
  prob.max_iterations = ctx.cfg.equilibrium_iterations;
  auto res = minimize_equilibrium(prob);
  if (!res.converged)
    throw NumericError("equilibrium descent did not converge in " + std::to_string(res.iterations) + " iterations",
                       res.kkt_residual);
  return res;
}

void cmd_mop(const Context& ctx) {
  const MultiIndex& nv = ctx.cfg.multi_index();
  const auto r = solve_type2(ctx.ws, nv);
  const auto roots = poly_roots(r.polynomial);
  const auto res = orthogonality_residuals(r.polynomial, ctx.ws, nv);
  ctx.manifest.step("type2_mop", "ok");
  double worst = 0.0;
  CsvWriter csv(ctx.file("residuals.csv"));
  ctx.stamp(csv);
  csv.comment("int P(x) t(x)^k w_j(x) dx, t in the canonical frame");
  csv.header({"weight", "k", "residual"});
  for (std::size_t j = 0; j < res.size(); ++j)
    for (std::size_t k = 0; k < res[j].size(); ++k) {
      worst = std::max(worst, std::abs(res[j][k]));
      csv.field(static_cast<int>(j + 1)).field(static_cast<int>(k)).field(res[j][k]).end_row();
    }
  json j;
  j["multi_index"] = nv.parts();
  j["degree"] = r.polynomial.degree();
  j["coefficients"] = r.polynomial.coefficients();
  j["frame"] = frame_json(r.polynomial.frame());
  j["local_coefficients"] = r.polynomial.local_coefficients();
  j["roots"] = roots;
  j["normality"] = {{"determinant", r.normality.determinant},
                    {"log_abs_determinant", r.normality.log_abs_determinant},
                    {"sign", r.normality.sign},
                    {"condition_estimate", r.normality.condition_estimate},
                    {"hadamard_ratio", r.normality.hadamard_ratio}};
  j["ill_conditioned"] = r.ill_conditioned;
  j["max_residual"] = worst;
  ctx.write_json("mop.json", j);
  ctx.info("type II P_n for n = (" + index_string(nv) + "), max residual " + format_number(worst));
}

void cmd_type1(const Context& ctx) {
  const MultiIndex& nv = ctx.cfg.multi_index();
  const auto q = QuadTypeI::solve(ctx.ws, nv);
  const auto sys = q.rounded();
  const auto res = type1_residuals(q, ctx.ws);
  ctx.manifest.step("type1_mop", "ok");
  double worst = 0.0;
  CsvWriter csv(ctx.file("residuals.csv"));
  ctx.stamp(csv);
  csv.comment("int x^k Q(x) dx - delta_{k,n-1}");
  csv.header({"k", "residual"});
  for (std::size_t k = 0; k < res.size(); ++k) {
    worst = std::max(worst, std::abs(res[k]));
    csv.field(static_cast<int>(k)).field(res[k]).end_row();
  }
  json polys = json::array();
  for (std::size_t w = 0; w < nv.p(); ++w) {
    std::vector<double> leg;
    for (const quad& c : q.legendre_coefficients(w)) leg.push_back(static_cast<double>(c));
    polys.push_back({{"weight", w + 1},
                     {"degree", nv[w] - 1},
                     {"coefficients", sys.A[w].coefficients()},
                     {"local_coefficients", sys.A[w].local_coefficients()},
                     {"legendre_coefficients", leg}});
  }
  json j;
  j["multi_index"] = nv.parts();
  j["frame"] = frame_json(q.frame());
  j["polynomials"] = polys;
  j["condition_estimate"] = q.condition_estimate();
  j["gram_error"] = q.gram_error();
  j["max_residual"] = worst;
  ctx.write_json("typeI.json", j);
  ctx.info("type I A_j for n = (" + index_string(nv) + "), max residual " + format_number(worst));
}

void cmd_kernel(const Context& ctx) {
  const Kernel k = biorthogonalize(ctx.ws, ctx.cfg.multi_index());
  ctx.manifest.step("biorthogonalize", "ok", "error " + format_number(k.biorthogonality_error()));
  const auto x = hull_grid(ctx.ws, ctx.grid(41));
  CsvWriter csv(ctx.file("kernel.csv"));
  ctx.stamp(csv);
  csv.comment("K_n(x, y) = sum_j phi_j(x) psi_j(y)");
  csv.header({"x", "y", "K"});
  for (double xi : x)
    for (double yi : x) csv.field(xi).field(yi).field(k(xi, yi)).end_row();
  ctx.info("kernel on a " + std::to_string(x.size()) + " x " + std::to_string(x.size()) + " grid");
}

void cmd_density(const Context& ctx) {
  const Kernel k = biorthogonalize(ctx.ws, ctx.cfg.multi_index());
  ctx.manifest.step("biorthogonalize", "ok", "error " + format_number(k.biorthogonality_error()));
  const auto x = hull_grid(ctx.ws, ctx.grid(401));
  CsvWriter csv(ctx.file("density.csv"));
  ctx.stamp(csv);
  csv.comment("K_n(x, x) / n");
  csv.header({"x", "density"});
  for (double xi : x) csv.field(xi).field(mean_density(k, xi)).end_row();
  ctx.info("mean density at " + std::to_string(x.size()) + " points");
}

SamplerConfig sampler_config(const Context& ctx) {
  SamplerConfig s = ctx.cfg.sampler;
  s.seed = ctx.seed();
  if (ctx.flags.samples) s.samples = *ctx.flags.samples;
  return s;
}

void cmd_sample(const Context& ctx) {
  const MultiIndex& nv = ctx.cfg.multi_index();
  const auto batch = sample_mcmc(ctx.ws, nv, sampler_config(ctx));
  ctx.manifest.step("sample_mcmc", "ok",
                    "acceptance " + format_number(batch.acceptance_rate) + ", ess " +
                        format_number(batch.effective_sample_size));
  CsvWriter csv(ctx.file("samples.csv"));
  ctx.stamp(csv);
  csv.comment("seed " + std::to_string(batch.seed));
  csv.comment("acceptance_rate " + format_number(batch.acceptance_rate));
  csv.comment("effective_sample_size " + format_number(batch.effective_sample_size));
  std::vector<std::string> cols{"sample", "chain"};
  for (int i = 1; i <= batch.n; ++i) cols.push_back("x" + std::to_string(i));
  for (int i = 1; i <= batch.extra; ++i) cols.push_back("y" + std::to_string(i));
  csv.header(cols);
  std::size_t row = 0;
  for (std::size_t c = 0; c < batch.chain_lengths.size(); ++c)
    for (int i = 0; i < batch.chain_lengths[c]; ++i, ++row) {
      csv.field(static_cast<long long>(row)).field(static_cast<int>(c));
      for (double v : batch.x(row)) csv.field(v);
      for (double v : batch.y(row)) csv.field(v);
      csv.end_row();
    }
  ctx.info(std::to_string(batch.size()) + " configurations, acceptance " + format_number(batch.acceptance_rate));
}

void cmd_verify(const Context& ctx) {
  const MultiIndex& nv = ctx.cfg.multi_index();
  struct Check {
    std::string name, point;
    double statistic, tolerance;
    bool pass;
  };
  std::vector<Check> checks;
  auto fmt_z = [](std::complex<double> z) { return format_number(z.real()) + (z.imag() < 0 ? "" : "+") + format_number(z.imag()) + "i"; };

  const auto p2 = solve_type2(ctx.ws, nv);
  double worst = 0.0;
  for (const auto& row : orthogonality_residuals(p2.polynomial, ctx.ws, nv))
    for (double v : row) worst = std::max(worst, std::abs(v));
  checks.push_back({"type2_residual", "", worst, ctx.cfg.residual_tolerance, worst <= ctx.cfg.residual_tolerance});

  const auto q = QuadTypeI::solve(ctx.ws, nv);
  worst = 0.0;
  for (double v : type1_residuals(q, ctx.ws)) worst = std::max(worst, std::abs(v));
  checks.push_back({"type1_residual", "", worst, ctx.cfg.residual_tolerance, worst <= ctx.cfg.residual_tolerance});

  const auto sign = sign_constancy_check(ctx.ws, nv, 10000, ctx.seed());
  checks.push_back({"sign_condition", "", static_cast<double>(sign.violations), 0.0,
                    sign.violations == 0 && sign.nonzero > 0});
  ctx.manifest.step("oracles", "ok");

  const auto batch = sample_mcmc(ctx.ws, nv, sampler_config(ctx));
  ctx.manifest.step("sample_mcmc", "ok");
  const auto zs = verify_points(ctx.cfg, ctx.ws);
  for (const auto z : zs) {
    const auto est = mc_char_poly(batch, z);
    const double s = est.z_score(p2.polynomial(z));
    checks.push_back({"char_poly", fmt_z(z), s, ctx.cfg.z_tolerance, s <= ctx.cfg.z_tolerance});
  }
  if (nv.total() <= 4) {
    const auto sys = q.rounded();
    const Interval h = ctx.ws.hull();
    for (const auto z : zs) {
      if (z.imag() == 0.0 && h.contains(z.real())) continue;
      const auto est = mc_inverse_char_poly(batch, z);
      const double s = est.z_score(linear_form_cauchy_transform(sys, ctx.ws, z));
      checks.push_back({"inverse_char_poly", fmt_z(z), s, ctx.cfg.z_tolerance, s <= ctx.cfg.z_tolerance});
    }
  }

  bool all = true;
  CsvWriter csv(ctx.file("verify.csv"));
  ctx.stamp(csv);
  csv.comment("z statistics are |estimate - exact| / standard error");
  csv.header({"check", "z", "statistic", "tolerance", "result"});
  json report = json::array();
  for (const auto& c : checks) {
    all &= c.pass;
    csv.field(c.name).field(c.point).field(c.statistic).field(c.tolerance).field(c.pass ? "PASS" : "FAIL").end_row();
    report.push_back({{"check", c.name}, {"z", c.point}, {"statistic", c.statistic}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    ctx.info((c.pass ? "PASS " : "FAIL ") + c.name + (c.point.empty() ? "" : " at " + c.point) + ": " +
             format_number(c.statistic));
  }
  ctx.write_json("report.json", {{"multi_index", nv.parts()}, {"passed", all}, {"checks", report}});
  if (!all) throw VerificationFailure("verification failed");
}

void cmd_equilibrium(const Context& ctx) {
  const auto res = solve_equilibrium(ctx, ctx.grid(ctx.cfg.equilibrium_grid));
  ctx.manifest.step("minimize_equilibrium", "ok", std::to_string(res.iterations) + " iterations");
  CsvWriter csv(ctx.file("equilibrium.csv"));
  ctx.stamp(csv);
  csv.comment("energy " + format_number(res.energy));
  csv.header({"component", "x", "mass", "density", "cdf", "potential"});
  for (std::size_t j = 0; j < res.measures.size(); ++j) {
    const auto& mu = res.measures[j];
    const auto dens = mu.density();
    const auto cum = mu.cumulative();
    for (std::size_t i = 0; i < mu.grid.size(); ++i)
      csv.field(static_cast<int>(j + 1))
          .field(mu.grid[i])
          .field(mu.masses[i])
          .field(dens[i])
          .field(cum[i])
          .field(res.potentials[j][i])
          .end_row();
  }
  json masses = json::array();
  for (const auto& mu : res.measures) masses.push_back(mu.total_mass());
  ctx.write_json("report.json", {{"energy", res.energy},
                                 {"iterations", res.iterations},
                                 {"converged", res.converged},
                                 {"kkt_residual", res.kkt_residual},
                                 {"min_off_support_gap", res.min_off_support_gap},
                                 {"masses", masses}});
  ctx.info("equilibrium energy " + format_number(res.energy) + " after " + std::to_string(res.iterations) +
           " iterations");
}

void cmd_compare(const Context& ctx) {
  if (!ctx.cfg.schedule) throw ConfigError("schedule: the compare command needs {\"ratios\", \"n\"}");
  const auto& sched = *ctx.cfg.schedule;
  const auto eq = solve_equilibrium(ctx, ctx.grid(ctx.cfg.equilibrium_grid));
  ctx.manifest.step("minimize_equilibrium", "ok");
  const auto intervals = ctx.cfg.equilibrium_intervals(ctx.ws);
  // Zeros of P_n sit on Gamma_1 for Nikishin systems; only that component is compared.
  const std::size_t components = ctx.ws.kind() == SystemKind::nikishin ? 1 : intervals.size();
  const std::vector<Interval> zero_support(intervals.begin(), intervals.begin() + static_cast<long>(components));

  CsvWriter csv(ctx.file("compare.csv"));
  ctx.stamp(csv);
  csv.comment("Kolmogorov distance between normalized zero-counting and equilibrium components");
  csv.header({"n", "multi_index", "component", "zeros", "distance"});
  for (int n : sched.degrees) {
    const MultiIndex nv = MultiIndex::along_ray(sched.ratios, n);
    const auto roots = QuadTypeII::solve(ctx.ws, nv).real_roots();
    std::vector<DiscreteMeasure> nu;
    try {
      nu = zero_counting_measure(roots, n, zero_support);
    } catch (const DomainError& e) {
      throw NumericError(std::string("zeros of P_n outside the supports: ") + e.what());
    }
    for (std::size_t j = 0; j < components; ++j) {
      const double d = nu[j].total_mass() > 0.0
                           ? kolmogorov_distance(nu[j].normalized(), eq.measures[j].normalized())
                           : 1.0;
      csv.field(n).field(index_string(nv)).field(static_cast<int>(j + 1)).field(static_cast<int>(nu[j].grid.size())).field(d).end_row();
      ctx.info("n = " + std::to_string(n) + " component " + std::to_string(j + 1) + ": " + format_number(d));
    }
  }
  ctx.manifest.step("zero_counting", "ok");
}

void dispatch(Command c, const Context& ctx) {
  switch (c) {
    case Command::mop: return cmd_mop(ctx);
    case Command::typeI: return cmd_type1(ctx);
    case Command::kernel: return cmd_kernel(ctx);
    case Command::density: return cmd_density(ctx);
    case Command::sample: return cmd_sample(ctx);
    case Command::verify: return cmd_verify(ctx);
    case Command::equilibrium: return cmd_equilibrium(ctx);
    case Command::compare: return cmd_compare(ctx);
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("I/O error: cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

std::optional<Command> parse_command(const std::string& name) {
  for (Command c : {Command::mop, Command::typeI, Command::kernel, Command::density, Command::sample,
                    Command::verify, Command::equilibrium, Command::compare})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

std::string to_string(Command c) {
  switch (c) {
    case Command::mop: return "mop";
    case Command::typeI: return "typeI";
    case Command::kernel: return "kernel";
    case Command::density: return "density";
    case Command::sample: return "sample";
    case Command::verify: return "verify";
    case Command::equilibrium: return "equilibrium";
    case Command::compare: return "compare";
  }
  return "?";
}

int run(Command command, const std::string& config_path, const RunFlags& flags, std::ostream& log,
        std::ostream& err) {
  std::optional<RunManifest> manifest;
  fs::path dir;
  int code = kExitOk;
  try {
    const std::string text = read_text(config_path);
    json raw;
    try {
      raw = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(config_path + ": " + e.what());
    }
    const ExperimentConfig cfg = parse_config(raw);
    dir = flags.out.value_or(cfg.output);
    fs::create_directories(dir);
    manifest.emplace(to_string(command), config_path, text, flags.seed.value_or(cfg.seed));
    const WeightSystem ws = cfg.build_system();
    manifest->step("build_system", "ok", mopkit::to_string(ws.kind()));
    dispatch(command, Context{cfg, ws, flags, dir, *manifest, log});
  } catch (const VerificationFailure& e) {
    err << "verification: " << e.what() << '\n';
    code = kExitVerification;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    code = kExitValidation;
  } catch (const ArgumentError& e) {
    err << "ArgumentError: " << e.what() << '\n';
    code = kExitValidation;
  } catch (const ConstructionError& e) {
    err << "ConstructionError: " << e.what() << '\n';
    code = kExitValidation;
  } catch (const DomainError& e) {
    err << "DomainError: " << e.what() << '\n';
    code = kExitValidation;
  } catch (const NonNormalIndexError& e) {
    err << "NonNormalIndexError: " << e.what() << '\n';
    code = kExitNumeric;
  } catch (const NumericError& e) {
    err << "NumericError: " << e.what() << " (achieved " << e.achieved_error() << ")\n";
    code = kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    code = kExitNumeric;
  }
  if (manifest) {
    if (code != kExitOk) manifest->step(to_string(command), "failed");
    try {
      manifest->write(dir, code);
    } catch (const std::exception& e) {
      err << e.what() << '\n';
      if (code == kExitOk) code = kExitNumeric;
    }
  }
  return code;
}

int validate(const std::string& config_path, std::ostream& out, std::ostream& err) {
  json raw;
  try {
    raw = read_json(config_path);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitValidation;
  }
  const auto diags = validate_config(raw);
  bool errors = false;
  for (const auto& d : diags) {
    const bool is_error = d.level == Diagnostic::Level::error;
    errors |= is_error;
    out << (is_error ? "error: " : "warning: ") << d.message << '\n';
  }
  return errors ? kExitValidation : kExitOk;
}

}  // namespace mopkit::cli
