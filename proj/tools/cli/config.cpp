#include "config.hpp"

#include <fstream>
#include <sstream>

namespace mopkit::cli {

using nlohmann::json;

namespace {

std::string where(const std::string& ctx, const std::string& key) { return ctx.empty() ? key : ctx + "." + key; }

double number(const json& j, const std::string& ctx) {
  if (!j.is_number()) throw ConfigError(ctx + ": expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& ctx) {
  if (!j.is_number_integer()) throw ConfigError(ctx + ": expected an integer");
  return j.get<int>();
}

std::vector<double> numbers(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw ConfigError(ctx + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], ctx + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> integers(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw ConfigError(ctx + ": expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(integer(j[i], ctx + "[" + std::to_string(i) + "]"));
  return out;
}

Interval interval(const json& j, const std::string& ctx) {
  const auto v = numbers(j, ctx);
  if (v.size() != 2) throw ConfigError(ctx + ": expected [a, b]");
  if (!(v[0] < v[1])) throw ConfigError(ctx + ": requires a < b");
  return {v[0], v[1]};
}

WeightSpec weight_spec(const json& j, const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
  if (!j.contains("family")) throw ConfigError(ctx + ": missing \"family\"");
  if (!j.contains("interval")) throw ConfigError(ctx + ": missing \"interval\"");
  const std::string family = j["family"].is_string() ? j["family"].get<std::string>() : "";
  const Interval iv = interval(j["interval"], where(ctx, "interval"));
  const json params = j.value("params", json::object());
  if (!params.is_object()) throw ConfigError(where(ctx, "params") + ": expected an object");
  auto build = [&]() -> WeightSpec {
    if (family == "constant") return WeightSpec::constant(iv);
    if (family == "jacobi")
      return WeightSpec::jacobi(iv, params.contains("alpha") ? number(params["alpha"], where(ctx, "params.alpha")) : 0.0,
                                params.contains("beta") ? number(params["beta"], where(ctx, "params.beta")) : 0.0);
    if (family == "exp_poly") {
      if (!params.contains("coeffs")) throw ConfigError(where(ctx, "params") + ": exp_poly needs \"coeffs\"");
      return WeightSpec::exp_poly(iv, numbers(params["coeffs"], where(ctx, "params.coeffs")));
    }
    throw ConfigError(where(ctx, "family") + ": unknown family \"" + family + "\" (constant, jacobi, exp_poly)");
  };
  WeightSpec s = build();
  if (params.contains("factor")) s.factor = number(params["factor"], where(ctx, "params.factor"));
  try {
    s.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(ctx + ": " + e.what());
  }
  return s;
}

std::vector<WeightSpec> weight_list(const json& j, const std::string& key) {
  std::vector<WeightSpec> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) throw ConfigError(key + ": expected an array");
  for (std::size_t i = 0; i < j[key].size(); ++i)
    out.push_back(weight_spec(j[key][i], key + "[" + std::to_string(i) + "]"));
  return out;
}

std::complex<double> complex_point(const json& j, const std::string& ctx) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  const auto v = numbers(j, ctx);
  if (v.size() != 2) throw ConfigError(ctx + ": expected a number or [re, im]");
  return {v[0], v[1]};
}

std::string show(const Interval& iv) {
  std::ostringstream os;
  os << iv;
  return os.str();
}

}  // namespace

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("I/O error: cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  ExperimentConfig c;
  c.raw = j;
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError("kind: expected a string");
  c.kind = j["kind"].get<std::string>();
  if (c.kind != "general" && c.kind != "angelesco" && c.kind != "nikishin")
    throw ConfigError("kind: unknown kind \"" + c.kind + "\" (general, angelesco, nikishin)");
  c.weights = weight_list(j, "weights");
  c.generators = weight_list(j, "generators");
  if (c.weights.empty()) throw ConfigError("weights: at least one weight is required");
  if (c.kind == "nikishin") {
    if (c.weights.size() != 1) throw ConfigError("weights: a nikishin system takes exactly one base weight");
    if (c.generators.empty()) throw ConfigError("generators: a nikishin system needs at least one generator");
  } else if (!c.generators.empty()) {
    throw ConfigError("generators: only nikishin systems take generators");
  }

  if (j.contains("multi_index")) c.nvec = MultiIndex(integers(j["multi_index"], "multi_index"));
  if (j.contains("schedule")) {
    const json& s = j["schedule"];
    if (!s.is_object() || !s.contains("ratios") || !s.contains("n"))
      throw ConfigError("schedule: expected {\"ratios\": [...], \"n\": [...]}");
    c.schedule = Schedule{numbers(s["ratios"], "schedule.ratios"), integers(s["n"], "schedule.n")};
  }
  if (j.contains("seed")) {
    const json& seed = j["seed"];
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
      throw ConfigError("seed: expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ConfigError("output: expected a string");
    c.output = j["output"].get<std::string>();
  }
  if (j.contains("sampler")) {
    const json& s = j["sampler"];
    if (!s.is_object()) throw ConfigError("sampler: expected an object");
    if (s.contains("chains")) c.sampler.chains = integer(s["chains"], "sampler.chains");
    if (s.contains("burn_in")) c.sampler.burn_in = integer(s["burn_in"], "sampler.burn_in");
    if (s.contains("thinning")) c.sampler.thinning = integer(s["thinning"], "sampler.thinning");
    if (s.contains("samples")) c.sampler.samples = integer(s["samples"], "sampler.samples");
    if (s.contains("step_scale")) c.sampler.step_scale = number(s["step_scale"], "sampler.step_scale");
  }
  if (j.contains("grid")) c.grid = integer(j["grid"], "grid");
  if (j.contains("z")) {
    if (!j["z"].is_array()) throw ConfigError("z: expected an array");
    for (std::size_t i = 0; i < j["z"].size(); ++i) c.z.push_back(complex_point(j["z"][i], "z[" + std::to_string(i) + "]"));
  }
  if (j.contains("verify")) {
    const json& v = j["verify"];
    if (v.contains("z_tolerance")) c.z_tolerance = number(v["z_tolerance"], "verify.z_tolerance");
    if (v.contains("residual_tolerance")) c.residual_tolerance = number(v["residual_tolerance"], "verify.residual_tolerance");
  }
  if (j.contains("equilibrium")) {
    const json& e = j["equilibrium"];
    if (!e.is_object()) throw ConfigError("equilibrium: expected an object");
    if (e.contains("ratios")) c.equilibrium_ratios = numbers(e["ratios"], "equilibrium.ratios");
    if (e.contains("grid")) c.equilibrium_grid = integer(e["grid"], "equilibrium.grid");
    if (e.contains("max_iterations")) c.equilibrium_iterations = integer(e["max_iterations"], "equilibrium.max_iterations");
  }
  return c;
}

WeightSystem ExperimentConfig::build_system() const {
  if (kind == "angelesco") return build_angelesco(weights);
  if (kind == "nikishin") return build_nikishin(weights.front(), generators);
  return build_general(weights);
}

const MultiIndex& ExperimentConfig::multi_index() const {
  if (!nvec) throw ConfigError("multi_index: this command needs a fixed multi-index");
  return *nvec;
}

std::vector<Interval> ExperimentConfig::equilibrium_intervals(const WeightSystem& ws) const {
  if (ws.kind() == SystemKind::general) {
    if (ws.p() != 1) throw ConfigError("equilibrium: general systems are supported only for p = 1");
    return {ws.weight(0).support()};
  }
  return ws.intervals();
}

std::vector<Diagnostic> validate_config(const json& j) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string m) { out.push_back({Diagnostic::Level::error, std::move(m)}); };
  auto warning = [&](std::string m) { out.push_back({Diagnostic::Level::warning, std::move(m)}); };

  ExperimentConfig c;
  try {
    c = parse_config(j);
  } catch (const Error& e) {
    error(e.what());
    return out;
  }

  std::size_t p = c.weights.size();
  if (c.kind == "nikishin") p = 1 + c.generators.size();

  if (c.kind == "angelesco") {
    for (std::size_t a = 0; a < c.weights.size(); ++a)
      for (std::size_t b = a + 1; b < c.weights.size(); ++b)
        if (c.weights[a].interval.overlaps(c.weights[b].interval))
          error("angelesco intervals overlap: weights[" + std::to_string(a) + "] " + show(c.weights[a].interval) +
                " and weights[" + std::to_string(b) + "] " + show(c.weights[b].interval));
  }
  if (c.kind == "nikishin") {
    std::vector<Interval> gamma{c.weights.front().interval};
    for (const auto& g : c.generators) gamma.push_back(g.interval);
    for (std::size_t k = 0; k + 1 < gamma.size(); ++k)
      if (gamma[k].intersects(gamma[k + 1]))
        error("nikishin intervals must be disjoint: Gamma_" + std::to_string(k + 1) + " " + show(gamma[k]) +
              " and Gamma_" + std::to_string(k + 2) + " " + show(gamma[k + 1]));
  }

  auto check_index = [&](const std::vector<int>& n, const std::string& ctx) {
    if (n.size() != p) {
      error(ctx + ": has " + std::to_string(n.size()) + " entries but the system has p = " + std::to_string(p));
      return;
    }
    int total = 0;
    for (int v : n) {
      if (v < 0) error(ctx + ": entries must be non-negative");
      total += v;
    }
    if (total < 1 || total > kMaxDegree)
      error(ctx + ": |n| = " + std::to_string(total) + " must lie in 1.." + std::to_string(kMaxDegree));
    if (c.kind == "nikishin")
      for (std::size_t k = 0; k + 1 < n.size(); ++k)
        if (n[k + 1] > n[k] + 1)
          warning(ctx + ": n_" + std::to_string(k + 2) + " = " + std::to_string(n[k + 1]) + " > n_" +
                  std::to_string(k + 1) + " + 1 violates the AT condition n_j >= n_{j+1} - 1; normality and the "
                  "sign condition are not guaranteed");
  };
  if (c.nvec) check_index(c.nvec->parts(), "multi_index");
  if (c.schedule) {
    if (c.schedule->ratios.size() != p) error("schedule.ratios: length must equal p = " + std::to_string(p));
    double s = 0.0;
    for (double r : c.schedule->ratios) {
      if (!(r > 0.0 && r < 1.0) && p > 1) error("schedule.ratios: each ratio must lie in (0, 1)");
      s += r;
    }
    if (std::abs(s - 1.0) > 1e-12) error("schedule.ratios: ratios must sum to 1");
    for (int n : c.schedule->degrees)
      if (c.schedule->ratios.size() == p && std::abs(s - 1.0) <= 1e-12)
        check_index(MultiIndex::along_ray(c.schedule->ratios, n).parts(), "schedule n = " + std::to_string(n));
  }
  if (!c.equilibrium_ratios.empty() && c.equilibrium_ratios.size() != p)
    error("equilibrium.ratios: length must equal p = " + std::to_string(p));
  if (c.grid < 0) error("grid: must be positive");
  if (c.equilibrium_grid < 2) error("equilibrium.grid: must be at least 2");
  try {
    c.sampler.validate();
  } catch (const Error& e) {
    error(std::string("sampler: ") + e.what());
  }
  bool has_errors = false;
  for (const auto& d : out) has_errors |= d.level == Diagnostic::Level::error;
  if (!has_errors) {
    try {
      (void)c.build_system();
    } catch (const Error& e) {
      error(std::string("system: ") + e.what());
    }
  }
  return out;
}

}  // namespace mopkit::cli
