#include "mopkit/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mopkit/ensemble.hpp"

namespace mopkit {

void SamplerConfig::validate() const {
  if (chains < 1 || burn_in < 1 || thinning < 1 || samples < 1 || !(step_scale > 0.0))
    throw ArgumentError("sampler settings must all be positive");
  if (samples < 2 * chains * 20) throw ArgumentError("sampler needs at least 40 kept samples per chain");
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log-gas target: prod_c w_{s(c)}(z_c) prod_{c<d} |z_c - z_d|^{beta(s(c), s(d))},
// or the raw determinant product for systems without a factored form.
class Target {
 public:
  Target(const WeightSystem& ws, const MultiIndex& nvec) : ws_(ws), nvec_(nvec) {
    if (nvec.p() != ws.p()) throw ArgumentError("multi-index and weight system disagree on p");
    if (nvec.total() < 1) throw ArgumentError("sampler needs |n| >= 1");
    const int n = nvec.total();
    if (ws.p() == 1) {
      add_species(ws.weight(0), n);
      beta_ = {{2.0}};
    } else if (ws.kind() == SystemKind::angelesco) {
      for (std::size_t j = 0; j < ws.p(); ++j) add_species(ws.weight(j), nvec[j]);
      beta_.assign(ws.p(), std::vector<double>(ws.p(), 1.0));
      for (std::size_t j = 0; j < ws.p(); ++j) beta_[j][j] = 2.0;
    } else if (ws.kind() == SystemKind::nikishin) {
      if (ws.p() != 2) throw ArgumentError("sampling Nikishin systems is restricted to p = 2");
      add_species(ws.weight(0), n);
      add_species(ws.generators().front(), nvec[1]);
      beta_ = {{2.0, -1.0}, {-1.0, 2.0}};
      extra_ = nvec[1];
    } else {
      determinantal_ = true;
      const Interval hull = ws.hull();
      for (int k = 0; k < n; ++k) {
        species_.push_back(0);
        intervals_.push_back(hull);
      }
    }
  }

  std::size_t dim() const noexcept { return species_.size(); }
  int extra() const noexcept { return extra_; }
  int species(std::size_t c) const { return species_[c]; }
  int species_count() const noexcept { return determinantal_ ? 1 : static_cast<int>(weights_.size()); }
  const Interval& interval(std::size_t c) const { return intervals_[c]; }

  double log_weight(std::size_t c, double x) const {
    if (!intervals_[c].contains(x)) return kNegInf;
    if (determinantal_) return 0.0;
    const double w = weights_[static_cast<std::size_t>(species_[c])](x);
    return w > 0.0 ? std::log(w) : kNegInf;
  }

  double log_density(const std::vector<double>& z) const {
    if (determinantal_) {
      for (std::size_t c = 0; c < z.size(); ++c)
        if (!intervals_[c].contains(z[c])) return kNegInf;
      return log_joint_density_unnormalized(ws_, nvec_, z);
    }
    double s = 0.0;
    for (std::size_t c = 0; c < z.size(); ++c) {
      s += log_weight(c, z[c]);
      for (std::size_t d = c + 1; d < z.size(); ++d) {
        const double dist = std::abs(z[c] - z[d]);
        const double b = beta(c, d);
        if (dist == 0.0) return b > 0.0 ? kNegInf : std::numeric_limits<double>::infinity();
        s += b * std::log(dist);
      }
    }
    return s;
  }

  // Change of log density when coordinate c moves from z[c] to x.
  double delta(std::vector<double>& z, std::size_t c, double x, double current) const {
    const double lw = log_weight(c, x);
    if (lw == kNegInf) return kNegInf;
    if (determinantal_) {
      const double old = z[c];
      z[c] = x;
      const double next = log_joint_density_unnormalized(ws_, nvec_, z);
      z[c] = old;
      return next - current;
    }
    double d = lw - log_weight(c, z[c]);
    for (std::size_t e = 0; e < z.size(); ++e) {
      if (e == c) continue;
      const double nd = std::abs(x - z[e]);
      if (nd == 0.0) return kNegInf;
      d += beta(c, e) * (std::log(nd) - std::log(std::abs(z[c] - z[e])));
    }
    return d;
  }

 private:
  void add_species(const Weight& w, int count) {
    const int s = static_cast<int>(weights_.size());
    weights_.push_back(w);
    for (int k = 0; k < count; ++k) {
      species_.push_back(s);
      intervals_.push_back(w.support());
    }
  }

  double beta(std::size_t c, std::size_t d) const {
    return beta_[static_cast<std::size_t>(species_[c])][static_cast<std::size_t>(species_[d])];
  }

  const WeightSystem& ws_;
  const MultiIndex& nvec_;
  std::vector<Weight> weights_;
  std::vector<int> species_;
  std::vector<Interval> intervals_;
  std::vector<std::vector<double>> beta_;
  int extra_ = 0;
  bool determinantal_ = false;
};

struct ChainOutput {
  std::vector<double> data;
  long accepted = 0;
  long proposed = 0;
};

ChainOutput run_chain(const Target& target, const SamplerConfig& cfg, int chain, int keep) {
  std::seed_seq seq{static_cast<std::uint64_t>(cfg.seed & 0xffffffffu), static_cast<std::uint64_t>(cfg.seed >> 32),
                    static_cast<std::uint64_t>(chain)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t dim = target.dim();

  std::vector<double> z(dim);
  double current = kNegInf;
  for (int attempt = 0; attempt < 100 && current == kNegInf; ++attempt) {
    for (std::size_t c = 0; c < dim; ++c) {
      const Interval& iv = target.interval(c);
      z[c] = iv.a() + iv.length() * (0.02 + 0.96 * unit(rng));
    }
    current = target.log_density(z);
    if (!std::isfinite(current)) current = kNegInf;
  }
  if (current == kNegInf) throw InitializationError("no starting configuration with positive density");

  const int ns = target.species_count();
  std::vector<double> factor(static_cast<std::size_t>(ns), 1.0);
  std::vector<long> acc(static_cast<std::size_t>(ns), 0), prop(static_cast<std::size_t>(ns), 0);
  ChainOutput out;
  out.data.reserve(static_cast<std::size_t>(keep) * dim);

  auto sweep = [&](bool record) {
    for (std::size_t c = 0; c < dim; ++c) {
      const auto s = static_cast<std::size_t>(target.species(c));
      const double step = cfg.step_scale * target.interval(c).length() * factor[s];
      const double x = z[c] + step * normal(rng);
      const double d = target.delta(z, c, x, current);
      const bool accept = d != kNegInf && (d >= 0.0 || std::log(unit(rng)) < d);
      ++prop[s];
      if (record) ++out.proposed;
      if (accept) {
        z[c] = x;
        current += d;
        ++acc[s];
        if (record) ++out.accepted;
      }
    }
  };

  constexpr int kAdaptEvery = 200;
  for (int it = 1; it <= cfg.burn_in; ++it) {
    sweep(false);
    if (it % kAdaptEvery == 0) {
      for (std::size_t s = 0; s < factor.size(); ++s) {
        if (prop[s] == 0) continue;
        const double rate = static_cast<double>(acc[s]) / static_cast<double>(prop[s]);
        factor[s] = std::clamp(factor[s] * std::exp(2.0 * (rate - 0.3)), 1e-4, 20.0);
        acc[s] = prop[s] = 0;
      }
    }
  }
  for (int k = 0; k < keep; ++k) {
    for (int t = 0; t < cfg.thinning; ++t) sweep(true);
    out.data.insert(out.data.end(), z.begin(), z.end());
  }
  return out;
}

constexpr int kBatchesPerChain = 20;

// Batch means of one real statistic per chain, pooled over chains.
std::vector<double> batch_means(const std::vector<double>& values, const std::vector<int>& lengths) {
  std::vector<double> means;
  std::size_t start = 0;
  for (int len : lengths) {
    const int b = len / kBatchesPerChain;
    for (int k = 0; k < kBatchesPerChain && b > 0; ++k) {
      double s = 0.0;
      for (int i = 0; i < b; ++i) s += values[start + static_cast<std::size_t>(k * b + i)];
      means.push_back(s / b);
    }
    start += static_cast<std::size_t>(len);
  }
  return means;
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double batch_stderr(const std::vector<double>& values, const std::vector<int>& lengths) {
  const std::vector<double> bm = batch_means(values, lengths);
  if (bm.size() < 2) return std::numeric_limits<double>::infinity();
  return std::sqrt(sample_variance(bm) / static_cast<double>(bm.size()));
}

template <class F>
McEstimate estimate(const SampleBatch& batch, F&& f) {
  const std::size_t m = batch.size();
  if (m == 0) throw ArgumentError("empty sample batch");
  std::vector<double> re(m), im(m);
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::complex<double> v = f(batch.x(i));
    re[i] = v.real();
    im[i] = v.imag();
    sum += v;
  }
  McEstimate e;
  e.samples = m;
  e.value = sum / static_cast<double>(m);
  e.stderr_re = batch_stderr(re, batch.chain_lengths);
  e.stderr_im = batch_stderr(im, batch.chain_lengths);
  return e;
}

}  // namespace

SampleBatch sample_mcmc(const WeightSystem& ws, const MultiIndex& nvec, const SamplerConfig& cfg) {
  cfg.validate();
  const Target target(ws, nvec);
  SampleBatch batch;
  batch.n = nvec.total();
  batch.extra = target.extra();
  batch.seed = cfg.seed;
  long accepted = 0, proposed = 0;
  for (int c = 0; c < cfg.chains; ++c) {
    const int keep = cfg.samples / cfg.chains + (c < cfg.samples % cfg.chains ? 1 : 0);
    ChainOutput out = run_chain(target, cfg, c, keep);
    batch.data.insert(batch.data.end(), out.data.begin(), out.data.end());
    batch.chain_lengths.push_back(keep);
    accepted += out.accepted;
    proposed += out.proposed;
  }
  batch.acceptance_rate = proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;

  // Effective sample size of the centre of mass of X.
  const std::size_t m = batch.size();
  std::vector<double> com(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (double v : batch.x(i)) s += v;
    com[i] = s / batch.n;
  }
  const double var = sample_variance(com);
  const std::vector<double> bm = batch_means(com, batch.chain_lengths);
  const double bvar = sample_variance(bm);
  const double bsize = static_cast<double>(m) / static_cast<double>(bm.size());
  batch.effective_sample_size =
      bvar > 0.0 ? std::min(static_cast<double>(m), static_cast<double>(m) * var / (bsize * bvar))
                 : static_cast<double>(m);
  return batch;
}

double McEstimate::standard_error() const { return std::hypot(stderr_re, stderr_im); }

double McEstimate::z_score(std::complex<double> target) const {
  const double se = standard_error();
  const double d = std::abs(value - target);
  if (se == 0.0) return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return d / se;
}

McEstimate mc_char_poly(const SampleBatch& batch, std::complex<double> z) {
  return estimate(batch, [&](std::span<const double> x) {
    std::complex<double> p = 1.0;
    for (double v : x) p *= z - v;
    return p;
  });
}

McEstimate mc_inverse_char_poly(const SampleBatch& batch, std::complex<double> z) {
  return estimate(batch, [&](std::span<const double> x) {
    std::complex<double> p = 1.0;
    for (double v : x) {
      if (z == std::complex<double>(v, 0.0)) throw DomainError("z coincides with a sample point");
      p *= z - v;
    }
    return 1.0 / p;
  });
}

}  // namespace mopkit
