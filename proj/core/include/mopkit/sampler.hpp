#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "mopkit/mop.hpp"
#include "mopkit/weights.hpp"

namespace mopkit {

struct SamplerConfig {
  int chains = 4;
  int burn_in = 10000;     // sweeps discarded per chain
  int thinning = 10;       // sweeps between kept configurations
  int samples = 100000;    // kept configurations over all chains
  double step_scale = 0.1; // proposal sd as a fraction of the interval length
  std::uint64_t seed = 20240101;

  /// Throws ArgumentError unless every field is positive.
  void validate() const;
};

/// Kept configurations, stored chain after chain. Row i holds x_1 .. x_n
/// followed by y_1 .. y_m for extended ensembles.
struct SampleBatch {
  int n = 0;
  int extra = 0;
  std::vector<double> data;
  std::vector<int> chain_lengths;
  double acceptance_rate = 0.0;
  double effective_sample_size = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return n + extra == 0 ? 0 : data.size() / static_cast<std::size_t>(n + extra); }
  std::span<const double> x(std::size_t i) const {
    return {data.data() + i * static_cast<std::size_t>(n + extra), static_cast<std::size_t>(n)};
  }
  std::span<const double> y(std::size_t i) const {
    return {data.data() + i * static_cast<std::size_t>(n + extra) + n, static_cast<std::size_t>(extra)};
  }
};

/// Metropolis-within-Gibbs random walk on the joint density of the ensemble.
/// Angelesco systems keep n_j points in Gamma_j; Nikishin p = 2 systems are
/// sampled in the extended (X, Y) space; p = 1 and general systems use
/// |det f det g| directly. Step sizes adapt during burn-in only.
SampleBatch sample_mcmc(const WeightSystem& ws, const MultiIndex& nvec, const SamplerConfig& cfg);

struct McEstimate {
  std::complex<double> value;
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  std::size_t samples = 0;

  /// sqrt(stderr_re^2 + stderr_im^2).
  double standard_error() const;
  /// |value - target| / standard_error().
  double z_score(std::complex<double> target) const;
};

/// Mean of prod (z - x_k) with batch-means standard errors.
McEstimate mc_char_poly(const SampleBatch& batch, std::complex<double> z);
/// Mean of prod (z - x_k)^{-1}; z must be off the real axis or off all samples.
McEstimate mc_inverse_char_poly(const SampleBatch& batch, std::complex<double> z);

}  // namespace mopkit
