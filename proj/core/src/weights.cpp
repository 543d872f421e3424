#include "mopkit/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mopkit {

// ---------------------------------------------------------------------------
// WeightSpec
// ---------------------------------------------------------------------------

void WeightSpec::validate() const {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw ArgumentError("weight factor must be positive and finite");
  if (const auto* j = std::get_if<JacobiFamily>(&family)) {
    if (!(j->alpha > -1.0) || !(j->beta > -1.0))
      throw ArgumentError("jacobi exponents must exceed -1 for integrability");
  }
  if (const auto* e = std::get_if<ExpPolyFamily>(&family)) {
    for (double c : e->coeffs)
      if (!std::isfinite(c)) throw ArgumentError("exp_poly coefficients must be finite");
  }
}

std::string WeightSpec::describe() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, ConstantFamily>) {
          os << "constant";
        } else if constexpr (std::is_same_v<F, JacobiFamily>) {
          os << "jacobi(" << f.alpha << ", " << f.beta << ")";
        } else {
          os << "exp_poly(" << f.coeffs.size() << " coeffs)";
        }
      },
      family);
  if (factor != 1.0) os << " x " << factor;
  os << " on " << interval;
  return os.str();
}

namespace {

double eval_spec(const WeightSpec& s, const Abscissa& p) {
  const double x = p.x;
  if (!s.interval.contains(x)) return 0.0;
  return s.factor * std::visit(
                        [&](const auto& f) -> double {
                          using F = std::decay_t<decltype(f)>;
                          if constexpr (std::is_same_v<F, ConstantFamily>) {
                            return 1.0;
                          } else if constexpr (std::is_same_v<F, JacobiFamily>) {
                            const double r = p.to_right, l = p.from_left;
                            return (f.alpha == 0.0 ? 1.0 : std::pow(r, f.alpha)) *
                                   (f.beta == 0.0 ? 1.0 : std::pow(l, f.beta));
                          } else {
                            double e = 0.0;
                            for (auto it = f.coeffs.rbegin(); it != f.coeffs.rend(); ++it) e = e * x + *it;
                            return std::exp(-e);
                          }
                        },
                        s.family);
}

EndpointSingularity spec_singularity(const WeightSpec& s) {
  if (const auto* j = std::get_if<JacobiFamily>(&s.family))
    return {j->beta < 0.0, j->alpha < 0.0, std::min(j->beta, 0.0), std::min(j->alpha, 0.0)};
  return {};
}

}  // namespace

// ---------------------------------------------------------------------------
// Weight
// ---------------------------------------------------------------------------

struct Weight::Lift {
  Weight generator;
  MarkovSign sign;
  double inner_tol;
};

Weight::Weight(WeightSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

Weight Weight::markov_lifted(WeightSpec base, Weight generator, MarkovSign sign, double inner_tol) {
  Weight w(std::move(base));
  if (w.support().intersects(generator.support()))
    throw ConstructionError("Markov generator support must be disjoint from the base interval");
  w.lift_ = std::make_shared<const Lift>(Lift{std::move(generator), sign, inner_tol});
  return w;
}

double Weight::operator()(double x) const {
  return (*this)(Abscissa{x, x - spec_.interval.a(), spec_.interval.b() - x});
}

double Weight::operator()(const Abscissa& p) const {
  const double base = eval_spec(spec_, p);
  if (base == 0.0 || !lift_) return base;
  return base * stieltjes_transform(lift_->generator, p.x, lift_->sign, lift_->inner_tol);
}

EndpointSingularity Weight::singularity() const noexcept { return spec_singularity(spec_); }

const Weight& Weight::generator() const {
  if (!lift_) throw ArgumentError("weight has no Markov generator");
  return lift_->generator;
}

MarkovSign Weight::lift_sign() const {
  if (!lift_) throw ArgumentError("weight has no Markov generator");
  return lift_->sign;
}

Weight Weight::scaled(double c) const {
  Weight w = *this;
  w.spec_.factor *= c;
  w.spec_.validate();
  return w;
}

double stieltjes_transform(const Weight& v, double x, MarkovSign sign, double tol) {
  const Interval& s = v.support();
  if (s.contains(x))
    throw DomainError("Stieltjes transform requested on the support of the generator");
  AdaptiveOptions opt;
  opt.abs_tol = tol;
  auto r = integrate_adaptive([&](const Abscissa& y, std::span<double> out) { out[0] = v(y) / (x - y.x); }, 1, s,
                              v.singularity(), opt);
  if (!r.converged) throw NumericError("Stieltjes transform quadrature did not converge", r.error);
  const double value = r.values[0];
  return static_cast<int>(sign) * value;
}

MarkovSign markov_sign(const Interval& base, const Interval& generator) {
  return generator.b() <= base.a() ? MarkovSign::plus : MarkovSign::minus;
}

// ---------------------------------------------------------------------------
// WeightSystem
// ---------------------------------------------------------------------------

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::general:
      return "general";
    case SystemKind::angelesco:
      return "angelesco";
    case SystemKind::nikishin:
      return "nikishin";
  }
  return "unknown";
}

std::vector<Interval> WeightSystem::integration_pieces() const {
  std::vector<Interval> sup;
  for (const auto& w : weights_) sup.push_back(w.support());
  std::sort(sup.begin(), sup.end(), [](const Interval& l, const Interval& r) { return l.a() < r.a(); });
  std::vector<Interval> out;
  for (const auto& iv : sup) {
    if (!out.empty() && out.back().overlaps(iv)) {
      out.back() = Interval(out.back().a(), std::max(out.back().b(), iv.b()));
    } else if (out.empty() || !(out.back() == iv)) {
      out.push_back(iv);
    }
  }
  return out;
}

Interval WeightSystem::hull() const {
  double lo = weights_.front().support().a(), hi = weights_.front().support().b();
  for (const auto& w : weights_) {
    lo = std::min(lo, w.support().a());
    hi = std::max(hi, w.support().b());
  }
  return {lo, hi};
}

WeightSystem WeightSystem::with_scaled_weight(std::size_t j, double c) const {
  WeightSystem ws = *this;
  ws.weights_.at(j) = ws.weights_.at(j).scaled(c);
  return ws;
}

WeightSystem WeightSystem::permuted(const std::vector<std::size_t>& order) const {
  if (order.size() != p()) throw ArgumentError("permutation length must equal p");
  std::vector<bool> seen(p(), false);
  WeightSystem ws;
  for (std::size_t j : order) {
    if (j >= p() || seen[j]) throw ArgumentError("not a permutation");
    seen[j] = true;
    ws.weights_.push_back(weights_[j]);
  }
  for (const auto& w : ws.weights_) ws.intervals_.push_back(w.support());
  const bool identity = std::is_sorted(order.begin(), order.end());
  ws.kind_ = identity ? kind_ : SystemKind::general;
  if (identity) {
    ws.intervals_ = intervals_;
    ws.generators_ = generators_;
  }
  return ws;
}

EndpointSingularity piece_singularity(const WeightSystem& ws, const Interval& piece) {
  EndpointSingularity sing;
  sing.left_exponent = sing.right_exponent = 0.0;
  for (const Weight& w : ws.weights()) {
    const EndpointSingularity ws_sing = w.singularity();
    if (w.support().a() == piece.a() && ws_sing.left) {
      sing.left = true;
      sing.left_exponent = std::min(sing.left_exponent, ws_sing.left_exponent);
    }
    if (w.support().b() == piece.b() && ws_sing.right) {
      sing.right = true;
      sing.right_exponent = std::min(sing.right_exponent, ws_sing.right_exponent);
    }
  }
  return sing;
}

WeightSystem build_general(std::vector<WeightSpec> specs) {
  if (specs.empty()) throw ConstructionError("weight system needs at least one weight");
  WeightSystem ws;
  ws.kind_ = SystemKind::general;
  for (auto& s : specs) {
    ws.intervals_.push_back(s.interval);
    ws.weights_.emplace_back(std::move(s));
  }
  return ws;
}

WeightSystem build_angelesco(std::vector<WeightSpec> specs) {
  if (specs.empty()) throw ConstructionError("weight system needs at least one weight");
  std::stable_sort(specs.begin(), specs.end(),
                   [](const WeightSpec& l, const WeightSpec& r) { return l.interval.a() < r.interval.a(); });
  for (std::size_t j = 0; j + 1 < specs.size(); ++j) {
    const Interval& l = specs[j].interval;
    const Interval& r = specs[j + 1].interval;
    if (l.b() > r.a()) {
      std::ostringstream os;
      os << "Angelesco supports overlap: " << l << " and " << r;
      throw ConstructionError(os.str());
    }
  }
  WeightSystem ws = build_general(std::move(specs));
  ws.kind_ = SystemKind::angelesco;
  return ws;
}

WeightSystem build_nikishin(WeightSpec w1, std::vector<WeightSpec> generators) {
  w1.validate();
  WeightSystem ws;
  ws.kind_ = SystemKind::nikishin;
  ws.intervals_.push_back(w1.interval);
  ws.weights_.emplace_back(w1);
  if (generators.empty()) return ws;

  const Interval gamma2 = generators.front().interval;
  if (w1.interval.intersects(gamma2)) {
    std::ostringstream os;
    os << "Nikishin intervals " << w1.interval << " and " << gamma2 << " must be disjoint";
    throw ConstructionError(os.str());
  }
  WeightSpec head = generators.front();
  std::vector<WeightSpec> rest(generators.begin() + 1, generators.end());
  const WeightSystem inner = build_nikishin(std::move(head), std::move(rest));

  const MarkovSign sign = markov_sign(w1.interval, gamma2);
  for (const Weight& v : inner.weights()) ws.weights_.push_back(Weight::markov_lifted(w1, v, sign));
  ws.intervals_.insert(ws.intervals_.end(), inner.intervals().begin(), inner.intervals().end());
  ws.generators_ = inner.weights();
  return ws;
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

AffineFrame AffineFrame::for_hull(const Interval& hull) {
  const double half = 0.5 * hull.length();
  return {hull.midpoint(), std::exp2(std::ceil(std::log2(half)))};
}

AffineFrame canonical_frame(const WeightSystem& ws) { return AffineFrame::for_hull(ws.hull()); }

int MomentTable::max_order() const noexcept {
  if (c.empty()) return -1;
  std::size_t m = c.front().size();
  for (const auto& row : c) m = std::min(m, row.size());
  return static_cast<int>(m) - 1;
}

void basis_values(MomentBasis basis, double t, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = t;
  for (std::size_t k = 2; k < out.size(); ++k) {
    if (basis == MomentBasis::monomial) {
      out[k] = out[k - 1] * t;
    } else {
      const double kk = static_cast<double>(k);
      out[k] = ((2.0 * kk - 1.0) * t * out[k - 1] - (kk - 1.0) * out[k - 2]) / kk;
    }
  }
}

namespace {

std::vector<double> weight_moments(const Weight& w, int k_max, MomentBasis basis, const AffineFrame& frame,
                                   double tol, int max_segments, double& achieved) {
  if (k_max < 0) throw ArgumentError("k_max must be non-negative");
  const std::size_t dim = static_cast<std::size_t>(k_max) + 1;
  AdaptiveOptions opt;
  opt.abs_tol = tol;
  opt.max_segments = max_segments;
  auto r = integrate_adaptive(
      [&](const Abscissa& p, std::span<double> out) {
        const double wx = w(p);
        basis_values(basis, frame.to_local(p.x), out);
        for (double& v : out) v *= wx;
      },
      dim, w.support(), w.singularity(), opt);
  if (!r.converged) throw NumericError("moment quadrature did not converge", r.error);
  achieved = r.error;
  return r.values;
}

}  // namespace

std::vector<double> moments(const WeightSystem& ws, std::size_t j, int k_max, double tol) {
  if (j >= ws.p()) throw ArgumentError("weight index out of range");
  double achieved = 0.0;
  return weight_moments(ws.weight(j), k_max, MomentBasis::monomial, AffineFrame{}, tol, 4000, achieved);
}

MomentTable moment_table(const WeightSystem& ws, int k_max, const MomentOptions& opt) {
  MomentTable mt;
  mt.basis = opt.basis;
  mt.frame = opt.frame.value_or(canonical_frame(ws));
  mt.tolerance = opt.tol;
  for (const Weight& w : ws.weights()) {
    double achieved = 0.0;
    mt.c.push_back(weight_moments(w, k_max, mt.basis, mt.frame, opt.tol, opt.max_segments, achieved));
    mt.max_error = std::max(mt.max_error, achieved);
  }
  return mt;
}

}  // namespace mopkit
