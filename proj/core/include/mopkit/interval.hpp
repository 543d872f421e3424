#pragma once

#include <cmath>
#include <ostream>

#include "mopkit/error.hpp"

namespace mopkit {

/// Finite closed interval [a, b] with a < b.
class Interval {
 public:
  Interval(double a, double b) : a_(a), b_(b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
      throw ArgumentError("interval requires finite endpoints with a < b");
  }

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double length() const noexcept { return b_ - a_; }
  double midpoint() const noexcept { return 0.5 * (a_ + b_); }

  bool contains(double x) const noexcept { return a_ <= x && x <= b_; }
  bool interior_contains(double x) const noexcept { return a_ < x && x < b_; }

  /// True when the intervals share more than an endpoint.
  bool overlaps(const Interval& o) const noexcept { return a_ < o.b_ && o.a_ < b_; }
  /// True when the closed intervals have a common point.
  bool intersects(const Interval& o) const noexcept { return a_ <= o.b_ && o.a_ <= b_; }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double a_;
  double b_;
};

inline std::ostream& operator<<(std::ostream& os, const Interval& iv) {
  return os << '[' << iv.a() << ", " << iv.b() << ']';
}

}  // namespace mopkit
