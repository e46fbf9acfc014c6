#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "cfalign/errors.hpp"

namespace cfalign {

struct Interval {
  double lo;
  double hi;  // half-open [lo, hi)
  bool operator==(const Interval&) const = default;
};

// Sorted disjoint half-open intervals inside a fixed ambient interval.
// Pieces are clipped to the domain on insertion; normalize() sorts and merges.
class IntervalSet {
 public:
  IntervalSet(double domain_lo, double domain_hi) : lo_(domain_lo), hi_(domain_hi) {
    if (!(domain_lo < domain_hi)) throw InvalidArgument("interval set domain must be nonempty");
  }

  double domain_lo() const noexcept { return lo_; }
  double domain_hi() const noexcept { return hi_; }

  void add(double lo, double hi) {
    lo = std::max(lo, lo_);
    hi = std::min(hi, hi_);
    if (lo < hi) {
      pieces_.push_back({lo, hi});
      sorted_ = false;
    }
  }

  // Adds [lo, hi) reduced modulo the domain length, splitting at the right edge.
  void add_wrapped(double lo, double hi) {
    const double len = hi_ - lo_;
    if (hi - lo >= len) {
      add(lo_, hi_);
      return;
    }
    while (lo < lo_) {
      lo += len;
      hi += len;
    }
    while (lo >= hi_) {
      lo -= len;
      hi -= len;
    }
    if (hi <= hi_) {
      add(lo, hi);
    } else {
      add(lo, hi_);
      add(lo_, hi - len);
    }
  }

  void normalize() {
    if (sorted_) return;
    std::sort(pieces_.begin(), pieces_.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> merged;
    for (const auto& p : pieces_) {
      if (!merged.empty() && p.lo <= merged.back().hi)
        merged.back().hi = std::max(merged.back().hi, p.hi);
      else
        merged.push_back(p);
    }
    pieces_ = std::move(merged);
    sorted_ = true;
  }

  const std::vector<Interval>& intervals() {
    normalize();
    return pieces_;
  }

  double measure() {
    normalize();
    double s = 0.0;
    for (const auto& p : pieces_) s += p.hi - p.lo;
    return s;
  }

  bool contains(double x) {
    normalize();
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, const Interval& p) { return v < p.lo; });
    if (it == pieces_.begin()) return false;
    --it;
    return x >= it->lo && x < it->hi;
  }

  bool empty() {
    normalize();
    return pieces_.empty();
  }

 private:
  double lo_;
  double hi_;
  std::vector<Interval> pieces_;
  bool sorted_ = true;
};

}  // namespace cfalign
