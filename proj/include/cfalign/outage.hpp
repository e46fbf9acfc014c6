#pragma once

#include <cmath>
#include <string_view>

#include "cfalign/errors.hpp"
#include "cfalign/interval_set.hpp"
#include "cfalign/regime.hpp"

namespace cfalign {

enum class OutageRegime { strong, moderately_weak };

constexpr std::string_view to_string(OutageRegime r) {
  return r == OutageRegime::strong ? "strong" : "moderately-weak";
}

struct OutageParams {
  int b;
  double snr;
  double c;
  double delta;
  double q_max;
  double phi;
  OutageRegime regime;

  double domain_lo() const {
    return regime == OutageRegime::strong ? static_cast<double>(b) : std::ldexp(1.0, -b);
  }
  double domain_hi() const {
    return regime == OutageRegime::strong ? static_cast<double>(b + 1) : std::ldexp(1.0, 1 - b);
  }
};

namespace detail {

inline void check_outage_inputs(double snr, double c) {
  if (!(snr > 1.0) || !std::isfinite(snr)) throw InvalidArgument("outage sets need a finite snr above 1");
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("gap c must be positive");
}

}  // namespace detail

inline int max_weak_outage_index(double snr) { return static_cast<int>(std::ceil(std::log2(snr) / 6.0)); }

inline OutageParams strong_outage_params(int b, double snr, double c) {
  detail::check_outage_inputs(snr, c);
  if (b < 1 || static_cast<double>(b) >= std::sqrt(snr))
    throw InvalidArgument("strong-regime index b must satisfy 1 <= b < sqrt(snr)");
  const double delta = (c + 1.0) / std::log2(snr);
  const double root = std::sqrt(b + 0.5);
  return {b,
          snr,
          c,
          delta,
          std::pow(snr, 0.25 - delta / 2.0) / root,
          root * std::pow(snr, -0.25 - delta / 2.0),
          OutageRegime::strong};
}

inline OutageParams weak_outage_params(int b, double snr, double c) {
  detail::check_outage_inputs(snr, c);
  if (b < 1 || b > max_weak_outage_index(snr))
    throw InvalidArgument("moderately-weak index b must satisfy 1 <= b <= ceil(log2(snr)/6)");
  const double delta = (2.0 * c + 8.0) / std::log2(snr);
  const double root = std::sqrt(std::ldexp(1.0, 1 - b));
  return {b,
          snr,
          c,
          delta,
          root * std::pow(snr, 0.25 - delta / 2.0),
          std::pow(snr, -0.25 - delta / 2.0) / root,
          OutageRegime::moderately_weak};
}

// Gains g in [b, b+1) with |q g - a| < phi for some 1 <= q <= q_max and
// integer a. For each q the anchors b + j/q are widened by phi/q and folded
// back into [b, b+1).
inline IntervalSet strong_outage_set(int b, double snr, double c) {
  const OutageParams p = strong_outage_params(b, snr, c);
  IntervalSet set(p.domain_lo(), p.domain_hi());
  const auto q_top = static_cast<long long>(std::floor(p.q_max));
  for (long long q = 1; q <= q_top; ++q) {
    const double w = p.phi / static_cast<double>(q);
    for (long long j = 0; j < q; ++j) {
      const double anchor = static_cast<double>(b) + static_cast<double>(j) / static_cast<double>(q);
      set.add_wrapped(anchor - w, anchor + w);
    }
  }
  set.normalize();
  return set;
}

// Gains g in [2^-b, 2^(1-b)) with |q g - a| < phi for some 1 <= q <= q_max.
// Built directly from the rationals a/q near the domain, which is the exact
// set rather than the scaled superset used for measure estimates.
inline IntervalSet weak_outage_set(int b, double snr, double c) {
  const OutageParams p = weak_outage_params(b, snr, c);
  IntervalSet set(p.domain_lo(), p.domain_hi());
  const auto q_top = static_cast<long long>(std::floor(p.q_max));
  for (long long q = 1; q <= q_top; ++q) {
    const auto qd = static_cast<double>(q);
    const auto a_lo = static_cast<long long>(std::ceil(qd * p.domain_lo() - p.phi));
    const auto a_hi = static_cast<long long>(std::floor(qd * p.domain_hi() + p.phi));
    for (long long a = a_lo; a <= a_hi; ++a)
      set.add((static_cast<double>(a) - p.phi) / qd, (static_cast<double>(a) + p.phi) / qd);
  }
  set.normalize();
  return set;
}

// Measure bound sqrt(2) 2^(b/2) SNR^(-1/4-delta/2) + 8 2^-b SNR^-delta.
inline double weak_outage_measure_bound(int b, double snr, double c) {
  const OutageParams p = weak_outage_params(b, snr, c);
  return std::sqrt(2.0) * std::pow(2.0, b / 2.0) * std::pow(snr, -0.25 - p.delta / 2.0) +
         8.0 * std::ldexp(1.0, -b) * std::pow(snr, -p.delta);
}

// True when the per-regime constant-gap guarantee may fail for gain g. Only
// the strong and moderately weak regimes have outage sets; elsewhere the
// guarantee holds for every gain. K does not enter the set construction.
inline bool in_outage(double g, double snr, double c, int /*users*/ = 3) {
  if (!(g > 0.0)) throw InvalidArgument("in_outage needs a positive gain");
  switch (classify(g, snr)) {
    case Regime::strong: {
      const double b = std::floor(g);
      if (b < 1.0 || b >= std::sqrt(snr)) return false;
      return strong_outage_set(static_cast<int>(b), snr, c).contains(g);
    }
    case Regime::moderately_weak: {
      const int b = static_cast<int>(std::ceil(-std::log2(g)));
      if (b < 1 || b > max_weak_outage_index(snr)) return false;
      return weak_outage_set(b, snr, c).contains(g);
    }
    default:
      return false;
  }
}

}  // namespace cfalign
