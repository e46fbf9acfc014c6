#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string_view>

#include "cfalign/errors.hpp"

namespace cfalign {

enum class Regime { noisy, weak, moderately_weak, strong, very_strong };

constexpr std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::noisy:
      return "noisy";
    case Regime::weak:
      return "weak";
    case Regime::moderately_weak:
      return "moderately-weak";
    case Regime::strong:
      return "strong";
    case Regime::very_strong:
      return "very-strong";
  }
  return "unknown";
}

// alpha = log INR / log SNR with INR = g^2 SNR. Values within 1e-12 of a
// regime boundary are snapped onto it so that g^2 = SNR lands on alpha = 2.
inline double interference_level(double g, double snr) {
  if (!(snr > 0.0) || snr == 1.0 || !std::isfinite(snr))
    throw InvalidArgument("interference level needs a finite snr different from 1");
  const double inr = g * g * snr;
  if (inr == 0.0) return -std::numeric_limits<double>::infinity();
  const double alpha = std::log(inr) / std::log(snr);
  constexpr std::array<double, 6> marks{0.0, 0.5, 2.0 / 3.0, 1.0, 1.5, 2.0};
  for (double m : marks)
    if (std::abs(alpha - m) <= 1e-12) return m;
  return alpha;
}

inline Regime classify_alpha(double alpha) {
  if (alpha < 0.5) return Regime::noisy;
  if (alpha < 2.0 / 3.0) return Regime::weak;
  if (alpha < 1.0) return Regime::moderately_weak;
  if (alpha < 2.0) return Regime::strong;
  return Regime::very_strong;
}

inline Regime classify(double g, double snr) { return classify_alpha(interference_level(g, snr)); }

}  // namespace cfalign
