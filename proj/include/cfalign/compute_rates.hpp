#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "cfalign/channel.hpp"
#include "cfalign/errors.hpp"
#include "cfalign/lattice.hpp"

namespace cfalign {

struct ComputationResult {
  CoefficientVector a;
  double beta;
  double sigma2_eff;
  double r_comp;  // signed, bits per channel use
};

// SNR * sum_l w_l (beta g_l - a_l)^2 + beta^2.
inline double effective_variance(const ChannelSpec& ch, std::span<const long long> a, double beta) {
  if (a.size() != ch.users()) throw InvalidArgument("coefficient length does not match channel");
  const auto g = ch.gains();
  const auto w = ch.weights();
  double s = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    const double d = beta * g[l] - static_cast<double>(a[l]);
    s += w[l] * d * d;
  }
  return ch.snr() * s + beta * beta;
}

// MMSE scaling SNR g^T B a / (1 + SNR g^T B g).
inline double optimal_beta(const ChannelSpec& ch, std::span<const long long> a) {
  if (a.size() != ch.users()) throw InvalidArgument("coefficient length does not match channel");
  const auto g = ch.gains();
  const auto w = ch.weights();
  double gba = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) gba += w[l] * g[l] * static_cast<double>(a[l]);
  return ch.snr() * gba / (1.0 + ch.snr() * ch.weighted_energy());
}

inline double rate_from_variance(double snr, double sigma2) { return 0.5 * std::log2(snr / sigma2); }

inline ComputationResult comp_rate(const ChannelSpec& ch, const CoefficientVector& a) {
  const double beta = optimal_beta(ch, a.span());
  const double sigma2 = effective_variance(ch, a.span(), beta);
  return {a, beta, sigma2, rate_from_variance(ch.snr(), sigma2)};
}

inline ComputationResult comp_rate(const ChannelSpec& ch, std::span<const long long> a) {
  return comp_rate(ch, CoefficientVector(std::vector<long long>(a.begin(), a.end())));
}

}  // namespace cfalign
