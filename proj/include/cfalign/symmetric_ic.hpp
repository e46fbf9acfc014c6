#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "cfalign/cf_transform.hpp"
#include "cfalign/channel.hpp"
#include "cfalign/errors.hpp"
#include "cfalign/lattice.hpp"
#include "cfalign/outage.hpp"
#include "cfalign/regime.hpp"

namespace cfalign {

// Symmetric K-user interference channel: direct gains 1, cross gains g.
struct SymmetricIcSpec {
  int users;
  double g;
  double snr;

  SymmetricIcSpec(int k, double cross_gain, double snr_linear) : users(k), g(cross_gain), snr(snr_linear) {
    if (k < 2) throw InvalidArgument("interference channel needs at least two users");
    if (!std::isfinite(g)) throw InvalidArgument("cross gain must be finite");
    if (!(snr > 0.0) || !std::isfinite(snr)) throw InvalidArgument("snr must be finite and positive");
  }

  double inr() const { return g * g * snr; }
  double alpha() const { return interference_level(std::abs(g), snr); }
  Regime regime() const { return classify_alpha(alpha()); }
};

struct SchemeOptions {
  SearchMethod method = SearchMethod::automatic;
  std::size_t budget = kDefaultNodeBudget;
  bool hk_gamma_grid = false;  // also search a 64-point log grid over gamma
};

// Each receiver sees its own user plus the K-1 aligned interferers, which
// act as one effective user of squared weight K-1.
inline ChannelSpec effective_two_user(const SymmetricIcSpec& s) {
  return ChannelSpec::effective({1.0, s.g}, {1.0, static_cast<double>(s.users - 1)}, s.snr);
}

struct SchemeRate {
  double rate;
  ReductionMethod method;
};

inline SchemeRate single_layer(const SymmetricIcSpec& s, const SchemeOptions& opt = {}) {
  const CfTransform t = transform(effective_two_user(s), opt.method, opt.budget);
  return {t.results[1].r_comp, t.method};
}

inline double single_layer_rate(const SymmetricIcSpec& s, const SchemeOptions& opt = {}) {
  return single_layer(s, opt).rate;
}

inline double treat_as_noise_rate(const SymmetricIcSpec& s) {
  return 0.5 * std::log2(1.0 + s.snr / (1.0 + (s.users - 1) * s.inr()));
}

inline double tdma_rate(int users, double snr) {
  if (users < 1) throw InvalidArgument("user count must be positive");
  return 0.5 * std::log2(1.0 + users * snr) / users;
}

inline double tdma_rate(const SymmetricIcSpec& s) { return tdma_rate(s.users, s.snr); }

// Public/private split with private power fraction gamma^2. The private
// interference is folded into the noise, which scales every gain by kappa.
inline ChannelSpec hk_effective_mac(const SymmetricIcSpec& s, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("gamma must lie in [0, 1)");
  const double kappa = 1.0 / std::sqrt(1.0 + s.snr * s.g * s.g * gamma * gamma * (s.users - 1));
  const double pub = std::sqrt(1.0 - gamma * gamma);
  return ChannelSpec::effective({kappa * pub, kappa * gamma, kappa * s.g * pub},
                                {1.0, 1.0, static_cast<double>(s.users - 1)}, s.snr);
}

inline SchemeRate hk(const SymmetricIcSpec& s, double gamma, const SchemeOptions& opt = {}) {
  const CfTransform t = transform(hk_effective_mac(s, gamma), opt.method, opt.budget);
  return {t.results[1].r_comp + t.results[2].r_comp, t.method};
}

inline double hk_rate(const SymmetricIcSpec& s, double gamma, const SchemeOptions& opt = {}) {
  return hk(s, gamma, opt).rate;
}

// Private codewords arrive at noise level: gamma^2 = 1/(g^2 SNR).
inline double hk_default_gamma(const SymmetricIcSpec& s) {
  const double gamma = 1.0 / std::sqrt(s.inr());
  // INR within an ulp of 1 rounds gamma up to 1, which leaves no public layer.
  if (!(s.inr() > 1.0 && gamma < 1.0)) throw SchemeInapplicable("default Han-Kobayashi split needs g^2 SNR > 1");
  return gamma;
}

inline double hk_rate_default(const SymmetricIcSpec& s, const SchemeOptions& opt = {}) {
  return hk_rate(s, hk_default_gamma(s), opt);
}

inline std::vector<double> hk_gamma_grid(std::size_t points = 64) {
  std::vector<double> grid;
  const double lo = std::log10(1e-4);
  const double hi = std::log10(0.99);
  for (std::size_t i = 0; i < points; ++i)
    grid.push_back(std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1)));
  return grid;
}

inline double upper_bound(const SymmetricIcSpec& s) {
  const double snr = s.snr;
  const double inr = s.inr();
  switch (s.regime()) {
    case Regime::noisy:
    case Regime::weak:
      return 0.5 * std::log2(1.0 + inr + snr / (1.0 + inr));
    case Regime::moderately_weak:
      return 0.25 * std::log2(1.0 + snr) + 0.25 * std::log2(1.0 + snr / (1.0 + inr));
    case Regime::strong:
      return 0.25 * std::log2(1.0 + snr + inr);
    case Regime::very_strong:
      return 0.5 * std::log2(1.0 + snr);
  }
  return 0.0;
}

inline double upper_bound_loose(const SymmetricIcSpec& s) {
  const double snr = s.snr;
  const double inr = s.inr();
  switch (s.regime()) {
    case Regime::noisy:
      return 0.5 * std::log2(1.0 + snr / (1.0 + inr)) + 1.0;
    case Regime::weak:
      return 0.5 * log2_plus(inr) + 1.0;
    case Regime::moderately_weak:
      return 0.5 * log2_plus(snr / std::sqrt(inr)) + 1.0;
    case Regime::strong:
      return 0.25 * log2_plus(inr) + 1.0;
    case Regime::very_strong:
      return 0.5 * std::log2(1.0 + snr);
  }
  return 0.0;
}

inline double closed_form_lower(const SymmetricIcSpec& s, double c) {
  if (!(c > 0.0)) throw InvalidArgument("gap c must be positive");
  const double snr = s.snr;
  const double inr = s.inr();
  const double log_k = std::log2(static_cast<double>(s.users));
  switch (s.regime()) {
    case Regime::noisy:
      return 0.5 * std::log2(1.0 + snr / (1.0 + inr)) - 0.5 * std::log2(s.users - 1.0);
    case Regime::weak:
      return 0.5 * log2_plus(inr) - 3.5 - log_k;
    case Regime::moderately_weak:
      return 0.5 * log2_plus(snr / std::sqrt(inr)) - c - 8.0 - log_k;
    case Regime::strong:
      return 0.25 * log2_plus(inr) - c / 2.0 - 3.0;
    case Regime::very_strong:
      return 0.5 * std::log2(1.0 + snr) - 1.0;
  }
  return 0.0;
}

// Generalized degrees of freedom, including the isolated value 1/K at alpha = 1.
inline double gdof(double alpha, int users) {
  if (!(alpha >= 0.0)) throw InvalidArgument("alpha must be nonnegative");
  if (users < 1) throw InvalidArgument("user count must be positive");
  if (alpha < 0.5) return 1.0 - alpha;
  if (alpha <= 2.0 / 3.0) return alpha;  // both branches meet at 2/3
  if (alpha < 1.0) return 1.0 - alpha / 2.0;
  if (alpha == 1.0) return 1.0 / users;
  if (alpha < 2.0) return alpha / 2.0;
  return 1.0;
}

struct RegimeReport {
  double alpha;
  Regime regime;
  double r_single;
  double r_noise;
  std::optional<double> r_hk;  // empty when the default split does not apply
  double r_tdma;
  double r_best;
  double lower_closed;
  double upper_tight;
  double upper_loose;
  bool in_outage;
  ReductionMethod method_used;  // lll if any lattice search fell back
};

inline RegimeReport report(const SymmetricIcSpec& s, double c, const SchemeOptions& opt = {}) {
  RegimeReport r{};
  r.alpha = s.alpha();
  r.regime = classify_alpha(r.alpha);
  const SchemeRate single = single_layer(s, opt);
  r.r_single = single.rate;
  r.method_used = single.method;
  r.r_noise = treat_as_noise_rate(s);
  r.r_tdma = tdma_rate(s);

  std::optional<double> best_hk;
  auto consider = [&](double gamma) {
    const SchemeRate h = hk(s, gamma, opt);
    if (h.method == ReductionMethod::lll) r.method_used = ReductionMethod::lll;
    if (!best_hk || h.rate > *best_hk) best_hk = h.rate;
  };
  if (s.inr() > 1.0 && 1.0 / std::sqrt(s.inr()) < 1.0) consider(hk_default_gamma(s));
  if (opt.hk_gamma_grid)
    for (double gamma : hk_gamma_grid()) consider(gamma);
  r.r_hk = best_hk;

  r.r_best = std::max({r.r_single, r.r_noise, r.r_tdma});
  if (r.r_hk) r.r_best = std::max(r.r_best, *r.r_hk);
  r.lower_closed = closed_form_lower(s, c);
  r.upper_tight = upper_bound(s);
  r.upper_loose = upper_bound_loose(s);
  r.in_outage = s.g != 0.0 && in_outage(std::abs(s.g), s.snr, c, s.users);
  return r;
}

}  // namespace cfalign
