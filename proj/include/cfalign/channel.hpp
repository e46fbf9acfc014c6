#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "cfalign/errors.hpp"

namespace cfalign {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double log2_plus(double x) { return x > 1.0 ? std::log2(x) : 0.0; }

// A Gaussian multiple-access channel y = sum_l g_l b_l x_l + z seen by one
// receiver. For a plain MAC every squared weight b_l^2 is 1 and the gains
// are the channel vector h. An effective MAC groups aligned transmitters
// into one effective user whose squared weight counts the group size.
class ChannelSpec {
 public:
  static ChannelSpec plain(std::vector<double> h, double snr) {
    std::vector<double> ones(h.size(), 1.0);
    return ChannelSpec(std::move(h), std::move(ones), snr, false);
  }

  static ChannelSpec effective(std::vector<double> g, std::vector<double> weights, double snr) {
    return ChannelSpec(std::move(g), std::move(weights), snr, true);
  }

  std::size_t users() const noexcept { return gains_.size(); }
  double snr() const noexcept { return snr_; }
  bool is_effective() const noexcept { return effective_; }
  std::span<const double> gains() const noexcept { return gains_; }
  std::span<const double> weights() const noexcept { return weights_; }

  // g^T B g, which is ||h||^2 for a plain channel.
  double weighted_energy() const {
    double s = 0.0;
    for (std::size_t l = 0; l < gains_.size(); ++l) s += weights_[l] * gains_[l] * gains_[l];
    return s;
  }

  double log2_det_weights() const {
    double s = 0.0;
    for (double w : weights_) s += std::log2(w);
    return s;
  }

 private:
  ChannelSpec(std::vector<double> g, std::vector<double> w, double snr, bool effective)
      : gains_(std::move(g)), weights_(std::move(w)), snr_(snr), effective_(effective) {
    if (gains_.empty()) throw InvalidArgument("channel needs at least one user");
    if (weights_.size() != gains_.size())
      throw InvalidArgument("weight vector length does not match gain vector length");
    if (!std::isfinite(snr_) || snr_ <= 0.0) throw InvalidArgument("snr must be finite and positive");
    for (double v : gains_)
      if (!std::isfinite(v)) throw InvalidArgument("channel gains must be finite");
    for (double w : weights_)
      if (!std::isfinite(w) || w <= 0.0) throw InvalidArgument("effective weights must be finite and positive");
  }

  std::vector<double> gains_;
  std::vector<double> weights_;
  double snr_;
  bool effective_;
};

}  // namespace cfalign
