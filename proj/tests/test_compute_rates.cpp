#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cfalign/compute_rates.hpp"
#include "oracles.hpp"

using namespace cfalign;

TEST(EffectiveVariance, ZeroBetaIsWeightedCoefficientEnergy) {
  const ChannelSpec ch = ChannelSpec::effective({0.4, 1.9, -0.2}, {1.0, 2.0, 3.0}, 12.0);
  const std::vector<long long> a{1, -2, 3};
  EXPECT_DOUBLE_EQ(effective_variance(ch, a, 0.0), 12.0 * (1.0 + 2.0 * 4.0 + 3.0 * 9.0));
}

TEST(EffectiveVariance, PerfectMatchLeavesUnitNoise) {
  const ChannelSpec ch = ChannelSpec::plain({2.0, -1.0, 3.0}, 1e3);
  const std::vector<long long> a{2, -1, 3};
  EXPECT_DOUBLE_EQ(effective_variance(ch, a, 1.0), 1.0);
}

TEST(OptimalBeta, ParallelCoefficientFormula) {
  const std::vector<double> h{1.0, 2.0};
  const double snr = 40.0;
  const std::vector<long long> a{1, 2};
  EXPECT_NEAR(optimal_beta(ChannelSpec::plain(h, snr), a), snr * 5.0 / (1.0 + snr * 5.0), 1e-15);
}

TEST(CompRate, SqrtFiveChannelRates) {
  const ChannelSpec ch = ChannelSpec::plain({std::sqrt(5.0), 1.0}, db_to_linear(15.0));
  const ComputationResult r1 = comp_rate(ch, std::vector<long long>{2, 1});
  const ComputationResult r2 = comp_rate(ch, std::vector<long long>{3, 1});
  EXPECT_NEAR(r1.r_comp, 2.409, 5e-4);
  EXPECT_NEAR(r2.r_comp, 1.372, 5e-4);
  EXPECT_NEAR(r1.r_comp, 0.5 * std::log2(ch.snr() / r1.sigma2_eff), 1e-15);
}

TEST(CompRate, PointToPoint) {
  for (double snr : {0.1, 1.0, 100.0, 1e6}) {
    const ChannelSpec ch = ChannelSpec::plain({1.0, 0.0, 0.0}, snr);
    EXPECT_NEAR(comp_rate(ch, std::vector<long long>{1, 0, 0}).r_comp, 0.5 * std::log2(1.0 + snr), 1e-12);
  }
}

TEST(CompRate, TreatInterferenceClosedForm) {
  for (int k : {2, 3, 6}) {
    for (double g : {0.1, 0.9, 2.3}) {
      const double snr = 500.0;
      const ChannelSpec ch = ChannelSpec::effective({1.0, g}, {1.0, k - 1.0}, snr);
      const double expect =
          0.5 * std::log2((1.0 + snr * (1.0 + g * g * (k - 1))) / ((k - 1.0) * (1.0 + snr)));
      EXPECT_NEAR(comp_rate(ch, std::vector<long long>{0, 1}).r_comp, expect, 1e-12);
    }
  }
}

TEST(CompRate, RejectsZeroVector) {
  const ChannelSpec ch = ChannelSpec::plain({1.0, 1.0}, 10.0);
  EXPECT_THROW(comp_rate(ch, std::vector<long long>{0, 0}), InvalidArgument);
}

TEST(CompRate, BetaIsLocalMinimumAndMatchesGoldenSection) {
  std::mt19937_64 rng(53);
  std::normal_distribution<double> n01;
  std::uniform_int_distribution<int> coef(-4, 4);
  for (int t = 0; t < 500; ++t) {
    const std::size_t k = 1 + t % 4;
    std::vector<double> g(k), w(k);
    std::vector<long long> a(k);
    for (std::size_t i = 0; i < k; ++i) {
      g[i] = n01(rng);
      w[i] = 1.0 + (t + i) % 3;
      a[i] = coef(rng);
    }
    if (std::all_of(a.begin(), a.end(), [](long long v) { return v == 0; })) a[0] = 1;
    const ChannelSpec ch = ChannelSpec::effective(g, w, db_to_linear(3.0 * (t % 12)));
    const ComputationResult r = comp_rate(ch, a);
    EXPECT_LE(r.sigma2_eff, effective_variance(ch, r.a.entries(), r.beta + 1e-3));
    EXPECT_LE(r.sigma2_eff, effective_variance(ch, r.a.entries(), r.beta - 1e-3));
    const auto ca = r.a.entries();  // sign-canonical, so beta follows its sign
    const double b = oracle::golden_min([&](double x) { return effective_variance(ch, ca, x); }, -1e3, 1e3);
    EXPECT_NEAR(r.beta, b, 1e-6 * std::max(1.0, std::abs(b)));
  }
}

TEST(CompRate, IdentityWeightsMatchPlainChannel) {
  std::mt19937_64 rng(59);
  std::normal_distribution<double> n01;
  std::uniform_int_distribution<int> coef(-5, 5);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t k = 1 + t % 4;
    std::vector<double> h(k);
    std::vector<long long> a(k);
    for (std::size_t i = 0; i < k; ++i) h[i] = n01(rng), a[i] = coef(rng);
    if (std::all_of(a.begin(), a.end(), [](long long v) { return v == 0; })) a[k - 1] = -1;
    const double snr = db_to_linear(2.0 * (t % 20));
    const ComputationResult p = comp_rate(ChannelSpec::plain(h, snr), a);
    const ComputationResult e = comp_rate(ChannelSpec::effective(h, std::vector<double>(k, 1.0), snr), a);
    EXPECT_NEAR(p.r_comp, e.r_comp, 1e-12);
    EXPECT_NEAR(p.beta, e.beta, 1e-12);
  }
}

TEST(CompRate, VarianceEqualsGramQuadraticForm) {
  std::mt19937_64 rng(61);
  std::normal_distribution<double> n01;
  std::uniform_int_distribution<int> coef(-5, 5);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t k = 1 + t % 4;
    std::vector<double> g(k), w(k);
    std::vector<long long> a(k);
    for (std::size_t i = 0; i < k; ++i) g[i] = n01(rng), w[i] = 1.0 + i, a[i] = coef(rng);
    if (std::all_of(a.begin(), a.end(), [](long long v) { return v == 0; })) a[0] = 2;
    const ChannelSpec ch = ChannelSpec::effective(g, w, db_to_linear(2.0 * (t % 20)));
    const double q = gram(ch).quadratic(a);
    EXPECT_NEAR(comp_rate(ch, a).sigma2_eff, q, 1e-10 * std::max(1.0, q) + 1e-10 * ch.snr());
  }
}

TEST(CompRate, IntegerMultiplesNeverHelp) {
  std::mt19937_64 rng(67);
  std::normal_distribution<double> n01;
  std::uniform_int_distribution<int> coef(-3, 3);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> h{n01(rng), n01(rng)};
    std::vector<long long> a{coef(rng), coef(rng)};
    if (a[0] == 0 && a[1] == 0) a[0] = 1;
    const ChannelSpec ch = ChannelSpec::plain(h, 200.0);
    const ComputationResult base = comp_rate(ch, a);
    for (long long m : {2, 3, 5}) {
      std::vector<long long> am{m * a[0], m * a[1]};
      const ComputationResult r = comp_rate(ch, am);
      EXPECT_LE(r.r_comp, base.r_comp + 1e-12);
      EXPECT_NEAR(r.sigma2_eff, m * m * base.sigma2_eff, 1e-9 * r.sigma2_eff);
    }
  }
}
