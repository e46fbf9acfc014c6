#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cfalign/core_linalg.hpp"
#include "oracles.hpp"

using namespace cfalign;

namespace {

long double det(oracle::Mat m) {
  const std::size_t n = m.size();
  long double d = 1.0L;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(m[r][c]) > std::fabs(m[p][c])) p = r;
    if (p != c) {
      std::swap(m[p], m[c]);
      d = -d;
    }
    d *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const long double f = m[r][c] / m[c][c];
      for (std::size_t j = c; j < n; ++j) m[r][j] -= f * m[c][j];
    }
  }
  return d;
}

}  // namespace

TEST(GramPlain, ScalarChannelMatchesScalarWoodbury) {
  for (double s : {0.5, 1.0, 10.0, 1e4}) {
    const std::vector<double> h{1.0};
    const GramMatrix g = gram_plain(h, s);
    EXPECT_NEAR(g.quadratic(std::vector<long long>{1}), s / (1.0 + s), 1e-12 * s);
  }
}

TEST(GramPlain, SqrtFiveChannelFirstEquationRate) {
  const std::vector<double> h{std::sqrt(5.0), 1.0};
  const double snr = std::pow(10.0, 1.5);
  const GramMatrix g = gram_plain(h, snr);
  const double sigma2 = g.quadratic(std::vector<long long>{2, 1});
  EXPECT_NEAR(0.5 * std::log2(snr / sigma2), 2.409, 5e-4);
}

TEST(GramPlain, MatchesExplicitInverse) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coef(-6, 6);
  const std::vector<double> h{1.0, 1.5};
  const auto ref = oracle::gram_by_inverse(h, {1.0, 1.0}, 100.0);
  const GramMatrix g = gram_plain(h, 100.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<long long> a{coef(rng), coef(rng)};
    EXPECT_NEAR(g.quadratic(a), static_cast<double>(oracle::quad(ref, a)), 1e-9 * std::max(1.0, g.quadratic(a)));
  }
}

TEST(GramPlain, RejectsNonFiniteInput) {
  const std::vector<double> bad{1.0, std::nan("")};
  EXPECT_THROW(gram_plain(bad, 10.0), InvalidArgument);
  const std::vector<double> ok{1.0};
  EXPECT_THROW(gram_plain(ok, 0.0), InvalidArgument);
  EXPECT_THROW(gram_plain(ok, INFINITY), InvalidArgument);
}

TEST(GramEffective, IdentityWeightsReduceToPlain) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> h{n01(rng), n01(rng), n01(rng)};
    const std::vector<double> w(3, 1.0);
    const GramMatrix a = gram_plain(h, 37.0);
    const GramMatrix b = gram_effective(h, w, 37.0);
    EXPECT_EQ(b.source, GramSource::effective);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        EXPECT_NEAR(a.entries(i, j), b.entries(i, j), 1e-12 * std::max(1.0, std::abs(a.entries(i, j))));
  }
}

TEST(GramEffective, InterferenceOnlyVectorHasClosedForm) {
  for (int k : {2, 3, 5}) {
    for (double gg : {0.3, 1.0, 2.7}) {
      const double snr = 300.0;
      const std::vector<double> g{1.0, gg};
      const std::vector<double> w{1.0, static_cast<double>(k - 1)};
      const double expect = snr * (k - 1) * (1 + snr) / (1 + snr + (k - 1) * gg * gg * snr);
      EXPECT_NEAR(gram_effective(g, w, snr).quadratic(std::vector<long long>{0, 1}), expect, 1e-9 * expect);
    }
  }
}

TEST(GramEffective, ThreeUserMatchesExplicitInverse) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n01;
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_int_distribution<int> weight(1, 4);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> g{n01(rng), n01(rng), n01(rng)};
    std::vector<double> w{1.0 * weight(rng), 1.0 * weight(rng), 1.0 * weight(rng)};
    const double snr = std::pow(10.0, std::uniform_real_distribution<double>(0, 4)(rng));
    const GramMatrix mine = gram_effective(g, w, snr);
    const auto ref = oracle::gram_by_inverse(g, w, snr);
    std::vector<long long> a{coef(rng), coef(rng), coef(rng)};
    const double q = mine.quadratic(a);
    EXPECT_NEAR(q, static_cast<double>(oracle::quad(ref, a)), 1e-8 * std::max(1.0, q));
  }
}

TEST(GramEffective, RejectsNonpositiveWeight) {
  const std::vector<double> g{1.0, 2.0};
  const std::vector<double> zero{1.0, 0.0};
  const std::vector<double> neg{1.0, -2.0};
  EXPECT_THROW(gram_effective(g, zero, 10.0), InvalidArgument);
  EXPECT_THROW(gram_effective(g, neg, 10.0), InvalidArgument);
}

// The quadratic form is the minimum over beta of the effective noise
// variance. A coarse 1000-point scan followed by a 1000-point scan around
// the best coarse cell gives 10^6-point resolution without a closed form.
TEST(GramPlain, QuadraticFormIsMinimumOverBetaGrid) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_int_distribution<int> dim(1, 4);
  for (int t = 0; t < 10000; ++t) {
    const int k = dim(rng);
    std::vector<double> h(k);
    std::vector<long long> a(k);
    double hh = 0.0, aa = 0.0, ha = 0.0;
    for (int i = 0; i < k; ++i) {
      h[i] = u(rng);
      a[i] = coef(rng);
      hh += h[i] * h[i];
      aa += 1.0 * a[i] * a[i];
      ha += h[i] * a[i];
    }
    if (aa == 0.0 || hh < 1e-3) continue;
    const double snr = std::pow(10.0, std::uniform_real_distribution<double>(-1, 3)(rng));
    auto f = [&](double beta) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += (beta * h[i] - a[i]) * (beta * h[i] - a[i]);
      return s * snr + beta * beta;
    };
    const double span = std::sqrt(aa / hh) + 1.0;
    double best = INFINITY, best_beta = 0.0;
    const double coarse = 2.0 * span / 1000.0;
    for (int i = 0; i <= 1000; ++i) {
      const double b = -span + i * coarse;
      if (f(b) < best) best = f(b), best_beta = b;
    }
    const double fine = 2.0 * coarse / 1000.0;
    for (int i = 0; i <= 1000; ++i) {
      const double b = best_beta - coarse + i * fine;
      best = std::min(best, f(b));
    }
    const double q = gram_plain(h, snr).quadratic(a);
    const double curvature = 1.0 + snr * hh;
    EXPECT_LE(q, best * (1.0 + 1e-12) + 1e-12);
    EXPECT_LE(best - q, curvature * fine * fine + 1e-9 * q);
    const double closed = snr * (aa - snr * ha * ha / (1.0 + snr * hh));
    EXPECT_LE(std::abs(q - closed), 1e-9 * std::max(q, 1.0) + 1e-9 * snr * aa);
  }
}

TEST(Cholesky, IdentityAndHandExample) {
  const RealMatrix id = RealMatrix::identity(4);
  EXPECT_EQ(cholesky(id), id);
  const RealMatrix m{{2.0, 1.0}, {1.0, 2.0}};
  const RealMatrix r = cholesky(m);
  EXPECT_NEAR(r(0, 0), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(r(0, 1), 0.0);
  EXPECT_NEAR(r(1, 0), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r(1, 1), std::sqrt(1.5), 1e-15);
}

TEST(Cholesky, RoundTripsGramMatrices) {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> n01;
  auto check = [](const GramMatrix& g) {
    const RealMatrix r = cholesky(g);
    const RealMatrix back = multiply(r, transpose(r));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.dim(); ++i)
      for (std::size_t j = 0; j < g.dim(); ++j) {
        num += std::pow(back(i, j) - g.entries(i, j), 2);
        den += std::pow(g.entries(i, j), 2);
      }
    EXPECT_LE(std::sqrt(num / den), 1e-10);
  };
  const std::vector<double> h{1.0, 2.0};
  check(gram_plain(h, 10.0));
  for (int t = 0; t < 200; ++t) {
    std::vector<double> hv(1 + t % 6);
    for (auto& v : hv) v = n01(rng);
    check(gram_plain(hv, std::pow(10.0, (t % 9) / 2.0)));
  }
}

TEST(Cholesky, RejectsIndefinite) {
  const RealMatrix m{{1.0, 2.0}, {2.0, 1.0}};
  EXPECT_THROW(cholesky(m), NotPositiveDefinite);
}

TEST(SylvesterLogdet, ScalarUnitChannel) {
  EXPECT_NEAR(sylvester_logdet(ChannelSpec::plain({1.0}, 1.0)), std::log2(0.5), 1e-15);
}

TEST(SylvesterLogdet, MatchesDeterminantOfGram) {
  const ChannelSpec ex1 = ChannelSpec::plain({std::sqrt(5.0), 1.0}, std::pow(10.0, 1.5));
  const long double d1 = det(oracle::gram_by_inverse({std::sqrt(5.0), 1.0}, {1.0, 1.0}, std::pow(10.0, 1.5)));
  EXPECT_NEAR(sylvester_logdet(ex1), static_cast<double>(std::log2(d1)), 1e-9);

  const ChannelSpec eff = ChannelSpec::effective({1.0, 1.7}, {1.0, 2.0}, 50.0);
  const long double d2 = det(oracle::gram_by_inverse({1.0, 1.7}, {1.0, 2.0}, 50.0));
  EXPECT_NEAR(sylvester_logdet(eff), static_cast<double>(std::log2(d2)), 1e-9);
}

TEST(ExactRank, SmallExamples) {
  EXPECT_EQ(exact_rank(IntMatrix::identity(5)), 5u);
  EXPECT_EQ(exact_rank(IntMatrix{{2, 1}, {3, 1}}), 2u);
  EXPECT_EQ(exact_rank(IntMatrix{{1, 2}, {2, 4}}), 1u);
  EXPECT_EQ(exact_rank(IntMatrix{{0, 0}, {0, 0}}), 0u);
  EXPECT_EQ(exact_rank(IntMatrix{{0, 1, 2}, {0, 2, 4}, {1, 0, 0}}), 2u);
}

TEST(ExactRank, AgreesWithFloatingRankOnRandomMatrices) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> entry(-10, 10);
  std::uniform_int_distribution<int> size(1, 6);
  std::bernoulli_distribution make_dependent(0.4);
  for (int t = 0; t < 1000; ++t) {
    const int rows = size(rng), cols = size(rng);
    IntMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = entry(rng);
    if (rows > 1 && make_dependent(rng)) {
      // Force a dependency so rank-deficient inputs are well represented.
      const int c1 = entry(rng), c2 = entry(rng);
      for (int j = 0; j < cols; ++j) m(rows - 1, j) = c1 * m(0, j) + c2 * m(rows > 2 ? 1 : 0, j);
    }
    oracle::Mat f(rows, std::vector<long double>(cols));
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) f[i][j] = m(i, j);
    EXPECT_EQ(exact_rank(m), oracle::float_rank(f));
  }
}

TEST(ExactSolveInSpan, ReturnsExactSolutionOrNothing) {
  const IntMatrix a{{2, 1}, {3, 1}};
  auto x = exact_solve_in_span(a, std::vector<long long>{1, 1});
  ASSERT_TRUE(x.has_value());
  EXPECT_EQ((*x)[0], Rational(0));
  EXPECT_EQ((*x)[1], Rational(1));

  const IntMatrix dep{{1, 2}, {2, 4}};
  EXPECT_FALSE(exact_solve_in_span(dep, std::vector<long long>{1, 0}).has_value());
  auto y = exact_solve_in_span(dep, std::vector<long long>{3, 6});
  ASSERT_TRUE(y.has_value());
  EXPECT_EQ((*y)[0] + 2 * (*y)[1], Rational(3));

  const IntMatrix thirds{{3, 0}, {0, 7}};
  auto z = exact_solve_in_span(thirds, std::vector<long long>{1, 2});
  ASSERT_TRUE(z.has_value());
  EXPECT_EQ((*z)[0], Rational(1, 3));
  EXPECT_EQ((*z)[1], Rational(2, 7));
}

TEST(ExactSolveInSpan, RandomConsistentSystemsVerifyExactly) {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> entry(-9, 9);
  for (int t = 0; t < 300; ++t) {
    const int rows = 1 + t % 5, cols = 1 + (t / 5) % 5;
    IntMatrix a(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) a(i, j) = entry(rng);
    std::vector<long long> b(rows, 0);
    std::vector<long long> xs(cols);
    for (auto& v : xs) v = entry(rng);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) b[i] += a(i, j) * xs[j];
    auto x = exact_solve_in_span(a, b);
    ASSERT_TRUE(x.has_value());
    for (int i = 0; i < rows; ++i) {
      Rational s = 0;
      for (int j = 0; j < cols; ++j) s += (*x)[j] * a(i, j);
      EXPECT_EQ(s, Rational(b[i]));
    }
  }
}
