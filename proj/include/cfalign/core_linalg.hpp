#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cfalign/channel.hpp"
#include "cfalign/errors.hpp"
#include "cfalign/matrix.hpp"

namespace cfalign {

enum class GramSource { plain, effective };

// Gram matrix of the compute-and-forward lattice. The quadratic form a^T G a
// is the effective noise variance of coefficient vector a, and `snr` is the
// threshold below which a vector yields a positive computation rate.
struct GramMatrix {
  RealMatrix entries;
  GramSource source = GramSource::plain;
  double snr = 1.0;

  std::size_t dim() const noexcept { return entries.rows(); }

  template <typename Int>
  double quadratic(std::span<const Int> a) const {
    const std::size_t k = dim();
    if (a.size() != k) throw InvalidArgument("coefficient length does not match Gram dimension");
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (a[i] == 0) continue;
      double row = 0.0;
      for (std::size_t j = 0; j < k; ++j) row += entries(i, j) * static_cast<double>(a[j]);
      s += static_cast<double>(a[i]) * row;
    }
    return s;
  }

  double quadratic(const std::vector<long long>& a) const {
    return quadratic(std::span<const long long>(a));
  }
};

// G = SNR (B - SNR B g g^T B / (1 + SNR g^T B g)). With B = I this is the
// inverse of (SNR^-1 I + h h^T).
inline GramMatrix gram(const ChannelSpec& ch) {
  const std::size_t k = ch.users();
  const double snr = ch.snr();
  const auto g = ch.gains();
  const auto w = ch.weights();
  const double denom = 1.0 + snr * ch.weighted_energy();
  GramMatrix out{RealMatrix(k, k, 0.0),
                 ch.is_effective() ? GramSource::effective : GramSource::plain, snr};
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double bgi = w[i] * g[i];
      const double bgj = w[j] * g[j];
      double v = -snr * bgi * bgj / denom;
      if (i == j) v += w[i];
      out.entries(i, j) = snr * v;
    }
  }
  // Enforce exact symmetry so downstream Cholesky sees a symmetric input.
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) out.entries(j, i) = out.entries(i, j);
  return out;
}

inline GramMatrix gram_plain(std::span<const double> h, double snr) {
  return gram(ChannelSpec::plain(std::vector<double>(h.begin(), h.end()), snr));
}

inline GramMatrix gram_effective(std::span<const double> g, std::span<const double> weights,
                                 double snr) {
  return gram(ChannelSpec::effective(std::vector<double>(g.begin(), g.end()),
                                     std::vector<double>(weights.begin(), weights.end()), snr));
}

// Lower-triangular R with R R^T = M.
inline RealMatrix cholesky(const RealMatrix& m) {
  const std::size_t n = m.rows();
  if (m.cols() != n) throw InvalidArgument("cholesky needs a square matrix");
  RealMatrix r(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= r(j, k) * r(j, k);
    if (!(d > 0.0)) throw NotPositiveDefinite("nonpositive pivot in Cholesky factorization");
    r(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= r(i, k) * r(j, k);
      r(i, j) = s / r(j, j);
    }
  }
  return r;
}

inline RealMatrix cholesky(const GramMatrix& g) { return cholesky(g.entries); }

// log2 det G = L log2 SNR + log2 det B - log2(1 + SNR g^T B g).
inline double sylvester_logdet(const ChannelSpec& ch) {
  return static_cast<double>(ch.users()) * std::log2(ch.snr()) + ch.log2_det_weights() -
         std::log2(1.0 + ch.snr() * ch.weighted_energy());
}

namespace detail {

// Fraction-free (Bareiss) row echelon reduction in place. Returns the pivot
// columns in order; every division performed is exact.
inline std::vector<std::size_t> bareiss_echelon(BigIntMatrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  std::vector<std::size_t> pivots;
  BigInt prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m(p, c) == 0) ++p;
    if (p == rows) continue;
    if (p != r)
      for (std::size_t j = 0; j < cols; ++j) std::swap(m(p, j), m(r, j));
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j)
        m(i, j) = (m(r, c) * m(i, j) - m(i, c) * m(r, j)) / prev;
      m(i, c) = 0;
    }
    prev = m(r, c);
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace detail

template <typename Int>
std::size_t exact_rank(const Matrix<Int>& m) {
  BigIntMatrix work = convert<BigInt>(m);
  return detail::bareiss_echelon(work).size();
}

// Exact rational solution x of A x = b, or nullopt when b is outside the
// column span of A. Free variables are set to zero.
template <typename Int>
std::optional<std::vector<Rational>> exact_solve_in_span(const Matrix<Int>& a,
                                                         std::span<const Int> b) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  if (b.size() != rows) throw InvalidArgument("right-hand side length mismatch");
  RationalMatrix aug(rows, cols + 1, Rational(0));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) aug(i, j) = Rational(a(i, j));
    aug(i, cols) = Rational(b[i]);
  }
  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && aug(p, c) == 0) ++p;
    if (p == rows) continue;
    if (p != r)
      for (std::size_t j = 0; j <= cols; ++j) std::swap(aug(p, j), aug(r, j));
    const Rational inv = Rational(1) / aug(r, c);
    for (std::size_t j = c; j <= cols; ++j) aug(r, j) *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || aug(i, c) == 0) continue;
      const Rational f = aug(i, c);
      for (std::size_t j = c; j <= cols; ++j) aug(i, j) -= f * aug(r, j);
    }
    pivot_cols.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i)
    if (aug(i, cols) != 0) return std::nullopt;
  std::vector<Rational> x(cols, Rational(0));
  for (std::size_t i = 0; i < pivot_cols.size(); ++i) x[pivot_cols[i]] = aug(i, cols);
  return x;
}

template <typename Int>
std::optional<std::vector<Rational>> exact_solve_in_span(const Matrix<Int>& a,
                                                         const std::vector<Int>& b) {
  return exact_solve_in_span(a, std::span<const Int>(b));
}

}  // namespace cfalign
