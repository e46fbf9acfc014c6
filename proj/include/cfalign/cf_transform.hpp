#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <vector>

#include <boost/integer/common_factor_rt.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "cfalign/channel.hpp"
#include "cfalign/compute_rates.hpp"
#include "cfalign/core_linalg.hpp"
#include "cfalign/errors.hpp"
#include "cfalign/lattice.hpp"
#include "cfalign/matrix.hpp"

namespace cfalign {

struct CfTransform {
  IntMatrix A;
  std::vector<ComputationResult> results;  // rates nonincreasing
  ChannelSpec channel;
  ReductionMethod method = ReductionMethod::exhaustive;
  bool fell_back = false;
};

inline CfTransform transform(const ChannelSpec& ch, SearchMethod method = SearchMethod::automatic,
                             std::size_t budget = kDefaultNodeBudget) {
  const OptimalSet set = find_optimal_set(gram(ch), method, budget);
  const std::size_t k = ch.users();
  CfTransform t{IntMatrix(k, k, 0), {}, ch, set.method, set.fell_back};
  for (std::size_t i = 0; i < set.vectors.size(); ++i) {
    for (std::size_t j = 0; j < k; ++j) t.A(i, j) = set.vectors[i][j];
    t.results.push_back(comp_rate(ch, set.vectors[i]));
  }
  return t;
}

struct SumRateBounds {
  double lower;
  double sum;
  double upper;
  bool certified;  // false when the transform came from LLL, so the lower bound is not guaranteed
};

inline SumRateBounds sum_rate_bounds(const CfTransform& t) {
  const auto l = static_cast<double>(t.channel.users());
  const double capacity_term =
      0.5 * (std::log2(candidate_bound(t.channel)) - t.channel.log2_det_weights());
  double sum = 0.0;
  for (const auto& r : t.results) sum += r.r_comp;
  return {capacity_term - 0.5 * l * std::log2(l), sum, capacity_term,
          t.method == ReductionMethod::exhaustive};
}

// L A = A_tilde where A_tilde is upper triangular after permuting its columns
// by pi. Indices are zero-based: row i has zeros at columns pi[0..i-1].
struct PseudoTriangularization {
  RationalMatrix L;
  std::vector<std::size_t> pi;
  RationalMatrix A_tilde;
};

// Permutations are enumerated exhaustively up to this order; larger inputs
// get a single greedy triangularization.
inline constexpr std::size_t kMaxEnumeratedOrder = 8;

namespace detail {

// Solves for row i of L under permutation pi. Returns the multipliers of
// rows 0..i-1, or nullopt when -a_i restricted to columns pi[0..i-1] is
// outside the span of the earlier rows restricted to those columns.
inline std::optional<std::vector<Rational>> solve_row(const IntMatrix& a, const std::vector<std::size_t>& pi,
                                                      std::size_t i) {
  if (i == 0) return std::vector<Rational>{};
  IntMatrix m(i, i);
  std::vector<long long> rhs(i);
  for (std::size_t j = 0; j < i; ++j) {
    for (std::size_t r = 0; r < i; ++r) m(j, r) = a(r, pi[j]);
    rhs[j] = -a(i, pi[j]);
  }
  BigIntMatrix echelon = convert<BigInt>(m);
  const std::vector<std::size_t> cols = bareiss_echelon(echelon);
  const std::size_t u = cols.size();

  // Normal equations on the independent columns: (M_U^T M_U) x = M_U^T rhs.
  BigIntMatrix normal(u, u, BigInt(0));
  std::vector<BigInt> nrhs(u, BigInt(0));
  for (std::size_t p = 0; p < u; ++p) {
    for (std::size_t q = 0; q < u; ++q)
      for (std::size_t j = 0; j < i; ++j) normal(p, q) += BigInt(m(j, cols[p])) * m(j, cols[q]);
    for (std::size_t j = 0; j < i; ++j) nrhs[p] += BigInt(m(j, cols[p])) * rhs[j];
  }
  auto x = exact_solve_in_span(normal, std::span<const BigInt>(nrhs));
  if (!x) return std::nullopt;

  std::vector<Rational> ell(i, Rational(0));
  for (std::size_t p = 0; p < u; ++p) ell[cols[p]] = (*x)[p];
  for (std::size_t j = 0; j < i; ++j) {
    Rational s = 0;
    for (std::size_t r = 0; r < i; ++r) s += ell[r] * m(j, r);
    if (s != rhs[j]) return std::nullopt;
  }
  return ell;
}

inline PseudoTriangularization assemble(const IntMatrix& a, std::vector<std::size_t> pi,
                                        const std::vector<std::vector<Rational>>& rows) {
  const std::size_t k = a.rows();
  RationalMatrix l = RationalMatrix::identity(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t r = 0; r < rows[i].size(); ++r) l(i, r) = rows[i][r];
  RationalMatrix at = multiply(l, convert<Rational>(a));
  return {std::move(l), std::move(pi), std::move(at)};
}

inline void require_full_rank(const IntMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw InvalidArgument("coefficient matrix must be square");
  if (exact_rank(a) != a.rows()) throw InvalidArgument("coefficient matrix is singular");
}

}  // namespace detail

// Tries one permutation; nullopt when it is infeasible.
inline std::optional<PseudoTriangularization> pseudo_triangularize_with(const IntMatrix& a,
                                                                        const std::vector<std::size_t>& pi) {
  detail::require_full_rank(a);
  const std::size_t k = a.rows();
  std::vector<std::vector<Rational>> rows;
  for (std::size_t i = 0; i < k; ++i) {
    auto row = detail::solve_row(a, pi, i);
    if (!row) return std::nullopt;
    rows.push_back(std::move(*row));
  }
  return detail::assemble(a, pi, rows);
}

// First row whose span condition fails under pi, or nullopt if pi is feasible.
inline std::optional<std::size_t> infeasibility_certificate(const IntMatrix& a,
                                                            const std::vector<std::size_t>& pi) {
  for (std::size_t i = 1; i < a.rows(); ++i)
    if (!detail::solve_row(a, pi, i)) return i;
  return std::nullopt;
}

// Gaussian elimination without row swaps, pivoting on the lowest-index
// nonzero column left in each row. Always succeeds for a full-rank matrix.
inline PseudoTriangularization greedy_triangularization(const IntMatrix& a) {
  detail::require_full_rank(a);
  const std::size_t k = a.rows();
  RationalMatrix l = RationalMatrix::identity(k);
  RationalMatrix at = convert<Rational>(a);
  std::vector<std::size_t> pi;
  std::vector<bool> used(k, false);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t m = 0; m < i; ++m) {
      const Rational f = at(i, pi[m]) / at(m, pi[m]);
      if (f == 0) continue;
      for (std::size_t c = 0; c < k; ++c) {
        at(i, c) -= f * at(m, c);
        l(i, c) -= f * l(m, c);
      }
    }
    std::size_t c = 0;
    while (used[c] || at(i, c) == 0) ++c;
    used[c] = true;
    pi.push_back(c);
  }
  return {std::move(l), std::move(pi), std::move(at)};
}

// Every feasible (L, pi) in lexicographic order of pi.
inline std::vector<PseudoTriangularization> pseudo_triangularize(const IntMatrix& a) {
  detail::require_full_rank(a);
  const std::size_t k = a.rows();
  if (k > kMaxEnumeratedOrder) return {greedy_triangularization(a)};
  std::vector<std::size_t> pi(k);
  std::iota(pi.begin(), pi.end(), 0);
  std::vector<PseudoTriangularization> out;
  do {
    if (auto pt = pseudo_triangularize_with(a, pi)) out.push_back(std::move(*pt));
  } while (std::next_permutation(pi.begin(), pi.end()));
  return out;
}

struct ModPLift {
  BigInt p;
  BigIntMatrix L_p;        // unit lower triangular, entries in [0, p)
  BigIntMatrix A_tilde_p;  // [L_p A] mod p
  std::vector<BigInt> row_denominators;
  BigInt sufficient_prime_bound;  // K (K!)^2 (K a_max)^(2K) a_max
};

namespace detail {

inline BigInt mod_floor(const BigInt& x, const BigInt& p) {
  BigInt r = x % p;
  if (r < 0) r += p;
  return r;
}

inline bool is_prime(const BigInt& n) {
  if (n < 2) return false;
  for (BigInt d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline BigInt factorial(std::size_t n) {
  BigInt f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace detail

inline ModPLift mod_p_lift(const IntMatrix& a, const PseudoTriangularization& pt) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  const std::size_t k = a.rows();

  std::vector<BigInt> q(k, BigInt(1));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j <= i; ++j) q[i] = boost::integer::lcm(q[i], BigInt(denominator(pt.L(i, j))));
  BigIntMatrix l_int(k, k, BigInt(0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      l_int(i, j) = numerator(pt.L(i, j)) * (q[i] / denominator(pt.L(i, j)));

  long long a_max = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) a_max = std::max(a_max, std::llabs(a(i, j)));
  const BigInt kf = detail::factorial(k);
  const BigInt bound = BigInt(k) * kf * kf * boost::multiprecision::pow(BigInt(k) * a_max, static_cast<unsigned>(2 * k)) * a_max;

  const BigIntMatrix a_big = convert<BigInt>(a);
  for (BigInt p = 2;; ++p) {
    if (!detail::is_prime(p)) continue;
    if (std::any_of(q.begin(), q.end(), [&](const BigInt& qi) { return qi % p == 0; })) continue;
    BigIntMatrix lp(k, k, BigInt(0));
    for (std::size_t i = 0; i < k; ++i) {
      const BigInt inv = boost::multiprecision::powm(detail::mod_floor(q[i], p), p - 2, p);
      for (std::size_t j = 0; j <= i; ++j) lp(i, j) = detail::mod_floor(inv * l_int(i, j), p);
    }
    BigIntMatrix ap = multiply(lp, a_big);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) ap(i, j) = detail::mod_floor(ap(i, j), p);
    bool diagonal_ok = true;
    for (std::size_t i = 0; i < k && diagonal_ok; ++i) diagonal_ok = ap(i, pt.pi[i]) != 0;
    if (!diagonal_ok) continue;
    return {p, std::move(lp), std::move(ap), std::move(q), bound};
  }
}

// Rate of user pi[i] is the i-th computation rate.
inline std::vector<double> rate_allocation(const CfTransform& t, const PseudoTriangularization& pt) {
  const std::size_t k = t.results.size();
  if (pt.pi.size() != k) throw InvalidArgument("permutation size does not match transform");
  std::vector<double> rates(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) rates[pt.pi[i]] = t.results[i].r_comp;
  return rates;
}

}  // namespace cfalign
