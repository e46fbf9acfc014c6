#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "cfalign/channel.hpp"
#include "cfalign/core_linalg.hpp"
#include "cfalign/errors.hpp"
#include "cfalign/matrix.hpp"

namespace cfalign {

// Nonzero integer coefficient vector with its first nonzero entry positive.
// a and -a yield the same rate, so only the canonical one is kept.
class CoefficientVector {
 public:
  explicit CoefficientVector(std::vector<long long> entries) : entries_(std::move(entries)) {
    auto nz = std::find_if(entries_.begin(), entries_.end(), [](long long v) { return v != 0; });
    if (nz == entries_.end()) throw InvalidArgument("coefficient vector must be nonzero");
    if (*nz < 0)
      for (auto& v : entries_) v = -v;
  }

  static bool is_canonical(std::span<const long long> a) {
    for (long long v : a)
      if (v != 0) return v > 0;
    return false;
  }

  const std::vector<long long>& entries() const noexcept { return entries_; }
  std::span<const long long> span() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  long long operator[](std::size_t i) const { return entries_[i]; }

  auto operator<=>(const CoefficientVector&) const = default;

 private:
  std::vector<long long> entries_;
};

enum class ReductionMethod { exhaustive, lll };
enum class SearchMethod { exhaustive, lll, automatic };

constexpr std::string_view to_string(ReductionMethod m) {
  return m == ReductionMethod::exhaustive ? "exhaustive" : "lll";
}

inline constexpr std::size_t kDefaultNodeBudget = 10'000'000;
inline constexpr double kDefaultLllDelta = 0.99;

struct OptimalSet {
  std::vector<CoefficientVector> vectors;
  std::vector<double> norms;  // a^T G a, nondecreasing
  ReductionMethod method = ReductionMethod::exhaustive;
  std::size_t nodes_visited = 0;
  bool fell_back = false;  // automatic search exceeded its node budget
};

// 1 + SNR g^T B g. Only vectors inside this squared norm can have positive rate.
inline double candidate_bound(const ChannelSpec& ch) { return 1.0 + ch.snr() * ch.weighted_energy(); }

struct LllBasis {
  RealMatrix basis;  // reduced basis vectors as rows
  IntMatrix transform;  // reduced = transform * input
};

// Textbook LLL on the rows of `basis`. Gram-Schmidt data is recomputed from
// scratch after each update, which is cheap at the dimensions used here.
inline LllBasis lll_reduce_basis(const RealMatrix& basis, double delta = kDefaultLllDelta) {
  if (!(delta > 0.25 && delta <= 1.0)) throw InvalidArgument("LLL delta must lie in (1/4, 1]");
  const std::size_t n = basis.rows();
  const std::size_t dim = basis.cols();
  RealMatrix b = basis;
  IntMatrix u = IntMatrix::identity(n);

  RealMatrix bstar(n, dim, 0.0);
  RealMatrix mu(n, n, 0.0);
  std::vector<double> bnorm(n, 0.0);
  auto dot = [&](const RealMatrix& x, std::size_t i, const RealMatrix& y, std::size_t j) {
    double s = 0.0;
    for (std::size_t t = 0; t < dim; ++t) s += x(i, t) * y(j, t);
    return s;
  };
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, dot(b, i, b, i));
  auto gram_schmidt = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t t = 0; t < dim; ++t) bstar(i, t) = b(i, t);
      for (std::size_t j = 0; j < i; ++j) {
        mu(i, j) = dot(b, i, bstar, j) / bnorm[j];
        for (std::size_t t = 0; t < dim; ++t) bstar(i, t) -= mu(i, j) * bstar(j, t);
      }
      bnorm[i] = dot(bstar, i, bstar, i);
      if (!(bnorm[i] > 1e-24 * scale)) throw InvalidArgument("LLL input basis is rank deficient");
    }
  };
  auto add_row = [&](std::size_t k, std::size_t j, long long q) {
    for (std::size_t t = 0; t < dim; ++t) b(k, t) -= static_cast<double>(q) * b(j, t);
    for (std::size_t t = 0; t < n; ++t) u(k, t) -= q * u(j, t);
  };

  gram_schmidt();
  std::size_t k = 1;
  while (k < n) {
    for (std::size_t jj = k; jj-- > 0;) {
      if (std::abs(mu(k, jj)) > 0.5) {
        add_row(k, jj, std::llround(mu(k, jj)));
        gram_schmidt();
      }
    }
    if (bnorm[k] >= (delta - mu(k, k - 1) * mu(k, k - 1)) * bnorm[k - 1]) {
      ++k;
    } else {
      for (std::size_t t = 0; t < dim; ++t) std::swap(b(k, t), b(k - 1, t));
      for (std::size_t t = 0; t < n; ++t) std::swap(u(k, t), u(k - 1, t));
      gram_schmidt();
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
  return {std::move(b), std::move(u)};
}

namespace detail {

inline std::vector<long long> row_vector(const IntMatrix& m, std::size_t i) {
  auto r = m.row(i);
  return {r.begin(), r.end()};
}

// Sorts by norm, orders near-equal norms lexicographically, then keeps the
// first `count` vectors that raise the exact rank.
inline OptimalSet select_independent(std::vector<std::pair<double, CoefficientVector>> cands,
                                     std::size_t count) {
  std::sort(cands.begin(), cands.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first < y.first;
    return x.second < y.second;
  });
  for (std::size_t i = 0; i < cands.size();) {
    std::size_t j = i + 1;
    const double tol = 1e-12 * std::max(1.0, std::abs(cands[i].first));
    while (j < cands.size() && cands[j].first - cands[i].first <= tol) ++j;
    std::sort(cands.begin() + static_cast<std::ptrdiff_t>(i), cands.begin() + static_cast<std::ptrdiff_t>(j),
              [](const auto& x, const auto& y) { return x.second < y.second; });
    i = j;
  }

  OptimalSet out;
  const std::size_t k = cands.empty() ? 0 : cands.front().second.size();
  for (const auto& [norm, vec] : cands) {
    if (out.vectors.size() == count) break;
    IntMatrix trial(out.vectors.size() + 1, k);
    for (std::size_t r = 0; r < out.vectors.size(); ++r)
      for (std::size_t c = 0; c < k; ++c) trial(r, c) = out.vectors[r][c];
    for (std::size_t c = 0; c < k; ++c) trial(out.vectors.size(), c) = vec[c];
    if (exact_rank(trial) == out.vectors.size() + 1) {
      out.vectors.push_back(vec);
      out.norms.push_back(norm);
    }
  }
  return out;
}

class SphereSearch {
 public:
  SphereSearch(const RealMatrix& chol, double radius_sq, std::size_t budget)
      : r_(chol), limit_(radius_sq * (1.0 + 1e-9) + 1e-300), budget_(budget), a_(chol.rows(), 0) {}

  bool run() {
    if (!a_.empty()) descend(a_.size() - 1, 0.0);
    return !exceeded_;
  }

  std::size_t nodes() const noexcept { return nodes_; }
  std::vector<std::vector<long long>>& found() noexcept { return found_; }

 private:
  // ||R^T a||^2 is accumulated from the last coordinate down; the entry of
  // R^T at (level, j) is r_(j, level).
  void descend(std::size_t level, double partial) {
    double s = 0.0;
    for (std::size_t j = level + 1; j < a_.size(); ++j) s += r_(j, level) * static_cast<double>(a_[j]);
    const double diag = r_(level, level);
    const double center = -s / diag;
    const double rem = limit_ - partial;
    if (rem < 0.0) return;
    const double half = std::sqrt(rem) / diag;
    const auto lo = static_cast<long long>(std::ceil(center - half));
    const auto hi = static_cast<long long>(std::floor(center + half));
    for (long long x = lo; x <= hi; ++x) {
      if (++nodes_ > budget_) {
        exceeded_ = true;
        break;
      }
      a_[level] = x;
      const double t = diag * (static_cast<double>(x) - center);
      const double p = partial + t * t;
      if (p > limit_) continue;
      if (level == 0) {
        if (CoefficientVector::is_canonical(a_)) found_.push_back(a_);
      } else {
        descend(level - 1, p);
      }
      if (exceeded_) break;
    }
    a_[level] = 0;
  }

  const RealMatrix& r_;
  double limit_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
  bool exceeded_ = false;
  std::vector<long long> a_;
  std::vector<std::vector<long long>> found_;
};

}  // namespace detail

// All canonical nonzero integer vectors with a^T G a <= radius_sq, or nullopt
// once more than `budget` search nodes have been visited.
inline std::optional<std::vector<CoefficientVector>> enumerate_ball(const GramMatrix& g, double radius_sq,
                                                                    std::size_t budget = kDefaultNodeBudget) {
  const RealMatrix chol = cholesky(g);
  detail::SphereSearch search(chol, radius_sq, budget);
  if (!search.run()) return std::nullopt;
  std::vector<CoefficientVector> out;
  for (auto& a : search.found()) {
    if (g.quadratic(a) <= radius_sq) out.emplace_back(std::move(a));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Reduces the Cholesky basis of a Gram matrix and reports the reduced
// coordinate vectors sorted by norm.
inline OptimalSet lll_reduce(const RealMatrix& basis, double delta = kDefaultLllDelta) {
  const LllBasis red = lll_reduce_basis(basis, delta);
  const std::size_t n = basis.rows();
  std::vector<std::pair<double, CoefficientVector>> cands;
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    for (std::size_t t = 0; t < basis.cols(); ++t) norm += red.basis(i, t) * red.basis(i, t);
    cands.emplace_back(norm, CoefficientVector(detail::row_vector(red.transform, i)));
  }
  OptimalSet out = detail::select_independent(std::move(cands), n);
  out.method = ReductionMethod::lll;
  return out;
}

inline OptimalSet lll_reduce(const GramMatrix& g, double delta = kDefaultLllDelta) {
  OptimalSet out = lll_reduce(cholesky(g), delta);
  // Report norms through the Gram matrix so both methods share one yardstick.
  for (std::size_t i = 0; i < out.vectors.size(); ++i) out.norms[i] = g.quadratic(out.vectors[i].span());
  for (std::size_t i = 1; i < out.vectors.size(); ++i) {
    for (std::size_t j = i; j > 0 && out.norms[j] < out.norms[j - 1]; --j) {
      std::swap(out.norms[j], out.norms[j - 1]);
      std::swap(out.vectors[j], out.vectors[j - 1]);
    }
  }
  return out;
}

// Successive minima of the lattice with Gram matrix G: the first K linearly
// independent vectors in (norm, lexicographic) order.
//
// The search radius is the largest norm in an LLL-reduced basis. Those K
// vectors are independent, so the K-th minimum lies inside that radius and
// every vector the greedy selection could pick is enumerated.
inline std::optional<OptimalSet> successive_minima(const GramMatrix& g,
                                                   std::size_t budget = kDefaultNodeBudget) {
  const std::size_t k = g.dim();
  const RealMatrix chol = cholesky(g);
  const OptimalSet reduced = lll_reduce(g);
  const double radius_sq = reduced.norms.back() * (1.0 + 1e-9);

  detail::SphereSearch search(chol, radius_sq, budget);
  if (!search.run()) return std::nullopt;
  std::vector<std::pair<double, CoefficientVector>> cands;
  for (auto& a : search.found()) {
    const double norm = g.quadratic(a);
    if (norm <= radius_sq) cands.emplace_back(norm, CoefficientVector(std::move(a)));
  }
  OptimalSet out = detail::select_independent(std::move(cands), k);
  if (out.vectors.size() != k) {
    // Floating-point pruning lost a boundary vector; the reduced basis is the
    // best available independent set in that case.
    return reduced;
  }
  out.method = ReductionMethod::exhaustive;
  out.nodes_visited = search.nodes();
  return out;
}

inline OptimalSet find_optimal_set(const GramMatrix& g, SearchMethod method,
                                   std::size_t budget = kDefaultNodeBudget) {
  switch (method) {
    case SearchMethod::lll:
      return lll_reduce(g);
    case SearchMethod::exhaustive: {
      auto res = successive_minima(g, budget);
      if (!res) throw BudgetExceeded("lattice enumeration exceeded its node budget");
      return *std::move(res);
    }
    case SearchMethod::automatic:
      break;
  }
  if (auto res = successive_minima(g, budget)) return *std::move(res);
  OptimalSet out = lll_reduce(g);
  out.fell_back = true;
  return out;
}

}  // namespace cfalign
