#pragma once

// The splitting of M_{i(p-1)} spanned by the forms g_{i,j} = Delta^j E_4^a E_6^eps,
// the sets B_i, and the unit lower-triangular matrix of g_j / E_{p-1}^{i_j}.

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "katz/arithmetic.hpp"
#include "katz/classical_forms.hpp"

namespace katz {

/// Dimension of M_n(SL_2(Z)); zero for negative n.
inline long dim_mk(long n) {
  if (n < 0) return 0;
  return n / 12 + (n % 12 == 2 ? 0 : 1);
}

/// 0 if k = 0 mod 4, 1 if k = 2 mod 4.
inline int eps(long k) {
  if (k % 2 != 0) throw std::invalid_argument("eps: weight must be even");
  return ((k % 4) + 4) % 4 == 0 ? 0 : 1;
}

/// Half-open range [first, last) of j with g_{i,j} in B_i.
struct BasisRange {
  long first = 0;
  long last = 0;
  long size() const { return last > first ? last - first : 0; }
  bool empty() const { return size() == 0; }
  bool contains(long j) const { return first <= j && j < last; }
};

inline BasisRange basis_range(unsigned long p, long i) {
  if (i < 0) throw std::invalid_argument("basis_range: i must be >= 0");
  const auto w = static_cast<long>(p - 1);
  return {dim_mk((i - 1) * w), dim_mk(i * w)};
}

/// The unique i with d_{(i-1)(p-1)} <= j <= d_{i(p-1)} - 1.
inline long i_of_j(unsigned long p, long j) {
  if (j < 0) throw std::invalid_argument("i_of_j: j must be >= 0");
  long found = -1;
  // d_{i(p-1)} >= i(p-1)/12, so the scan can stop once the lower end passes j.
  for (long i = 0;; ++i) {
    const BasisRange range = basis_range(p, i);
    if (range.contains(j)) {
      if (found >= 0) throw std::logic_error("i_of_j: j lies in two basis ranges");
      found = i;
    }
    if (range.first > j) break;
  }
  if (found < 0) throw std::logic_error("i_of_j: no basis range contains j");
  return found;
}

struct BasisElement {
  long i = 0;
  long j = 0;
  long a = 0;
  int eps = 0;
  QSeries series;
};

namespace detail {

/// Shares powers of E_4, E_6, Delta and E_{p-1}^{-1} across many basis forms.
class FormBuilder {
 public:
  FormBuilder(const RingSpec& ring, std::size_t n)
      : ring_(ring),
        n_(n),
        e4_(e4(ring, n)),
        e6_(e6(ring, n)),
        delta_{QSeries::one(ring, n), delta(ring, n)},
        e4_pows_{QSeries::one(ring, n), e4_},
        einv_pows_{QSeries::one(ring, n)} {}

  const RingSpec& ring() const { return ring_; }
  std::size_t size() const { return n_; }

  const QSeries& delta_pow(long j) { return grow(delta_, j, delta_[1]); }
  const QSeries& e4_pow(long a) { return grow(e4_pows_, a, e4_); }
  const QSeries& einv_pow(long i) {
    if (einv_pows_.size() == 1) einv_pows_.push_back(series_inverse(e_p_minus_1(ring_, n_)));
    return grow(einv_pows_, i, einv_pows_[1]);
  }

  BasisElement form(unsigned long p, long i, long j) {
    if (i < 0 || j < 0) throw std::domain_error("g_form: negative index");
    if (i == 0) {
      if (j != 0) throw std::domain_error("g_form: B_0 only contains j = 0");
      return {0, 0, 0, 0, QSeries::one(ring_, n_)};
    }
    const long weight = i * static_cast<long>(p - 1);
    const int e = eps(weight);
    const long num = weight - 12 * j - 6 * e;
    if (num < 0 || num % 4 != 0) {
      throw std::domain_error("g_form: exponent a = " + std::to_string(num) +
                              "/4 is negative or not integral (i=" + std::to_string(i) +
                              ", j=" + std::to_string(j) + ")");
    }
    const long a = num / 4;
    QSeries s = delta_pow(j) * e4_pow(a);
    if (e == 1) s = s * e6_;
    return {i, j, a, e, std::move(s)};
  }

 private:
  // `base` is copied: it may alias an element of `pows`.
  static const QSeries& grow(std::vector<QSeries>& pows, long k, QSeries base) {
    while (static_cast<long>(pows.size()) <= k) pows.push_back(pows.back() * base);
    return pows[static_cast<std::size_t>(k)];
  }

  RingSpec ring_;
  std::size_t n_;
  QSeries e4_;
  QSeries e6_;
  std::vector<QSeries> delta_;
  std::vector<QSeries> e4_pows_;
  std::vector<QSeries> einv_pows_;
};

}  // namespace detail

/// g_{i,j} = Delta^j E_4^a E_6^{eps(i(p-1))} truncated at q^N; g_{0,0} = 1.
inline BasisElement g_form(unsigned long p, long i, long j, const RingSpec& ring, std::size_t n) {
  if (ring.p() != p) throw MismatchError("g_form: ring prime differs from p");
  detail::FormBuilder builder(ring, n);
  return builder.form(p, i, j);
}

/// B_i in increasing j. Empty for some i depending on p.
inline std::vector<BasisElement> basis_set(unsigned long p, long i, const RingSpec& ring,
                                           std::size_t n) {
  if (ring.p() != p) throw MismatchError("basis_set: ring prime differs from p");
  detail::FormBuilder builder(ring, n);
  std::vector<BasisElement> out;
  const BasisRange range = basis_range(p, i);
  for (long j = range.first; j < range.last; ++j) out.push_back(builder.form(p, i, j));
  return out;
}

/// N x N matrix whose column j holds the coefficients of g_j E_{p-1}^{-i_j}
/// (row index = q-exponent). Unit lower triangular by construction.
class BasisMatrix {
 public:
  unsigned long p() const { return p_; }
  long n() const { return n_; }
  int e() const { return ring_.e(); }
  const RingSpec& ring() const { return ring_; }
  std::size_t size() const { return col_to_i_.size(); }

  long col_to_i(std::size_t j) const { return col_to_i_.at(j); }
  const std::vector<long>& col_to_i() const { return col_to_i_; }
  const BasisElement& form(std::size_t j) const { return forms_.at(j); }
  const QSeries& column(std::size_t j) const { return columns_.at(j); }
  const mpz_class& entry(std::size_t row, std::size_t col) const { return columns_.at(col).coeff(row); }
  const QSeries& e_inv() const { return e_inv_; }

  /// The matrix for a smaller n' and precision e' (top-left block, reduced).
  BasisMatrix restricted(long n, int e) const {
    if (n > n_ || e > this->e()) throw std::invalid_argument("restricted: can only shrink");
    const auto size = static_cast<std::size_t>(dim_mk(n * static_cast<long>(p_ - 1)));
    BasisMatrix out;
    out.p_ = p_;
    out.n_ = n;
    out.ring_ = ring_.with_precision(e);
    out.e_inv_ = e_inv_.truncated(size).reduced(e);
    for (std::size_t j = 0; j < size; ++j) {
      out.col_to_i_.push_back(col_to_i_[j]);
      BasisElement el = forms_[j];
      el.series = el.series.truncated(size).reduced(e);
      out.forms_.push_back(std::move(el));
      out.columns_.push_back(columns_[j].truncated(size).reduced(e));
    }
    return out;
  }

  friend BasisMatrix build_matrix(unsigned long p, long n, const RingSpec& ring);

 private:
  BasisMatrix() : ring_(5, 1), e_inv_(ring_, 0) {}

  unsigned long p_ = 0;
  long n_ = 0;
  RingSpec ring_;
  std::vector<long> col_to_i_;
  std::vector<BasisElement> forms_;
  std::vector<QSeries> columns_;
  QSeries e_inv_;
};

/// Steps 1-3 of the Katz expansion algorithm for (p, n) at precision ring.e().
inline BasisMatrix build_matrix(unsigned long p, long n, const RingSpec& ring) {
  if (ring.p() != p) throw MismatchError("build_matrix: ring prime differs from p");
  if (n < 0) throw std::invalid_argument("build_matrix: n must be >= 0");
  const auto size = static_cast<std::size_t>(dim_mk(n * static_cast<long>(p - 1)));
  if (size == 0) throw std::invalid_argument("build_matrix: N = d_{n(p-1)} must be >= 1");
  detail::FormBuilder builder(ring, size);
  BasisMatrix m;
  m.p_ = p;
  m.n_ = n;
  m.ring_ = ring;
  m.e_inv_ = builder.einv_pow(1);
  long i = 0;
  for (std::size_t j = 0; j < size; ++j) {
    while (!basis_range(p, i).contains(static_cast<long>(j))) ++i;
    m.col_to_i_.push_back(i);
    BasisElement g = builder.form(p, i, static_cast<long>(j));
    m.columns_.push_back(g.series * builder.einv_pow(i));
    m.forms_.push_back(std::move(g));
  }
  return m;
}

/// Process-wide cache of basis matrices keyed by (p, n, e).
inline std::shared_ptr<const BasisMatrix> cached_matrix(unsigned long p, long n, int e) {
  using Key = std::tuple<unsigned long, long, int>;
  static std::shared_mutex mutex;
  static std::map<Key, std::shared_ptr<const BasisMatrix>> cache;
  const Key key{p, n, e};
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const BasisMatrix>(build_matrix(p, n, RingSpec(p, e)));
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(key, std::move(built));
  return it->second;
}

}  // namespace katz
