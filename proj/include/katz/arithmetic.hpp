#pragma once

// Exact arithmetic in Z/p^e and on truncated q-expansions over Z/p^e.

#include <gmpxx.h>

#include <algorithm>
#include <compare>
#include <cstddef>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "katz/errors.hpp"

namespace katz {

inline bool is_prime(unsigned long n) {
  if (n < 2) return false;
  for (unsigned long d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

/// Exponent of p in n (n != 0).
inline int ordp(long n, unsigned long p) {
  if (n == 0) throw std::domain_error("ordp of zero");
  unsigned long m = n < 0 ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
  int v = 0;
  while (m % p == 0) {
    m /= p;
    ++v;
  }
  return v;
}

namespace detail {

inline void reduce(mpz_class& x, const mpz_class& modulus) {
  mpz_mod(x.get_mpz_t(), x.get_mpz_t(), modulus.get_mpz_t());
}

/// Exponent of p in x, capped at `cap`; zero maps to `cap`.
inline int valuation(const mpz_class& x, unsigned long p, int cap) {
  if (sgn(x) == 0) return cap;
  mpz_class rest;
  mpz_class prime(p);
  auto v = static_cast<int>(mpz_remove(rest.get_mpz_t(), x.get_mpz_t(), prime.get_mpz_t()));
  return std::min(v, cap);
}

/// Cauchy product of a and b truncated to n terms. A null modulus keeps exact integers.
inline std::vector<mpz_class> mul_trunc(std::span<const mpz_class> a, std::span<const mpz_class> b,
                                        std::size_t n, const mpz_class* modulus) {
  std::vector<mpz_class> out(n);
  const std::size_t na = std::min(a.size(), n);
  for (std::size_t i = 0; i < na; ++i) {
    if (sgn(a[i]) == 0) continue;
    const std::size_t lim = std::min(b.size(), n - i);
    for (std::size_t j = 0; j < lim; ++j) {
      mpz_addmul(out[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
  }
  if (modulus != nullptr) {
    for (auto& c : out) reduce(c, *modulus);
  }
  return out;
}

}  // namespace detail

/// The coefficient ring Z/p^e. Cheap to copy; the power table is shared.
class RingSpec {
 public:
  RingSpec(unsigned long p, int e) {
    if (p < 5 || !is_prime(p)) {
      throw std::invalid_argument("p must be a prime >= 5, got " + std::to_string(p));
    }
    if (e < 1) throw std::invalid_argument("precision exponent must be >= 1");
    auto data = std::make_shared<Data>();
    data->p = p;
    data->e = e;
    data->powers.reserve(static_cast<std::size_t>(e) + 1);
    mpz_class acc = 1;
    for (int k = 0; k <= e; ++k) {
      data->powers.push_back(acc);
      acc *= p;
    }
    data_ = std::move(data);
  }

  unsigned long p() const { return data_->p; }
  int e() const { return data_->e; }
  const mpz_class& modulus() const { return data_->powers.back(); }
  /// p^k for 0 <= k <= e.
  const mpz_class& power(int k) const { return data_->powers.at(static_cast<std::size_t>(k)); }

  /// Same prime, different precision.
  RingSpec with_precision(int e) const { return e == this->e() ? *this : RingSpec(p(), e); }

  friend bool operator==(const RingSpec& a, const RingSpec& b) {
    return a.p() == b.p() && a.e() == b.e();
  }

 private:
  struct Data {
    unsigned long p = 0;
    int e = 0;
    std::vector<mpz_class> powers;
  };
  std::shared_ptr<const Data> data_;
};

/// A p-adic valuation seen through precision e: either a finite v < e, or "at least e".
class CappedVal {
 public:
  static CappedVal finite(int v, int cap) {
    if (v < 0 || v >= cap) throw std::invalid_argument("finite valuation must lie in [0, cap)");
    return CappedVal(v, cap);
  }
  static CappedVal at_least(int cap) { return CappedVal(cap, cap); }

  bool is_finite() const { return value_ < cap_; }
  /// The finite value, or the cap for AtLeastE.
  int value() const { return value_; }
  int cap() const { return cap_; }

  friend bool operator==(const CappedVal& a, const CappedVal& b) {
    return a.value_ == b.value_ && a.is_finite() == b.is_finite();
  }
  friend std::strong_ordering operator<=>(const CappedVal& a, const CappedVal& b) {
    return a.value_ <=> b.value_;
  }
  friend std::ostream& operator<<(std::ostream& os, const CappedVal& v) {
    if (v.is_finite()) return os << v.value_;
    return os << ">=" << v.cap_;
  }

 private:
  CappedVal(int v, int cap) : value_(v), cap_(cap) {}
  int value_;
  int cap_;
};

inline CappedVal capped_valuation(const mpz_class& x, const RingSpec& ring) {
  int v = detail::valuation(x, ring.p(), ring.e());
  return v < ring.e() ? CappedVal::finite(v, ring.e()) : CappedVal::at_least(ring.e());
}

/// An element of Z/p^e, stored as its canonical representative in [0, p^e).
class Residue {
 public:
  Residue(RingSpec ring, mpz_class value) : ring_(std::move(ring)), value_(std::move(value)) {
    detail::reduce(value_, ring_.modulus());
  }
  Residue(RingSpec ring, long value) : Residue(std::move(ring), mpz_class(value)) {}

  const RingSpec& ring() const { return ring_; }
  const mpz_class& value() const { return value_; }

  bool is_unit() const { return mpz_divisible_ui_p(value_.get_mpz_t(), ring_.p()) == 0; }

  Residue inverse() const {
    if (!is_unit()) throw std::domain_error("residue is not a unit mod p");
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), value_.get_mpz_t(), ring_.modulus().get_mpz_t());
    return Residue(ring_, inv);
  }

  Residue pow(unsigned long exponent) const {
    mpz_class r;
    mpz_powm_ui(r.get_mpz_t(), value_.get_mpz_t(), exponent, ring_.modulus().get_mpz_t());
    return Residue(ring_, r);
  }

  Residue operator-() const { return Residue(ring_, -value_); }
  friend Residue operator+(const Residue& a, const Residue& b) {
    check(a, b);
    return Residue(a.ring_, a.value_ + b.value_);
  }
  friend Residue operator-(const Residue& a, const Residue& b) {
    check(a, b);
    return Residue(a.ring_, a.value_ - b.value_);
  }
  friend Residue operator*(const Residue& a, const Residue& b) {
    check(a, b);
    return Residue(a.ring_, a.value_ * b.value_);
  }
  friend bool operator==(const Residue& a, const Residue& b) {
    return a.ring_ == b.ring_ && a.value_ == b.value_;
  }

 private:
  static void check(const Residue& a, const Residue& b) {
    if (!(a.ring_ == b.ring_)) throw MismatchError("residues over different rings");
  }
  RingSpec ring_;
  mpz_class value_;
};

inline CappedVal residue_val(const Residue& x) { return capped_valuation(x.value(), x.ring()); }

/// A q-expansion over Z/p^e truncated to the coefficients of q^0 ... q^{N-1}.
class QSeries {
 public:
  QSeries(RingSpec ring, std::size_t n) : ring_(std::move(ring)), coeffs_(n) {}

  QSeries(RingSpec ring, std::vector<mpz_class> coeffs)
      : ring_(std::move(ring)), coeffs_(std::move(coeffs)) {
    for (auto& c : coeffs_) detail::reduce(c, ring_.modulus());
  }

  static QSeries one(const RingSpec& ring, std::size_t n) {
    QSeries s(ring, n);
    if (n > 0) s.coeffs_[0] = 1;
    return s;
  }

  template <typename Int>
  static QSeries from_integers(const RingSpec& ring, std::initializer_list<Int> values,
                               std::size_t n) {
    std::vector<mpz_class> c(n);
    std::size_t k = 0;
    for (auto v : values) {
      if (k >= n) break;
      c[k++] = mpz_class(static_cast<long>(v));
    }
    return QSeries(ring, std::move(c));
  }

  const RingSpec& ring() const { return ring_; }
  std::size_t size() const { return coeffs_.size(); }
  const mpz_class& coeff(std::size_t n) const { return coeffs_.at(n); }
  Residue residue(std::size_t n) const { return Residue(ring_, coeffs_.at(n)); }
  std::span<const mpz_class> coeffs() const { return coeffs_; }

  void set(std::size_t n, mpz_class value) {
    detail::reduce(value, ring_.modulus());
    coeffs_.at(n) = std::move(value);
  }

  /// Drop (or zero-pad) to n coefficients.
  QSeries truncated(std::size_t n) const {
    std::vector<mpz_class> c(n);
    std::copy_n(coeffs_.begin(), std::min(n, coeffs_.size()), c.begin());
    return QSeries(ring_, std::move(c));
  }

  /// Reduce coefficients mod p^e for e no larger than the current precision.
  QSeries reduced(int e) const {
    if (e > ring_.e()) throw std::invalid_argument("cannot raise precision by reduction");
    return QSeries(ring_.with_precision(e), coeffs_);
  }

  friend QSeries operator+(const QSeries& a, const QSeries& b) {
    check(a, b);
    std::vector<mpz_class> c(a.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeffs_[k] + b.coeffs_[k];
    return QSeries(a.ring_, std::move(c));
  }
  friend QSeries operator-(const QSeries& a, const QSeries& b) {
    check(a, b);
    std::vector<mpz_class> c(a.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeffs_[k] - b.coeffs_[k];
    return QSeries(a.ring_, std::move(c));
  }
  friend QSeries operator*(const mpz_class& scalar, const QSeries& f) {
    std::vector<mpz_class> c(f.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = scalar * f.coeffs_[k];
    return QSeries(f.ring_, std::move(c));
  }
  friend QSeries operator*(const Residue& scalar, const QSeries& f) {
    if (!(scalar.ring() == f.ring_)) throw MismatchError("scalar over a different ring");
    return scalar.value() * f;
  }
  friend bool operator==(const QSeries& a, const QSeries& b) {
    return a.ring_ == b.ring_ && a.coeffs_ == b.coeffs_;
  }

  static void check(const QSeries& a, const QSeries& b) {
    if (!(a.ring_ == b.ring_)) throw MismatchError("q-series over different rings");
    if (a.size() != b.size()) {
      throw MismatchError("q-series truncated at different orders (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
    }
  }

 private:
  RingSpec ring_;
  std::vector<mpz_class> coeffs_;
};

/// Minimum coefficient valuation; AtLeastE iff the series vanishes mod p^e.
inline CappedVal series_val(const QSeries& f) {
  int v = f.ring().e();
  for (const auto& c : f.coeffs()) {
    v = std::min(v, detail::valuation(c, f.ring().p(), f.ring().e()));
    if (v == 0) break;
  }
  return v < f.ring().e() ? CappedVal::finite(v, f.ring().e()) : CappedVal::at_least(f.ring().e());
}

inline QSeries series_mul(const QSeries& f, const QSeries& g) {
  QSeries::check(f, g);
  return QSeries(f.ring(), detail::mul_trunc(f.coeffs(), g.coeffs(), f.size(), &f.ring().modulus()));
}

inline QSeries operator*(const QSeries& f, const QSeries& g) { return series_mul(f, g); }

inline QSeries series_pow(const QSeries& f, unsigned long exponent) {
  QSeries result = QSeries::one(f.ring(), f.size());
  QSeries base = f;
  while (exponent > 0) {
    if (exponent & 1U) result = result * base;
    exponent >>= 1U;
    if (exponent > 0) base = base * base;
  }
  return result;
}

/// Multiplicative inverse via b_k = -a_0^{-1} sum_{i=1}^{k} a_i b_{k-i}.
inline QSeries series_inverse(const QSeries& f) {
  const auto n = f.size();
  if (n == 0) return f;
  const Residue a0 = f.residue(0);
  if (!a0.is_unit()) throw std::domain_error("series_inverse: constant term is not a unit");
  const mpz_class& m = f.ring().modulus();
  const mpz_class a0_inv = a0.inverse().value();
  std::vector<mpz_class> b(n);
  b[0] = a0_inv;
  mpz_class acc;
  for (std::size_t k = 1; k < n; ++k) {
    acc = 0;
    for (std::size_t i = 1; i <= k; ++i) {
      mpz_addmul(acc.get_mpz_t(), f.coeff(i).get_mpz_t(), b[k - i].get_mpz_t());
    }
    acc = -acc * a0_inv;
    detail::reduce(acc, m);
    b[k] = acc;
  }
  return QSeries(f.ring(), std::move(b));
}

/// Frobenius q -> q^p; exponents at or beyond N are dropped.
inline QSeries v_operator(const QSeries& f) {
  const auto p = f.ring().p();
  QSeries out(f.ring(), f.size());
  for (std::size_t n = 0; n * p < f.size(); ++n) out.set(n * p, f.coeff(n));
  return out;
}

/// mpq -> Z/p^e; throws if the denominator is divisible by p.
inline Residue rational_to_residue(const mpq_class& q, const RingSpec& ring) {
  mpz_class den = q.get_den();
  if (mpz_divisible_ui_p(den.get_mpz_t(), ring.p()) != 0) {
    throw std::domain_error("rational is not p-integral");
  }
  mpz_class inv;
  mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), ring.modulus().get_mpz_t());
  return Residue(ring, mpz_class(q.get_num()) * inv);
}

}  // namespace katz
