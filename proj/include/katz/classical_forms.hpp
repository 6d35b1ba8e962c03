#pragma once

// q-expansions of level-1 forms: E_4, E_6, Delta, E_{p-1}, and the p-deprived
// Eisenstein series E*_k for weights k divisible by p-1.

#include <gmpxx.h>

#include <cstddef>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "katz/arithmetic.hpp"

namespace katz {

/// Largest Bernoulli index the memo table will grow to.
inline constexpr int kMaxBernoulliIndex = 20000;

/// sigma_m(n) = sum_{d | n} d^m, exact.
inline mpz_class sigma(unsigned long m, unsigned long n) {
  if (n == 0) throw std::invalid_argument("sigma: n must be >= 1");
  mpz_class total = 0;
  mpz_class term;
  for (unsigned long d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    mpz_ui_pow_ui(term.get_mpz_t(), d, m);
    total += term;
    const unsigned long e = n / d;
    if (e != d) {
      mpz_ui_pow_ui(term.get_mpz_t(), e, m);
      total += term;
    }
  }
  return total;
}

namespace detail {

/// sum_{d | n} d^m mod `modulus`, optionally skipping divisors divisible by `skip`.
inline mpz_class divisor_power_sum_mod(unsigned long m, unsigned long n, const mpz_class& modulus,
                                       unsigned long skip) {
  mpz_class total = 0;
  mpz_class base;
  mpz_class term;
  auto add = [&](unsigned long d) {
    if (skip != 0 && d % skip == 0) return;
    base = d;
    mpz_powm_ui(term.get_mpz_t(), base.get_mpz_t(), m, modulus.get_mpz_t());
    total += term;
  };
  for (unsigned long d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    add(d);
    if (n / d != d) add(n / d);
  }
  reduce(total, modulus);
  return total;
}

struct BernoulliTable {
  std::shared_mutex mutex;
  std::vector<mpq_class> values{mpq_class(1)};
};

inline BernoulliTable& bernoulli_table() {
  static BernoulliTable table;
  return table;
}

/// Exact E_4, E_6 and Delta as integer coefficient vectors of length n.
inline std::vector<mpz_class> eisenstein_integral(unsigned long weight, long scale, std::size_t n) {
  std::vector<mpz_class> c(n);
  if (n > 0) c[0] = 1;
  for (std::size_t k = 1; k < n; ++k) c[k] = scale * sigma(weight - 1, k);
  return c;
}

inline std::vector<mpz_class> delta_integral(std::size_t n) {
  const auto e4 = eisenstein_integral(4, 240, n);
  const auto e6 = eisenstein_integral(6, -504, n);
  const auto e4sq = mul_trunc(e4, e4, n, nullptr);
  const auto e4cube = mul_trunc(e4sq, e4, n, nullptr);
  const auto e6sq = mul_trunc(e6, e6, n, nullptr);
  std::vector<mpz_class> d(n);
  for (std::size_t k = 0; k < n; ++k) {
    mpz_class diff = e4cube[k] - e6sq[k];
    if (mpz_divisible_ui_p(diff.get_mpz_t(), 1728) == 0) {
      throw std::logic_error("E4^3 - E6^2 not divisible by 1728");
    }
    mpz_divexact_ui(d[k].get_mpz_t(), diff.get_mpz_t(), 1728);
  }
  return d;
}

}  // namespace detail

/// Sum over d | n with p not dividing d of d^m, reduced into `ring`.
inline Residue sigma_star(unsigned long p, unsigned long m, unsigned long n, const RingSpec& ring) {
  return Residue(ring, detail::divisor_power_sum_mod(m, n, ring.modulus(), p));
}

/// Bernoulli number B_k (B_1 = -1/2). Even indices come from the tangent numbers T_n via
/// B_{2n} = (-1)^{n-1} 2n T_n / (4^n (4^n - 1)), an integer-only O(n^2) recurrence. Memoized.
inline mpq_class bernoulli(int k) {
  if (k < 0) throw std::invalid_argument("bernoulli: negative index");
  if (k > kMaxBernoulliIndex) {
    throw std::out_of_range("bernoulli: index " + std::to_string(k) + " exceeds limit " +
                            std::to_string(kMaxBernoulliIndex));
  }
  auto& table = detail::bernoulli_table();
  {
    std::shared_lock lock(table.mutex);
    if (static_cast<std::size_t>(k) < table.values.size()) return table.values[static_cast<std::size_t>(k)];
  }
  std::unique_lock lock(table.mutex);
  auto& b = table.values;
  if (static_cast<std::size_t>(k) < b.size()) return b[static_cast<std::size_t>(k)];
  // The recurrence runs over the whole range, so grow geometrically.
  const auto limit = static_cast<std::size_t>(
      std::min(kMaxBernoulliIndex, std::max(k, 2 * static_cast<int>(b.size()))));
  const std::size_t n = limit / 2;
  std::vector<mpz_class> t(n + 1);
  if (n >= 1) t[1] = 1;
  for (std::size_t m = 2; m <= n; ++m) t[m] = static_cast<unsigned long>(m - 1) * t[m - 1];
  for (std::size_t m = 2; m <= n; ++m) {
    for (std::size_t j = m; j <= n; ++j) {
      t[j] = static_cast<unsigned long>(j - m) * t[j - 1] + static_cast<unsigned long>(j - m + 2) * t[j];
    }
  }
  std::vector<mpq_class> values(limit + 1);
  values[0] = 1;
  if (limit >= 1) values[1] = mpq_class(-1, 2);
  for (std::size_t m = 1; m <= n; ++m) {
    mpz_class four_m;
    mpz_ui_pow_ui(four_m.get_mpz_t(), 4, m);
    mpq_class bm{static_cast<unsigned long>(2 * m) * t[m], four_m * (four_m - 1)};
    bm.canonicalize();
    if (m % 2 == 0) bm = -bm;
    values[2 * m] = std::move(bm);
  }
  b = std::move(values);
  return b[static_cast<std::size_t>(k)];
}

/// E_4 = 1 + 240 sum sigma_3(n) q^n.
inline QSeries e4(const RingSpec& ring, std::size_t n) {
  return QSeries(ring, detail::eisenstein_integral(4, 240, n));
}

/// E_6 = 1 - 504 sum sigma_5(n) q^n.
inline QSeries e6(const RingSpec& ring, std::size_t n) {
  return QSeries(ring, detail::eisenstein_integral(6, -504, n));
}

/// Delta = (E_4^3 - E_6^2) / 1728, divided over Z before reduction.
inline QSeries delta(const RingSpec& ring, std::size_t n) {
  return QSeries(ring, detail::delta_integral(n));
}

/// E_{p-1} = 1 - (2(p-1)/B_{p-1}) sum sigma_{p-2}(n) q^n, normalized to constant term 1.
inline QSeries e_p_minus_1(const RingSpec& ring, std::size_t n) {
  const unsigned long p = ring.p();
  const auto k = static_cast<long>(p - 1);
  const mpq_class c = mpq_class(-2 * k) / bernoulli(static_cast<int>(k));
  const mpz_class cm = rational_to_residue(c, ring).value();
  std::vector<mpz_class> coeffs(n);
  if (n > 0) coeffs[0] = 1;
  for (std::size_t m = 1; m < n; ++m) {
    coeffs[m] = cm * detail::divisor_power_sum_mod(p - 2, m, ring.modulus(), 0);
  }
  return QSeries(ring, std::move(coeffs));
}

/// The scalar 2/zeta*(k) = -2k / ((1 - p^{k-1}) B_k) as an exact rational.
inline mpq_class eisenstein_star_constant(unsigned long p, unsigned long k) {
  if (k == 0 || k % (p - 1) != 0) {
    throw std::invalid_argument("weight must be a positive multiple of p-1");
  }
  mpz_class pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), p, k - 1);
  mpq_class c = mpq_class(-2 * static_cast<long>(k)) /
                (mpq_class(mpz_class(1) - pk) * bernoulli(static_cast<int>(k)));
  c.canonicalize();
  return c;
}

/// E*_k = 1 + c sum_{n>=1} (sum_{d|n, p!|d} d^{k-1}) q^n with c = 2/zeta*(k).
inline QSeries eisenstein_star(unsigned long p, unsigned long k, const RingSpec& ring, std::size_t n) {
  if (ring.p() != p) throw MismatchError("eisenstein_star: ring prime differs from p");
  const mpq_class c = eisenstein_star_constant(p, k);
  mpz_class den = c.get_den();
  if (mpz_divisible_ui_p(den.get_mpz_t(), p) != 0) {
    throw std::logic_error("eisenstein_star: constant is not p-integral");
  }
  const mpz_class cm = rational_to_residue(c, ring).value();
  std::vector<mpz_class> coeffs(n);
  if (n > 0) coeffs[0] = 1;
  for (std::size_t m = 1; m < n; ++m) {
    coeffs[m] = cm * detail::divisor_power_sum_mod(k - 1, m, ring.modulus(), p);
  }
  return QSeries(ring, std::move(coeffs));
}

}  // namespace katz
