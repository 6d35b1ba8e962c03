#pragma once

// Partial Katz expansions: psi_n sends a series mod (q^N, p^C) to (b_0, ..., b_n)
// with b_i in B_i, and phi_n maps back via sum b_i E_{p-1}^{-i}.

#include <gmpxx.h>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "katz/arithmetic.hpp"
#include "katz/katz_basis.hpp"

namespace katz {

struct KatzComponent {
  long i = 0;
  BasisRange range;
  /// Coordinates over g_{i,j} for j in range, in increasing j.
  std::vector<mpz_class> coords;
  /// b_i = sum_j coords[j] g_{i,j}.
  QSeries series;
};

struct KatzTuple {
  unsigned long p = 0;
  long n = 0;
  int e = 0;
  std::vector<KatzComponent> components;

  const KatzComponent& component(long i) const { return components.at(static_cast<std::size_t>(i)); }

  /// All coordinates concatenated in j order.
  std::vector<mpz_class> flat() const {
    std::vector<mpz_class> x;
    for (const auto& c : components) x.insert(x.end(), c.coords.begin(), c.coords.end());
    return x;
  }
};

/// Solves M x = rhs for the first `count` unknowns. M has unit diagonal, so no division occurs.
inline std::vector<mpz_class> forward_substitute(const BasisMatrix& m, std::span<const mpz_class> rhs,
                                                 std::size_t count) {
  if (count > m.size() || rhs.size() < count) throw std::invalid_argument("forward_substitute: size");
  const mpz_class& mod = m.ring().modulus();
  std::vector<mpz_class> x(count);
  mpz_class acc;
  for (std::size_t row = 0; row < count; ++row) {
    if (m.entry(row, row) != 1) throw std::logic_error("basis matrix diagonal entry is not 1");
    acc = rhs[row];
    for (std::size_t col = 0; col < row; ++col) {
      mpz_submul(acc.get_mpz_t(), m.entry(row, col).get_mpz_t(), x[col].get_mpz_t());
    }
    detail::reduce(acc, mod);
    x[row] = acc;
  }
  return x;
}

/// Groups a coordinate vector of length N into the n+1 components.
inline KatzTuple tuple_from_coords(const BasisMatrix& m, std::span<const mpz_class> x) {
  if (x.size() != m.size()) throw MismatchError("coordinate vector length differs from N");
  KatzTuple t{m.p(), m.n(), m.e(), {}};
  for (long i = 0; i <= m.n(); ++i) {
    KatzComponent c{i, basis_range(m.p(), i), {}, QSeries(m.ring(), m.size())};
    for (long j = c.range.first; j < c.range.last; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      c.coords.push_back(x[ju]);
      c.series = c.series + x[ju] * m.form(ju).series;
    }
    t.components.push_back(std::move(c));
  }
  return t;
}

inline void check_expansion_input(const BasisMatrix& m, const QSeries& f) {
  if (f.ring().p() != m.p() || f.ring().e() != m.e()) {
    throw MismatchError("series precision p^" + std::to_string(f.ring().e()) +
                        " does not match required p^" + std::to_string(m.e()));
  }
  if (f.size() != m.size()) {
    throw MismatchError("series has " + std::to_string(f.size()) +
                        " coefficients; required N = d_{n(p-1)} = " + std::to_string(m.size()));
  }
}

/// Katz expansion algorithm, step 4: solve M x = B and group x per B_i.
inline KatzTuple psi(const BasisMatrix& m, const QSeries& f) {
  check_expansion_input(m, f);
  return tuple_from_coords(m, forward_substitute(m, f.coeffs(), m.size()));
}

inline KatzTuple psi(unsigned long p, long n, int precision, const QSeries& f) {
  return psi(*cached_matrix(p, n, precision), f);
}

/// sum_{i=0}^{n} b_i E_{p-1}^{-i} mod (q^N, p^C), with b_i rebuilt from the coordinates.
inline QSeries phi(const BasisMatrix& m, const KatzTuple& t) {
  if (t.p != m.p() || t.n != m.n() || t.e != m.e()) throw MismatchError("phi: tuple built for another (p, n, C)");
  if (t.components.size() != static_cast<std::size_t>(m.n() + 1)) {
    throw MismatchError("phi: expected n+1 components");
  }
  std::vector<QSeries> parts;
  for (const auto& c : t.components) {
    const BasisRange range = basis_range(m.p(), c.i);
    if (c.coords.size() != static_cast<std::size_t>(range.size())) {
      throw MismatchError("phi: component " + std::to_string(c.i) + " has " +
                          std::to_string(c.coords.size()) + " coordinates, expected " +
                          std::to_string(range.size()));
    }
    QSeries b(m.ring(), m.size());
    for (long j = range.first; j < range.last; ++j) {
      b = b + c.coords[static_cast<std::size_t>(j - range.first)] * m.form(static_cast<std::size_t>(j)).series;
    }
    parts.push_back(std::move(b));
  }
  QSeries acc = parts.back();
  for (auto k = static_cast<long>(parts.size()) - 2; k >= 0; --k) {
    acc = acc * m.e_inv() + parts[static_cast<std::size_t>(k)];
  }
  return acc;
}

inline QSeries phi(unsigned long p, long n, int precision, const KatzTuple& t) {
  return phi(*cached_matrix(p, n, precision), t);
}

}  // namespace katz
