#pragma once

// Recovering the valuations nu(b_{r,j}) of the formal Katz expansion from Katz
// expansions at lambda classical weights, via Vandermonde systems over Z/p^lambda.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "katz/arithmetic.hpp"
#include "katz/eis_family.hpp"
#include "katz/errors.hpp"
#include "katz/katz_basis.hpp"
#include "katz/katz_expand.hpp"

namespace katz {

/// The classical weight x -> x^{s(p-1)} with coordinate w = (p+1)^k - 1.
struct WeightSpec {
  unsigned long s = 0;
  unsigned long k = 0;
  Residue w;
};

/// The first `count` positive integers prime to p.
inline std::vector<unsigned long> canonical_s_values(unsigned long p, std::size_t count) {
  std::vector<unsigned long> out;
  for (unsigned long s = 1; out.size() < count; ++s) {
    if (s % p != 0) out.push_back(s);
  }
  return out;
}

inline std::vector<WeightSpec> weights_from_s(unsigned long p, std::span<const unsigned long> s_values,
                                              int precision) {
  const RingSpec ring(p, precision);
  std::set<unsigned long> seen;
  std::vector<WeightSpec> out;
  for (unsigned long s : s_values) {
    if (s == 0 || s % p == 0) {
      throw std::invalid_argument("invalid weight s = " + std::to_string(s) + ": must be >= 1 and prime to p");
    }
    if (!seen.insert(s).second) throw std::invalid_argument("degenerate weights: duplicate s = " + std::to_string(s));
    const unsigned long k = s * (p - 1);
    out.push_back({s, k, Residue(ring, p + 1).pow(k) - Residue(ring, 1)});
  }
  return out;
}

inline std::vector<WeightSpec> weight_list(unsigned long p, int lambda) {
  if (lambda < 1) throw std::invalid_argument("weight_list: lambda must be >= 1");
  const auto s = canonical_s_values(p, static_cast<std::size_t>(lambda));
  return weights_from_s(p, s, lambda);
}

/// nu_p((p+1)^k - 1) computed at precision e; always nu_p(k) + 1.
inline CappedVal nu_w(unsigned long p, unsigned long k, int e) {
  if (k == 0) throw std::invalid_argument("nu_w: k must be >= 1");
  const int expected = ordp(static_cast<long>(k), p) + 1;
  if (e <= expected) {
    throw std::invalid_argument("nu_w: precision p^" + std::to_string(e) + " cannot certify valuation " +
                                std::to_string(expected));
  }
  const RingSpec ring(p, e);
  const CappedVal v = residue_val(Residue(ring, p + 1).pow(k) - Residue(ring, 1));
  if (!(v == CappedVal::finite(expected, e))) throw std::logic_error("nu_w disagrees with nu_p(k) + 1");
  return v;
}

/// f(n) = sum_{i>=1} floor((n-1) / ((p-1) p^{i-1})).
inline long f_bound(unsigned long p, long n) {
  if (n < 1) throw std::invalid_argument("f_bound: n must be >= 1");
  long total = 0;
  for (unsigned long d = p - 1; d <= static_cast<unsigned long>(n - 1); d *= p) {
    total += (n - 1) / static_cast<long>(d);
  }
  return total;
}

/// The lambda x lambda Vandermonde matrix V[i][j] = w_i^j over Z/p^lambda, diagonalized
/// as D = R V B with R, B invertible, which yields the kernel of V and particular solutions.
class VandermondeSystem {
 public:
  using Matrix = std::vector<std::vector<mpz_class>>;

  static VandermondeSystem build(unsigned long p, std::vector<WeightSpec> weights) {
    const auto lambda = static_cast<int>(weights.size());
    if (lambda < 1) throw std::invalid_argument("build_system: need at least one weight");
    VandermondeSystem sys(p, lambda);
    std::vector<unsigned long> s_values;
    for (const auto& w : weights) s_values.push_back(w.s);
    sys.weights_ = weights_from_s(p, s_values, lambda);
    const auto n = static_cast<std::size_t>(lambda);
    const mpz_class& mod = sys.ring_.modulus();
    sys.v_.assign(n, std::vector<mpz_class>(n));
    for (std::size_t i = 0; i < n; ++i) {
      mpz_class acc = 1;
      for (std::size_t j = 0; j < n; ++j) {
        sys.v_[i][j] = acc;
        acc *= sys.weights_[i].w.value();
        detail::reduce(acc, mod);
      }
    }
    sys.diagonalize();
    return sys;
  }

  unsigned long p() const { return ring_.p(); }
  int lambda() const { return ring_.e(); }
  const RingSpec& ring() const { return ring_; }
  const std::vector<WeightSpec>& weights() const { return weights_; }
  const Matrix& matrix() const { return v_; }
  const Matrix& kernel_gens() const { return kernel_; }
  /// gamma[j]: least valuation of component j (the coefficient of w^j) over the kernel.
  const std::vector<CappedVal>& gamma() const { return gamma_; }

  std::vector<mpz_class> apply(std::span<const mpz_class> x) const {
    const auto n = v_.size();
    if (x.size() != n) throw MismatchError("apply: vector length differs from lambda");
    std::vector<mpz_class> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) mpz_addmul(out[i].get_mpz_t(), v_[i][j].get_mpz_t(), x[j].get_mpz_t());
      detail::reduce(out[i], ring_.modulus());
    }
    return out;
  }

  /// A particular solution of V x = rhs mod p^lambda; unique up to the kernel.
  std::vector<mpz_class> solve(std::span<const mpz_class> rhs) const {
    const auto n = v_.size();
    if (rhs.size() != n) throw MismatchError("solve: right-hand side length differs from lambda");
    const mpz_class& mod = ring_.modulus();
    std::vector<mpz_class> y(n);
    mpz_class t;
    for (std::size_t k = 0; k < n; ++k) {
      t = 0;
      for (std::size_t c = 0; c < n; ++c) mpz_addmul(t.get_mpz_t(), row_ops_[k][c].get_mpz_t(), rhs[c].get_mpz_t());
      detail::reduce(t, mod);
      const int v = diag_val_[k];
      const int tv = detail::valuation(t, p(), lambda());
      if (tv < v) {
        throw UnsolvableSystemError("Vandermonde system has no solution mod " + std::to_string(p()) + "^" +
                                    std::to_string(lambda()) + " (pivot " + std::to_string(k) + ")");
      }
      if (v >= lambda()) continue;
      mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), ring_.power(v).get_mpz_t());
      y[k] = t * diag_unit_inv_[k];
      detail::reduce(y[k], mod);
    }
    std::vector<mpz_class> x(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) mpz_addmul(x[r].get_mpz_t(), col_ops_[r][c].get_mpz_t(), y[c].get_mpz_t());
      detail::reduce(x[r], mod);
    }
    return x;
  }

 private:
  VandermondeSystem(unsigned long p, int lambda) : ring_(p, lambda) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, std::vector<mpz_class>(n));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
  }

  void diagonalize() {
    const auto n = v_.size();
    const int lambda = this->lambda();
    const mpz_class& mod = ring_.modulus();
    Matrix d = v_;
    row_ops_ = identity(n);
    col_ops_ = identity(n);
    diag_val_.assign(n, lambda);
    diag_unit_inv_.assign(n, mpz_class(0));
    mpz_class factor;
    for (std::size_t k = 0; k < n; ++k) {
      // Minimal-valuation pivot in the trailing block; first in row-major order.
      int best = lambda;
      std::size_t pr = k;
      std::size_t pc = k;
      for (std::size_t i = k; i < n && best > 0; ++i) {
        for (std::size_t j = k; j < n; ++j) {
          const int v = detail::valuation(d[i][j], p(), lambda);
          if (v < best) {
            best = v;
            pr = i;
            pc = j;
            if (v == 0) break;
          }
        }
      }
      if (best >= lambda) break;
      std::swap(d[k], d[pr]);
      std::swap(row_ops_[k], row_ops_[pr]);
      for (auto& row : d) std::swap(row[k], row[pc]);
      for (auto& row : col_ops_) std::swap(row[k], row[pc]);

      mpz_class unit;
      mpz_divexact(unit.get_mpz_t(), d[k][k].get_mpz_t(), ring_.power(best).get_mpz_t());
      mpz_class unit_inv;
      mpz_invert(unit_inv.get_mpz_t(), unit.get_mpz_t(), mod.get_mpz_t());
      diag_val_[k] = best;
      diag_unit_inv_[k] = unit_inv;

      for (std::size_t i = k + 1; i < n; ++i) {
        if (sgn(d[i][k]) == 0) continue;
        mpz_divexact(factor.get_mpz_t(), d[i][k].get_mpz_t(), ring_.power(best).get_mpz_t());
        factor *= unit_inv;
        detail::reduce(factor, mod);
        for (std::size_t c = 0; c < n; ++c) {
          mpz_submul(d[i][c].get_mpz_t(), factor.get_mpz_t(), d[k][c].get_mpz_t());
          detail::reduce(d[i][c], mod);
          mpz_submul(row_ops_[i][c].get_mpz_t(), factor.get_mpz_t(), row_ops_[k][c].get_mpz_t());
          detail::reduce(row_ops_[i][c], mod);
        }
      }
      for (std::size_t j = k + 1; j < n; ++j) {
        if (sgn(d[k][j]) == 0) continue;
        mpz_divexact(factor.get_mpz_t(), d[k][j].get_mpz_t(), ring_.power(best).get_mpz_t());
        factor *= unit_inv;
        detail::reduce(factor, mod);
        for (std::size_t r = 0; r < n; ++r) {
          mpz_submul(d[r][j].get_mpz_t(), factor.get_mpz_t(), d[r][k].get_mpz_t());
          detail::reduce(d[r][j], mod);
          mpz_submul(col_ops_[r][j].get_mpz_t(), factor.get_mpz_t(), col_ops_[r][k].get_mpz_t());
          detail::reduce(col_ops_[r][j], mod);
        }
      }
    }

    // Kernel of D is generated by p^{lambda - v_k} e_k; map back through B.
    kernel_.clear();
    for (std::size_t k = 0; k < n; ++k) {
      if (diag_val_[k] == 0) continue;
      const mpz_class& scale = ring_.power(lambda - std::min(diag_val_[k], lambda));
      std::vector<mpz_class> g(n);
      for (std::size_t r = 0; r < n; ++r) {
        g[r] = col_ops_[r][k] * scale;
        detail::reduce(g[r], mod);
      }
      kernel_.push_back(std::move(g));
    }
    gamma_.clear();
    for (std::size_t j = 0; j < n; ++j) {
      int v = lambda;
      for (const auto& g : kernel_) v = std::min(v, detail::valuation(g[j], p(), lambda));
      gamma_.push_back(v < lambda ? CappedVal::finite(v, lambda) : CappedVal::at_least(lambda));
    }
  }

  RingSpec ring_;
  std::vector<WeightSpec> weights_;
  Matrix v_;
  Matrix row_ops_;
  Matrix col_ops_;
  std::vector<int> diag_val_;
  std::vector<mpz_class> diag_unit_inv_;
  Matrix kernel_;
  std::vector<CappedVal> gamma_;
};

inline VandermondeSystem build_system(unsigned long p, int lambda) {
  return VandermondeSystem::build(p, weight_list(p, lambda));
}

/// Outcome for one (r, j).
struct ValStatus {
  enum class Kind { exact, inconclusive, zero_column };

  Kind kind = Kind::inconclusive;
  /// The valuation for exact entries; unused otherwise.
  int value = 0;
  CappedVal gamma = CappedVal::at_least(0);

  static ValStatus exact(int v, CappedVal gamma) { return {Kind::exact, v, gamma}; }
  static ValStatus inconclusive(CappedVal gamma) { return {Kind::inconclusive, 0, gamma}; }
  /// B_r is empty, so b_{r,j} vanishes identically and nothing was solved.
  static ValStatus zero_column() { return {Kind::zero_column, 0, CappedVal::at_least(0)}; }

  bool is_exact() const { return kind == Kind::exact; }

  friend bool operator==(const ValStatus& a, const ValStatus& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Kind::zero_column) return true;
    return a.gamma == b.gamma && (a.kind != Kind::exact || a.value == b.value);
  }
};

struct ValuationRow {
  unsigned long p = 0;
  long r = 0;
  int lambda = 0;
  /// entries[j] for 0 <= j <= j_max.
  std::vector<ValStatus> entries;
};

/// theta[mu][l] = a_mu(beta_r^{(l)}) for mu < d_{r(p-1)}, where beta_r^{(l)} = sum_j x^{(l)}_j g_j
/// over j in the B_r range. `coords[l]` is the Katz coordinate vector of weight l (any length
/// covering B_r, any precision >= the target ring).
inline std::vector<std::vector<mpz_class>> beta_coefficients(const BasisMatrix& basis, long r,
                                                             std::span<const std::vector<mpz_class>> coords,
                                                             const RingSpec& ring) {
  const unsigned long p = basis.p();
  const auto n_r = static_cast<std::size_t>(dim_mk(r * static_cast<long>(p - 1)));
  const BasisRange range = basis_range(p, r);
  if (basis.size() < n_r || static_cast<std::size_t>(range.last) > basis.size()) {
    throw MismatchError("beta_coefficients: basis too small for row " + std::to_string(r));
  }
  if (basis.e() < ring.e()) throw MismatchError("beta_coefficients: basis precision below target");
  std::vector<std::vector<mpz_class>> theta(n_r, std::vector<mpz_class>(coords.size()));
  for (std::size_t l = 0; l < coords.size(); ++l) {
    if (coords[l].size() < static_cast<std::size_t>(range.last)) {
      throw MismatchError("beta_coefficients: coordinate vector too short");
    }
    for (long j = range.first; j < range.last; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const auto& g = basis.form(ju).series;
      for (std::size_t mu = ju; mu < n_r; ++mu) {
        mpz_addmul(theta[mu][l].get_mpz_t(), coords[l][ju].get_mpz_t(), g.coeff(mu).get_mpz_t());
      }
    }
    for (std::size_t mu = 0; mu < n_r; ++mu) detail::reduce(theta[mu][l], ring.modulus());
  }
  return theta;
}

inline std::vector<std::vector<mpz_class>> solve_all(const VandermondeSystem& sys,
                                                     const std::vector<std::vector<mpz_class>>& thetas) {
  std::vector<std::vector<mpz_class>> out;
  out.reserve(thetas.size());
  for (const auto& t : thetas) out.push_back(sys.solve(t));
  return out;
}

/// alpha_j = min_mu nu((x_mu)_j); exact iff alpha_j < gamma_j.
inline ValuationRow classify_row(const VandermondeSystem& sys, long r,
                                 const std::vector<std::vector<mpz_class>>& solutions, long j_max) {
  if (j_max < 0 || j_max >= sys.lambda()) throw std::invalid_argument("classify_row: need 0 <= j_max < lambda");
  ValuationRow row{sys.p(), r, sys.lambda(), {}};
  for (long j = 0; j <= j_max; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    int alpha = sys.lambda();
    for (const auto& x : solutions) alpha = std::min(alpha, detail::valuation(x[ju], sys.p(), sys.lambda()));
    const CappedVal& gamma = sys.gamma()[ju];
    row.entries.push_back(alpha < gamma.value() ? ValStatus::exact(alpha, gamma) : ValStatus::inconclusive(gamma));
  }
  return row;
}

/// Every intermediate of one row, for inspection and tests.
struct RowSolution {
  VandermondeSystem system;
  std::vector<std::vector<mpz_class>> thetas;
  std::vector<std::vector<mpz_class>> solutions;
  ValuationRow row;
};

inline long default_j_max(long r, int lambda) { return std::min<long>(r, lambda - 1); }

/// The full pipeline for row r: E*/V(E*) at each weight, Katz expansion to the r-th term at
/// precision p^lambda (lambda = number of weights), one Vandermonde solve per q-coefficient.
inline RowSolution solve_row_detailed(unsigned long p, long r, std::span<const unsigned long> s_values,
                                      long j_max = -1) {
  if (r < 0) throw std::invalid_argument("solve_row: r must be >= 0");
  const auto lambda = static_cast<int>(s_values.size());
  if (lambda < 1) throw std::invalid_argument("solve_row: need at least one weight");
  if (j_max < 0) j_max = default_j_max(r, lambda);
  if (j_max > lambda - 1) throw std::invalid_argument("solve_row: j_max must be <= lambda - 1");
  auto sys = VandermondeSystem::build(p, weights_from_s(p, s_values, lambda));
  const auto matrix = cached_matrix(p, r, lambda);
  std::vector<std::vector<mpz_class>> coords;
  for (const auto& w : sys.weights()) {
    const QSeries ratio = eis_ratio_by_s(p, w.s, lambda, matrix->size());
    coords.push_back(forward_substitute(*matrix, ratio.coeffs(), matrix->size()));
  }
  auto thetas = beta_coefficients(*matrix, r, coords, sys.ring());
  auto solutions = solve_all(sys, thetas);
  auto row = classify_row(sys, r, solutions, j_max);
  return {std::move(sys), std::move(thetas), std::move(solutions), std::move(row)};
}

inline ValuationRow solve_row(unsigned long p, long r, std::span<const unsigned long> s_values, long j_max = -1) {
  return solve_row_detailed(p, r, s_values, j_max).row;
}

/// Row r with the canonical weights s = first lambda integers prime to p.
inline ValuationRow solve_row(unsigned long p, long r, int lambda, long j_max = -1) {
  if (lambda < 1) throw std::invalid_argument("solve_row: lambda must be >= 1");
  const auto s = canonical_s_values(p, static_cast<std::size_t>(lambda));
  return solve_row(p, r, s, j_max);
}

}  // namespace katz
