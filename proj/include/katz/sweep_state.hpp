#pragma once

#include <gmpxx.h>

#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "katz/valuation_solver.hpp"

namespace katz {

/// num/den in lowest terms.
inline mpq_class make_ratio(long num, long den) {
  mpq_class q{mpz_class(num), mpz_class(den)};
  q.canonicalize();
  return q;
}

struct SweepEntry {
  long i = 0;
  long j = 0;
  /// Number of weights used for the row; the cap of `status.gamma`.
  int lambda = 0;
  ValStatus status;

  friend bool operator==(const SweepEntry& a, const SweepEntry& b) {
    return a.i == b.i && a.j == b.j && a.lambda == b.lambda && a.status == b.status;
  }
};

/// Persistent record of a d'_p sweep.
struct SweepState {
  unsigned long p = 0;
  int lambda_current = 0;
  long i_max = 0;
  std::vector<SweepEntry> entries;
  /// min over exact entries of (v + j) / i, starting from 1.
  mpq_class d_prime = 1;
  std::set<std::pair<long, long>> attained;
  std::set<long> completed_rows;
  /// Rows whose retry budget ran out with entries that could still matter.
  std::set<long> partial_rows;

  /// Distinct rows i at which d_prime is attained.
  std::vector<long> attained_rows() const {
    std::set<long> rows;
    for (const auto& [i, j] : attained) rows.insert(i);
    return {rows.begin(), rows.end()};
  }

  /// Rebuilds d_prime and attained from the entries (d_prime never exceeds 1).
  void recompute_minimum() {
    d_prime = 1;
    attained.clear();
    for (const auto& e : entries) {
      if (!e.status.is_exact() || e.i <= 0) continue;
      const mpq_class q = make_ratio(e.status.value + e.j, e.i);
      if (q < d_prime) {
        d_prime = q;
        attained.clear();
      }
      if (q == d_prime) attained.emplace(e.i, e.j);
    }
  }
};

/// "num/den" in lowest terms; the denominator is always printed.
inline std::string fraction_string(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

inline mpq_class parse_fraction(const std::string& text) {
  mpq_class q;
  if (text.empty() || q.set_str(text, 10) != 0) throw std::invalid_argument("not a rational: '" + text + "'");
  if (sgn(q.get_den()) == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
  q.canonicalize();
  return q;
}

}  // namespace katz
