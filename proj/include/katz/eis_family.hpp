#pragma once

#include <cstddef>
#include <stdexcept>

#include "katz/arithmetic.hpp"
#include "katz/classical_forms.hpp"

namespace katz {

/// E*_k / V(E*_k) mod (q^N, p^lambda) for k = s(p-1).
inline QSeries eis_ratio_by_s(unsigned long p, unsigned long s, int lambda, std::size_t n) {
  if (s == 0) throw std::invalid_argument("eis_ratio: s must be >= 1");
  const RingSpec ring(p, lambda);
  const QSeries estar = eisenstein_star(p, s * (p - 1), ring, n);
  return estar * series_inverse(v_operator(estar));
}

inline QSeries eis_ratio(unsigned long p, unsigned long k, int lambda, std::size_t n) {
  if (k == 0 || k % (p - 1) != 0) {
    throw std::invalid_argument("eis_ratio: weight must be a positive multiple of p-1");
  }
  return eis_ratio_by_s(p, k / (p - 1), lambda, n);
}

}  // namespace katz
