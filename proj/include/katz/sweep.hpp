#pragma once

// Sweeping rows i = 1..i_max to bound the overconvergence constant from above:
// d'_p = min (nu(b_{i,j}) + j) / i over the certified entries.

#include <gmpxx.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "katz/checkpoint.hpp"
#include "katz/eis_family.hpp"
#include "katz/katz_basis.hpp"
#include "katz/katz_expand.hpp"
#include "katz/sweep_state.hpp"
#include "katz/valuation_solver.hpp"

namespace katz {

/// The proven constant (2/3)(1 - p/(p-1)^2) / (p+1).
inline mpq_class c_p(unsigned long p) {
  const auto pl = static_cast<long>(p);
  mpq_class c = make_ratio(2, 3) * (1 - make_ratio(pl, (pl - 1) * (pl - 1))) * make_ratio(1, pl + 1);
  c.canonicalize();
  return c;
}

/// The expected limiting value (p-1) / (p(p+1)).
inline mpq_class d_p(unsigned long p) {
  const auto pl = static_cast<long>(p);
  return make_ratio(pl - 1, pl * (pl + 1));
}

/// Smallest n >= j_max + 1 whose canonical-weight kernel bound n - j_max - f(n) reaches target_gamma.
inline int lambda_for(unsigned long p, long target_gamma, long j_max) {
  if (target_gamma < 1) throw std::invalid_argument("lambda_for: target_gamma must be >= 1");
  if (j_max < 0) throw std::invalid_argument("lambda_for: j_max must be >= 0");
  for (long n = j_max + 1;; ++n) {
    if (n - j_max - f_bound(p, n) >= target_gamma) return static_cast<int>(n);
  }
}

/// KATZ_THREADS when set to a positive integer, otherwise the hardware concurrency.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("KATZ_THREADS"); env != nullptr) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

struct SweepOptions {
  std::optional<std::filesystem::path> checkpoint;
  /// 0 means default_thread_count().
  unsigned threads = 0;
  /// Stop after this many newly completed rows (negative: no limit). Simulates an interrupted run.
  long max_new_rows = -1;
  int initial_margin = 2;
  int max_retries = 3;
  std::function<void(const SweepState&, long)> on_row;
};

/// Katz coordinates of E*/V(E*) for the first `tier` canonical weights at precision p^tier,
/// truncated at d_{i_max(p-1)}. Rows and smaller precisions are slices of this data.
class SweepCache {
 public:
  SweepCache(unsigned long p, long i_max, unsigned threads) : p_(p), i_max_(i_max), threads_(std::max(1U, threads)) {}

  int tier() const { return tier_; }

  ValuationRow solve(long r, int lambda, long j_max) {
    if (lambda > tier_) rebuild(std::max(lambda, (tier_ * 3 / 2 + 7) / 8 * 8));
    const VandermondeSystem& sys = system(lambda);
    const std::span<const std::vector<mpz_class>> coords(coords_.data(), static_cast<std::size_t>(lambda));
    const auto thetas = beta_coefficients(*matrix_, r, coords, sys.ring());
    return classify_row(sys, r, solve_all(sys, thetas), j_max);
  }

 private:
  const VandermondeSystem& system(int lambda) {
    auto it = systems_.find(lambda);
    if (it == systems_.end()) it = systems_.emplace(lambda, build_system(p_, lambda)).first;
    return it->second;
  }

  void rebuild(int tier) {
    const auto s_values = canonical_s_values(p_, static_cast<std::size_t>(tier));
    // Fill the Bernoulli memo once, before the workers read it.
    bernoulli(static_cast<int>(s_values.back() * (p_ - 1)));
    matrix_ = std::make_shared<const BasisMatrix>(build_matrix(p_, i_max_, RingSpec(p_, tier)));
    const std::size_t n = matrix_->size();
    std::vector<std::vector<mpz_class>> coords(s_values.size());
    auto work = [&](std::size_t start) {
      for (std::size_t l = start; l < s_values.size(); l += threads_) {
        const QSeries ratio = eis_ratio_by_s(p_, s_values[l], tier, n);
        coords[l] = forward_substitute(*matrix_, ratio.coeffs(), n);
      }
    };
    {
      std::vector<std::jthread> pool;
      for (unsigned t = 1; t < threads_; ++t) pool.emplace_back(work, t);
      work(0);
    }
    coords_ = std::move(coords);
    tier_ = tier;
  }

  unsigned long p_;
  long i_max_;
  unsigned threads_;
  int tier_ = 0;
  std::shared_ptr<const BasisMatrix> matrix_;
  std::vector<std::vector<mpz_class>> coords_;
  std::map<int, VandermondeSystem> systems_;
};

namespace detail {

/// Entries that are inconclusive but whose lower bound gamma_j + j could still reach d'·i.
inline bool row_unresolved(const ValuationRow& row, long i, const mpq_class& d_prime) {
  for (std::size_t j = 1; j < row.entries.size(); ++j) {
    const auto& st = row.entries[j];
    if (st.kind != ValStatus::Kind::inconclusive) continue;
    if (mpq_class(st.gamma.value() + static_cast<long>(j)) <= d_prime * i) return true;
  }
  return false;
}

inline mpq_class row_minimum(const ValuationRow& row, long i, mpq_class current) {
  for (std::size_t j = 0; j < row.entries.size(); ++j) {
    const auto& st = row.entries[j];
    if (!st.is_exact()) continue;
    current = std::min(current, make_ratio(st.value + static_cast<long>(j), i));
  }
  current.canonicalize();
  return current;
}

}  // namespace detail

/// Runs rows 1..i_max in order, skipping rows already completed in `resume`.
///
/// Row i examines j <= min(i, ceil(d'·i)); larger j cannot lower the bound since
/// nu(b_{i,j}) >= 0. The number of weights is the least lambda whose kernel bound reaches
/// ceil(d'·i) + margin; if an inconclusive entry could still tie or beat d', the margin
/// doubles and the row is redone, up to max_retries times.
inline SweepState run_sweep(unsigned long p, long i_max, std::optional<SweepState> resume = std::nullopt,
                            const SweepOptions& options = {}) {
  if (i_max < 1) throw std::invalid_argument("run_sweep: i_max must be >= 1");
  (void)RingSpec(p, 1);  // validates p
  SweepState state;
  if (resume) {
    if (resume->p != p) {
      throw CheckpointError("checkpoint is for p = " + std::to_string(resume->p) + ", not " + std::to_string(p));
    }
    state = std::move(*resume);
  } else {
    state.p = p;
  }
  state.i_max = std::max(state.i_max, i_max);

  SweepCache cache(p, i_max, options.threads == 0 ? default_thread_count() : options.threads);
  long new_rows = 0;
  for (long i = 1; i <= i_max; ++i) {
    if (state.completed_rows.contains(i)) continue;
    if (options.max_new_rows >= 0 && new_rows >= options.max_new_rows) break;

    mpq_class bound = state.d_prime * i;
    mpz_class ceil_bound;
    mpz_cdiv_q(ceil_bound.get_mpz_t(), bound.get_num_mpz_t(), bound.get_den_mpz_t());
    const long j_cap = ceil_bound.get_si();
    const long j_max = std::min(i, j_cap);

    if (basis_range(p, i).empty()) {
      for (long j = 0; j <= j_max; ++j) state.entries.push_back({i, j, 0, ValStatus::zero_column()});
    } else {
      int margin = options.initial_margin;
      ValuationRow row;
      bool unresolved = true;
      for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
        const int lambda = lambda_for(p, j_cap + margin, j_max);
        row = cache.solve(i, lambda, j_max);
        state.lambda_current = lambda;
        unresolved = detail::row_unresolved(row, i, detail::row_minimum(row, i, state.d_prime));
        if (!unresolved) break;
        margin *= 2;
      }
      if (unresolved) state.partial_rows.insert(i);
      for (std::size_t j = 0; j < row.entries.size(); ++j) {
        state.entries.push_back({i, static_cast<long>(j), row.lambda, row.entries[j]});
      }
      const mpq_class updated = detail::row_minimum(row, i, state.d_prime);
      if (updated < state.d_prime) {
        state.d_prime = updated;
        state.attained.clear();
      }
      for (std::size_t j = 0; j < row.entries.size(); ++j) {
        const auto& st = row.entries[j];
        if (st.is_exact() && make_ratio(st.value + static_cast<long>(j), i) == state.d_prime) {
          state.attained.emplace(i, static_cast<long>(j));
        }
      }
    }
    state.completed_rows.insert(i);
    ++new_rows;
    if (options.checkpoint) save_checkpoint(state, *options.checkpoint);
    if (options.on_row) options.on_row(state, i);
  }
  return state;
}

struct AuditReport {
  /// Exact entries with v < c_p·i - j. Must be empty.
  std::vector<SweepEntry> below_c_p;
  /// Exact entries with v < d_p·i - j. Expected empty; reported, not enforced.
  std::vector<SweepEntry> below_d_p;
  /// Exact entries with v = d_p·i - j.
  std::vector<SweepEntry> equal_d_p;
};

inline AuditReport theorem_b_audit(const SweepState& state) {
  AuditReport report;
  if (state.p == 0) return report;
  const mpq_class cp = c_p(state.p);
  const mpq_class dp = d_p(state.p);
  for (const auto& e : state.entries) {
    if (!e.status.is_exact()) continue;
    const mpq_class v(e.status.value);
    if (v < cp * e.i - e.j) report.below_c_p.push_back(e);
    const mpq_class conj = dp * e.i - e.j;
    if (v < conj) report.below_d_p.push_back(e);
    if (v == conj) report.equal_d_p.push_back(e);
  }
  return report;
}

}  // namespace katz
