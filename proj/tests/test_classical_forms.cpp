#include <gtest/gtest.h>

#include <thread>
#include <vector>

#include "katz/arithmetic.hpp"
#include "katz/classical_forms.hpp"
#include "oracles.hpp"

using namespace katz;

namespace {

// Akiyama–Tanigawa; yields B_1 = +1/2, irrelevant for the even indices compared here.
std::vector<mpq_class> akiyama_tanigawa(int n) {
  std::vector<mpq_class> a(n + 1), b(n + 1);
  for (int m = 0; m <= n; ++m) {
    a[m] = mpq_class(1, m + 1);
    for (int j = m; j >= 1; --j) {
      a[j - 1] = j * (a[j - 1] - a[j]);
      a[j - 1].canonicalize();
    }
    b[m] = a[0];
  }
  return b;
}

}  // namespace

// ==== Divisor sums ====

TEST(SigmaTest, SmallValues) {
  EXPECT_EQ(sigma(1, 6), 12);
  EXPECT_EQ(sigma(3, 1), 1);
  EXPECT_EQ(sigma(3, 2), 9);
  EXPECT_EQ(sigma(0, 12), 6);
}

TEST(SigmaTest, StarDropsMultiplesOfP) {
  const RingSpec r(5, 4);
  EXPECT_EQ(sigma_star(5, 3, 5, r).value(), 1);
  EXPECT_EQ(sigma_star(5, 1, 6, r).value(), 12);
  EXPECT_EQ(sigma_star(5, 3, 10, r).value(), 9);
  for (unsigned long n = 1; n < 60; ++n) {
    if (n % 5 == 0) continue;
    EXPECT_EQ(sigma_star(5, 7, n, r).value(), oracle::mod(sigma(7, n), r.modulus())) << n;
  }
}

TEST(SigmaTest, StarWithLargeExponent) {
  const RingSpec r(7, 6);
  mpz_class expected = 0;
  for (unsigned long d : {1UL, 2UL, 3UL, 4UL, 6UL, 12UL}) {
    mpz_class t;
    mpz_pow_ui(t.get_mpz_t(), mpz_class(d).get_mpz_t(), 2999);
    expected += t;
  }
  EXPECT_EQ(sigma_star(7, 2999, 12, r).value(), oracle::mod(expected, r.modulus()));
}

// ==== Bernoulli numbers ====

TEST(BernoulliTest, KnownValues) {
  EXPECT_EQ(bernoulli(2), mpq_class(1, 6));
  EXPECT_EQ(bernoulli(4), mpq_class(-1, 30));
  EXPECT_EQ(bernoulli(12), mpq_class(-691, 2730));
  EXPECT_EQ(bernoulli(3), 0);
  EXPECT_EQ(bernoulli(1), mpq_class(-1, 2));
}

TEST(BernoulliTest, MatchesAkiyamaTanigawa) {
  const auto ref = akiyama_tanigawa(80);
  for (int k = 2; k <= 80; k += 2) EXPECT_EQ(bernoulli(k), ref[k]) << k;
}

TEST(BernoulliTest, VonStaudtClausenAtPMinusOne) {
  for (unsigned long p : {5UL, 7UL, 11UL, 13UL, 17UL}) {
    const mpz_class den = bernoulli(static_cast<int>(p - 1)).get_den();
    EXPECT_EQ(den % p, 0) << p;
    EXPECT_NE(den % (p * p), 0) << p;
  }
}

TEST(BernoulliTest, ConcurrentReadersAgree) {
  std::vector<mpq_class> results(8);
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < 8; ++t) pool.emplace_back([&results, t] { results[t] = bernoulli(400 + 2 * (t % 2)); });
  }
  for (int t = 0; t < 8; ++t) EXPECT_EQ(results[t], bernoulli(400 + 2 * (t % 2)));
}

TEST(BernoulliTest, RejectsOutOfRange) {
  EXPECT_THROW(bernoulli(-2), std::invalid_argument);
  EXPECT_THROW(bernoulli(kMaxBernoulliIndex + 2), std::out_of_range);
}

// ==== Level-1 forms ====

TEST(LevelOneTest, LeadingCoefficients) {
  const RingSpec r(7, 6);
  EXPECT_EQ(e4(r, 5).coeff(0), 1);
  EXPECT_EQ(e4(r, 5).coeff(1), 240);
  EXPECT_EQ(e4(r, 5).coeff(2), 2160);
  EXPECT_EQ(e6(r, 5).coeff(0), 1);
  EXPECT_EQ(e6(r, 5).coeff(1), r.modulus() - 504);
  const auto d = delta(r, 5);
  EXPECT_EQ(d.coeff(0), 0);
  EXPECT_EQ(d.coeff(1), 1);
  EXPECT_EQ(d.coeff(2), r.modulus() - 24);
  EXPECT_EQ(d.coeff(3), 252);
}

TEST(LevelOneTest, DeltaMatchesProductFormula) {
  const std::size_t n = 60;
  const auto exact = oracle::delta(n);
  EXPECT_EQ(detail::delta_integral(n), exact);
  const RingSpec r(11, 12);
  const auto d = delta(r, n);
  for (std::size_t k = 0; k < n; ++k) EXPECT_EQ(d.coeff(k), oracle::mod(exact[k], r.modulus())) << k;
}

TEST(LevelOneTest, DeltaTimes1728IsE4CubedMinusE6Squared) {
  const RingSpec r(13, 5);
  const std::size_t n = 40;
  const auto lhs = mpz_class(1728) * delta(r, n);
  const auto rhs = series_pow(e4(r, n), 3) - series_pow(e6(r, n), 2);
  EXPECT_EQ(lhs, rhs);
}

TEST(LevelOneTest, EpMinusOneIsOneModP) {
  for (unsigned long p : {5UL, 7UL, 11UL, 13UL, 17UL}) {
    const RingSpec r(p, 4);
    const auto e = e_p_minus_1(r, 60);
    EXPECT_EQ(e.coeff(0), 1);
    EXPECT_GE(series_val(e - QSeries::one(r, 60)), CappedVal::finite(1, 4)) << p;
  }
}

TEST(LevelOneTest, EpMinusOneAgreesWithClassicalForms) {
  const RingSpec r5(5, 6);
  EXPECT_EQ(e_p_minus_1(r5, 30), e4(r5, 30));
  EXPECT_EQ(e_p_minus_1(r5, 3).coeff(1), 240);
  const RingSpec r7(7, 6);
  EXPECT_EQ(e_p_minus_1(r7, 30), e6(r7, 30));
}

// ==== p-deprived Eisenstein series ====

TEST(EisensteinStarTest, ConstantForKFour) {
  // c = -2k / ((1 - p^{k-1}) B_k) = -8 / (-124 * -1/30) = -60/31.
  EXPECT_EQ(eisenstein_star_constant(5, 4), mpq_class(-60, 31));
}

TEST(EisensteinStarTest, FrozenValuesPFive) {
  const RingSpec r(5, 4);
  const auto f = eisenstein_star(5, 4, r, 8);
  const std::vector<long> expected{1, 240, 285, 470, 20, 240, 480, 60};
  for (std::size_t n = 0; n < expected.size(); ++n) EXPECT_EQ(f.coeff(n), expected[n]) << n;
  EXPECT_EQ(f.coeff(1), rational_to_residue(eisenstein_star_constant(5, 4), r).value());
}

TEST(EisensteinStarTest, FrozenValuesPSeven) {
  const RingSpec r(7, 5);
  const auto f = eisenstein_star(7, 18, r, 6);
  const std::vector<long> expected{1, 15442, 12677, 13223, 7938, 7525};
  for (std::size_t n = 0; n < expected.size(); ++n) EXPECT_EQ(f.coeff(n), expected[n]) << n;
}

TEST(EisensteinStarTest, CongruentToOne) {
  for (unsigned long p : {5UL, 7UL, 11UL}) {
    for (unsigned long s : {1UL, 2UL, p, p * p}) {
      const unsigned long k = s * (p - 1);
      const int e = 6;
      const RingSpec r(p, e);
      const auto f = eisenstein_star(p, k, r, 25);
      const int expected = std::min(e, ordp(static_cast<long>(k), p) + 1);
      const auto v = series_val(f - QSeries::one(r, 25));
      EXPECT_GE(v.value(), expected) << "p=" << p << " k=" << k;
      EXPECT_EQ(f.coeff(0), 1);
    }
  }
}

TEST(EisensteinStarTest, ConstantHasExpectedValuation) {
  for (unsigned long p : {5UL, 7UL, 13UL}) {
    for (unsigned long s : {1UL, 3UL, p, 2 * p * p}) {
      const unsigned long k = s * (p - 1);
      const mpq_class c = eisenstein_star_constant(p, k);
      mpz_class num = c.get_num();
      int v = 0;
      while (num % p == 0) {
        num /= p;
        ++v;
      }
      EXPECT_NE(c.get_den() % p, 0);
      EXPECT_EQ(v, ordp(static_cast<long>(k), p) + 1) << "p=" << p << " k=" << k;
    }
  }
}
