#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "rbm/martingale.hpp"
#include "support/random_martingale.hpp"

using namespace rbm;
using rbm::testing::RandomMartingales;

namespace {

BitString bs(const char* s) { return BitString(s); }

std::string data(const std::string& name) { return std::string(RBM_DATA_DIR) + "/" + name; }

const ProbabilityMeasure& mu() {
  static const auto m = ProbabilityMeasure::uniform();
  return m;
}

// d(λ)=1/2, d(0)=3/4, d(00)=9/8 under μ, rest filled to satisfy the identity.
Martingale cover_example() {
  // order: ~ 0 1 00 01 10 11
  return table_martingale({Dyadic(1, 1), Dyadic(3, 2), Dyadic(1, 2), Dyadic(9, 3), Dyadic(3, 3),
                           Dyadic(1, 2), Dyadic(1, 2)},
                          2, mu());
}

}  // namespace

TEST(Unit, Values) {
  const auto one = unit(mu());
  EXPECT_EQ(one.value(BitString()), 1);
  EXPECT_EQ(one.value(bs("0110")), 1);
  EXPECT_EQ(one.approx(5, bs("01")).str_at(5), "32/2^5");
}

TEST(Add, PointwiseSum) {
  const auto one = unit(mu());
  EXPECT_EQ(add(one, one).value(bs("101")), 2);
  const auto d = table_martingale({Dyadic(1), Dyadic(3, 1), Dyadic(1, 1)}, 1, mu());
  EXPECT_EQ(add(d, one).value(bs("0")), Rational(5, 2));
  EXPECT_THROW(add(d, unit(ProbabilityMeasure::biased(Dyadic(1, 2)))), MeasureMismatch);
}

TEST(Add, ComputationIsCanonicalAndAccurate) {
  RandomMartingales gen(7);
  const auto nu = ProbabilityMeasure::biased(Dyadic(1, 2));
  std::uniform_int_distribution<Precision> prec(0, 24);
  for (int i = 0; i < 200; ++i) {
    const auto a = gen.table(nu, 6);
    const auto b = gen.table(nu, 6);
    const auto s = add(a, b);
    const BitString w = gen.string(8);
    const Precision r = prec(gen.engine());
    const Dyadic got = s.approx(r, w);
    EXPECT_TRUE(got.on_grid(r));
    const Rational err = abs(got.to_rational() - (a.value(w) + b.value(w)));
    EXPECT_LE(err, Rational(1, pow2(r)));
  }
}

TEST(Verify, RandomTablesAreMartingales) {
  RandomMartingales gen(11);
  for (const auto& nu : {mu(), ProbabilityMeasure::biased(Dyadic(1, 2)),
                         load_measure(data("measures/null_right.measure"))}) {
    for (int i = 0; i < 5; ++i) EXPECT_FALSE(verify_martingale(gen.table(nu, 8), 8));
  }
}

TEST(Verify, ReportsFirstOffendingNode) {
  std::ifstream in(data("martingales/bad.mg"));
  const auto d = parse_martingale(in, "bad.mg", mu());
  const auto bad = verify_martingale(d, 3);
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->node, bs("1"));
}

TEST(Verify, NegativeCapitalRejected) {
  const auto d = table_martingale_unchecked({Dyadic(0), Dyadic(1), Dyadic(-1)}, 1, mu());
  const auto bad = verify_martingale(d, 1);
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->node, bs("1"));
  EXPECT_THROW(table_martingale({Dyadic(1), Dyadic(1), Dyadic(0)}, 1, mu()), PreconditionError);
}

TEST(Covers, Examples) {
  EXPECT_TRUE(covers(unit(mu()), BitString()));
  const auto d = cover_example();
  EXPECT_TRUE(covers(d, bs("00")));
  EXPECT_FALSE(covers(d, bs("0")));
  EXPECT_EQ(max_capital(d, bs("001")), Rational(9, 8));
  EXPECT_EQ(min_tail_capital(d, bs("00"), 1), Rational(3, 4));
  EXPECT_EQ(min_tail_capital(d, bs("00"), 2), Rational(1, 2));
}

TEST(Regular, Examples) {
  EXPECT_TRUE(is_regular(unit(mu()), 6));
  const auto d = table_martingale({Dyadic(1), Dyadic(1, 1), Dyadic(3, 1)}, 1, mu());
  EXPECT_FALSE(is_regular(d, 1));
}

TEST(Regularize, FixesUnitAndRoot) {
  const auto one = regularize(unit(mu()));
  for (Integer i = 0; i < 63; ++i) EXPECT_EQ(one.value(ntob(i)), 1);
  RandomMartingales gen(3);
  for (int i = 0; i < 20; ++i) {
    const auto d = gen.table(ProbabilityMeasure::biased(Dyadic(1, 2)), 8);
    EXPECT_EQ(regularize(d).value(BitString()), d.value(BitString()));
  }
}

TEST(Regularize, HandExample) {
  // d(λ)=1, d(0)=2, d(1)=0, d(00)=1/2, d(01)=7/2 under μ.
  const auto d = table_martingale({Dyadic(1), Dyadic(2), Dyadic(0), Dyadic(1, 1), Dyadic(7, 1),
                                   Dyadic(0), Dyadic(0)},
                                  2, mu());
  const auto lam = regularize(d);
  // At λ: g = (1-1+2, 1-1+0) = (2, 0), average 1, so rh gives (1, 1).
  EXPECT_EQ(lam.value(bs("0")), 1);
  EXPECT_EQ(lam.value(bs("1")), 1);
  // At 0: g = (1-2+1/2, 1-2+7/2) = (-1/2, 5/2), average 1, so (1, 1).
  EXPECT_EQ(lam.value(bs("00")), 1);
  EXPECT_GE(lam.value(bs("00")), 1);
  EXPECT_EQ(lam.value(bs("01")), 1);
  EXPECT_TRUE(is_regular(lam, 6));
}

TEST(Regularize, IdentityRegularityAndCoverPreservation) {
  RandomMartingales gen(5);
  for (const auto& nu : {mu(), ProbabilityMeasure::biased(Dyadic(1, 2)),
                         load_measure(data("measures/null_right.measure"))}) {
    for (int i = 0; i < 10; ++i) {
      const auto d = gen.table(nu, 7);
      const auto lam = regularize(d);
      EXPECT_FALSE(verify_martingale(lam, 8));
      EXPECT_TRUE(is_regular(lam, 8));
      for (Integer k = 0; k < pow2(9) - 1; ++k) {
        const BitString p = ntob(k);
        // Below a null node d may jump freely while Λ copies the parent.
        if (nu.mass(p).is_zero()) continue;
        if (covers(d, p)) EXPECT_TRUE(covers(lam, p)) << p;
      }
    }
  }
}

TEST(Regularize, IdempotentOnRegularInputsAtCoverLevel) {
  RandomMartingales gen(17);
  for (int i = 0; i < 10; ++i) {
    const auto reg = regularize(gen.table(mu(), 6));
    const auto twice = regularize(reg);
    for (Integer k = 0; k < pow2(9) - 1; ++k) {
      const BitString p = ntob(k);
      EXPECT_EQ(covers(twice, p), covers(reg, p)) << p;
    }
  }
}

TEST(Regularize, ApproximationClausesTrackExactValues) {
  RandomMartingales gen(23);
  const ProbabilityMeasure thirds({Dyadic(1), Dyadic(3, 2), Dyadic(1, 2)}, 1, Extension::half);
  for (const auto& nu : {mu(), ProbabilityMeasure::biased(Dyadic(1, 3)),
                         load_measure(data("measures/null_right.measure")), thirds}) {
    for (int i = 0; i < 6; ++i) {
      const auto d = gen.table(nu, 6);
      const auto exact = regularize(d);
      const auto approx = regularize(approx_only(d));
      EXPECT_FALSE(approx.exact_capable());
      for (Precision r : {0u, 3u, 9u, 20u}) {
        for (int j = 0; j < 10; ++j) {
          const BitString w = gen.string(8);
          const Dyadic a = approx.approx(r, w);
          EXPECT_TRUE(a.on_grid(r));
          EXPECT_LE(abs(a.to_rational() - exact.value(w)), Rational(1, pow2(r))) << w << " r=" << r;
        }
      }
    }
  }
}

TEST(MartingaleFile, RoundTrip) {
  RandomMartingales gen(31);
  const auto d = gen.table(mu(), 3);
  std::istringstream in(format_martingale(d, 3, "uniform"));
  const auto back = parse_martingale(in, "memory", std::nullopt);
  for (Integer k = 0; k < 15; ++k) EXPECT_EQ(back.value(ntob(k)), d.value(ntob(k)));
  std::istringstream broken("martingale depth=1\n~ 1 0\n0 1 0\n");
  EXPECT_THROW(parse_martingale(broken, "broken", std::nullopt), ParseError);
}
