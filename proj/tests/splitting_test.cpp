#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rbm/splitting.hpp"
#include "support/random_martingale.hpp"

using namespace rbm;
using rbm::testing::RandomMartingales;

namespace {

BitString bs(const char* s) { return BitString(s); }

std::string data(const std::string& name) { return std::string(RBM_DATA_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const ProbabilityMeasure& mu() {
  static const auto m = ProbabilityMeasure::uniform();
  return m;
}

const ProbabilityMeasure& biased() {
  static const auto m = ProbabilityMeasure::biased(Dyadic(1, 2));
  return m;
}

const ProbabilityMeasure& null_right() {
  static const auto m = load_measure(data("measures/null_right.measure"));
  return m;
}

std::vector<BitString> strings_up_to(std::size_t n) {
  std::vector<BitString> out;
  for (Integer i = 0; i < pow2(n + 1) - 1; ++i) out.push_back(ntob(i));
  return out;
}

void expect_value_near(const SplittingOperator& phi, const Rational& truth, Precision r,
                       const Rational& slack) {
  const Dyadic v = measure_value(phi, r);
  EXPECT_TRUE(v.on_grid(r));
  EXPECT_LE(abs(v.to_rational() - truth), slack) << phi.describe() << " at r=" << r;
}

}  // namespace

TEST(CylinderNull, Examples) {
  const auto phi = cylinder_null(bs("1"), null_right());
  const auto one = unit(null_right());
  EXPECT_EQ(phi.plus(3, one).value(BitString()), 0);
  EXPECT_EQ(phi.plus(3, one).value(bs("1")), 1);
  EXPECT_EQ(phi.plus(3, one).value(bs("0")), 0);
  EXPECT_EQ(measure_value(phi, 8), Dyadic(0));
  RandomMartingales gen(1);
  const auto d = gen.table(null_right(), 4);
  EXPECT_EQ(phi.minus(5, d).value(bs("0110")), d.value(bs("0110")));
  EXPECT_FALSE(verify_martingale(phi.plus(0, d), 8));
  EXPECT_THROW(cylinder_null(bs("0"), null_right()), PreconditionError);
  EXPECT_THROW(cylinder_null(BitString(), null_right()), PreconditionError);
}

TEST(CylinderPos, Examples) {
  EXPECT_EQ(measure_value(cylinder_pos(bs("01"), mu()), 6).str_at(6), "16/2^6");
  expect_value_near(cylinder_pos(BitString(), mu()), 1, 8, 0);
  EXPECT_EQ(cylinder_pos(bs("0"), mu()).plus(4, unit(mu())).value(bs("1")), 0);
  RandomMartingales gen(2);
  const auto d = gen.table(mu(), 5);
  const auto whole = cylinder_pos(BitString(), mu()).plus(3, d);
  const auto lam = regularize(d);
  for (const auto& w : strings_up_to(6)) EXPECT_EQ(whole.value(w), lam.value(w));
  EXPECT_THROW(cylinder_pos(bs("1"), null_right()), PreconditionError);
}

TEST(CylinderPos, ValuesMatchMassesOnSeveralMeasures) {
  const auto tree = load_measure(data("measures/tree3.measure"));
  for (const auto& nu : {mu(), biased(), tree, null_right()}) {
    for (const auto& w : strings_up_to(4)) {
      if (w.empty() && nu.mass(w).is_zero()) continue;
      for (Precision r = 4; r <= 10; ++r) {
        expect_value_near(cylinder(w, nu), nu.mass_rational(w), r, Rational(1, pow2(r)));
      }
    }
  }
}

TEST(CylinderPos, OutputsAreMartingales) {
  RandomMartingales gen(3);
  for (const auto& nu : {mu(), biased(), null_right()}) {
    for (const char* w : {"0", "01", "110"}) {
      if (nu.mass(bs(w)).is_zero()) continue;
      const auto d = gen.table(nu, 5);
      const auto [p, m] = cylinder_pos(bs(w), nu)(4, d);
      EXPECT_FALSE(verify_martingale(p, 8)) << w;
      EXPECT_FALSE(verify_martingale(m, 8)) << w;
    }
  }
}

TEST(Complement, SwapsAndMeasuresComplement) {
  const auto phi = cylinder_pos(bs("0"), mu());
  expect_value_near(complement(phi), Rational(1, 2), 8, Rational(1, 128));
  const auto twice = complement(complement(phi));
  RandomMartingales gen(4);
  const auto d = gen.table(mu(), 4);
  for (const auto& w : strings_up_to(5)) {
    EXPECT_EQ(twice.plus(3, d).value(w), phi.plus(3, d).value(w));
    EXPECT_EQ(twice.minus(3, d).value(w), phi.minus(3, d).value(w));
  }
  EXPECT_EQ(complement(phi).describe(), "(compl (cyl 0))");
}

TEST(Theta, Examples) {
  const auto c0 = cylinder_pos(bs("0"), mu());
  const auto c1 = cylinder_pos(bs("1"), mu());
  const auto one = unit(mu());
  for (Precision r : {2u, 6u}) {
    EXPECT_LE(abs(theta(true, true, c0, c0, r, one).value(BitString()) - Rational(1, 2)),
              Rational(1, pow2(r)));
    EXPECT_LE(abs(theta(true, false, c0, c1, r, one).value(BitString()) - Rational(1, 2)),
              Rational(1, pow2(r)));
  }
  EXPECT_FALSE(verify_martingale(theta(false, true, c0, c1, 3, one), 8));
  EXPECT_THROW(theta(true, true, c0, cylinder_pos(bs("0"), biased()), 1, one), MeasureMismatch);
}

TEST(IntersectUnion, Examples) {
  const auto c0 = cylinder_pos(bs("0"), mu());
  const auto c1 = cylinder_pos(bs("1"), mu());
  const auto c10 = cylinder_pos(bs("10"), mu());
  for (Precision r : {4u, 8u}) {
    const Rational tol(1, pow2(r));
    expect_value_near(intersect(c0, c1), 0, r, tol);
    expect_value_near(unite(c0, c1), 1, r, tol);
    expect_value_near(intersect(c0, c0), Rational(1, 2), r, tol);
    expect_value_near(unite(c0, c10), Rational(3, 4), r, tol);
  }
  EXPECT_EQ(unite(c0, c10).describe(), "(cup (cyl 0) (cyl 10))");
}

TEST(IntersectUnion, InclusionExclusionOnCylinderPairs) {
  for (const auto& nu : {mu(), biased(), ProbabilityMeasure::biased(Dyadic(3, 2))}) {
    const auto words = strings_up_to(2);
    for (const auto& u : words) {
      for (const auto& v : words) {
        const auto x = cylinder(u, nu);
        const auto y = cylinder(v, nu);
        for (Precision r : {4u, 8u}) {
          const Rational lhs = measure_value(unite(x, y), r).to_rational() +
                               measure_value(intersect(x, y), r).to_rational();
          const Rational rhs =
              measure_value(x, r).to_rational() + measure_value(y, r).to_rational();
          EXPECT_LE(abs(lhs - rhs), Rational(2, pow2(r))) << u << " " << v;
        }
      }
    }
  }
}

TEST(Axioms, ThirdAxiomOnRandomMartingales) {
  RandomMartingales gen(5);
  const auto c0 = cylinder_pos(bs("0"), mu());
  const auto c01 = cylinder_pos(bs("01"), mu());
  const std::vector<SplittingOperator> ops{
      c0, c01, complement(c0), intersect(c0, c01), unite(c0, cylinder_pos(bs("11"), mu())),
      parse_set_expression(slurp(data("sets/stepwise_c0.set")), mu())};
  for (const auto& phi : ops) {
    for (int i = 0; i < 4; ++i) {
      const auto d = gen.table(mu(), 5);
      for (Precision r = 1; r <= 10; r += 3) EXPECT_TRUE(satisfies_axiom_iii(phi, r, d)) << phi.describe();
    }
  }
}

TEST(Axioms, CoverTransferOnEventuallyConstantSequences) {
  RandomMartingales gen(6);
  for (const auto& nu : {mu(), biased()}) {
    for (const char* wtext : {"0", "01", "101"}) {
      const BitString w(wtext);
      const auto phi = cylinder_pos(w, nu);
      for (int i = 0; i < 3; ++i) {
        const auto d = gen.table(nu, 6);
        const auto [plus, minus] = phi(4, d);
        for (const auto& p : strings_up_to(6)) {
          for (int tail = 0; tail < 2; ++tail) {
            // A = p followed by a constant tail; inspect it to length max(|p|, |w|) + 2.
            std::string a = p.str() == "~" ? "" : p.str();
            while (a.size() < std::max(p.size(), w.size()) + 2) a += tail ? '1' : '0';
            const BitString prefix(a);
            if (!covers(d, p)) continue;
            if (w.is_prefix_of(prefix)) {
              EXPECT_TRUE(covers(plus, prefix)) << w << " " << prefix;
            } else {
              EXPECT_TRUE(covers(minus, prefix)) << w << " " << prefix;
            }
          }
        }
      }
    }
  }
}

TEST(CompleteNull, Examples) {
  const auto null = cylinder_null(bs("1"), null_right());
  const auto psi = complete_null(null);
  RandomMartingales gen(7);
  const auto d = gen.table(null_right(), 4);
  EXPECT_EQ(psi.minus(3, d).value(bs("0101")), d.value(bs("0101")));
  EXPECT_EQ(psi.plus(3, d).value(bs("11")), psi.plus(3, unit(null_right())).value(bs("11")));
  EXPECT_EQ(measure_value(psi, 9), Dyadic(0));
  EXPECT_TRUE(satisfies_axiom_iii(psi, 4, d));
  const auto disjoint = intersect(cylinder_pos(bs("0"), mu()), cylinder_pos(bs("1"), mu()));
  expect_value_near(complete_null(disjoint), 0, 8, Rational(1, 256));
  EXPECT_THROW(complete_null(cylinder_pos(bs("0"), mu())), PreconditionError);
}

TEST(UnionSequence, BoundedAndMonotone) {
  const auto null = cylinder_null(bs("1"), null_right());
  const auto seq = union_sequence({null, null, null, null});
  const auto one = unit(null_right());
  for (Precision r : {0u, 3u, 7u}) {
    Rational previous = -1;
    for (std::size_t k = 0; k < 6; ++k) {
      const auto pair = seq.family(k, r, one);
      const Rational v = pair.plus.value(BitString());
      EXPECT_LE(v, Rational(1, pow2(r)));
      EXPECT_GE(v, previous);
      previous = v;
      EXPECT_EQ(pair.minus.value(bs("01")), 1);
    }
  }
  const auto single = union_sequence({null});
  EXPECT_EQ(single.family(0, 2, one).plus.value(bs("1")), null.plus(3, one).value(bs("1")));
  EXPECT_THROW(union_sequence({cylinder_pos(bs("0"), mu())}), PreconditionError);
}

TEST(Limit, ConstantSequence) {
  const auto seq = finite_sequence({cylinder_pos(bs("01"), mu())});
  const auto lim = limit_measurement(seq);
  for (Precision r = 0; r <= 8; ++r) expect_value_near(lim, Rational(1, 4), r, Rational(1, pow2(r)));
}

TEST(Limit, StepwiseExhaustionOfC0) {
  const auto lim = parse_set_expression(slurp(data("sets/stepwise_c0.set")), mu());
  for (Precision r = 0; r <= 8; ++r) expect_value_near(lim, Rational(1, 2), r, Rational(1, pow2(r)));
  RandomMartingales gen(8);
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(satisfies_axiom_iii(lim, 5, gen.table(mu(), 4)));
}

TEST(Limit, BrokenModulusIsDetected) {
  const auto lim = parse_set_expression(slurp(data("sets/stepwise_bad_gamma.set")), mu());
  EXPECT_THROW(measure_value(lim, 6), ModulusViolation);
}

TEST(Limit, NullUnion) {
  const auto lim = parse_set_expression("(null-union (cyl 1) (cyl 10) (cyl 111))", null_right());
  for (Precision r = 0; r <= 8; ++r) expect_value_near(lim, 0, r, Rational(1, pow2(r)));
}

TEST(MeasureValue, Examples) {
  expect_value_near(parse_set_expression(slurp(data("sets/disjoint_union.set")), mu()),
                    Rational(3, 4), 8, Rational(1, 256));
  expect_value_near(cylinder_null(bs("1"), null_right()), 0, 5, 0);
  // Two measurements of C_0 built differently agree.
  const auto a = cylinder_pos(bs("0"), mu());
  const auto b = unite(cylinder_pos(bs("00"), mu()), cylinder_pos(bs("01"), mu()));
  for (Precision r = 2; r <= 10; ++r) {
    EXPECT_LE(abs(measure_value(a, r) - measure_value(b, r)), Dyadic::unit_fraction(r - 1));
  }
}

TEST(TwoMeasurements, ComplementPairs) {
  const auto c0 = cylinder_pos(bs("0"), mu());
  const auto whole = cylinder_pos(BitString(), mu());
  const auto either = unite(cylinder_pos(bs("0"), mu()), cylinder_pos(bs("1"), mu()));
  for (Precision j = 0; j <= 6; ++j) {
    for (Precision k = 0; k <= 6; ++k) {
      EXPECT_TRUE(two_measurement_check(c0, complement(c0), j, k));
      EXPECT_TRUE(two_measurement_check(whole, whole, j, k));
      EXPECT_TRUE(two_measurement_check(either, either, j, k));
    }
  }
  // A null set paired with itself cannot reach 1.
  const auto null = cylinder_null(bs("1"), null_right());
  EXPECT_FALSE(two_measurement_check(null, null, 3, 3));
}

TEST(SetExpressions, ParseErrors) {
  EXPECT_THROW(parse_set_expression("(cyl)", mu()), ParseError);
  EXPECT_THROW(parse_set_expression("(cap (cyl 0))", mu()), ParseError);
  EXPECT_THROW(parse_set_expression("(frob (cyl 0))", mu()), ParseError);
  EXPECT_THROW(parse_set_expression("(cyl 012)", mu()), ParseError);
  EXPECT_THROW(parse_set_expression("(limit (gamma 1))", mu()), ParseError);
  EXPECT_EQ(parse_set_expression("(cap (cyl 0) (compl (cyl 01)))", mu()).describe(),
            "(cap (cyl 0) (compl (cyl 01)))");
}

TEST(CylinderPos, ApproximateInputsTrackExactOutputs) {
  RandomMartingales gen(9);
  for (const auto& nu : {mu(), biased()}) {
    const auto d = gen.table(nu, 5);
    const auto phi = cylinder_pos(bs("01"), nu);
    const auto exact = phi(3, d);
    const auto approx = phi(3, approx_only(d));
    EXPECT_FALSE(approx.plus.exact_capable());
    for (const auto& w : strings_up_to(5)) {
      for (Precision r : {0u, 5u, 12u}) {
        const Rational tol(1, pow2(r));
        EXPECT_LE(abs(approx.plus.approx(r, w).to_rational() - exact.plus.value(w)), tol) << w;
        EXPECT_LE(abs(approx.minus.approx(r, w).to_rational() - exact.minus.value(w)), tol) << w;
      }
    }
  }
}
