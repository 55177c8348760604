#include "doctest.h"

#include "qseries/errors.hpp"
#include "qseries/qcore.hpp"
#include "qseries/rng.hpp"
#include "test_support.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <string>
#include <vector>

using namespace qseries;
using namespace qtest;

namespace {

// Bilateral Laurent series for the theta function, normalized by (q;q)_inf.
// Test-only reference implementation; the library evaluates the product.
PrecisionComplex theta_by_sum(const PrecisionComplex& z, const QBase& q, unsigned digits) {
  unsigned work = digits + 15;
  PrecisionComplex zw = z.at_digits(work);
  QBase qw(q.value().at_digits(work));
  const PrecisionComplex& qv = qw.value();
  using boost::multiprecision::pow;
  Real cutoff = pow(make_real(10, work), -static_cast<int>(work));

  PrecisionComplex sum(1, 0, work);
  PrecisionComplex term(1, 0, work);
  PrecisionComplex qpow(1, 0, work);
  for (long n = 0; n < 100000; ++n) {
    term *= qpow * (-zw);  // t_{n+1} = t_n * q^n * (-z)
    qpow *= qv;
    sum += term;
    if (abs(term) < cutoff && n > 2) break;
  }
  term = PrecisionComplex(1, 0, work);
  qpow = PrecisionComplex(1, 0, work);
  for (long n = 0; n > -100000; --n) {
    qpow *= qv;  // q^{1-n} at step n -> t_{n-1} = t_n * q^{-(n-1)} / (-z)
    term *= qpow / (-zw);
    sum += term;
    if (abs(term) < cutoff && n < -2) break;
  }
  PrecisionComplex value = sum / qpoch_inf(PrecisionComplex(qv), qw,
                                           TruncationControl::for_digits(work));
  return value.at_digits(digits);
}

}  // namespace

TEST_CASE("finite symbol: basic values") {
  QBase q(PrecisionComplex("0.5", "0", D));
  SplitMix64 rng(101);
  for (int i = 0; i < 10; ++i) {
    PrecisionComplex a = rand_annulus(rng, 0.1, 3.0);
    CHECK(rel_err(qpoch_n(a, q, 0), PrecisionComplex(1, 0, D)) < tol(-35));
  }
  PrecisionComplex half("0.5", "0", D);
  CHECK(rel_err(qpoch_n(half, q, 2), PrecisionComplex("0.375", "0", D)) < tol(-35));
  PrecisionComplex two(2, 0, D);
  PrecisionComplex third = PrecisionComplex(-1, 0, D) / PrecisionComplex(3, 0, D);
  CHECK(rel_err(qpoch_n(two, q, -1), third) < tol(-35));
}

TEST_CASE("finite symbol: negative index pole") {
  QBase q(PrecisionComplex("0.5", "0", D));
  PrecisionComplex a("0.5", "0", D);  // 1 - a/q vanishes
  CHECK_THROWS_AS(qpoch_n(a, q, -1), PoleError);
}

TEST_CASE("infinite symbol: basic values") {
  QBase q(PrecisionComplex("0.5", "0", D));
  auto ctl = TruncationControl::for_digits(D);
  CHECK(rel_err(qpoch_inf(PrecisionComplex(0, 0, D), q, ctl),
                PrecisionComplex(1, 0, D)) < tol(-35));
  // a = 1/q makes the second factor vanish exactly.
  CHECK(abs(qpoch_inf(PrecisionComplex(2, 0, D), q, ctl)) < tol(-35));
}

TEST_CASE("infinite symbol: matches long direct product") {
  // Oracle: direct product with a large fixed factor count at doubled precision.
  unsigned hd = 2 * D;
  QBase q(PrecisionComplex("0.5", "0", hd));
  PrecisionComplex a("0.5", "0", hd);
  PrecisionComplex oracle(1, 0, hd), qpow(1, 0, hd), one(1, 0, hd);
  for (int n = 0; n < 400; ++n) {
    oracle *= one - a * qpow;
    qpow *= q.value();
  }
  PrecisionComplex got = qpoch_inf(a.at_digits(D), QBase(q.value().at_digits(D)),
                                   TruncationControl::for_digits(D));
  CHECK(rel_err(got, oracle.at_digits(D)) < tol(-38));
}

TEST_CASE("infinite symbol: budget error") {
  QBase q(PrecisionComplex("0.5", "0", D));
  TruncationControl ctl = TruncationControl::for_digits(D);
  ctl.max_terms = 4;
  CHECK_THROWS_AS(qpoch_inf(PrecisionComplex(1, 1, D), q, ctl), BudgetError);
}

TEST_CASE("complex index agrees with integer index") {
  QBase q(PrecisionComplex("0.5", "0", D));
  auto ctl = TruncationControl::for_digits(D);
  PrecisionComplex a("0.5", "0", D);
  CHECK(rel_err(qpoch_complex_index(a, q, PrecisionComplex(0, 0, D), ctl),
                PrecisionComplex(1, 0, D)) < tol(-30));
  CHECK(rel_err(qpoch_complex_index(a, q, PrecisionComplex(2, 0, D), ctl),
                PrecisionComplex("0.375", "0", D)) < tol(-30));
  PrecisionComplex two(2, 0, D);
  PrecisionComplex third = PrecisionComplex(-1, 0, D) / PrecisionComplex(3, 0, D);
  CHECK(rel_err(qpoch_complex_index(two, q, PrecisionComplex(-1, 0, D), ctl), third) <
        tol(-30));
}

TEST_CASE("multi-argument products") {
  QBase q(PrecisionComplex("0.5", "0", D));
  auto ctl = TruncationControl::for_digits(D);
  CHECK(rel_err(qpoch_multi({}, q, 3), PrecisionComplex(1, 0, D)) < tol(-35));
  CHECK(rel_err(qpoch_multi({PrecisionComplex("0.5", "0", D), PrecisionComplex("0.25", "0", D)},
                            q, 1),
                PrecisionComplex("0.375", "0", D)) < tol(-35));
  // (a^2;q)_inf = (a,-a,sqrt(q)a,-sqrt(q)a;q)_inf with the principal root.
  SplitMix64 rng(7);
  for (int i = 0; i < 10; ++i) {
    QBase qq = rand_base(rng);
    PrecisionComplex a = rand_annulus(rng, 0.1, 1.5);
    PrecisionComplex sa = sqrt(qq.value()) * a;
    PrecisionComplex lhs = qpoch_multi_inf({a, -a, sa, -sa}, qq, ctl);
    PrecisionComplex rhs = qpoch_inf(a * a, qq, ctl);
    CHECK(rel_err(lhs, rhs) < tol(-30));
  }
}

TEST_CASE("base-inverted symbol") {
  QBase q(PrecisionComplex("0.5", "0", D));
  PrecisionComplex two(2, 0, D);
  CHECK(rel_err(qpoch_base_inverted(two, q, 0), PrecisionComplex(1, 0, D)) < tol(-35));
  CHECK(rel_err(qpoch_base_inverted(two, q, 1), PrecisionComplex(-1, 0, D)) < tol(-35));
  // Oracle: direct product over the inverted base, (1-2)(1-2*2) = 3.
  CHECK(rel_err(qpoch_base_inverted(two, q, 2), PrecisionComplex(3, 0, D)) < tol(-35));
  CHECK_THROWS_AS(qpoch_base_inverted(PrecisionComplex(0, 0, D), q, 1), ZeroArgumentError);
}

TEST_CASE("theta: basic values") {
  QBase q(PrecisionComplex("0.4", "0", D));
  auto ctl = TruncationControl::for_digits(D);
  CHECK(abs(theta(q.value(), q, ctl)) < tol(-35));
  CHECK_THROWS_AS(theta(PrecisionComplex(0, 0, D), q, ctl), ZeroArgumentError);
  SplitMix64 rng(11);
  for (int i = 0; i < 10; ++i) {
    QBase qq = rand_base(rng);
    PrecisionComplex z = rand_annulus(rng, 0.2, 2.0);
    CHECK(rel_err(theta(z, qq, ctl), theta(qq.value() / z, qq, ctl)) < tol(-30));
  }
  // theta(qa;q) = -theta(a;q)/a
  PrecisionComplex a("0.3", "0.1", D);
  PrecisionComplex lhs = theta(q.value() * a, q, ctl);
  PrecisionComplex rhs = -theta(a, q, ctl) / a;
  CHECK(rel_err(lhs, rhs) < tol(-30));
}

TEST_CASE("theta: multi products") {
  QBase q(PrecisionComplex("0.4", "0", D));
  auto ctl = TruncationControl::for_digits(D);
  CHECK(rel_err(theta_multi({}, q, ctl), PrecisionComplex(1, 0, D)) < tol(-35));
  CHECK(abs(theta_multi({q.value(), PrecisionComplex("0.3", "0", D)}, q, ctl)) < tol(-35));
  PrecisionComplex a("0.7", "0.2", D);
  PrecisionComplex t = theta(a, q, ctl);
  CHECK(rel_err(theta_multi({a, q.value() / a}, q, ctl), t * t) < tol(-30));
}

TEST_CASE("theta addition formula residual") {
  auto ctl = TruncationControl::for_digits(D);
  QBase q(PrecisionComplex("0.4", "0", D));
  PrecisionComplex a("0.7", "0", D), c("0.3", "0", D), d("0.5", "0", D), e("0.9", "0", D);
  PrecisionComplex scale = theta_multi({e, e / c, q.value() * a / d, q.value() * c / (a * d)},
                                       q, ctl);
  CHECK(abs(theta_addition_residual(a, c, d, e, q, ctl)) < tol(-30) * abs(scale));
  CHECK(abs(theta_addition_residual(a, c, d, d, q, ctl)) < tol(-30));
  CHECK(abs(theta_addition_residual(a, a, d, e, q, ctl)) < tol(-30));
  SplitMix64 rng(23);
  for (int i = 0; i < 25; ++i) {
    QBase qq = rand_base(rng);
    PrecisionComplex ra = rand_annulus(rng, 0.3, 2.0);
    PrecisionComplex rc = rand_annulus(rng, 0.3, 2.0);
    PrecisionComplex rd = rand_annulus(rng, 0.3, 2.0);
    PrecisionComplex re = rand_annulus(rng, 0.3, 2.0);
    PrecisionComplex s = theta_multi(
        {re, re / rc, qq.value() * ra / rd, qq.value() * rc / (ra * rd)}, qq, ctl);
    Real scale2 = abs(s);
    if (scale2 < 1) scale2 = make_real(1, D);
    CHECK(abs(theta_addition_residual(ra, rc, rd, re, qq, ctl)) < tol(-30) * scale2);
  }
}

TEST_CASE("invariant: splitting") {
  SplitMix64 rng(31);
  for (int i = 0; i < 25; ++i) {
    QBase q = rand_base(rng);
    PrecisionComplex a = rand_annulus(rng, 0.1, 3.0);
    long m = static_cast<long>(rng.next() % 16);
    long n = static_cast<long>(rng.next() % 15);
    PrecisionComplex lhs = qpoch_n(a, q, m + n);
    PrecisionComplex rhs = qpoch_n(a, q, m) * qpoch_n(a * pow(q.value(), m), q, n);
    CHECK(rel_err(lhs, rhs) < tol(-30));
  }
}

TEST_CASE("invariant: finite times shifted infinite") {
  SplitMix64 rng(37);
  auto ctl = TruncationControl::for_digits(D);
  for (int i = 0; i < 25; ++i) {
    QBase q = rand_base(rng);
    PrecisionComplex a = rand_annulus(rng, 0.1, 2.0);
    long n = static_cast<long>(rng.next() % 21);
    PrecisionComplex lhs = qpoch_n(a, q, n) * qpoch_inf(a * pow(q.value(), n), q, ctl);
    CHECK(rel_err(lhs, qpoch_inf(a, q, ctl)) < tol(-30));
  }
}

TEST_CASE("invariant: negative index identity") {
  SplitMix64 rng(41);
  for (int i = 0; i < 25; ++i) {
    QBase q = rand_base(rng);
    PrecisionComplex a = rand_annulus(rng, 0.3, 3.0);
    long n = 1 + static_cast<long>(rng.next() % 20);
    PrecisionComplex lhs;
    try {
      lhs = qpoch_n(a, q, -n);
    } catch (const PoleError&) {
      continue;  // sampled onto a lattice point; skip
    }
    PrecisionComplex rhs = pow(q.value(), n * (n + 1) / 2) * pow(-a, -n) /
                           qpoch_n(q.value() / a, q, n);
    CHECK(rel_err(lhs, rhs) < tol(-30));
  }
}

TEST_CASE("invariant: vanishing-parameter limit of scaled symbols") {
  // a^n (x/a;q)_n -> q^{C(n,2)} (-x)^n with error O(a).
  QBase q(PrecisionComplex("0.5", "0", D));
  PrecisionComplex x("0.7", "0.3", D);
  long n = 5;
  PrecisionComplex target = pow(q.value(), n * (n - 1) / 2) * pow(-x, n);
  using boost::multiprecision::pow;
  for (int m = 2; m <= 8; ++m) {
    PrecisionComplex a(pow(make_real(10, D), -m), make_real(0, D));
    PrecisionComplex approx = qseries::pow(a, n) * qpoch_n(x / a, q, n);
    CHECK(rel_err(approx, target) < 100 * abs(a));
  }
}

TEST_CASE("invariant: product and bilateral sum forms of theta agree") {
  SplitMix64 rng(43);
  auto ctl = TruncationControl::for_digits(D);
  for (int i = 0; i < 25; ++i) {
    QBase q = rand_base(rng);
    PrecisionComplex z = rand_annulus(rng, 0.2, 2.0);
    CHECK(rel_err(theta(z, q, ctl), theta_by_sum(z, q, D)) < tol(-30));
  }
}

TEST_CASE("base validation") {
  CHECK_THROWS_AS(QBase(PrecisionComplex(0, 0, D)), DomainError);
  CHECK_THROWS_AS(QBase(PrecisionComplex(1, 0, D)), DomainError);
  CHECK_THROWS_AS(QBase(PrecisionComplex(2, 0, D)), DomainError);
  CHECK_NOTHROW(QBase(PrecisionComplex("0.99", "0", D)));
}
