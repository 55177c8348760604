#include "qseries/qcore.hpp"

#include "qseries/errors.hpp"

#include <algorithm>

namespace qseries {

namespace detail {

Real pole_tolerance(unsigned digits) {
  using boost::multiprecision::pow;
  Real ten = make_real(10, std::max(digits, kMinDigits));
  return pow(ten, 2 - static_cast<int>(digits));
}

}  // namespace detail

QBase::QBase(PrecisionComplex q) : q_(std::move(q)) {
  Real m = abs(q_);
  if (!(m > 0 && m < 1)) throw DomainError("base must satisfy 0 < |q| < 1, got |q| = " + m.str());
}

Real QBase::modulus() const { return abs(q_); }

TruncationControl TruncationControl::for_digits(unsigned digits) {
  using boost::multiprecision::pow;
  unsigned d = std::max(digits, kMinDigits);
  Real ten = make_real(10, d + 10);
  TruncationControl ctl;
  ctl.tail_epsilon = pow(ten, -static_cast<int>(d + 6));
  ctl.max_terms = 100000;
  ctl.consecutive_small = 3;
  return ctl;
}

PrecisionComplex qpoch_n(const PrecisionComplex& a, const QBase& q, long n) {
  unsigned digits = std::max(a.digits(), q.digits());
  unsigned work = detail::guarded(digits);
  PrecisionComplex aw = a.at_digits(work);
  PrecisionComplex qw = q.value().at_digits(work);
  PrecisionComplex one(1, 0, work);
  PrecisionComplex result = one;
  if (n >= 0) {
    PrecisionComplex qpow = one;
    for (long k = 0; k < n; ++k) {
      result *= one - aw * qpow;
      qpow *= qw;
    }
  } else {
    Real tol = detail::pole_tolerance(digits);
    PrecisionComplex qpow = one;
    PrecisionComplex denom = one;
    for (long j = 1; j <= -n; ++j) {
      qpow /= qw;
      PrecisionComplex factor = one - aw * qpow;
      if (abs(factor) < tol)
        throw PoleError("(a;q)_n pole: factor 1 - a q^{-" + std::to_string(j) + "} vanishes");
      denom *= factor;
    }
    result = one / denom;
  }
  return result.at_digits(digits);
}

PrecisionComplex qpoch_inf(const PrecisionComplex& a, const QBase& q,
                           const TruncationControl& ctl) {
  unsigned digits = std::max(a.digits(), q.digits());
  unsigned work = detail::guarded(digits);
  PrecisionComplex aw = a.at_digits(work);
  PrecisionComplex qw = q.value().at_digits(work);
  PrecisionComplex one(1, 0, work);
  Real absq = abs(qw);
  Real half = make_real(1, work) / 2;
  Real eps = ctl.tail_epsilon;
  eps.precision(work);

  PrecisionComplex result = one;
  PrecisionComplex cur = aw;  // a q^n for the factor about to be applied
  for (std::size_t n = 0;; ++n) {
    if (n >= ctl.max_terms)
      throw BudgetError("(a;q)_inf: term budget exhausted before tail bound met");
    result *= one - cur;
    cur *= qw;
    // |log prod_{m>n}(1-aq^m)| <= t / ((1-|q|)(1-t)) once t = |a q^{n+1}| < 1/2.
    Real t = abs(cur);
    if (t < half) {
      Real bound = t / ((1 - absq) * (1 - t));
      if (bound <= eps) break;
    }
  }
  return result.at_digits(digits);
}

PrecisionComplex qpoch_complex_index(const PrecisionComplex& a, const QBase& q,
                                     const PrecisionComplex& b,
                                     const TruncationControl& ctl) {
  unsigned digits = std::max({a.digits(), q.digits(), b.digits()});
  // Integer index: the two infinite products share their tail, which may
  // vanish; cancel it by using the finite product directly.
  {
    using boost::multiprecision::abs;
    using boost::multiprecision::round;
    Real r = round(b.real());
    Real tol = detail::pole_tolerance(digits);
    if (abs(b.real() - r) < tol && qseries::abs(PrecisionComplex(make_real(0, digits), b.imag())) < tol &&
        abs(r) < 1000000)
      return qpoch_n(a, q, static_cast<long>(r));
  }
  unsigned work = detail::guarded(digits);
  PrecisionComplex aw = a.at_digits(work);
  PrecisionComplex bw = b.at_digits(work);
  QBase qw(q.value().at_digits(work));
  PrecisionComplex qb = pow(qw.value(), bw);
  PrecisionComplex num = qpoch_inf(aw, qw, ctl);
  PrecisionComplex den = qpoch_inf(qb * aw, qw, ctl);
  if (abs(den) < detail::pole_tolerance(digits))
    throw PoleError("(a;q)_b pole: (q^b a;q)_inf vanishes");
  return (num / den).at_digits(digits);
}

PrecisionComplex qpoch_multi(const std::vector<PrecisionComplex>& as, const QBase& q,
                             long n) {
  PrecisionComplex result(1, 0, q.digits());
  for (const auto& a : as) result *= qpoch_n(a, q, n);
  return result;
}

PrecisionComplex qpoch_multi_inf(const std::vector<PrecisionComplex>& as, const QBase& q,
                                 const TruncationControl& ctl) {
  PrecisionComplex result(1, 0, q.digits());
  for (const auto& a : as) result *= qpoch_inf(a, q, ctl);
  return result;
}

PrecisionComplex qpoch_base_inverted(const PrecisionComplex& a, const QBase& q,
                                     long n) {
  if (n < 0) throw DomainError("base-inverted symbol requires n >= 0");
  unsigned digits = std::max(a.digits(), q.digits());
  if (n == 0) return PrecisionComplex(1, 0, digits);
  if (a.is_zero()) throw ZeroArgumentError("(a;q^{-1})_n requires a != 0 for n > 0");
  unsigned work = detail::guarded(digits);
  PrecisionComplex aw = a.at_digits(work);
  QBase qw(q.value().at_digits(work));
  long binom = n * (n - 1) / 2;
  PrecisionComplex one(1, 0, work);
  PrecisionComplex value = pow(qw.value(), -binom) * pow(-aw, n) * qpoch_n(one / aw, qw, n);
  return value.at_digits(digits);
}

PrecisionComplex theta(const PrecisionComplex& z, const QBase& q,
                       const TruncationControl& ctl) {
  if (z.is_zero()) throw ZeroArgumentError("theta(z;q) requires z != 0");
  unsigned digits = std::max(z.digits(), q.digits());
  unsigned work = detail::guarded(digits);
  PrecisionComplex zw = z.at_digits(work);
  QBase qw(q.value().at_digits(work));
  PrecisionComplex value = qpoch_inf(zw, qw, ctl) * qpoch_inf(qw.value() / zw, qw, ctl);
  return value.at_digits(digits);
}

PrecisionComplex theta_multi(const std::vector<PrecisionComplex>& zs, const QBase& q,
                             const TruncationControl& ctl) {
  PrecisionComplex result(1, 0, q.digits());
  for (const auto& z : zs) result *= theta(z, q, ctl);
  return result;
}

PrecisionComplex theta_addition_residual(const PrecisionComplex& a,
                                         const PrecisionComplex& c,
                                         const PrecisionComplex& d,
                                         const PrecisionComplex& e, const QBase& q,
                                         const TruncationControl& ctl) {
  unsigned digits = std::max({a.digits(), c.digits(), d.digits(), e.digits(), q.digits()});
  unsigned work = detail::guarded(digits);
  PrecisionComplex aw = a.at_digits(work), cw = c.at_digits(work);
  PrecisionComplex dw = d.at_digits(work), ew = e.at_digits(work);
  QBase qw(q.value().at_digits(work));
  const PrecisionComplex& qv = qw.value();
  PrecisionComplex lhs1 =
      theta_multi({ew, ew / cw, qv * aw / dw, qv * cw / (aw * dw)}, qw, ctl);
  PrecisionComplex lhs2 =
      theta_multi({dw, dw / cw, qv * aw / ew, qv * cw / (aw * ew)}, qw, ctl);
  PrecisionComplex rhs =
      (dw / cw) * theta_multi({aw, cw / aw, ew / dw, dw * ew / cw}, qw, ctl);
  return (lhs1 - lhs2 - rhs).at_digits(digits);
}

}  // namespace qseries
