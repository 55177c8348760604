#include "qseries/engine.hpp"

#include "qseries/errors.hpp"

#include <algorithm>
#include <limits>

namespace qseries {

std::optional<long> q_power_index(const PrecisionComplex& x, const QBase& q, const Real& tol) {
  using boost::multiprecision::abs;
  using boost::multiprecision::log;
  using boost::multiprecision::round;
  Real ax = qseries::abs(x);
  if (ax.is_zero()) return std::nullopt;
  Real lm = log(ax) / log(q.modulus());
  if (!(lm > -100000 && lm < 100000)) return std::nullopt;
  long m = round(lm).convert_to<long>();
  PrecisionComplex one(1, 0, x.digits());
  if (qseries::abs(x * pow(q.value(), -m) - one) < tol) return m;
  return std::nullopt;
}

long SeriesSpec::exponent() const {
  long r = static_cast<long>(numerator.size()) + zero_numerators;
  long s = static_cast<long>(denominator.size()) + zero_denominators;
  return s - r + (kind == SeriesKind::unilateral ? 1 : 0);
}

namespace {

unsigned spec_digits(const SeriesSpec& s) {
  unsigned d = std::max(s.q.digits(), s.z.digits());
  for (const auto& a : s.numerator) d = std::max(d, a.digits());
  for (const auto& b : s.denominator) d = std::max(d, b.digits());
  return d;
}

/// Literal zero parameters fold into the zero counts; both spellings
/// must evaluate identically.
SeriesSpec normalized(const SeriesSpec& s) {
  SeriesSpec r = s;
  r.numerator.clear();
  r.denominator.clear();
  for (const auto& a : s.numerator) {
    if (a.is_zero())
      ++r.zero_numerators;
    else
      r.numerator.push_back(a);
  }
  for (const auto& b : s.denominator) {
    if (b.is_zero())
      ++r.zero_denominators;
    else
      r.denominator.push_back(b);
  }
  return r;
}

void validate(const SeriesSpec& s, unsigned digits) {
  Real tol = detail::pole_tolerance(digits);
  for (const auto& b : s.denominator) {
    auto m = q_power_index(b, s.q, tol);
    if (m && *m <= 0)
      throw PoleError("denominator parameter lies in q^{-N0} (q^" + std::to_string(*m) + ")");
  }
  if (s.kind == SeriesKind::bilateral && s.z.is_zero())
    throw ZeroArgumentError("bilateral series requires z != 0");
}

/// Smallest m >= 1 with some numerator parameter equal to q^m; the
/// backward side stops structurally at k = -m.
std::optional<long> backward_stop(const SeriesSpec& s, unsigned digits) {
  Real tol = detail::pole_tolerance(digits);
  std::optional<long> stop;
  for (const auto& a : s.numerator) {
    auto m = q_power_index(a, s.q, tol);
    if (m && *m >= 1 && (!stop || *m < *stop)) stop = *m;
  }
  return stop;
}

bool forward_terminates(const SeriesSpec& s, unsigned digits, long* at) {
  Real tol = detail::pole_tolerance(digits);
  bool found = false;
  for (const auto& a : s.numerator) {
    auto m = q_power_index(a, s.q, tol);
    if (m && *m <= 0) {
      if (!found || -*m < *at) *at = -*m;
      found = true;
    }
  }
  return found;
}

struct Lifted {
  std::vector<PrecisionComplex> num, den;
  PrecisionComplex q, z;
  long e;
  unsigned work, digits;
};

Lifted lift(const SeriesSpec& s) {
  Lifted l;
  l.digits = spec_digits(s);
  l.work = detail::guarded(l.digits);
  for (const auto& a : s.numerator) l.num.push_back(a.at_digits(l.work));
  for (const auto& b : s.denominator) l.den.push_back(b.at_digits(l.work));
  l.q = s.q.value().at_digits(l.work);
  l.z = s.z.at_digits(l.work);
  l.e = s.exponent();
  return l;
}

struct SideResult {
  PrecisionComplex sum;
  std::size_t terms;
  Real tail;
};

SideResult sum_forward(const Lifted& l, const TruncationControl& ctl, bool unilateral,
                       const PrecisionComplex* wp_a,
                       std::optional<long> last_index = std::nullopt) {
  PrecisionComplex one(1, 0, l.work);
  Real pole_tol = detail::pole_tolerance(l.digits);
  Real eps = ctl.tail_epsilon;
  eps.precision(l.work);
  using boost::multiprecision::pow;
  Real floor_scale = pow(make_real(10, l.work), -static_cast<int>(l.digits));

  PrecisionComplex wp_den = one;
  if (wp_a) {
    wp_den = one - *wp_a;
    if (abs(wp_den) < pole_tol) throw PoleError("very-well-poised series with a = 1");
  }
  PrecisionComplex term = one, sum = one, qpow = one, q2pow = one;
  std::size_t used = 1;
  int small = 0;
  Real prev;
  Real t = make_real(0, l.work);
  bool have_prev = false;
  for (std::size_t k = 0;; ++k) {
    // Terminating series: all terms past last_index are structural zeros;
    // do not let roundoff resurrect them.
    if (last_index && static_cast<long>(k) >= *last_index) {
      t = make_real(0, l.work);
      break;
    }
    if (used >= ctl.max_terms)
      throw BudgetError("series term budget exhausted before the tail bound was met");
    PrecisionComplex ratio = one;
    for (const auto& a : l.num) ratio *= one - a * qpow;
    for (const auto& b : l.den) {
      PrecisionComplex f = one - b * qpow;
      if (abs(f) < pole_tol) throw PoleError("denominator factor vanished during summation");
      ratio /= f;
    }
    if (unilateral) ratio /= one - l.q * qpow;  // the (q;q)_k factor
    term *= ratio * qseries::pow(-qpow, l.e) * l.z;
    qpow *= l.q;
    PrecisionComplex contrib = term;
    if (wp_a) {
      q2pow *= l.q * l.q;
      contrib = term * ((one - *wp_a * q2pow) / wp_den);
    }
    sum += contrib;
    ++used;
    t = abs(contrib);
    Real scale = abs(sum);
    if (scale < floor_scale) scale = floor_scale;
    if (t < eps * scale && (!have_prev || t <= prev)) {
      if (++small >= ctl.consecutive_small) break;
    } else {
      small = 0;
    }
    prev = t;
    have_prev = true;
  }
  return {sum, used, t};
}

SideResult sum_backward(const Lifted& l, const TruncationControl& ctl,
                        const PrecisionComplex* wp_a, std::optional<long> stop_at) {
  PrecisionComplex one(1, 0, l.work);
  Real pole_tol = detail::pole_tolerance(l.digits);
  Real eps = ctl.tail_epsilon;
  eps.precision(l.work);
  using boost::multiprecision::pow;
  Real floor_scale = pow(make_real(10, l.work), -static_cast<int>(l.digits));

  PrecisionComplex wp_den = one;
  if (wp_a) {
    wp_den = one - *wp_a;
    if (abs(wp_den) < pole_tol) throw PoleError("very-well-poised series with a = 1");
  }
  PrecisionComplex term = one;                   // t_0, not accumulated here
  PrecisionComplex sum(0, 0, l.work);
  PrecisionComplex qpow = one / l.q;             // q^{k-1} for the step to k-1
  PrecisionComplex q2pow = one;
  PrecisionComplex inv_q2 = one / (l.q * l.q);
  std::size_t used = 0;
  int small = 0;
  Real prev;
  Real t = make_real(0, l.work);
  bool have_prev = false;
  for (long k = 0;; --k) {
    if (stop_at && k - 1 == -*stop_at) break;  // terms below vanish structurally
    if (used >= ctl.max_terms)
      throw BudgetError("series term budget exhausted before the tail bound was met");
    PrecisionComplex ratio = one;
    for (const auto& b : l.den) ratio *= one - b * qpow;
    for (const auto& a : l.num) {
      PrecisionComplex f = one - a * qpow;
      if (abs(f) < pole_tol)
        throw PoleError("numerator factor vanished while inverting the backward ratio");
      ratio /= f;
    }
    term *= ratio * qseries::pow(-qpow, -l.e) / l.z;
    PrecisionComplex contrib = term;
    if (wp_a) {
      q2pow *= inv_q2;
      contrib = term * ((one - *wp_a * q2pow) / wp_den);
    }
    sum += contrib;
    ++used;
    t = abs(contrib);
    Real scale = abs(sum);
    if (scale < floor_scale) scale = floor_scale;
    if (t < eps * scale && (!have_prev || t <= prev)) {
      if (++small >= ctl.consecutive_small) break;
    } else {
      small = 0;
    }
    prev = t;
    have_prev = true;
    qpow /= l.q;
  }
  return {sum, used, t};
}

Real real_margin(unsigned digits, long v) { return make_real(v, digits); }

}  // namespace

PhiConvergence phi_converges(const SeriesSpec& spec) {
  SeriesSpec s = normalized(spec);
  unsigned digits = spec_digits(s);
  long at = 0;
  if (forward_terminates(s, digits, &at))
    return {PhiClass::terminating, real_margin(digits, 1), at};
  long e = s.exponent();
  if (e > 0) return {PhiClass::entire, real_margin(digits, 1), 0};
  if (e == 0) {
    Real az = abs(s.z);
    if (az < 1) return {PhiClass::conditional, 1 - az, 0};
  }
  return {PhiClass::divergent, real_margin(digits, 0), 0};
}

PsiConvergence psi_converges(const SeriesSpec& spec) {
  SeriesSpec s = normalized(spec);
  unsigned digits = spec_digits(s);
  long e = s.exponent();
  Real margin = real_margin(digits, 1);
  // Forward side: the quadratic factor dominates for e > 0; e = 0 needs |z| < 1.
  long at = 0;
  if (!forward_terminates(s, digits, &at)) {
    if (e == 0) {
      Real az = abs(s.z);
      if (!(az < 1)) return {false, real_margin(digits, 0)};
      if (1 - az < margin) margin = 1 - az;
    } else if (e < 0) {
      return {false, real_margin(digits, 0)};
    }
  }
  // Backward side: the net quadratic weight per step is q^{zn - zd}; it decays
  // when zd > zn, and at balance the listed products must obey
  // |b_1...b_s| < |a_1...a_r z|.
  if (!backward_stop(s, digits)) {
    if (s.zero_numerators > s.zero_denominators) return {false, real_margin(digits, 0)};
    if (s.zero_numerators == s.zero_denominators) {
      Real pb = real_margin(digits, 1), pa = abs(s.z);
      for (const auto& b : s.denominator) pb *= abs(b);
      for (const auto& a : s.numerator) pa *= abs(a);
      if (!(pb < pa)) return {false, real_margin(digits, 0)};
      Real slack = 1 - pb / pa;
      if (slack < margin) margin = slack;
    }
  }
  return {true, margin};
}

SeriesValue eval_phi(const SeriesSpec& spec, const TruncationControl& ctl,
                     double min_margin) {
  SeriesSpec s = normalized(spec);
  unsigned digits = spec_digits(s);
  validate(s, digits);
  PhiConvergence conv = phi_converges(s);
  if (conv.cls == PhiClass::divergent)
    throw DivergentSeriesError("unilateral series divergent at this argument");
  if (conv.cls == PhiClass::conditional && conv.margin < min_margin)
    throw DivergentSeriesError("convergence margin below the configured floor");
  Lifted l = lift(s);
  std::optional<long> stop;
  if (conv.cls == PhiClass::terminating) stop = conv.last_index;
  SideResult r = sum_forward(l, ctl, true, nullptr, stop);
  Real tail = r.tail;
  tail.precision(digits);
  return {r.sum.at_digits(digits), r.terms, tail};
}

SeriesValue eval_psi(const SeriesSpec& spec, const TruncationControl& ctl,
                     double min_margin) {
  SeriesSpec s = normalized(spec);
  unsigned digits = spec_digits(s);
  validate(s, digits);
  PsiConvergence conv = psi_converges(s);
  if (!conv.convergent)
    throw DivergentSeriesError("bilateral series divergent at this argument");
  if (conv.margin < min_margin)
    throw DivergentSeriesError("convergence margin below the configured floor");
  Lifted l = lift(s);
  std::optional<long> fstop;
  long at = 0;
  if (forward_terminates(s, digits, &at)) fstop = at;
  SideResult fw = sum_forward(l, ctl, false, nullptr, fstop);
  SideResult bw = sum_backward(l, ctl, nullptr, backward_stop(s, digits));
  Real tail = fw.tail + bw.tail;
  tail.precision(digits);
  return {(fw.sum + bw.sum).at_digits(digits), fw.terms + bw.terms, tail};
}

namespace {

unsigned wp_digits(const WellPoisedSpec& s) {
  unsigned d = std::max({s.q.digits(), s.z.digits(), s.a.digits()});
  for (const auto& t : s.tail) d = std::max(d, t.digits());
  return d;
}

/// Expanded parameter lists with the +-sqrt(a) pair spelled out; used
/// only for validation and convergence bounds, never for summation.
SeriesSpec wp_full(const WellPoisedSpec& s, SeriesKind kind) {
  PrecisionComplex sa = sqrt(s.a);
  std::vector<PrecisionComplex> num, den;
  if (kind == SeriesKind::unilateral) num.push_back(s.a);
  num.push_back(s.q.value() * sa);
  num.push_back(-(s.q.value() * sa));
  den.push_back(sa);
  den.push_back(-sa);
  for (const auto& t : s.tail) {
    num.push_back(t);
    den.push_back(s.q.value() * s.a / t);
  }
  return SeriesSpec{kind, std::move(num), std::move(den), 0, s.p, s.q, s.z};
}

/// Reduced lists whose term ratio, together with the per-term factor
/// (1 - a q^{2k})/(1 - a), reproduces the very-well-poised terms.
SeriesSpec wp_reduced(const WellPoisedSpec& s, SeriesKind kind) {
  std::vector<PrecisionComplex> num, den;
  if (kind == SeriesKind::unilateral) num.push_back(s.a);
  for (const auto& t : s.tail) {
    num.push_back(t);
    den.push_back(s.q.value() * s.a / t);
  }
  return SeriesSpec{kind, std::move(num), std::move(den), 0, s.p, s.q, s.z};
}

}  // namespace

SeriesValue eval_wp_unilateral(const WellPoisedSpec& spec, const TruncationControl& ctl,
                               double min_margin) {
  if (spec.p < 0) throw DivergentSeriesError("very-well-poised series with p < 0 diverges");
  unsigned digits = wp_digits(spec);
  SeriesSpec full = wp_full(spec, SeriesKind::unilateral);
  validate(full, digits);
  PhiConvergence conv = phi_converges(full);
  if (conv.cls == PhiClass::divergent)
    throw DivergentSeriesError("very-well-poised series divergent at this argument");
  if (conv.cls == PhiClass::conditional && conv.margin < min_margin)
    throw DivergentSeriesError("convergence margin below the configured floor");
  Lifted l = lift(normalized(wp_reduced(spec, SeriesKind::unilateral)));
  PrecisionComplex aw = spec.a.at_digits(l.work);
  std::optional<long> stop;
  if (conv.cls == PhiClass::terminating) stop = conv.last_index;
  SideResult r = sum_forward(l, ctl, true, &aw, stop);
  Real tail = r.tail;
  tail.precision(digits);
  return {r.sum.at_digits(digits), r.terms, tail};
}

SeriesValue eval_wp_bilateral(const WellPoisedSpec& spec, const TruncationControl& ctl,
                              double min_margin) {
  if (spec.p < 0) throw DivergentSeriesError("very-well-poised series with p < 0 diverges");
  unsigned digits = wp_digits(spec);
  SeriesSpec full = wp_full(spec, SeriesKind::bilateral);
  validate(full, digits);
  PsiConvergence conv = psi_converges(full);
  if (!conv.convergent)
    throw DivergentSeriesError("very-well-poised series divergent at this argument");
  if (conv.margin < min_margin)
    throw DivergentSeriesError("convergence margin below the configured floor");
  SeriesSpec reduced = normalized(wp_reduced(spec, SeriesKind::bilateral));
  Lifted l = lift(reduced);
  PrecisionComplex aw = spec.a.at_digits(l.work);
  std::optional<long> fstop;
  long at = 0;
  if (forward_terminates(full, digits, &at)) fstop = at;
  SideResult fw = sum_forward(l, ctl, false, &aw, fstop);
  SideResult bw = sum_backward(l, ctl, &aw, backward_stop(reduced, digits));
  Real tail = fw.tail + bw.tail;
  tail.precision(digits);
  return {(fw.sum + bw.sum).at_digits(digits), fw.terms + bw.terms, tail};
}

}  // namespace qseries
