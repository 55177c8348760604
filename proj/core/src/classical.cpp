#include "qseries/classical.hpp"

#include "qseries/errors.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace qseries {

namespace {

PrecisionComplex lift(const Real& x, unsigned digits) {
  Real re = x;
  re.precision(digits);
  return {re, make_real(0, digits)};
}

PrecisionComplex real_pow(const Real& base, const PrecisionComplex& e) {
  // base > 0; exp(e log base) with the real logarithm.
  return exp(e * lift(log(base), e.digits()));
}

bool near_nonpositive_integer(const PrecisionComplex& z, const Real& tol, long& m) {
  if (abs(z.imag()) > tol) return false;
  Real r = round(z.real());
  if (r > tol || abs(z.real() - r) > tol) return false;
  m = -static_cast<long>(r);
  return true;
}

bool near_positive_integer(const PrecisionComplex& z, const Real& tol, long& m) {
  if (abs(z.imag()) > tol) return false;
  Real r = round(z.real());
  if (r < 1 - tol || abs(z.real() - r) > tol) return false;
  m = static_cast<long>(r);
  return true;
}

// sin(pi z) through the exponential, for the reflection formula.
PrecisionComplex sin_pi(const PrecisionComplex& z) {
  unsigned g = z.digits();
  PrecisionComplex ipz = imaginary_unit(g) * pi_value(g) * z;
  PrecisionComplex e = exp(ipz);
  return (e - make_complex(1, 0, g) / e) / (imaginary_unit(g) * make_complex(2, 0, g));
}

// B_0 .. B_{count} by the defining recurrence, run with enough guard
// digits to swallow its cancellation.
std::vector<Real> bernoulli_numbers(std::size_t count, unsigned digits) {
  unsigned g = digits + 2 * static_cast<unsigned>(count) + 10;
  std::vector<Real> b(count + 1, make_real(0, g));
  b[0] = make_real(1, g);
  for (std::size_t m = 1; m <= count; ++m) {
    if (m > 1 && m % 2 == 1) continue;  // odd ones vanish
    Real acc = make_real(0, g);
    Real binom = make_real(1, g);  // C(m+1, j)
    for (std::size_t j = 0; j < m; ++j) {
      acc += binom * b[j];
      binom = binom * static_cast<long>(m + 1 - j) / static_cast<long>(j + 1);
    }
    b[m] = -acc / static_cast<long>(m + 1);
  }
  for (auto& v : b) v.precision(digits);
  return b;
}

// Hurwitz zeta(s, a) for real a >= 1 by Euler-Maclaurin; requires s well
// away from 1, which the callers guarantee.
PrecisionComplex hurwitz_zeta(const PrecisionComplex& s, const Real& a,
                              const std::vector<Real>& bern, const Real& eps) {
  unsigned g = s.digits();
  PrecisionComplex one = make_complex(1, 0, g);
  PrecisionComplex sum = make_complex(0, 0, g);
  const int direct = 8;
  for (int n = 0; n < direct; ++n) sum += real_pow(a + n, -s);
  Real big = a + direct;
  PrecisionComplex apow = real_pow(big, -s);  // big^{-s}
  sum += apow * lift(big, g) / (s - one);
  sum += apow / make_complex(2, 0, g);
  PrecisionComplex poch = s;                  // (s)_{2j-1}
  PrecisionComplex corr = apow / lift(big, g);  // big^{-s-2j+1}
  Real fact = make_real(2, g);                  // (2j)!
  Real inv_big2 = 1 / (big * big);
  for (std::size_t j = 1; 2 * j < bern.size(); ++j) {
    Real b2j = bern[2 * j];
    b2j.precision(g);
    PrecisionComplex term = lift(b2j / fact, g) * poch * corr;
    sum += term;
    if (abs(term) < eps * abs(sum)) return sum;
    poch = poch * (s + lift(Real(2 * j - 1), g)) * (s + lift(Real(2 * j), g));
    corr = corr * lift(inv_big2, g);
    fact = fact * static_cast<long>(2 * j + 1) * static_cast<long>(2 * j + 2);
  }
  throw BudgetError("zeta correction series did not reach the tail bound");
}

using CSeries = std::vector<PrecisionComplex>;

CSeries exp_series(const CSeries& gser, unsigned g) {
  std::size_t n = gser.size();
  CSeries e(n, make_complex(0, 0, g));
  e[0] = make_complex(1, 0, g);
  for (std::size_t m = 1; m < n; ++m) {
    PrecisionComplex acc = make_complex(0, 0, g);
    for (std::size_t j = 1; j <= m; ++j)
      acc += lift(Real(j), g) * gser[j] * e[m - j];
    e[m] = acc / lift(Real(m), g);
  }
  return e;
}

// Sum_{k > K} prod Gamma(a_i + k) / prod Gamma(b_j + k) for equally long
// lists, as k^{s} times an asymptotic power series in 1/k whose termwise
// sums are Hurwitz zetas.  Requires Re(sum b - sum a) > 1.
PrecisionComplex gamma_ratio_tail(const std::vector<PrecisionComplex>& nums,
                                  const std::vector<PrecisionComplex>& dens, long K,
                                  unsigned g, const Real& eps) {
  PrecisionComplex s = make_complex(0, 0, g);
  for (const auto& b : dens) s += b;
  for (const auto& a : nums) s -= a;

  std::size_t order = g + 10;
  CSeries gser(order + 1, make_complex(0, 0, g));
  std::vector<Real> bern = bernoulli_numbers(2 * (order / 2) + 2, g);

  auto accumulate = [&](const PrecisionComplex& c, int sign) {
    PrecisionComplex sg = make_complex(sign, 0, g);
    PrecisionComplex half = make_complex(1, 0, g) / make_complex(2, 0, g);
    // -(c + k): the k parts cancel across the two lists.
    gser[0] += sg * (-c);
    // (k + c - 1/2) log(1 + c/k), expanded about x = 1/k = 0:
    //   k log(1+cx)        -> (-1)^t c^{t+1}/(t+1) at x^t
    //   (c-1/2) log(1+cx)  -> (c-1/2)(-1)^{t+1} c^t/t at x^t, t >= 1
    PrecisionComplex cpow = make_complex(1, 0, g);  // c^t
    for (std::size_t t = 0; t <= order; ++t) {
      if (t >= 1) {
        PrecisionComplex l = cpow / lift(Real(t), g);
        if (t % 2 == 0) l = -l;
        gser[t] += sg * (c - half) * l;
      }
      PrecisionComplex kl = cpow * c / lift(Real(t + 1), g);
      if (t % 2 == 1) kl = -kl;
      gser[t] += sg * kl;
      cpow = cpow * c;
    }
    // Correction series B_{2n} / (2n(2n-1)) (c + k)^{1-2n}.
    for (std::size_t n = 1; 2 * n - 1 <= order; ++n) {
      Real b2n = bern[2 * n];
      b2n.precision(g);
      PrecisionComplex coef =
          lift(b2n / static_cast<long>(2 * n) / static_cast<long>(2 * n - 1), g);
      PrecisionComplex w = make_complex(1, 0, g);  // (1 + c x)^{1-2n} coeffs
      for (std::size_t t = 0; 2 * n - 1 + t <= order; ++t) {
        gser[2 * n - 1 + t] += sg * coef * w;
        w = w * (-c) * lift(Real(2 * n - 2 + t + 1), g) / lift(Real(t + 1), g);
      }
    }
  };
  for (const auto& a : nums) accumulate(a, +1);
  for (const auto& b : dens) accumulate(b, -1);
  gser[0] = make_complex(0, 0, g);  // exact cancellation by construction

  CSeries e = exp_series(gser, g);
  Real base = make_real(K + 1, g);
  PrecisionComplex acc = make_complex(0, 0, g);
  int quiet = 0;
  for (std::size_t m = 0; m < e.size(); ++m) {
    PrecisionComplex inc = e[m] * hurwitz_zeta(s + lift(Real(m), g), base, bern, eps);
    acc += inc;
    if (abs(inc) <= eps * abs(acc)) {
      if (++quiet >= 3) return acc;
    } else {
      quiet = 0;
    }
  }
  throw BudgetError("asymptotic tail series did not reach the tail bound");
}

struct SumOut {
  PrecisionComplex value;
  std::size_t terms = 0;
  Real tail;
};

// Forward sum of prod (a_i)_k / prod (b_j)_k z^k from k = 0.  `dens`
// already carries the extra 1 for an F-kind factorial.  `last`, when
// present, hard-stops a terminating series.  `unit_tail` engages the
// zeta-based tail for z = 1 with equally long lists.
SumOut sum_forward(const std::vector<PrecisionComplex>& nums,
                   const std::vector<PrecisionComplex>& dens, const PrecisionComplex& z,
                   std::optional<long> last, bool unit_tail, const TruncationControl& ctl,
                   unsigned g) {
  Real eps = ctl.tail_epsilon;
  eps.precision(g);
  PrecisionComplex t = make_complex(1, 0, g);
  PrecisionComplex sum = t;
  Real floor = make_real(1, g);
  for (unsigned d = 0; d < g; ++d) floor /= 10;

  long cutoff = unit_tail ? static_cast<long>(30 + 2 * g) : -1;
  int small_run = 0;
  Real prev = make_real(0, g);
  for (long k = 0;; ++k) {
    if (last && k == *last) return {sum, static_cast<std::size_t>(k + 1), make_real(0, g)};
    if (unit_tail && k == cutoff) {
      PrecisionComplex pref = make_complex(1, 0, g);
      for (const auto& a : nums) pref = pref / gamma_fn(a);
      for (const auto& b : dens) pref = pref * gamma_fn(b);
      PrecisionComplex tail = pref * gamma_ratio_tail(nums, dens, k, g, eps);
      return {sum + tail, static_cast<std::size_t>(k + 1), abs(tail) * eps};
    }
    if (static_cast<std::size_t>(k) >= ctl.max_terms)
      throw BudgetError("term budget exhausted before the tail bound was met");
    PrecisionComplex num = make_complex(1, 0, g), den = make_complex(1, 0, g);
    PrecisionComplex kc = make_complex(k, 0, g);
    for (const auto& a : nums) num *= a + kc;
    for (const auto& b : dens) den *= b + kc;
    t = t * num / den * z;
    sum += t;
    if (!unit_tail) {
      Real at = abs(t);
      if (at < eps * std::max(abs(sum), floor) && (k == 0 || at <= prev)) {
        if (++small_run >= ctl.consecutive_small)
          return {sum, static_cast<std::size_t>(k + 2), at};
      } else {
        small_run = 0;
      }
      prev = at;
    }
  }
}

unsigned spec_digits(const ClassicalSeriesSpec& spec) {
  unsigned d = spec.argument.digits();
  for (const auto& a : spec.numerator) d = std::max(d, a.digits());
  for (const auto& b : spec.denominator) d = std::max(d, b.digits());
  return d;
}

}  // namespace

PrecisionComplex gamma_fn(const PrecisionComplex& z) {
  unsigned d = std::max(z.digits(), kMinDigits);
  unsigned g = detail::guarded(d);
  PrecisionComplex zg = z.at_digits(g);
  Real tol = detail::pole_tolerance(d);

  Real half = make_real(1, g) / 2;
  if (zg.real() < half) {
    long m;
    if (near_nonpositive_integer(zg, tol, m))
      throw PoleError("gamma pole at a nonpositive integer");
    PrecisionComplex one = make_complex(1, 0, g);
    PrecisionComplex refl = lift(pi_value(g).real(), g) / (sin_pi(zg) * gamma_fn(one - zg));
    return refl.at_digits(d);
  }

  // Spouge approximation at order matched to the working precision, with
  // coefficients formed at twice that precision.
  long order = static_cast<long>(1.2528 * g) + 3;
  unsigned cg = 2 * g;
  Real a = make_real(order, cg);
  PrecisionComplex w = zg.at_digits(cg) - make_complex(1, 0, cg);
  PrecisionComplex acc{sqrt(2 * pi_value(cg).real()), make_real(0, cg)};
  Real sign = make_real(1, cg);
  Real kfac = make_real(1, cg);
  for (long k = 1; k < order; ++k) {
    if (k > 1) kfac *= (k - 1);
    Real ak = a - k;
    Real ck = sign / kfac * exp((make_real(2 * k - 1, cg) / 2) * log(ak) + ak);
    acc += PrecisionComplex{ck, make_real(0, cg)} / (w + make_complex(k, 0, cg));
    sign = -sign;
  }
  PrecisionComplex shifted = w + PrecisionComplex{a, make_real(0, cg)};
  PrecisionComplex lead =
      exp((w + PrecisionComplex{make_real(1, cg) / 2, make_real(0, cg)}) * log(shifted) - shifted);
  return (lead * acc).at_digits(d);
}

PrecisionComplex gamma_q(const PrecisionComplex& z, const QBase& q,
                         const TruncationControl& ctl) {
  unsigned d = q.digits();
  unsigned g = detail::guarded(d);
  PrecisionComplex qg = q.value().at_digits(g);
  PrecisionComplex zg = z.at_digits(g);
  PrecisionComplex one = make_complex(1, 0, g);
  QBase qq(qg);
  PrecisionComplex qz = exp(zg * log(qg));
  // the denominator vanishes iff some single factor 1 - q^{z+j} does;
  // near q = 1 the product is legitimately tiny, so test factorwise
  Real tol = detail::pole_tolerance(d);
  Real half = make_real(1, g) / 2;
  for (PrecisionComplex f = qz; abs(f) > half; f *= qg)
    if (abs(one - f) < tol)
      throw PoleError("q-gamma pole: q^z lies on the inverse q-power lattice");
  PrecisionComplex den = qpoch_inf(qz, qq, ctl);
  PrecisionComplex val =
      qpoch_inf(qg, qq, ctl) * exp((one - zg) * log(one - qg)) / den;
  return val.at_digits(d);
}

SeriesValue eval_classical(const ClassicalSeriesSpec& spec, const TruncationControl& ctl) {
  unsigned d = spec_digits(spec);
  unsigned g = detail::guarded(d);
  Real tol = detail::pole_tolerance(d);
  PrecisionComplex z = spec.argument.at_digits(g);
  std::vector<PrecisionComplex> nums, dens;
  for (const auto& a : spec.numerator) nums.push_back(a.at_digits(g));
  for (const auto& b : spec.denominator) dens.push_back(b.at_digits(g));
  PrecisionComplex one = make_complex(1, 0, g);
  bool unit_arg = abs(z - one) < tol;

  auto termination = [&](const std::vector<PrecisionComplex>& ps) -> std::optional<long> {
    std::optional<long> last;
    long m;
    for (const auto& p : ps)
      if (near_nonpositive_integer(p, tol, m) && (!last || m < *last)) last = m;
    return last;
  };

  if (spec.kind == ClassicalKind::F) {
    std::optional<long> last = termination(nums);
    long p;
    for (const auto& b : dens)
      if (near_nonpositive_integer(b, tol, p) && (!last || *last > p))
        throw PoleError("rising factorial of a nonpositive integer denominator vanishes");
    std::vector<PrecisionComplex> fdens = dens;
    fdens.push_back(one);  // the k!
    bool unit_tail = false;
    if (!last) {
      if (unit_arg) {
        if (nums.size() + 1 < fdens.size()) {
          // faster-than-geometric decay, plain stopping works
        } else if (nums.size() == fdens.size()) {
          PrecisionComplex s = make_complex(0, 0, g);
          for (const auto& b : dens) s += b;
          for (const auto& a : nums) s -= a;
          if (s.real() <= 0)
            throw DivergentSeriesError("unit-argument series needs a positive parameter excess");
          unit_tail = true;
        } else {
          throw DivergentSeriesError("too many numerator parameters at unit argument");
        }
      } else if (nums.size() > fdens.size() ||
                 (nums.size() == fdens.size() && abs(z) >= 1)) {
        throw DivergentSeriesError("argument outside the convergence disc");
      }
    }
    SumOut out = sum_forward(nums, fdens, z, last, unit_tail, ctl, g);
    return {out.value.at_digits(d), out.terms, out.tail};
  }

  // H kind: bilateral, equally long lists; the negative side is the
  // forward series with parameters reflected through 1 at argument 1/z.
  if (nums.size() != dens.size())
    throw DomainError("bilateral series needs equally many parameters on each side");
  if (abs(z) < tol) throw ZeroArgumentError("bilateral series needs a nonzero argument");
  std::optional<long> fwd_last = termination(nums);
  std::vector<PrecisionComplex> rnums, rdens;
  for (const auto& b : dens) rnums.push_back(one - b);
  for (const auto& a : nums) rdens.push_back(one - a);
  std::optional<long> bwd_kill;  // first excluded backward index
  {
    long m;
    for (const auto& b : dens)
      if (near_positive_integer(b, tol, m) && (!bwd_kill || m < *bwd_kill)) bwd_kill = m;
  }
  {
    long p;
    for (const auto& b : dens)
      if (near_nonpositive_integer(b, tol, p) && (!fwd_last || *fwd_last > p))
        throw PoleError("rising factorial of a nonpositive integer denominator vanishes");
    for (const auto& a : nums)
      if (near_positive_integer(a, tol, p) && (!bwd_kill || *bwd_kill > p))
        throw PoleError("negative-side terms hit a vanishing rising factorial");
  }
  bool fwd_unit = false, bwd_unit = false;
  if (!fwd_last || !bwd_kill) {
    if (!unit_arg)
      throw DivergentSeriesError("bilateral series is summed at unit argument only");
    PrecisionComplex s = make_complex(0, 0, g);
    for (const auto& b : dens) s += b;
    for (const auto& a : nums) s -= a;
    if (s.real() <= 1)
      throw DivergentSeriesError("bilateral series needs parameter excess above one");
    fwd_unit = !fwd_last;
    bwd_unit = !bwd_kill;
  }
  SumOut fwd = sum_forward(nums, dens, z, fwd_last, fwd_unit, ctl, g);
  std::optional<long> bstop;
  if (bwd_kill) bstop = *bwd_kill;  // reflected series index n runs from 0
  SumOut bwd = sum_forward(rnums, rdens, one / z, bstop, bwd_unit, ctl, g);
  PrecisionComplex total = fwd.value + bwd.value - one;  // n = 0 counted twice
  return {total.at_digits(d), fwd.terms + bwd.terms, fwd.tail + bwd.tail};
}

}  // namespace qseries
