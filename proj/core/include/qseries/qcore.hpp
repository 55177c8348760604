#pragma once

#include "qseries/precision_complex.hpp"

#include <vector>

namespace qseries {

/// The base of every q-product. Construction enforces 0 < |q| < 1.
class QBase {
 public:
  explicit QBase(PrecisionComplex q);

  const PrecisionComplex& value() const { return q_; }
  unsigned digits() const { return q_.digits(); }
  Real modulus() const;

 private:
  PrecisionComplex q_;
};

/// Truncation policy for infinite products and series.
struct TruncationControl {
  Real tail_epsilon;
  std::size_t max_terms = 100000;
  int consecutive_small = 3;

  /// Policy matched to a target precision: tail bound a few digits below
  /// the last representable digit, generous term budget.
  static TruncationControl for_digits(unsigned digits);
};

/// (a;q)_n for any integer n.  Negative n inverts factors below the base
/// point and throws PoleError if one of them vanishes within tolerance.
PrecisionComplex qpoch_n(const PrecisionComplex& a, const QBase& q, long n);

/// (a;q)_infinity with relative error at most ctl.tail_epsilon.
PrecisionComplex qpoch_inf(const PrecisionComplex& a, const QBase& q,
                           const TruncationControl& ctl);

/// (a;q)_b for complex index b, as (a;q)_inf / (q^b a;q)_inf with the
/// principal branch of q^b.
PrecisionComplex qpoch_complex_index(const PrecisionComplex& a, const QBase& q,
                                     const PrecisionComplex& b,
                                     const TruncationControl& ctl);

/// Product (a_1;q)_n ... (a_k;q)_n.
PrecisionComplex qpoch_multi(const std::vector<PrecisionComplex>& as, const QBase& q,
                             long n);

/// Product (a_1;q)_inf ... (a_k;q)_inf.
PrecisionComplex qpoch_multi_inf(const std::vector<PrecisionComplex>& as, const QBase& q,
                                 const TruncationControl& ctl);

/// (a;q^{-1})_n computed as q^{-C(n,2)} (-a)^n (1/a;q)_n; the inverted
/// base is never formed.  Requires a != 0 when n > 0.
PrecisionComplex qpoch_base_inverted(const PrecisionComplex& a, const QBase& q,
                                     long n);

/// Modified theta function theta(z;q) = (z;q)_inf (q/z;q)_inf, z != 0.
PrecisionComplex theta(const PrecisionComplex& z, const QBase& q,
                       const TruncationControl& ctl);

/// Product theta(z_1;q) ... theta(z_k;q).
PrecisionComplex theta_multi(const std::vector<PrecisionComplex>& zs, const QBase& q,
                             const TruncationControl& ctl);

/// Defect of the theta addition formula
///   theta(e, e/c, qa/d, qc/(ad); q) - theta(d, d/c, qa/e, qc/(ae); q)
///     - (d/c) theta(a, c/a, e/d, de/c; q);
/// vanishes to working precision at every admissible point.
PrecisionComplex theta_addition_residual(const PrecisionComplex& a,
                                         const PrecisionComplex& c,
                                         const PrecisionComplex& d,
                                         const PrecisionComplex& e, const QBase& q,
                                         const TruncationControl& ctl);

namespace detail {

/// Working precision for a kernel: requested digits plus guard digits.
inline unsigned guarded(unsigned digits) { return digits + 10; }

/// Modulus below which a factor that must be inverted counts as a pole.
Real pole_tolerance(unsigned digits);

}  // namespace detail

}  // namespace qseries
