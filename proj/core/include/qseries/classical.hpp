#pragma once

#include "qseries/engine.hpp"
#include "qseries/qcore.hpp"

namespace qseries {

enum class ClassicalKind { F, H };

/// Ordinary (q = 1) hypergeometric series; the argument is 1 for every
/// use in this project.
struct ClassicalSeriesSpec {
  ClassicalKind kind;
  std::vector<PrecisionComplex> numerator;
  std::vector<PrecisionComplex> denominator;
  PrecisionComplex argument;
};

/// q-gamma function (q;q)_inf (1-q)^{1-z} / (q^z;q)_inf, principal powers.
PrecisionComplex gamma_q(const PrecisionComplex& z, const QBase& q,
                         const TruncationControl& ctl);

/// Gamma function via Spouge's approximation, order matched to the
/// argument's precision; reflection for Re z < 1/2.
PrecisionComplex gamma_fn(const PrecisionComplex& z);

/// Sum of the classical series at its argument.  The bilateral H kind
/// converges only polynomially at unit argument, so the tail beyond a
/// cutoff is evaluated analytically from an asymptotic expansion of the
/// terms in Hurwitz zeta functions.
SeriesValue eval_classical(const ClassicalSeriesSpec& spec, const TruncationControl& ctl);

}  // namespace qseries
