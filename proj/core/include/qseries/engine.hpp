#pragma once

#include "qseries/qcore.hpp"

#include <optional>
#include <vector>

namespace qseries {

/// Nearest integer m with x = q^m within tol, if any.
std::optional<long> q_power_index(const PrecisionComplex& x, const QBase& q, const Real& tol);

enum class SeriesKind { unilateral, bilateral };

/// Structural description of one basic hypergeometric series.  Zero
/// parameters are carried as counts, never as literal entries.
struct SeriesSpec {
  SeriesKind kind;
  std::vector<PrecisionComplex> numerator;
  std::vector<PrecisionComplex> denominator;
  long zero_numerators = 0;
  long zero_denominators = 0;
  QBase q;
  PrecisionComplex z;

  /// Net exponent of the ((-1)^k q^C(k,2)) factor.
  long exponent() const;
};

/// Very-well-poised series: special parameter a, the free tail
/// parameters, and p vanishing denominator entries.
struct WellPoisedSpec {
  PrecisionComplex a;
  std::vector<PrecisionComplex> tail;
  long p = 0;
  QBase q;
  PrecisionComplex z;
};

struct SeriesValue {
  PrecisionComplex value;
  std::size_t terms_used = 0;
  Real tail_bound;
};

enum class PhiClass { entire, conditional, terminating, divergent };

struct PhiConvergence {
  PhiClass cls;
  Real margin;      // slack of the |z| < 1 condition when conditional
  long last_index;  // highest nonvanishing k when terminating
};

struct PsiConvergence {
  bool convergent;
  Real margin;  // smallest relative slack across the strict inequalities
};

PhiConvergence phi_converges(const SeriesSpec& spec);
PsiConvergence psi_converges(const SeriesSpec& spec);

/// Sum of the unilateral series.  Throws DivergentSeriesError when the
/// classification is divergent or the margin is below min_margin.
SeriesValue eval_phi(const SeriesSpec& spec, const TruncationControl& ctl,
                     double min_margin = 0.0);

/// Sum of the bilateral series: forward and backward term-ratio
/// recurrences anchored at k = 0.
SeriesValue eval_psi(const SeriesSpec& spec, const TruncationControl& ctl,
                     double min_margin = 0.0);

/// Very-well-poised unilateral sum; the paired parameters enter only
/// through the exact per-term factor (1 - a q^{2k})/(1 - a).
SeriesValue eval_wp_unilateral(const WellPoisedSpec& spec, const TruncationControl& ctl,
                               double min_margin = 0.0);

/// Very-well-poised bilateral sum, same combined factor for all k.
SeriesValue eval_wp_bilateral(const WellPoisedSpec& spec, const TruncationControl& ctl,
                              double min_margin = 0.0);

}  // namespace qseries
