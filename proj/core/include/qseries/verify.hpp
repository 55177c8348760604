#pragma once

#include "qseries/catalog.hpp"
#include "qseries/expr.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qseries {

struct SampleConfig {
  std::uint64_t seed = 0;
  unsigned trials = 10;
  unsigned digits = 40;
  double margin_floor = 0.2;     // extra slack demanded on modulus constraints
  double q_lo = 0.05;
  double q_hi = 0.6;
  bool complex_q = false;
  unsigned max_rejections = 10000;
};

struct TrialRecord {
  std::size_t index = 0;
  std::vector<std::pair<std::string, PrecisionComplex>> params;  // includes q
  std::vector<PrecisionComplex> values;  // lhs first, then each rhs form
  Real rel_error;                        // max pairwise
  std::size_t terms = 0;
  std::string status;  // pass | fail | skipped-degenerate
  std::string reason;
};

struct NegativeVariantResult {
  bool present = false;
  unsigned checked = 0;
  unsigned disagreeing = 0;  // relative error above 1e-6
};

struct VerificationReport {
  std::string id;
  std::string anchor;
  std::uint64_t seed = 0;
  unsigned digits = 0;
  unsigned requested_trials = 0;
  std::vector<TrialRecord> trials;
  Real max_rel_error;
  Real median_rel_error;
  unsigned pass_count = 0;
  unsigned fail_count = 0;
  unsigned skip_count = 0;
  NegativeVariantResult negative;
  bool passed = false;
  std::string failure_reason;
};

/// Whether every constraint of the identity holds at the point, with
/// the configured extra margin on modulus inequalities.
bool constraints_hold(const Identity& ident, const ParamEnv& env, double margin_floor,
                      const TruncationControl& ctl);

/// Deterministic draw for (identity, seed, trial): rejection sampling of
/// moduli (log-uniform) and phases (uniform) until all constraints hold
/// and no structural prefactor is degenerate.
ParamEnv sample_point(const Identity& ident, const SampleConfig& cfg,
                      std::uint64_t trial_index);

VerificationReport verify(const Identity& ident, const SampleConfig& cfg);

std::vector<VerificationReport> verify_all(const Catalog& cat, const SampleConfig& cfg);

/// Deterministic apart from the timestamp field.
std::string report_json(const std::vector<VerificationReport>& reports);
std::string report_markdown(const std::vector<VerificationReport>& reports);

/// Markdown rendering of an already-emitted JSON report document.
std::string report_json_to_markdown(const std::string& json_text);

}  // namespace qseries
