#include "qseries/verify.hpp"

#include "qseries/errors.hpp"
#include "qseries/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace qseries {

namespace {

using nlohmann::json;

Real ten_pow(int e, unsigned digits) {
  return pow(make_real(10, digits), e);
}

Real rel_error(const PrecisionComplex& a, const PrecisionComplex& b, unsigned digits) {
  Real scale = abs(a);
  Real sb = abs(b);
  if (sb > scale) scale = sb;
  Real floor = ten_pow(-static_cast<int>(digits), digits);
  if (floor > scale) scale = floor;
  return abs(a - b) / scale;
}

PrecisionComplex draw_value(SplitMix64& rng, double lo, double hi, unsigned digits,
                            bool with_phase) {
  Real l = Real(lo, digits), h = Real(hi, digits);
  Real m = exp(log(l) + Real(rng.uniform(), digits) * (log(h) - log(l)));
  if (!with_phase) return {m, make_real(0, digits)};
  Real phase = 2 * pi_value(digits).real() * Real(rng.uniform(), digits);
  return polar(m, phase);
}

// Multiplicative product/theta factors of a side, for degeneracy checks.
void collect_factors(const ExprPtr& e, std::vector<ExprPtr>& out) {
  if (!e) return;
  switch (e->kind) {
    case ExprKind::Mul:
    case ExprKind::Div:
      collect_factors(e->kids[0], out);
      collect_factors(e->kids[1], out);
      return;
    case ExprKind::Neg:
    case ExprKind::IntPow:
      collect_factors(e->kids[0], out);
      return;
    case ExprKind::QPochInf:
    case ExprKind::Theta:
      out.push_back(e);
      return;
    default:
      return;
  }
}

bool lattice_clear(const PrecisionComplex& v, const PrecisionComplex& q, long lo, long hi,
                   unsigned digits) {
  PrecisionComplex qpow = pow(q, lo);
  Real gap = Real(0.05, digits);
  for (long j = lo; j <= hi; ++j) {
    if (!qpow.is_zero() && abs(v / qpow - make_complex(1, 0, digits)) < gap) return false;
    qpow *= q;
  }
  return true;
}

}  // namespace

bool constraints_hold(const Identity& ident, const ParamEnv& env, double margin_floor,
                      const TruncationControl& ctl) {
  unsigned d = env.digits();
  try {
    for (const auto& c : ident.constraints) {
      PrecisionComplex v = eval(*c.lhs, env, ctl);
      switch (c.kind) {
        case ConstraintKind::ModulusLess: {
          PrecisionComplex w = eval(*c.rhs, env, ctl);
          Real slack = Real(1.0 - std::max(c.margin, margin_floor), d);
          if (!(abs(v) < slack * abs(w))) return false;
          break;
        }
        case ConstraintKind::NotInQPowerLattice:
          if (!lattice_clear(v, env.q.value(), c.lo_exponent, c.hi_exponent, d)) return false;
          break;
        case ConstraintKind::NonZero:
          if (!(abs(v) > ten_pow(-8, d))) return false;
          break;
        case ConstraintKind::NotUnity:
          if (!(abs(v - make_complex(1, 0, d)) > Real(0.01, d))) return false;
          break;
        case ConstraintKind::RePositive:
          if (!(v.real() > Real(0.05, d))) return false;
          break;
      }
    }
  } catch (const Error&) {
    return false;
  }
  return true;
}

ParamEnv sample_point(const Identity& ident, const SampleConfig& cfg,
                      std::uint64_t trial_index) {
  SplitMix64 rng{cfg.seed ^ trial_index};
  auto ctl = TruncationControl::for_digits(cfg.digits);
  for (unsigned attempt = 0; attempt < cfg.max_rejections; ++attempt) {
    ParamEnv env{{}, QBase(draw_value(rng, cfg.q_lo, cfg.q_hi, cfg.digits, cfg.complex_q))};
    for (const auto& s : ident.symbols)
      env.bindings.emplace(s.name, draw_value(rng, s.lo, s.hi, cfg.digits, true));
    if (!constraints_hold(ident, env, cfg.margin_floor, ctl)) continue;

    // reject structurally degenerate points: any product prefactor
    // within 1e-8 of a zero would make the comparison uninformative
    std::vector<ExprPtr> factors;
    collect_factors(ident.lhs, factors);
    for (const auto& r : ident.rhs_forms) collect_factors(r, factors);
    bool degenerate = false;
    try {
      for (const auto& f : factors)
        if (abs(eval(*f, env, ctl)) < ten_pow(-8, cfg.digits)) {
          degenerate = true;
          break;
        }
    } catch (const Error&) {
      degenerate = true;
    }
    if (degenerate) continue;
    return env;
  }
  throw SamplingExhaustedError("no admissible point for '" + ident.id + "' within " +
                               std::to_string(cfg.max_rejections) + " attempts");
}

VerificationReport verify(const Identity& ident, const SampleConfig& cfg) {
  VerificationReport rep;
  rep.id = ident.id;
  rep.anchor = ident.anchor;
  rep.seed = cfg.seed;
  rep.digits = cfg.digits;
  rep.requested_trials = cfg.trials;
  rep.max_rel_error = make_real(0, cfg.digits);
  rep.median_rel_error = make_real(0, cfg.digits);
  rep.negative.present = static_cast<bool>(ident.negative_variant);

  auto ctl = TruncationControl::for_digits(cfg.digits);
  Real threshold = ten_pow(-(static_cast<int>(cfg.digits) - 10), cfg.digits);
  std::vector<Real> errors;

  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    TrialRecord rec;
    rec.index = t;
    ParamEnv env = sample_point(ident, cfg, t);
    rec.params.emplace_back("q", env.q.value());
    for (const auto& [name, v] : env.bindings) rec.params.emplace_back(name, v);
    try {
      EvalStats stats;
      rec.values.push_back(eval(*ident.lhs, env, ctl, &stats));
      for (const auto& r : ident.rhs_forms) rec.values.push_back(eval(*r, env, ctl, &stats));
      rec.terms = stats.terms;
      Real worst = make_real(0, cfg.digits);
      for (std::size_t i = 0; i < rec.values.size(); ++i)
        for (std::size_t j = i + 1; j < rec.values.size(); ++j) {
          Real e = rel_error(rec.values[i], rec.values[j], cfg.digits);
          if (e > worst) worst = e;
        }
      rec.rel_error = worst;
      errors.push_back(worst);
      if (worst <= threshold) {
        rec.status = "pass";
        ++rep.pass_count;
      } else {
        rec.status = "fail";
        ++rep.fail_count;
      }
      if (worst > rep.max_rel_error) rep.max_rel_error = worst;
      if (ident.negative_variant) {
        try {
          PrecisionComplex nv = eval(*ident.negative_variant, env, ctl);
          ++rep.negative.checked;
          if (rel_error(rec.values[0], nv, cfg.digits) > ten_pow(-6, cfg.digits))
            ++rep.negative.disagreeing;
        } catch (const Error&) {
          ++rep.negative.checked;
          ++rep.negative.disagreeing;  // refuses to evaluate where the true form does
        }
      }
    } catch (const Error& err) {
      rec.status = "skipped-degenerate";
      rec.reason = err.what();
      rec.rel_error = make_real(0, cfg.digits);
      ++rep.skip_count;
    }
    rep.trials.push_back(std::move(rec));
  }

  if (!errors.empty()) {
    std::sort(errors.begin(), errors.end());
    rep.median_rel_error = errors[(errors.size() - 1) / 2];
  }
  if (rep.fail_count > 0) {
    rep.failure_reason = "relative error above threshold";
  } else if (5 * rep.skip_count > rep.requested_trials) {
    rep.failure_reason = "more than 20% of trials skipped";
  }
  rep.passed = rep.failure_reason.empty();
  return rep;
}

std::vector<VerificationReport> verify_all(const Catalog& cat, const SampleConfig& cfg) {
  std::vector<VerificationReport> out;
  for (const auto& id : cat.list_ids()) out.push_back(verify(cat.get(id), cfg));
  return out;
}

namespace {

std::string real_str(const Real& r) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(6) << r;
  return os.str();
}

std::string cplx_str(const PrecisionComplex& z) {
  return z.real().str() + "," + z.imag().str();
}

std::string timestamp_now() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

json report_to_json(const VerificationReport& r) {
  json jr;
  jr["id"] = r.id;
  jr["paper_label"] = r.anchor;
  jr["seed"] = r.seed;
  jr["digits"] = r.digits;
  jr["trials"] = r.requested_trials;
  json trials = json::array();
  for (const auto& t : r.trials) {
    json jt;
    jt["index"] = t.index;
    json params = json::object();
    for (const auto& [name, v] : t.params) params[name] = cplx_str(v);
    jt["params"] = params;
    json values = json::array();
    for (const auto& v : t.values) values.push_back(cplx_str(v));
    jt["values"] = values;
    jt["rel_error"] = real_str(t.rel_error);
    jt["terms"] = t.terms;
    jt["status"] = t.status;
    if (!t.reason.empty()) jt["reason"] = t.reason;
    trials.push_back(std::move(jt));
  }
  jr["trial_records"] = std::move(trials);
  jr["aggregate"] = {{"max_rel_error", real_str(r.max_rel_error)},
                     {"median_rel_error", real_str(r.median_rel_error)},
                     {"pass_count", r.pass_count},
                     {"fail_count", r.fail_count},
                     {"skip_count", r.skip_count},
                     {"passed", r.passed},
                     {"failure_reason", r.failure_reason}};
  if (r.negative.present) {
    jr["negative_variant_result"] = {{"checked", r.negative.checked},
                                     {"disagreeing", r.negative.disagreeing}};
  } else {
    jr["negative_variant_result"] = nullptr;
  }
  return jr;
}

std::string markdown_from(const json& doc) {
  std::ostringstream os;
  os << "# Identity verification report\n\n";
  os << "| id | label | digits | trials | pass | fail | skip | max rel err | status |\n";
  os << "|----|-------|--------|--------|------|------|------|-------------|--------|\n";
  for (const auto& jr : doc) {
    const auto& agg = jr["aggregate"];
    os << "| " << jr["id"].get<std::string>() << " | " << jr["paper_label"].get<std::string>()
       << " | " << jr["digits"] << " | " << jr["trials"] << " | " << agg["pass_count"] << " | "
       << agg["fail_count"] << " | " << agg["skip_count"] << " | "
       << agg["max_rel_error"].get<std::string>() << " | "
       << (agg["passed"].get<bool>() ? "pass" : "FAIL") << " |\n";
  }
  return os.str();
}

}  // namespace

std::string report_json(const std::vector<VerificationReport>& reports) {
  std::string stamp = timestamp_now();
  json arr = json::array();
  for (const auto& r : reports) {
    json jr = report_to_json(r);
    jr["timestamp"] = stamp;
    arr.push_back(std::move(jr));
  }
  return arr.dump(2) + "\n";
}

std::string report_markdown(const std::vector<VerificationReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return markdown_from(arr);
}

std::string report_json_to_markdown(const std::string& json_text) {
  json doc = json::parse(json_text);
  return markdown_from(doc);
}

}  // namespace qseries
