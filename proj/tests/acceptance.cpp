// End-to-end acceptance gate.  Each criterion prints exactly one PASS/FAIL
// line; the process exits nonzero if any criterion fails.  The catalog
// directory is argv[1], or QIDENT_CATALOG, or ./catalog.

#include "qseries/catalog.hpp"
#include "qseries/errors.hpp"
#include "qseries/expr.hpp"
#include "qseries/qcore.hpp"
#include "qseries/rng.hpp"
#include "qseries/verify.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

using namespace qseries;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  if (ok) {
    std::printf("PASS - %s\n", name.c_str());
  } else {
    std::printf("FAIL - %s: %s\n", name.c_str(), detail.c_str());
    ++g_failures;
  }
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Real rel_err(const PrecisionComplex& x, const PrecisionComplex& y) {
  Real scale = abs(x);
  Real sy = abs(y);
  if (sy > scale) scale = sy;
  if (scale.is_zero()) return abs(x - y);
  return abs(x - y) / scale;
}

Real tol10(int exp10, unsigned digits) {
  using boost::multiprecision::pow;
  return pow(make_real(10, digits + 10), exp10);
}

PrecisionComplex rand_annulus(SplitMix64& rng, double lo, double hi, unsigned digits) {
  using boost::multiprecision::exp;
  using boost::multiprecision::log;
  Real l(lo, digits), h(hi, digits);
  Real m = exp(log(l) + Real(rng.uniform(), digits) * (log(h) - log(l)));
  Real phase = 2 * pi_value(digits).real() * Real(rng.uniform(), digits);
  return polar(m, phase);
}

QBase rand_base(SplitMix64& rng, unsigned digits) {
  Real m(0.05 + 0.55 * rng.uniform(), digits);
  return QBase(PrecisionComplex(m, make_real(0, digits)));
}

// Bilateral Laurent-series oracle for the theta product, normalized by
// (q;q)_inf; independent of the library's product evaluation.
PrecisionComplex theta_by_sum(const PrecisionComplex& z, const QBase& q, unsigned digits) {
  unsigned work = digits + 15;
  PrecisionComplex zw = z.at_digits(work);
  QBase qw(q.value().at_digits(work));
  const PrecisionComplex& qv = qw.value();
  using boost::multiprecision::pow;
  Real cutoff = pow(make_real(10, work), -static_cast<int>(work));
  PrecisionComplex sum(1, 0, work), term(1, 0, work), qpow(1, 0, work);
  for (long n = 0; n < 100000; ++n) {
    term *= qpow * (-zw);
    qpow *= qv;
    sum += term;
    if (abs(term) < cutoff && n > 2) break;
  }
  term = PrecisionComplex(1, 0, work);
  qpow = PrecisionComplex(1, 0, work);
  for (long n = 0; n > -100000; --n) {
    qpow *= qv;
    term *= qpow / (-zw);
    sum += term;
    if (abs(term) < cutoff && n < -2) break;
  }
  PrecisionComplex value =
      sum / qpoch_inf(PrecisionComplex(qv), qw, TruncationControl::for_digits(work));
  return value.at_digits(digits);
}

// ---------------------------------------------------------------------------
// Criterion 1: product-kernel invariants at random points.

bool kernel_invariants(std::string& detail) {
  const unsigned D = 40;
  const int N = 100;
  auto ctl = TruncationControl::for_digits(D);
  Real tol = tol10(-30, D);
  auto t0 = std::chrono::steady_clock::now();

  SplitMix64 rng(2024);
  for (int i = 0; i < N; ++i) {  // index splitting
    QBase q = rand_base(rng, D);
    PrecisionComplex a = rand_annulus(rng, 0.1, 3.0, D);
    long m = static_cast<long>(rng.next() % 16), n = static_cast<long>(rng.next() % 15);
    PrecisionComplex lhs = qpoch_n(a, q, m + n);
    PrecisionComplex rhs = qpoch_n(a, q, m) * qpoch_n(a * pow(q.value(), m), q, n);
    if (rel_err(lhs, rhs) >= tol) { detail = "index splitting"; return false; }
  }
  for (int i = 0; i < N; ++i) {  // finite times shifted infinite
    QBase q = rand_base(rng, D);
    PrecisionComplex a = rand_annulus(rng, 0.1, 2.0, D);
    long n = static_cast<long>(rng.next() % 21);
    PrecisionComplex lhs = qpoch_n(a, q, n) * qpoch_inf(a * pow(q.value(), n), q, ctl);
    if (rel_err(lhs, qpoch_inf(a, q, ctl)) >= tol) {
      detail = "finite/infinite consistency"; return false;
    }
  }
  for (int i = 0; i < N; ++i) {  // negative index
    QBase q = rand_base(rng, D);
    PrecisionComplex a = rand_annulus(rng, 0.3, 3.0, D);
    long n = 1 + static_cast<long>(rng.next() % 20);
    PrecisionComplex lhs;
    try {
      lhs = qpoch_n(a, q, -n);
    } catch (const PoleError&) {
      continue;
    }
    PrecisionComplex rhs =
        pow(q.value(), n * (n + 1) / 2) * pow(-a, -n) / qpoch_n(q.value() / a, q, n);
    if (rel_err(lhs, rhs) >= tol) { detail = "negative index"; return false; }
  }
  for (int i = 0; i < N; ++i) {  // base inversion vs direct inverted product
    QBase q = rand_base(rng, D);
    PrecisionComplex a = rand_annulus(rng, 0.3, 2.0, D);
    long n = 1 + static_cast<long>(rng.next() % 9);
    PrecisionComplex got = qpoch_base_inverted(a, q, n);
    PrecisionComplex prod(1, 0, D), qinv(1, 0, D), one(1, 0, D);
    for (long j = 0; j < n; ++j) {
      prod *= one - a * qinv;
      qinv /= q.value();
    }
    if (rel_err(got, prod) >= tol) { detail = "base inversion"; return false; }
  }
  for (int i = 0; i < N; ++i) {  // critical vanishing-parameter limit
    QBase q = rand_base(rng, D);
    PrecisionComplex x = rand_annulus(rng, 0.3, 1.5, D);
    long n = 1 + static_cast<long>(rng.next() % 7);
    using boost::multiprecision::pow;
    // The defect scales like |a| / (|x| q^{n-1}); 1e-45 keeps it below
    // 1e-30 across the whole sampled base range.
    Real mod = pow(make_real(10, D), -45);
    PrecisionComplex a = polar(mod, 2 * pi_value(D).real() * Real(rng.uniform(), D));
    PrecisionComplex approx = qseries::pow(a, n) * qpoch_n(x / a, q, n);
    PrecisionComplex target = qseries::pow(q.value(), n * (n - 1) / 2) * qseries::pow(-x, n);
    if (rel_err(approx, target) >= tol) { detail = "vanishing-parameter limit"; return false; }
  }
  for (int i = 0; i < N; ++i) {  // theta product vs bilateral sum
    QBase q = rand_base(rng, D);
    PrecisionComplex z = rand_annulus(rng, 0.2, 2.0, D);
    if (rel_err(theta(z, q, ctl), theta_by_sum(z, q, D)) >= tol) {
      detail = "theta triple product"; return false;
    }
  }
  for (int i = 0; i < N; ++i) {  // square-argument splitting
    QBase q = rand_base(rng, D);
    PrecisionComplex a = rand_annulus(rng, 0.1, 1.5, D);
    PrecisionComplex sa = sqrt(q.value()) * a;
    PrecisionComplex lhs = qpoch_multi_inf({a, -a, sa, -sa}, q, ctl);
    if (rel_err(lhs, qpoch_inf(a * a, q, ctl)) >= tol) {
      detail = "square-argument splitting"; return false;
    }
  }
  for (int i = 0; i < N; ++i) {  // theta shift quotient
    QBase q = rand_base(rng, D);
    PrecisionComplex a = rand_annulus(rng, 0.2, 2.0, D);
    PrecisionComplex lhs = theta(a, q, ctl) / theta(q.value() * a, q, ctl);
    if (rel_err(lhs, -a) >= tol) { detail = "theta shift quotient"; return false; }
  }
  for (int i = 0; i < N; ++i) {  // theta addition residual
    QBase q = rand_base(rng, D);
    PrecisionComplex a = rand_annulus(rng, 0.3, 2.0, D);
    PrecisionComplex c = rand_annulus(rng, 0.3, 2.0, D);
    PrecisionComplex d = rand_annulus(rng, 0.3, 2.0, D);
    PrecisionComplex e = rand_annulus(rng, 0.3, 2.0, D);
    PrecisionComplex s = theta_multi(
        {e, e / c, q.value() * a / d, q.value() * c / (a * d)}, q, ctl);
    Real scale = abs(s);
    if (scale < 1) scale = make_real(1, D);
    if (abs(theta_addition_residual(a, c, d, e, q, ctl)) >= tol * scale) {
      detail = "theta addition residual"; return false;
    }
  }

  double dt = seconds_since(t0);
  if (dt >= 60.0) {
    detail = "runtime " + std::to_string(dt) + "s exceeds 60s";
    return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Shared helper: verify a batch of catalog ids at a fixed configuration and
// demand a max relative error bound.

bool verify_batch(const Catalog& cat, const std::vector<std::string>& ids,
                  unsigned trials, unsigned digits, int err_exp10, std::string& detail,
                  std::vector<VerificationReport>* out = nullptr) {
  SampleConfig cfg;
  cfg.seed = 7;
  cfg.trials = trials;
  cfg.digits = digits;
  Real bound = tol10(err_exp10, digits);
  for (const auto& id : ids) {
    VerificationReport rep = verify(cat.get(id), cfg);
    if (out) out->push_back(rep);
    if (!rep.passed) {
      detail = id + " failed: " + rep.failure_reason;
      return false;
    }
    if (rep.max_rel_error > bound) {
      std::ostringstream os;
      os << id << " max rel err " << rep.max_rel_error.str(3) << " above 1e" << err_exp10;
      detail = os.str();
      return false;
    }
  }
  return true;
}

// The nonterminating very well poised 6W5 summation, stated inline since it
// enters the catalog only as a proof device.
Identity six_w_five() {
  Identity id;
  id.id = "6W5";
  id.anchor = "6W5 summation";
  id.symbols = {{"a", 0.3, 1.8}, {"b", 0.8, 1.8}, {"c", 0.8, 1.8}, {"d", 0.8, 1.8}};
  Constraint c;
  c.kind = ConstraintKind::ModulusLess;
  c.lhs = parse("q * a");
  c.rhs = parse("b * c * d");
  id.constraints.push_back(c);
  id.lhs = parse("W(a; b, c, d; q; q * a / (b * c * d))");
  id.rhs_forms.push_back(
      parse("qpoch_inf(q * a, q * a / (b * c), q * a / (b * d), q * a / (c * d); q)"
            " / qpoch_inf(q * a / b, q * a / c, q * a / d, q * a / (b * c * d); q)"));
  return id;
}

bool closed_summations(const Catalog& cat, std::string& detail) {
  auto t0 = std::chrono::steady_clock::now();
  if (!verify_batch(cat, {"B1", "B2", "L9", "I11", "I12", "U13", "U14"}, 25, 50, -40,
                    detail))
    return false;
  SampleConfig cfg;
  cfg.seed = 7;
  cfg.trials = 25;
  cfg.digits = 50;
  VerificationReport rep = verify(six_w_five(), cfg);
  if (!rep.passed || rep.max_rel_error > tol10(-40, 50)) {
    detail = "6W5 summation: " + (rep.passed ? "error above bound" : rep.failure_reason);
    return false;
  }
  double dt = seconds_since(t0);
  if (dt >= 120.0) {
    detail = "runtime " + std::to_string(dt) + "s exceeds 120s";
    return false;
  }
  return true;
}

const std::vector<std::string> kFlagship = {
    "B6",  "B7",  "B8",  "B9",  "B10", "B11", "B12", "B13",
    "B14", "B15", "B16", "B17", "B18", "B19", "B20"};

bool flagship(const Catalog& cat, std::string& detail) {
  auto t0 = std::chrono::steady_clock::now();
  if (!verify_batch(cat, kFlagship, 15, 50, -40, detail)) return false;
  double dt = seconds_since(t0);
  if (dt >= 600.0) {
    detail = "runtime " + std::to_string(dt) + "s exceeds 600s";
    return false;
  }
  return true;
}

bool discrimination(const Catalog& cat, std::string& detail) {
  SampleConfig cfg;
  cfg.seed = 7;
  cfg.trials = 20;
  cfg.digits = 40;
  VerificationReport rep = verify(cat.get("B10"), cfg);
  if (!rep.passed) {
    detail = "corrected form failed: " + rep.failure_reason;
    return false;
  }
  if (!rep.negative.present || rep.negative.checked < 15) {
    detail = "known-wrong variant was not exercised at enough points";
    return false;
  }
  if (100 * rep.negative.disagreeing < 95 * rep.negative.checked) {
    detail = "known-wrong variant disagreed at only " +
             std::to_string(rep.negative.disagreeing) + "/" +
             std::to_string(rep.negative.checked) + " points";
    return false;
  }
  return true;
}

bool coherence(const Catalog& cat, std::string& detail) {
  return verify_batch(
      cat, {"U8", "U9", "U10", "U11", "U12", "L1", "L4", "L6", "L7", "L8", "I9"}, 15, 50,
      -40, detail);
}

bool implied(const Catalog& cat, std::string& detail) {
  std::vector<std::string> ids;
  for (int k = 1; k <= 13; ++k) ids.push_back("I" + std::to_string(k));
  return verify_batch(cat, ids, 15, 50, -40, detail);
}

bool classical_limit(const Catalog& cat, std::string& detail) {
  std::string sub;
  if (!verify_batch(cat, {"C1"}, 5, 40, -20, sub)) {
    detail = "unit-argument bilateral transformation: " + sub;
    return false;
  }

  // Basic-to-classical consistency: the eight-term bilateral series with
  // q^alpha parameters must approach the classical bilateral value as the
  // base tends to 1, with monotonically shrinking error.
  const unsigned DC = 30;
  const double expo[7] = {0.1, 0.2, 0.3, 0.25, 0.15, 0.2, 0.1};
  const char* names[7] = {"a", "b", "c", "d", "e", "f", "g"};
  ParamEnv cenv{{}, QBase(PrecisionComplex("0.5", "0", DC))};
  for (int j = 0; j < 7; ++j)
    cenv.bindings.emplace(names[j], PrecisionComplex(Real(expo[j], DC), make_real(0, DC)));
  PrecisionComplex classical =
      eval(*cat.get("C1").lhs, cenv, TruncationControl::for_digits(DC));

  const Identity& bident = cat.get("B11");
  const unsigned DB = 20;
  Real prev_err = make_real(1000, DB);
  for (int k = 4; k <= 10; ++k) {
    using boost::multiprecision::pow;
    Real qk = make_real(1, DB) - pow(make_real(2, DB), -k);
    ParamEnv env{{}, QBase(PrecisionComplex(qk, make_real(0, DB)))};
    for (int j = 0; j < 7; ++j)
      env.bindings.emplace(names[j],
                           PrecisionComplex(pow(qk, Real(expo[j], DB)), make_real(0, DB)));
    PrecisionComplex basic = eval(*bident.lhs, env, TruncationControl::for_digits(DB));
    Real err = rel_err(basic, classical.at_digits(DB));
    if (err >= prev_err) {
      std::ostringstream os;
      os << "error not monotone at k=" << k << ": " << err.str(3) << " vs "
         << prev_err.str(3);
      detail = os.str();
      return false;
    }
    prev_err = err;
  }
  return true;
}

bool precision_scaling(const Catalog& cat, std::string& detail) {
  return verify_batch(cat, kFlagship, 15, 70, -60, detail);
}

std::string strip_timestamps(const std::string& json) {
  static const std::regex ts("\"timestamp\"[^,}]*");
  return std::regex_replace(json, ts, "\"timestamp\": \"\"");
}

bool determinism(const Catalog& cat, std::string& detail) {
  SampleConfig cfg;
  cfg.seed = 7;
  cfg.trials = 3;
  cfg.digits = 40;
  std::string r1 = strip_timestamps(report_json(verify_all(cat, cfg)));
  std::string r2 = strip_timestamps(report_json(verify_all(cat, cfg)));
  if (r1 != r2) {
    detail = "reports differ beyond the timestamp";
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  std::string dir = "catalog";
  if (const char* env = std::getenv("QIDENT_CATALOG")) dir = env;
  if (argc > 1) dir = argv[1];

  Catalog cat;
  try {
    cat = Catalog::load(dir);
  } catch (const std::exception& ex) {
    std::printf("FAIL - catalog load: %s\n", ex.what());
    return 1;
  }

  auto run = [&](const std::string& name, auto fn) {
    std::string detail;
    bool ok = false;
    try {
      ok = fn(detail);
    } catch (const std::exception& ex) {
      detail = std::string("exception: ") + ex.what();
    }
    report(name, ok, detail);
  };

  run("kernel invariants (9 product/theta properties, 100 points, 40 digits)",
      [&](std::string& d) { return kernel_invariants(d); });
  run("closed summations (25 points, 50 digits, 1e-40)",
      [&](std::string& d) { return closed_summations(cat, d); });
  run("flagship transformations (15 points, 50 digits, 1e-40)",
      [&](std::string& d) { return flagship(cat, d); });
  run("discrimination of the known-wrong three-term variant",
      [&](std::string& d) { return discrimination(cat, d); });
  run("multi-form coherence (pairwise, 15 points, 1e-40)",
      [&](std::string& d) { return coherence(cat, d); });
  run("implied-identity family I1-I13 (15 points, 1e-40)",
      [&](std::string& d) { return implied(cat, d); });
  run("classical limit (5 real points at 1e-20; monotone base-to-1 error)",
      [&](std::string& d) { return classical_limit(cat, d); });
  run("precision scaling (flagship at 70 digits, 1e-60)",
      [&](std::string& d) { return precision_scaling(cat, d); });
  run("determinism (verify-all twice, seed 7, identical reports)",
      [&](std::string& d) { return determinism(cat, d); });

  return g_failures == 0 ? 0 : 1;
}
