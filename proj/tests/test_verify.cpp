#include "qseries/verify.hpp"

#include "qseries/errors.hpp"

#include <doctest.h>

#include "test_support.hpp"

using namespace qseries;

namespace {

Identity ramanujan_bilateral() {
  Identity id;
  id.id = "bilateral-1-1";
  id.anchor = "Ramanujan 1psi1";
  id.symbols = {{"a", 0.3, 1.8}, {"b", 0.3, 1.8}, {"z", 0.3, 1.8}};
  Constraint c;
  c.kind = ConstraintKind::ModulusLess;
  c.lhs = parse("b / a");
  c.rhs = parse("z");
  id.constraints.push_back(c);
  Constraint c2;
  c2.kind = ConstraintKind::ModulusLess;
  c2.lhs = parse("z");
  c2.rhs = parse("1");
  id.constraints.push_back(c2);
  id.lhs = parse("psi(a; b; q; z)");
  id.rhs_forms.push_back(parse(
      "qpoch_inf(q, b / a, a * z, q / (a * z); q) / qpoch_inf(b, q / a, z, b / (a * z); q)"));
  id.negative_variant = parse("psi(a; b; q; z * q)");
  return id;
}

}  // namespace

TEST_CASE("sampling is deterministic per (seed, trial)") {
  Identity id = ramanujan_bilateral();
  SampleConfig cfg;
  cfg.seed = 42;
  cfg.digits = 30;
  ParamEnv e1 = sample_point(id, cfg, 0);
  ParamEnv e2 = sample_point(id, cfg, 0);
  CHECK(e1.q.value() == e2.q.value());
  CHECK(e1.bindings.at("a") == e2.bindings.at("a"));
  CHECK(e1.bindings.at("z") == e2.bindings.at("z"));
  ParamEnv e3 = sample_point(id, cfg, 1);
  CHECK(e1.q.value() != e3.q.value());
  SampleConfig other = cfg;
  other.seed = 43;
  ParamEnv e4 = sample_point(id, other, 0);
  CHECK(e1.q.value() != e4.q.value());
}

TEST_CASE("sampled points satisfy the written constraints with extra slack") {
  Identity id = ramanujan_bilateral();
  SampleConfig cfg;
  cfg.seed = 42;
  cfg.digits = 30;
  cfg.margin_floor = 0.2;
  auto ctl = TruncationControl::for_digits(cfg.digits);
  for (std::uint64_t t = 0; t < 5; ++t) {
    ParamEnv env = sample_point(id, cfg, t);
    Real ratio = abs(env.bindings.at("b") / env.bindings.at("a"));
    Real zmod = abs(env.bindings.at("z"));
    CHECK(ratio < Real(0.8, 30) * zmod);
    CHECK(zmod < Real(0.8, 30));
    CHECK(constraints_hold(id, env, cfg.margin_floor, ctl));
  }
}

TEST_CASE("unsatisfiable constraints exhaust the sampler") {
  Identity id = ramanujan_bilateral();
  Constraint impossible;
  impossible.kind = ConstraintKind::ModulusLess;
  impossible.lhs = parse("2");
  impossible.rhs = parse("1");
  id.constraints.push_back(impossible);
  SampleConfig cfg;
  cfg.digits = 20;
  cfg.max_rejections = 50;
  CHECK_THROWS_AS(sample_point(id, cfg, 0), SamplingExhaustedError);
}

TEST_CASE("a true identity verifies and its corrupted form is flagged") {
  Identity id = ramanujan_bilateral();
  SampleConfig cfg;
  cfg.seed = 7;
  cfg.trials = 4;
  cfg.digits = 30;
  VerificationReport rep = verify(id, cfg);
  CHECK(rep.passed);
  CHECK(rep.pass_count == 4);
  CHECK(rep.fail_count == 0);
  CHECK(rep.skip_count == 0);
  CHECK(rep.max_rel_error < qtest::tol(-20, 30));
  CHECK(rep.median_rel_error <= rep.max_rel_error);
  CHECK(rep.negative.present);
  CHECK(rep.negative.checked == 4);
  CHECK(rep.negative.disagreeing == 4);
  for (const auto& t : rep.trials) {
    CHECK(t.status == "pass");
    CHECK(t.values.size() == 2);
    CHECK(t.terms > 0);
  }
}

TEST_CASE("a wrong identity fails verification") {
  Identity id = ramanujan_bilateral();
  id.rhs_forms[0] = parse(
      "qpoch_inf(q, b / a, a * z, q / (a * z); q) / qpoch_inf(b, q / a, z, b / (a * z); q)"
      " * (1 + z / 100)");
  SampleConfig cfg;
  cfg.seed = 7;
  cfg.trials = 3;
  cfg.digits = 30;
  VerificationReport rep = verify(id, cfg);
  CHECK_FALSE(rep.passed);
  CHECK(rep.fail_count == 3);
  CHECK(rep.failure_reason == "relative error above threshold");
}

TEST_CASE("reports are deterministic apart from the timestamp") {
  Identity id = ramanujan_bilateral();
  SampleConfig cfg;
  cfg.seed = 11;
  cfg.trials = 2;
  cfg.digits = 25;
  std::string j1 = report_json({verify(id, cfg)});
  std::string j2 = report_json({verify(id, cfg)});
  auto strip = [](std::string s) {
    std::size_t p = s.find("\"timestamp\"");
    if (p != std::string::npos) {
      std::size_t e = s.find('\n', p);
      s.erase(p, e - p);
    }
    return s;
  };
  CHECK(strip(j1) == strip(j2));
  CHECK(j1.find("\"bilateral-1-1\"") != std::string::npos);
  CHECK(j1.find("\"pass\"") != std::string::npos);

  std::string md = report_json_to_markdown(j1);
  CHECK(md.find("bilateral-1-1") != std::string::npos);
  CHECK(md.find("| pass |") != std::string::npos);
}
