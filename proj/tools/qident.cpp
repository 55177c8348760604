#include "qseries/catalog.hpp"
#include "qseries/errors.hpp"
#include "qseries/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace qseries;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSampling = 3;

std::string catalog_dir(const std::string& cli_value) {
  if (!cli_value.empty()) return cli_value;
  if (const char* env = std::getenv("QIDENT_CATALOG")) return env;
  return "catalog";
}

// "0.3+0.1i", "0.4", "-0.2i", "1e-2+3e-4i"
PrecisionComplex parse_complex(const std::string& text, unsigned digits) {
  std::string t;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) throw DomainError("empty numeric value");
  bool imaginary_only = t.back() == 'i';
  std::string body = imaginary_only ? t.substr(0, t.size() - 1) : t;
  // split at the last +/- that is not a leading sign or exponent sign
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    char c = body[k];
    if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (imaginary_only && split == std::string::npos)
    return {make_real(0, digits), make_real(body.empty() || body == "+" ? "1"
                                            : body == "-"              ? "-1"
                                                                       : body,
                                            digits)};
  if (!imaginary_only) return {make_real(body, digits), make_real(0, digits)};
  std::string re = body.substr(0, split);
  std::string im = body.substr(split);
  if (im == "+") im = "1";
  if (im == "-") im = "-1";
  return {make_real(re, digits), make_real(im, digits)};
}

int cmd_list(const std::string& dir) {
  Catalog cat = Catalog::load(dir);
  for (const auto& id : cat.list_ids()) std::cout << id << "\n";
  return kExitPass;
}

int cmd_show(const std::string& dir, const std::string& id) {
  Catalog cat = Catalog::load(dir);
  const Identity& ident = cat.get(id);
  std::cout << "id: " << ident.id << "\n";
  if (!ident.anchor.empty()) std::cout << "label: " << ident.anchor << "\n";
  std::cout << "symbols:";
  for (const auto& s : ident.symbols)
    std::cout << " " << s.name << " [" << s.lo << ", " << s.hi << "]";
  std::cout << "\n";
  std::cout << "constraints: " << ident.constraints.size() << "\n";
  std::cout << "lhs: " << print(*ident.lhs) << "\n";
  for (const auto& r : ident.rhs_forms) std::cout << "rhs: " << print(*r) << "\n";
  if (ident.negative_variant)
    std::cout << "negative: " << print(*ident.negative_variant) << "\n";
  if (!ident.note.empty()) std::cout << "note: " << ident.note << "\n";
  return kExitPass;
}

int cmd_eval(const std::string& text, const std::vector<std::string>& sets, unsigned digits) {
  ExprPtr e = parse(text);
  std::map<std::string, PrecisionComplex> bindings;
  PrecisionComplex qval(make_real("0.1", digits), make_real(0, digits));
  for (const auto& s : sets) {
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) throw DomainError("--set expects name=value: " + s);
    std::string name = s.substr(0, eq);
    PrecisionComplex v = parse_complex(s.substr(eq + 1), digits);
    if (name == "q")
      qval = v;
    else
      bindings[name] = v;
  }
  ParamEnv env{std::move(bindings), QBase(qval)};
  auto ctl = TruncationControl::for_digits(digits);
  PrecisionComplex v = eval(*e, env, ctl);
  std::cout << v.str() << "\n";
  return kExitPass;
}

int finish_verification(const std::vector<VerificationReport>& reports,
                        const std::string& json_out) {
  std::string doc = report_json(reports);
  if (json_out.empty()) {
    std::cout << doc;
  } else {
    std::ofstream out(json_out);
    out << doc;
    for (const auto& r : reports)
      std::cerr << r.id << ": " << (r.passed ? "pass" : "FAIL") << "\n";
  }
  for (const auto& r : reports)
    if (!r.passed) return kExitFail;
  return kExitPass;
}

int cmd_report(const std::string& in, const std::string& format) {
  if (format != "markdown") throw DomainError("unknown report format: " + format);
  std::ifstream is(in);
  if (!is) throw NotFoundError("cannot read report file: " + in);
  std::stringstream buf;
  buf << is.rdbuf();
  std::cout << report_json_to_markdown(buf.str());
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical verifier for q-series and bilateral hypergeometric identities"};
  app.require_subcommand(1);
  std::string dir_opt;
  app.add_option("--catalog", dir_opt, "catalog directory (default: $QIDENT_CATALOG or ./catalog)");

  auto* list = app.add_subcommand("list", "list identity ids")->fallthrough();

  std::string show_id;
  auto* show = app.add_subcommand("show", "print one identity")->fallthrough();
  show->add_option("id", show_id)->required();

  std::string eval_text;
  std::vector<std::string> eval_sets;
  unsigned eval_digits = 40;
  auto* evalc = app.add_subcommand("eval", "evaluate an expression")->fallthrough();
  evalc->add_option("expr", eval_text)->required();
  evalc->add_option("--set", eval_sets, "bind a symbol, e.g. --set a=0.3+0.1i");
  evalc->add_option("--digits", eval_digits);

  SampleConfig cfg;
  std::string verify_id, json_out;
  auto add_verify_opts = [&](CLI::App* c) {
    c->add_option("--trials", cfg.trials);
    c->add_option("--digits", cfg.digits);
    c->add_option("--seed", cfg.seed);
    c->add_option("--margin", cfg.margin_floor);
    c->add_flag("--complex-q", cfg.complex_q);
    c->add_option("--json-out", json_out, "write the JSON report to a file");
  };
  auto* verifyc = app.add_subcommand("verify", "verify one identity")->fallthrough();
  verifyc->add_option("id", verify_id)->required();
  add_verify_opts(verifyc);
  auto* verify_allc = app.add_subcommand("verify-all", "verify the whole catalog")->fallthrough();
  add_verify_opts(verify_allc);

  std::string report_in, report_format = "markdown";
  auto* reportc = app.add_subcommand("report", "render a JSON report")->fallthrough();
  reportc->add_option("--in", report_in)->required();
  reportc->add_option("--format", report_format);

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) return cmd_list(catalog_dir(dir_opt));
    if (show->parsed()) return cmd_show(catalog_dir(dir_opt), show_id);
    if (evalc->parsed()) return cmd_eval(eval_text, eval_sets, eval_digits);
    if (verifyc->parsed()) {
      Catalog cat = Catalog::load(catalog_dir(dir_opt));
      return finish_verification({verify(cat.get(verify_id), cfg)}, json_out);
    }
    if (verify_allc->parsed()) {
      Catalog cat = Catalog::load(catalog_dir(dir_opt));
      return finish_verification(verify_all(cat, cfg), json_out);
    }
    if (reportc->parsed()) return cmd_report(report_in, report_format);
  } catch (const SamplingExhaustedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSampling;
  } catch (const qseries::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
