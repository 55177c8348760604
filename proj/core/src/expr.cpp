#include "qseries/expr.hpp"

#include "qseries/classical.hpp"
#include "qseries/errors.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>

namespace qseries {

namespace ast {

ExprPtr constant(const std::string& literal) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Const;
  e->text = literal;
  return e;
}

ExprPtr sym(const std::string& name) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Sym;
  e->text = name;
  return e;
}

ExprPtr binary(ExprKind k, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->kids = {std::move(a), std::move(b)};
  return e;
}

ExprPtr neg(ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Neg;
  e->kids = {std::move(a)};
  return e;
}

ExprPtr intpow(ExprPtr base, long exp) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::IntPow;
  e->kids = {std::move(base)};
  e->ival = exp;
  return e;
}

ExprPtr root(ExprPtr base, long degree) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Root;
  e->kids = {std::move(base)};
  e->ival = degree;
  return e;
}

}  // namespace ast

// ---------------------------------------------------------------- printing

namespace {

// 1: additive, 2: multiplicative, 3: unary, 4: power operand / atom
int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return 1;
    case ExprKind::Mul:
    case ExprKind::Div:
      return 2;
    case ExprKind::Neg:
      return 3;
    default:
      return 4;
  }
}

void print_to(const Expr& e, std::string& out, int min_level);

void print_list(const std::vector<ExprPtr>& xs, std::string& out) {
  if (xs.empty()) {
    out += '-';
    return;
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    print_to(*xs[i], out, 0);
  }
}

void print_series(const char* head, const SeriesExprSpec& s, std::string& out) {
  out += head;
  out += '(';
  print_list(s.numerator, out);
  out += "; ";
  print_list(s.denominator, out);
  if (s.base) {
    out += "; ";
    print_to(*s.base, out, 0);
  }
  out += "; ";
  print_to(*s.argument, out, 0);
  if (s.zeros != 0) out += "; zeros=" + std::to_string(s.zeros);
  out += ')';
}

void print_wp(const char* head, const WPExprSpec& s, std::string& out) {
  out += head;
  out += '(';
  print_to(*s.a, out, 0);
  out += "; ";
  print_list(s.tail, out);
  out += "; ";
  print_to(*s.base, out, 0);
  out += "; ";
  print_to(*s.argument, out, 0);
  if (s.zeros != 0) out += "; zeros=" + std::to_string(s.zeros);
  out += ')';
}

void print_to(const Expr& e, std::string& out, int min_level) {
  bool paren = precedence(e) < min_level;
  if (paren) out += '(';
  switch (e.kind) {
    case ExprKind::Const:
    case ExprKind::Sym:
      out += e.text;
      break;
    case ExprKind::Add:
      print_to(*e.kids[0], out, 1);
      out += " + ";
      print_to(*e.kids[1], out, 2);
      break;
    case ExprKind::Sub:
      print_to(*e.kids[0], out, 1);
      out += " - ";
      print_to(*e.kids[1], out, 2);
      break;
    case ExprKind::Mul:
      print_to(*e.kids[0], out, 2);
      out += " * ";
      print_to(*e.kids[1], out, 3);
      break;
    case ExprKind::Div:
      print_to(*e.kids[0], out, 2);
      out += " / ";
      print_to(*e.kids[1], out, 3);
      break;
    case ExprKind::Neg:
      out += '-';
      print_to(*e.kids[0], out, 3);
      break;
    case ExprKind::IntPow:
      print_to(*e.kids[0], out, 4);
      out += '^';
      if (e.ival < 0) {
        out += '(' + std::to_string(e.ival) + ')';
      } else {
        out += std::to_string(e.ival);
      }
      break;
    case ExprKind::Root:
      out += (e.ival == 2 ? "sqrt(" : "cbrt(");
      print_to(*e.kids[0], out, 0);
      out += ')';
      break;
    case ExprKind::QPochFinite:
    case ExprKind::QPochIndexed: {
      out += (e.kind == ExprKind::QPochFinite ? "qpoch(" : "qpoch_ix(");
      std::vector<ExprPtr> args(e.kids.begin() + 2, e.kids.end());
      print_list(args, out);
      out += "; ";
      print_to(*e.kids[1], out, 0);
      out += "; ";
      print_to(*e.kids[0], out, 0);
      out += ')';
      break;
    }
    case ExprKind::QPochInf:
    case ExprKind::Theta: {
      out += (e.kind == ExprKind::QPochInf ? "qpoch_inf(" : "theta(");
      std::vector<ExprPtr> args(e.kids.begin() + 1, e.kids.end());
      print_list(args, out);
      out += "; ";
      print_to(*e.kids[0], out, 0);
      out += ')';
      break;
    }
    case ExprKind::Phi:
      print_series("phi", *e.series, out);
      break;
    case ExprKind::Psi:
      print_series("psi", *e.series, out);
      break;
    case ExprKind::FSeries:
      print_series("F", *e.series, out);
      break;
    case ExprKind::HSeries:
      print_series("H", *e.series, out);
      break;
    case ExprKind::WPUni:
      print_wp("W", *e.wp, out);
      break;
    case ExprKind::WPBi:
      print_wp("PsiW", *e.wp, out);
      break;
    case ExprKind::GammaQ:
      out += "gammaq(";
      print_to(*e.kids[0], out, 0);
      out += "; ";
      print_to(*e.kids[1], out, 0);
      out += ')';
      break;
    case ExprKind::Gamma:
      out += "gamma(";
      print_to(*e.kids[0], out, 0);
      out += ')';
      break;
    case ExprKind::IdemSum: {
      out += "idem(" + e.pivot + "; ";
      for (std::size_t i = 0; i < e.alts.size(); ++i) {
        if (i) out += ", ";
        out += e.alts[i];
      }
      out += "){ ";
      print_to(*e.kids[0], out, 0);
      out += " }";
      break;
    }
  }
  if (paren) out += ')';
}

}  // namespace

std::string print(const Expr& e) {
  std::string out;
  print_to(e, out, 0);
  return out;
}

// ---------------------------------------------------------------- equality

namespace {

bool eq_list(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!structurally_equal(*a[i], *b[i])) return false;
  return true;
}

}  // namespace

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.text != b.text || a.ival != b.ival) return false;
  if (!eq_list(a.kids, b.kids)) return false;
  if (a.series.has_value() != b.series.has_value()) return false;
  if (a.series) {
    if (a.series->zeros != b.series->zeros) return false;
    if (!eq_list(a.series->numerator, b.series->numerator)) return false;
    if (!eq_list(a.series->denominator, b.series->denominator)) return false;
    if (static_cast<bool>(a.series->base) != static_cast<bool>(b.series->base)) return false;
    if (a.series->base && !structurally_equal(*a.series->base, *b.series->base)) return false;
    if (!structurally_equal(*a.series->argument, *b.series->argument)) return false;
  }
  if (a.wp.has_value() != b.wp.has_value()) return false;
  if (a.wp) {
    if (a.wp->zeros != b.wp->zeros) return false;
    if (!structurally_equal(*a.wp->a, *b.wp->a)) return false;
    if (!eq_list(a.wp->tail, b.wp->tail)) return false;
    if (!structurally_equal(*a.wp->base, *b.wp->base)) return false;
    if (!structurally_equal(*a.wp->argument, *b.wp->argument)) return false;
  }
  return a.pivot == b.pivot && a.alts == b.alts;
}

// ---------------------------------------------------------------- evaluation

namespace {

struct Evaluator {
  const ParamEnv& env;
  const TruncationControl& ctl;
  EvalStats* stats;

  PrecisionComplex take(SeriesValue&& v) {
    if (stats) stats->terms += v.terms_used;
    return v.value;
  }

  unsigned digits() const { return env.digits(); }

  PrecisionComplex ev(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Const: {
        return PrecisionComplex(make_real(e.text, digits()), make_real(0, digits()));
      }
      case ExprKind::Sym: {
        if (e.text == "q") return env.q.value();
        if (e.text == "i") return imaginary_unit(digits());
        if (e.text == "omega") return omega(digits());
        auto it = env.bindings.find(e.text);
        if (it == env.bindings.end())
          throw UnknownSymbolError("unbound symbol '" + e.text + "'");
        return it->second;
      }
      case ExprKind::Add:
        return ev(*e.kids[0]) + ev(*e.kids[1]);
      case ExprKind::Sub:
        return ev(*e.kids[0]) - ev(*e.kids[1]);
      case ExprKind::Mul:
        return ev(*e.kids[0]) * ev(*e.kids[1]);
      case ExprKind::Div: {
        PrecisionComplex n = ev(*e.kids[0]);
        PrecisionComplex d = ev(*e.kids[1]);
        if (abs(d) < detail::pole_tolerance(digits()))
          throw PoleError("division by a vanishing factor: " + print(*e.kids[1]));
        return n / d;
      }
      case ExprKind::Neg:
        return -ev(*e.kids[0]);
      case ExprKind::IntPow:
        return pow(ev(*e.kids[0]), e.ival);
      case ExprKind::Root:
        return root(ev(*e.kids[0]), static_cast<unsigned>(e.ival));
      case ExprKind::QPochFinite: {
        long n = integer_index(*e.kids[0]);
        QBase qb(ev(*e.kids[1]));
        PrecisionComplex r(1, 0, digits());
        for (std::size_t i = 2; i < e.kids.size(); ++i) r *= qpoch_n(ev(*e.kids[i]), qb, n);
        return r;
      }
      case ExprKind::QPochIndexed: {
        PrecisionComplex b = ev(*e.kids[0]);
        QBase qb(ev(*e.kids[1]));
        PrecisionComplex r(1, 0, digits());
        for (std::size_t i = 2; i < e.kids.size(); ++i)
          r *= qpoch_complex_index(ev(*e.kids[i]), qb, b, ctl);
        return r;
      }
      case ExprKind::QPochInf: {
        QBase qb(ev(*e.kids[0]));
        return qpoch_multi_inf(ev_list(e.kids, 1), qb, ctl);
      }
      case ExprKind::Theta: {
        QBase qb(ev(*e.kids[0]));
        return theta_multi(ev_list(e.kids, 1), qb, ctl);
      }
      case ExprKind::Phi:
      case ExprKind::Psi: {
        SeriesSpec s{e.kind == ExprKind::Phi ? SeriesKind::unilateral : SeriesKind::bilateral,
                     ev_all(e.series->numerator),
                     ev_all(e.series->denominator),
                     e.series->zeros < 0 ? -e.series->zeros : 0,
                     e.series->zeros > 0 ? e.series->zeros : 0,
                     QBase(ev(*e.series->base)),
                     ev(*e.series->argument)};
        return take(e.kind == ExprKind::Phi ? eval_phi(s, ctl) : eval_psi(s, ctl));
      }
      case ExprKind::WPUni:
      case ExprKind::WPBi: {
        WellPoisedSpec s{ev(*e.wp->a), ev_all(e.wp->tail), e.wp->zeros,
                         QBase(ev(*e.wp->base)), ev(*e.wp->argument)};
        return take(e.kind == ExprKind::WPUni ? eval_wp_unilateral(s, ctl)
                                              : eval_wp_bilateral(s, ctl));
      }
      case ExprKind::GammaQ:
        return gamma_q(ev(*e.kids[0]), QBase(ev(*e.kids[1])), ctl);
      case ExprKind::Gamma:
        return gamma_fn(ev(*e.kids[0]));
      case ExprKind::FSeries:
      case ExprKind::HSeries: {
        ClassicalSeriesSpec s{e.kind == ExprKind::FSeries ? ClassicalKind::F : ClassicalKind::H,
                              ev_all(e.series->numerator), ev_all(e.series->denominator),
                              ev(*e.series->argument)};
        return take(eval_classical(s, ctl));
      }
      case ExprKind::IdemSum: {
        PrecisionComplex total = ev(*e.kids[0]);
        for (const auto& alt : e.alts) {
          ParamEnv swapped = env;
          auto pit = swapped.bindings.find(e.pivot);
          auto ait = swapped.bindings.find(alt);
          if (pit == swapped.bindings.end() || ait == swapped.bindings.end())
            throw UnknownSymbolError("idem over unbound symbol '" + e.pivot + "'/'" + alt + "'");
          std::swap(pit->second, ait->second);
          total += eval(*e.kids[0], swapped, ctl, stats);
        }
        return total;
      }
    }
    throw Error("unreachable expression kind");
  }

  long integer_index(const Expr& idx) {
    using boost::multiprecision::abs;
    using boost::multiprecision::round;
    PrecisionComplex v = ev(idx);
    Real r = round(v.real());
    if (abs(v.real() - r) > detail::pole_tolerance(digits()) ||
        qseries::abs(PrecisionComplex(make_real(0, digits()), v.imag())) >
            detail::pole_tolerance(digits()))
      throw DomainError("q-Pochhammer index is not an integer: " + print(idx));
    return r.convert_to<long>();
  }

  std::vector<PrecisionComplex> ev_list(const std::vector<ExprPtr>& kids, std::size_t from) {
    std::vector<PrecisionComplex> out;
    for (std::size_t i = from; i < kids.size(); ++i) out.push_back(ev(*kids[i]));
    return out;
  }

  std::vector<PrecisionComplex> ev_all(const std::vector<ExprPtr>& xs) {
    std::vector<PrecisionComplex> out;
    for (const auto& x : xs) out.push_back(ev(*x));
    return out;
  }
};

}  // namespace

PrecisionComplex eval(const Expr& e, const ParamEnv& env, const TruncationControl& ctl,
                      EvalStats* stats) {
  Evaluator v{env, ctl, stats};
  return v.ev(e);
}

// ---------------------------------------------------------------- rewriting

namespace {

ExprPtr substitute(const ExprPtr& e, const std::string& x, const std::string& y);

std::vector<ExprPtr> substitute_all(const std::vector<ExprPtr>& xs, const std::string& x,
                                    const std::string& y) {
  std::vector<ExprPtr> out;
  for (const auto& k : xs) out.push_back(substitute(k, x, y));
  return out;
}

/// Swap symbols x and y throughout.
ExprPtr substitute(const ExprPtr& e, const std::string& x, const std::string& y) {
  if (e->kind == ExprKind::Sym) {
    if (e->text == x) return ast::sym(y);
    if (e->text == y) return ast::sym(x);
    return e;
  }
  auto out = std::make_shared<Expr>(*e);
  out->kids = substitute_all(e->kids, x, y);
  if (e->series) {
    out->series->numerator = substitute_all(e->series->numerator, x, y);
    out->series->denominator = substitute_all(e->series->denominator, x, y);
    if (e->series->base) out->series->base = substitute(e->series->base, x, y);
    out->series->argument = substitute(e->series->argument, x, y);
  }
  if (e->wp) {
    out->wp->a = substitute(e->wp->a, x, y);
    out->wp->tail = substitute_all(e->wp->tail, x, y);
    out->wp->base = substitute(e->wp->base, x, y);
    out->wp->argument = substitute(e->wp->argument, x, y);
  }
  if (e->kind == ExprKind::IdemSum) {
    auto swap_name = [&](std::string& n) {
      if (n == x)
        n = y;
      else if (n == y)
        n = x;
    };
    swap_name(out->pivot);
    for (auto& a : out->alts) swap_name(a);
  }
  return out;
}

}  // namespace

ExprPtr expand_idem(const ExprPtr& e) {
  auto out = std::make_shared<Expr>(*e);
  out->kids.clear();
  for (const auto& k : e->kids) out->kids.push_back(expand_idem(k));
  if (e->kind != ExprKind::IdemSum) return out;
  ExprPtr body = out->kids[0];
  ExprPtr sum = body;
  for (const auto& alt : e->alts)
    sum = ast::binary(ExprKind::Add, sum, substitute(body, e->pivot, alt));
  return sum;
}

// ---------------------------------------------------------------- symbols

namespace {

void collect(const Expr& e, std::set<std::string>& out) {
  if (e.kind == ExprKind::Sym) {
    if (e.text != "q" && e.text != "i" && e.text != "omega") out.insert(e.text);
    return;
  }
  for (const auto& k : e.kids) collect(*k, out);
  if (e.series) {
    for (const auto& k : e.series->numerator) collect(*k, out);
    for (const auto& k : e.series->denominator) collect(*k, out);
    if (e.series->base) collect(*e.series->base, out);
    collect(*e.series->argument, out);
  }
  if (e.wp) {
    collect(*e.wp->a, out);
    for (const auto& k : e.wp->tail) collect(*k, out);
    collect(*e.wp->base, out);
    collect(*e.wp->argument, out);
  }
  if (e.kind == ExprKind::IdemSum) {
    out.insert(e.pivot);
    for (const auto& a : e.alts) out.insert(a);
  }
}

}  // namespace

std::set<std::string> free_symbols(const Expr& e) {
  std::set<std::string> out;
  collect(e, out);
  return out;
}

}  // namespace qseries
