#pragma once

#include "qseries/classical.hpp"
#include "qseries/engine.hpp"
#include "qseries/qcore.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace qseries {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Series node payload with parameters still symbolic.
struct SeriesExprSpec {
  std::vector<ExprPtr> numerator;
  std::vector<ExprPtr> denominator;
  long zeros = 0;  // > 0: vanishing denominator entries, < 0: numerator
  ExprPtr base;
  ExprPtr argument;
};

struct WPExprSpec {
  ExprPtr a;
  std::vector<ExprPtr> tail;
  long zeros = 0;
  ExprPtr base;
  ExprPtr argument;
};

enum class ExprKind {
  Const,
  Sym,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  IntPow,
  Root,
  QPochFinite,
  QPochInf,
  QPochIndexed,
  Theta,
  Phi,
  Psi,
  WPUni,
  WPBi,
  IdemSum,
  GammaQ,
  Gamma,
  FSeries,
  HSeries
};

/// Immutable expression node.  The children vector holds, per kind:
/// operands for arithmetic; argument lists plus trailing base for the
/// q-product forms; the index as a third slot for the finite and
/// complex-index q-Pochhammer; the body for idem-sums.
struct Expr {
  ExprKind kind;
  std::string text;                // Const literal or Sym name
  std::vector<ExprPtr> kids;
  long ival = 0;                   // IntPow exponent or Root degree
  std::optional<SeriesExprSpec> series;
  std::optional<WPExprSpec> wp;
  std::string pivot;               // IdemSum
  std::vector<std::string> alts;   // IdemSum
};

/// Bound parameter point.  The base is carried separately; the symbol
/// "q" always resolves to it.
struct ParamEnv {
  std::map<std::string, PrecisionComplex> bindings;
  QBase q;
  unsigned digits() const { return q.digits(); }
};

ExprPtr parse(const std::string& text);
std::string print(const Expr& e);
bool structurally_equal(const Expr& a, const Expr& b);

/// Total series terms consumed across an evaluation, for reporting.
struct EvalStats {
  std::size_t terms = 0;
};

PrecisionComplex eval(const Expr& e, const ParamEnv& env, const TruncationControl& ctl,
                      EvalStats* stats = nullptr);

/// IdemSum nodes replaced by explicit sums of symbol-swapped copies.
ExprPtr expand_idem(const ExprPtr& e);

/// Free symbol names; the builtins "i" and "omega" and the base "q" are
/// not reported.
std::set<std::string> free_symbols(const Expr& e);

namespace ast {
ExprPtr constant(const std::string& literal);
ExprPtr sym(const std::string& name);
ExprPtr binary(ExprKind k, ExprPtr a, ExprPtr b);
ExprPtr neg(ExprPtr a);
ExprPtr intpow(ExprPtr base, long e);
ExprPtr root(ExprPtr base, long degree);
}  // namespace ast

}  // namespace qseries
