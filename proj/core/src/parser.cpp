#include "qseries/errors.hpp"
#include "qseries/expr.hpp"

#include <cctype>
#include <string>
#include <vector>

namespace qseries {

namespace {

enum class Tok { Number, Ident, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
      if (src[i + j] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    int tl = line, tc = col;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.'))
        ++j;
      out.push_back({Tok::Number, src.substr(i, j - i), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      out.push_back({Tok::Ident, src.substr(i, j - i), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::string("+-*/^(){};,=").find(c) != std::string::npos) {
      out.push_back({Tok::Punct, std::string(1, c), tl, tc});
      advance(1);
      continue;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", tl, tc);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(tokenize(src)) {}

  ExprPtr parse_all() {
    ExprPtr e = expression();
    expect_end();
    return e;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t n = 1) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  void bump() { ++pos_; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, cur().line, cur().col);
  }

  bool is_punct(const char* p) const { return cur().kind == Tok::Punct && cur().text == p; }

  void expect(const char* p) {
    if (!is_punct(p)) fail(std::string("expected '") + p + "'");
    bump();
  }

  void expect_end() {
    if (cur().kind != Tok::End) fail("trailing input after expression");
  }

  ExprPtr expression() {
    ExprPtr e = term();
    while (is_punct("+") || is_punct("-")) {
      bool add = cur().text == "+";
      bump();
      e = ast::binary(add ? ExprKind::Add : ExprKind::Sub, e, term());
    }
    return e;
  }

  ExprPtr term() {
    ExprPtr e = unary();
    while (is_punct("*") || is_punct("/")) {
      bool mul = cur().text == "*";
      bump();
      e = ast::binary(mul ? ExprKind::Mul : ExprKind::Div, e, unary());
    }
    return e;
  }

  ExprPtr unary() {
    if (is_punct("-")) {
      bump();
      return ast::neg(unary());
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr e = atom();
    if (is_punct("^")) {
      bump();
      e = ast::intpow(e, signed_integer("integer exponent"));
    }
    return e;
  }

  long signed_integer(const char* what) {
    bool paren = is_punct("(");
    if (paren) bump();
    bool negative = false;
    if (is_punct("-")) {
      negative = true;
      bump();
    }
    if (cur().kind != Tok::Number || cur().text.find('.') != std::string::npos)
      fail(std::string("expected ") + what);
    long v = std::stol(cur().text);
    bump();
    if (paren) expect(")");
    return negative ? -v : v;
  }

  ExprPtr atom() {
    if (cur().kind == Tok::Number) {
      auto e = ast::constant(cur().text);
      bump();
      return e;
    }
    if (is_punct("(")) {
      bump();
      ExprPtr e = expression();
      expect(")");
      return e;
    }
    if (cur().kind != Tok::Ident) fail("expected a value");
    std::string name = cur().text;
    if (peek().kind == Tok::Punct && peek().text == "(") {
      bump();
      bump();
      return call(name);
    }
    bump();
    return ast::sym(name);
  }

  // After consuming "name(".
  ExprPtr call(const std::string& name) {
    if (name == "sqrt" || name == "cbrt") {
      ExprPtr arg = expression();
      expect(")");
      return ast::root(arg, name == "sqrt" ? 2 : 3);
    }
    if (name == "qpoch" || name == "qpoch_ix") return qpoch_call(name == "qpoch_ix");
    if (name == "qpoch_inf" || name == "theta") return list_base_call(name);
    if (name == "phi" || name == "psi" || name == "F" || name == "H") return series_call(name);
    if (name == "W" || name == "PsiW") return wp_call(name == "PsiW");
    if (name == "gammaq") {
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::GammaQ;
      e->kids.push_back(expression());
      expect(";");
      e->kids.push_back(expression());
      expect(")");
      return e;
    }
    if (name == "gamma") {
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Gamma;
      e->kids.push_back(expression());
      expect(")");
      return e;
    }
    if (name == "idem") return idem_call();
    fail("unknown function '" + name + "'");
  }

  // Comma list; a lone '-' before ';' or ')' denotes the empty list.
  std::vector<ExprPtr> expr_list() {
    std::vector<ExprPtr> out;
    if (is_punct("-") && peek().kind == Tok::Punct &&
        (peek().text == ";" || peek().text == ")")) {
      bump();
      return out;
    }
    out.push_back(expression());
    while (is_punct(",")) {
      bump();
      out.push_back(expression());
    }
    return out;
  }

  ExprPtr qpoch_call(bool indexed) {
    auto e = std::make_shared<Expr>();
    e->kind = indexed ? ExprKind::QPochIndexed : ExprKind::QPochFinite;
    std::vector<ExprPtr> args = expr_list();
    if (args.empty()) fail("q-Pochhammer needs at least one argument");
    expect(";");
    ExprPtr base = expression();
    expect(";");
    ExprPtr index = expression();
    expect(")");
    e->kids.push_back(index);
    e->kids.push_back(base);
    for (auto& a : args) e->kids.push_back(std::move(a));
    return e;
  }

  ExprPtr list_base_call(const std::string& name) {
    auto e = std::make_shared<Expr>();
    e->kind = name == "theta" ? ExprKind::Theta : ExprKind::QPochInf;
    std::vector<ExprPtr> args = expr_list();
    if (args.empty()) fail("'" + name + "' needs at least one argument");
    expect(";");
    ExprPtr base = expression();
    expect(")");
    e->kids.push_back(base);
    for (auto& a : args) e->kids.push_back(std::move(a));
    return e;
  }

  long zeros_clause() {
    if (cur().kind == Tok::Ident && cur().text == "zeros") {
      bump();
      expect("=");
      return signed_integer("zero count");
    }
    fail("expected 'zeros=<n>'");
  }

  ExprPtr series_call(const std::string& name) {
    auto e = std::make_shared<Expr>();
    e->kind = name == "phi"  ? ExprKind::Phi
              : name == "psi" ? ExprKind::Psi
              : name == "F"   ? ExprKind::FSeries
                              : ExprKind::HSeries;
    SeriesExprSpec s;
    s.numerator = expr_list();
    expect(";");
    s.denominator = expr_list();
    expect(";");
    if (name == "F" || name == "H") {
      s.argument = expression();
    } else {
      s.base = expression();
      expect(";");
      s.argument = expression();
      if (is_punct(";")) {
        bump();
        s.zeros = zeros_clause();
      }
    }
    expect(")");
    e->series = std::move(s);
    return e;
  }

  ExprPtr wp_call(bool bilateral) {
    auto e = std::make_shared<Expr>();
    e->kind = bilateral ? ExprKind::WPBi : ExprKind::WPUni;
    WPExprSpec s;
    s.a = expression();
    expect(";");
    s.tail = expr_list();
    expect(";");
    s.base = expression();
    expect(";");
    s.argument = expression();
    if (is_punct(";")) {
      bump();
      s.zeros = zeros_clause();
    }
    expect(")");
    e->wp = std::move(s);
    return e;
  }

  ExprPtr idem_call() {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::IdemSum;
    if (cur().kind != Tok::Ident) fail("expected idem pivot symbol");
    e->pivot = cur().text;
    bump();
    expect(";");
    while (true) {
      if (cur().kind != Tok::Ident) fail("expected idem alternative symbol");
      e->alts.push_back(cur().text);
      bump();
      if (is_punct(",")) {
        bump();
        continue;
      }
      break;
    }
    expect(")");
    expect("{");
    e->kids.push_back(expression());
    expect("}");
    return e;
  }
};

}  // namespace

ExprPtr parse(const std::string& text) { return Parser(text).parse_all(); }

}  // namespace qseries
