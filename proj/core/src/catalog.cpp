#include "qseries/catalog.hpp"

#include "qseries/errors.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace qseries {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& file, const std::string& what) {
  throw SyntaxError(file + ": " + what, 0, 0);
}

// "a [0.3, 1.8], b, z [0.3, 0.95]"
std::vector<SymbolDecl> parse_symbols(const std::string& file, const std::string& text) {
  std::vector<SymbolDecl> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    // a bracketed range spans the comma we split on; stitch it back
    if (item.find('[') != std::string::npos && item.find(']') == std::string::npos) {
      std::string rest;
      if (!std::getline(ss, rest, ',')) bad(file, "unterminated symbol range");
      item += "," + rest;
    }
    SymbolDecl d;
    std::size_t br = item.find('[');
    if (br == std::string::npos) {
      d.name = trim(item);
    } else {
      d.name = trim(item.substr(0, br));
      std::size_t close = item.find(']', br);
      if (close == std::string::npos) bad(file, "unterminated symbol range");
      std::string range = item.substr(br + 1, close - br - 1);
      std::size_t comma = range.find(',');
      if (comma == std::string::npos) bad(file, "symbol range needs two bounds");
      try {
        d.lo = std::stod(trim(range.substr(0, comma)));
        d.hi = std::stod(trim(range.substr(comma + 1)));
      } catch (const std::exception&) {
        bad(file, "malformed symbol range bound");
      }
      if (!(d.lo > 0) || !(d.hi >= d.lo)) bad(file, "empty symbol range");
    }
    if (d.name.empty()) bad(file, "empty symbol name");
    out.push_back(std::move(d));
  }
  return out;
}

// "|E1| < |E2| margin 0.2" or "nonzero E" / "notunity E" /
// "repositive E" / "offlattice E"
Constraint parse_constraint(const std::string& file, const std::string& text) {
  Constraint c;
  std::string t = trim(text);
  if (!t.empty() && t[0] == '|') {
    std::size_t close1 = t.find('|', 1);
    if (close1 == std::string::npos) bad(file, "unterminated modulus bars");
    std::size_t lt = t.find('<', close1);
    std::size_t open2 = t.find('|', close1 + 1);
    std::size_t close2 = open2 == std::string::npos ? std::string::npos : t.find('|', open2 + 1);
    if (lt == std::string::npos || open2 == std::string::npos || close2 == std::string::npos ||
        lt > open2)
      bad(file, "modulus constraint must read |E| < |E|");
    c.kind = ConstraintKind::ModulusLess;
    c.lhs = parse(t.substr(1, close1 - 1));
    c.rhs = parse(t.substr(open2 + 1, close2 - open2 - 1));
    std::string rest = trim(t.substr(close2 + 1));
    if (!rest.empty()) {
      if (rest.rfind("margin ", 0) != 0) bad(file, "unexpected text after modulus constraint");
      try {
        c.margin = std::stod(trim(rest.substr(7)));
      } catch (const std::exception&) {
        bad(file, "malformed constraint margin");
      }
    }
    return c;
  }
  std::size_t sp = t.find(' ');
  if (sp == std::string::npos) bad(file, "constraint needs an expression");
  std::string head = t.substr(0, sp);
  std::string body = trim(t.substr(sp + 1));
  if (head == "nonzero")
    c.kind = ConstraintKind::NonZero;
  else if (head == "notunity")
    c.kind = ConstraintKind::NotUnity;
  else if (head == "repositive")
    c.kind = ConstraintKind::RePositive;
  else if (head == "offlattice")
    c.kind = ConstraintKind::NotInQPowerLattice;
  else
    bad(file, "unknown constraint form '" + head + "'");
  c.lhs = parse(body);
  return c;
}

// Mechanical lattice guards: arguments of infinite products and theta
// factors in denominator position, and the denominator parameter lists
// of series nodes, must stay clear of the q-power lattices where the
// corresponding product vanishes.
void collect_guards(const ExprPtr& e, bool denominator, std::vector<Constraint>& out,
                    std::set<std::string>& seen) {
  if (!e) return;
  auto add = [&](const ExprPtr& arg, long lo, long hi) {
    std::string key = print(*arg) + "@" + std::to_string(lo);
    if (!seen.insert(key).second) return;
    Constraint c;
    c.kind = ConstraintKind::NotInQPowerLattice;
    c.lhs = arg;
    c.lo_exponent = lo;
    c.hi_exponent = hi;
    out.push_back(std::move(c));
  };
  switch (e->kind) {
    case ExprKind::Div:
      collect_guards(e->kids[0], denominator, out, seen);
      collect_guards(e->kids[1], !denominator, out, seen);
      return;
    case ExprKind::IntPow:
      collect_guards(e->kids[0], e->ival < 0 ? !denominator : denominator, out, seen);
      return;
    case ExprKind::QPochInf:
      if (denominator)
        for (std::size_t i = 1; i < e->kids.size(); ++i) add(e->kids[i], -40, 0);
      return;
    case ExprKind::Theta:
      if (denominator)
        for (std::size_t i = 1; i < e->kids.size(); ++i) add(e->kids[i], -40, 40);
      return;
    case ExprKind::Phi:
    case ExprKind::Psi:
    case ExprKind::FSeries:
    case ExprKind::HSeries:
      if (e->series)
        for (const auto& p : e->series->denominator) add(p, -40, 0);
      return;
    default:
      for (const auto& k : e->kids) collect_guards(k, denominator, out, seen);
      return;
  }
}

Identity parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad(path.string(), "unreadable file");
  std::vector<std::pair<std::string, std::string>> fields;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if ((line[0] == ' ' || line[0] == '\t') && !fields.empty()) {
      fields.back().second += " " + t;
      continue;
    }
    std::size_t colon = line.find(':');
    if (colon == std::string::npos) bad(path.string(), "expected 'field: value'");
    fields.emplace_back(trim(line.substr(0, colon)), trim(line.substr(colon + 1)));
  }

  Identity ident;
  for (auto& [key, value] : fields) {
    try {
      if (key == "id") {
        if (!ident.id.empty()) bad(path.string(), "duplicate id field");
        ident.id = value;
      } else if (key == "paper") {
        ident.anchor = value;
      } else if (key == "symbols") {
        ident.symbols = parse_symbols(path.string(), value);
      } else if (key == "constraint") {
        ident.constraints.push_back(parse_constraint(path.string(), value));
      } else if (key == "lhs") {
        if (ident.lhs) bad(path.string(), "duplicate lhs field");
        ident.lhs = parse(value);
      } else if (key == "rhs") {
        ident.rhs_forms.push_back(parse(value));
      } else if (key == "negative") {
        if (ident.negative_variant) bad(path.string(), "duplicate negative field");
        ident.negative_variant = parse(value);
      } else if (key == "note") {
        ident.note = value;
      } else {
        bad(path.string(), "unknown field '" + key + "'");
      }
    } catch (const SyntaxError& err) {
      throw SyntaxError(path.string() + " [" + key + "]: " + err.what(), err.line, err.column);
    }
  }
  if (ident.id.empty()) bad(path.string(), "missing id");
  if (!ident.lhs) bad(path.string(), "missing lhs");
  if (ident.rhs_forms.empty()) bad(path.string(), "missing rhs");

  std::set<std::string> declared;
  for (const auto& s : ident.symbols)
    if (!declared.insert(s.name).second) bad(path.string(), "symbol declared twice: " + s.name);
  auto check_symbols = [&](const Expr& e, const char* where) {
    for (const auto& name : free_symbols(e))
      if (!declared.count(name))
        throw UndeclaredSymbolError(path.string() + ": undeclared symbol '" + name + "' in " +
                                    where);
  };
  check_symbols(*ident.lhs, "lhs");
  for (const auto& r : ident.rhs_forms) check_symbols(*r, "rhs");
  if (ident.negative_variant) check_symbols(*ident.negative_variant, "negative");
  for (const auto& c : ident.constraints) {
    check_symbols(*c.lhs, "constraint");
    if (c.rhs) check_symbols(*c.rhs, "constraint");
  }

  std::set<std::string> seen;
  collect_guards(ident.lhs, false, ident.constraints, seen);
  for (const auto& r : ident.rhs_forms) collect_guards(r, false, ident.constraints, seen);
  return ident;
}

}  // namespace

Catalog Catalog::load(const std::string& directory) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory))
    throw NotFoundError("catalog directory not found: " + directory);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory))
    if (entry.is_regular_file() && entry.path().extension() == ".qid")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  Catalog cat;
  for (const auto& f : files) {
    Identity ident = parse_file(f);
    if (cat.entries_.count(ident.id))
      throw DuplicateIdError("duplicate identity id: " + ident.id);
    cat.entries_.emplace(ident.id, std::move(ident));
  }
  return cat;
}

const Identity& Catalog::get(const std::string& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw NotFoundError("no identity with id '" + id + "'");
  return it->second;
}

std::vector<std::string> Catalog::list_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, ident] : entries_) out.push_back(id);
  return out;
}

}  // namespace qseries
