#pragma once

#include "qseries/expr.hpp"

#include <map>
#include <string>
#include <vector>

namespace qseries {

enum class ConstraintKind { ModulusLess, NotInQPowerLattice, NonZero, NotUnity, RePositive };

/// Declarative side condition on a parameter point.
struct Constraint {
  ConstraintKind kind;
  ExprPtr lhs;            // the guarded expression
  ExprPtr rhs;            // ModulusLess only: |lhs| < |rhs|
  double margin = 0.0;    // ModulusLess: written relative margin
  long lo_exponent = -40; // NotInQPowerLattice: q-power window
  long hi_exponent = 40;
};

struct SymbolDecl {
  std::string name;
  double lo = 0.3;  // sampling modulus range
  double hi = 1.8;
};

struct Identity {
  std::string id;
  std::string anchor;  // short human label ("paper:" field of the data file)
  std::vector<SymbolDecl> symbols;
  std::vector<Constraint> constraints;
  ExprPtr lhs;
  std::vector<ExprPtr> rhs_forms;
  ExprPtr negative_variant;  // optional known-wrong form
  std::string note;
};

/// Immutable after load; shared read-only across verification workers.
class Catalog {
 public:
  /// Reads every .qid file under the directory.  Validates symbol
  /// declarations, rejects duplicate ids, and appends mechanically
  /// generated lattice guards for denominator product arguments.
  static Catalog load(const std::string& directory);

  const Identity& get(const std::string& id) const;
  std::vector<std::string> list_ids() const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::map<std::string, Identity> entries_;
};

}  // namespace qseries
