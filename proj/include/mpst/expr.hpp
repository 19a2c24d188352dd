#pragma once

// Values, the (nondeterministic, partial) evaluation relation, subsorting
// and expression typing.

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "mpst/syntax.hpp"

namespace mpst {

struct Value {
  Sort tag;
  std::int64_t number;  ///< booleans use 0/1

  static Value nat(std::int64_t n) { return {Sort::Nat, n}; }
  static Value integer(std::int64_t i) { return {Sort::Int, i}; }
  static Value boolean(bool b) { return {Sort::Bool, b ? 1 : 0}; }

  bool is_number() const { return tag != Sort::Bool; }
  ExprPtr to_expr() const;

  auto operator<=>(const Value&) const = default;
};

std::string to_string(const Value& v);

using ValueSet = std::set<Value>;

/// Every value `e` can evaluate to. Empty when evaluation is stuck, e.g.
/// `succ -5`, `not 3`, or a free variable. Arithmetic overflow is stuck too.
ValueSet eval_all(const ExprPtr& e);

/// nat <: int, reflexive.
bool subsort(Sort a, Sort b);

/// Least upper bound under subsorting, if any.
std::optional<Sort> join(Sort a, Sort b);

/// Typing environment. Extension returns a new environment; values are
/// cheap to copy at the sizes used here.
class Env {
 public:
  Env with_value(const Name& x, Sort s) const;
  Env with_process(const Name& X, TypePtr t) const;

  std::optional<Sort> value(const Name& x) const;
  TypePtr process(const Name& X) const;  ///< nullptr when unbound

 private:
  std::map<Name, Sort> values_;
  std::map<Name, TypePtr> processes_;
};

/// Minimal sort of `e` under `env`. Throws TypeError (UnboundVariable,
/// SortMismatch).
Sort infer_sort(const Env& env, const ExprPtr& e);

}  // namespace mpst
