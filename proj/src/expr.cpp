#include "mpst/expr.hpp"

#include <limits>

#include "mpst/errors.hpp"
#include "mpst/text.hpp"

namespace mpst {

ExprPtr Value::to_expr() const {
  switch (tag) {
    case Sort::Nat: return Expr::nat(number);
    case Sort::Int: return Expr::integer(number);
    case Sort::Bool: return Expr::boolean(number != 0);
  }
  return nullptr;
}

std::string to_string(const Value& v) {
  if (v.tag == Sort::Bool) return v.number ? "true" : "false";
  return std::to_string(v.number);
}

ValueSet eval_all(const ExprPtr& e) {
  ValueSet out;
  switch (e->kind) {
    case ExprKind::Var: break;
    case ExprKind::Nat: out.insert(Value::nat(e->number)); break;
    case ExprKind::Int: out.insert(Value::integer(e->number)); break;
    case ExprKind::Bool: out.insert(Value::boolean(e->number != 0)); break;
    case ExprKind::Succ:
      for (const Value& v : eval_all(e->lhs)) {
        if (v.is_number() && v.number >= 0 && v.number < std::numeric_limits<std::int64_t>::max()) {
          out.insert(Value::nat(v.number + 1));
        }
      }
      break;
    case ExprKind::Neg:
      for (const Value& v : eval_all(e->lhs)) {
        if (v.is_number() && v.number != std::numeric_limits<std::int64_t>::min()) {
          out.insert(Value::integer(-v.number));
        }
      }
      break;
    case ExprKind::Not:
      for (const Value& v : eval_all(e->lhs)) {
        if (v.tag == Sort::Bool) out.insert(Value::boolean(v.number == 0));
      }
      break;
    case ExprKind::Choice: {
      out = eval_all(e->lhs);
      ValueSet rhs = eval_all(e->rhs);
      out.insert(rhs.begin(), rhs.end());
      break;
    }
    case ExprKind::Gt: {
      ValueSet rhs = eval_all(e->rhs);
      for (const Value& a : eval_all(e->lhs)) {
        for (const Value& b : rhs) {
          if (a.is_number() && b.is_number()) out.insert(Value::boolean(a.number > b.number));
        }
      }
      break;
    }
  }
  return out;
}

bool subsort(Sort a, Sort b) { return a == b || (a == Sort::Nat && b == Sort::Int); }

std::optional<Sort> join(Sort a, Sort b) {
  if (subsort(a, b)) return b;
  if (subsort(b, a)) return a;
  return std::nullopt;
}

Env Env::with_value(const Name& x, Sort s) const {
  Env next = *this;
  next.values_[x] = s;
  return next;
}

Env Env::with_process(const Name& X, TypePtr t) const {
  Env next = *this;
  next.processes_[X] = std::move(t);
  return next;
}

std::optional<Sort> Env::value(const Name& x) const {
  auto it = values_.find(x);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

TypePtr Env::process(const Name& X) const {
  auto it = processes_.find(X);
  return it == processes_.end() ? nullptr : it->second;
}

namespace {

[[noreturn]] void mismatch(const ExprPtr& e, const std::string& msg) {
  throw TypeError(TypeError::Kind::SortMismatch, "t-expr", {}, "in '" + print(e) + "': " + msg);
}

void require(const Env& env, const ExprPtr& e, Sort want) {
  Sort got = infer_sort(env, e);
  if (!subsort(got, want)) {
    mismatch(e, "expected " + std::string(to_string(want)) + ", found " + std::string(to_string(got)));
  }
}

}  // namespace

Sort infer_sort(const Env& env, const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Var:
      if (auto s = env.value(e->name)) return *s;
      throw TypeError(TypeError::Kind::UnboundVariable, "t-expr", {}, "unbound variable '" + e->name + "'");
    case ExprKind::Nat: return Sort::Nat;
    case ExprKind::Int: return Sort::Int;
    case ExprKind::Bool: return Sort::Bool;
    case ExprKind::Succ: require(env, e->lhs, Sort::Nat); return Sort::Nat;
    case ExprKind::Neg: require(env, e->lhs, Sort::Int); return Sort::Int;
    case ExprKind::Not: require(env, e->lhs, Sort::Bool); return Sort::Bool;
    case ExprKind::Gt:
      require(env, e->lhs, Sort::Int);
      require(env, e->rhs, Sort::Int);
      return Sort::Bool;
    case ExprKind::Choice: {
      Sort a = infer_sort(env, e->lhs);
      Sort b = infer_sort(env, e->rhs);
      if (auto s = join(a, b)) return *s;
      mismatch(e, "arms of (+) have incompatible sorts " + std::string(to_string(a)) + " and " +
                      std::string(to_string(b)));
    }
  }
  throw InternalError("unknown expression kind");
}

}  // namespace mpst
