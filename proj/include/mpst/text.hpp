#pragma once

// Concrete syntax. The grammar, loosest binding first:
//
//   expr     e1 (+) e2 (also ⊕), e1 > e2, succ e | neg e | not e, atoms
//   process  mu X. P | if e then P else Q   extend as far right as possible
//            P + Q                            external choice
//            p?l(x).P | p!l(e).P | X | 0      ".P" may be omitted for 0
//   session  @p P || @q Q
//   type     mu t. T   (extends right)
//            T & T'  or  T \/ T'              no mixing without parentheses
//            p?l(S).T | p!l(S).T | t | end    ".T" may be omitted for end
//   global   mu t. G | p -> q : { l1(S). G1, l2(S). G2 } | t | end
//
// `#` starts a line comment. The Unicode forms μ ∧ ∨ ⊕ ¬ → are accepted.

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "mpst/syntax.hpp"

namespace mpst {

enum class Category { Expr, Process, Session, SessionType, GlobalType };

std::string_view to_string(Category c);
std::optional<Category> category_from_string(std::string_view name);

using Term = std::variant<ExprPtr, ProcPtr, Session, TypePtr, GlobalPtr>;

/// Throws ParseError carrying the 1-based line and column of the failure.
Term parse(Category category, std::string_view text);

ExprPtr parse_expr(std::string_view text);
ProcPtr parse_process(std::string_view text);
Session parse_session(std::string_view text);
TypePtr parse_session_type(std::string_view text);
GlobalPtr parse_global_type(std::string_view text);

std::string print(const ExprPtr& e);
std::string print(const ProcPtr& p);
std::string print(const Session& m);
std::string print(const TypePtr& t);
std::string print(const GlobalPtr& g);
std::string print(const Term& term);

}  // namespace mpst
