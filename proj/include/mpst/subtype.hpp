#pragma once

// Coinductive subtyping and its inductive negation.

#include <optional>
#include <string>
#include <vector>

#include "mpst/syntax.hpp"

namespace mpst {

/// T <= T'. Memoized over the pairs visited (the set Theta).
bool sub(const TypePtr& t, const TypePtr& tp);

/// Same as `sub`, also reporting how many pairs entered Theta.
bool sub(const TypePtr& t, const TypePtr& tp, std::size_t& memo_size);

/// Finite evidence that T is not a subtype of T'. `left`/`right` are the
/// two types at this node, `reason` names the side condition used by the
/// leaf rules ("labels differ", "sorts", ...).
struct NsubDerivation {
  std::string rule;
  TypePtr left;
  TypePtr right;
  std::string reason;
  std::vector<NsubDerivation> children;

  std::size_t size() const;
  std::size_t depth() const;
};

/// A derivation of T not<= T' if one exists.
std::optional<NsubDerivation> nsub(const TypePtr& t, const TypePtr& tp);

/// Re-checks every node of a derivation against the rule it names.
bool valid_derivation(const NsubDerivation& d);

std::string print(const NsubDerivation& d);

struct Decision {
  bool leq;
  std::optional<NsubDerivation> witness;  ///< set iff !leq
};

/// Exactly one of sub/nsub; throws InternalError if they disagree.
Decision decide(const TypePtr& t, const TypePtr& tp);

}  // namespace mpst
