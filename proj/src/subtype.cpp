#include "mpst/subtype.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "mpst/errors.hpp"
#include "mpst/expr.hpp"
#include "mpst/text.hpp"

namespace mpst {

namespace {

using TypePair = std::pair<TypePtr, TypePtr>;
using PairSet = std::unordered_set<TypePair, PairHash<TypePtr>, PairEqual<TypePtr>>;

class SubProcedure {
 public:
  bool run(const TypePtr& a, const TypePtr& b) {
    if (theta_.count({a, b}) || regular_tree_equal(a, b)) return true;
    TypePtr x = unfold_head(a);
    TypePtr y = unfold_head(b);
    if (x->kind != y->kind || x->name != y->name) return false;
    if (x->kind != TypeKind::Inter && x->kind != TypeKind::Union) return false;
    // Inputs: every label of the right side offered on the left, sorts
    // contravariant. Outputs: the mirror image, sorts covariant.
    bool input = x->kind == TypeKind::Inter;
    const auto& fewer = input ? y : x;
    const auto& more = input ? x : y;
    std::vector<TypePair> premises;
    for (const auto& br : fewer->branches) {
      const TypeBranch* other = more->find(br.label);
      if (!other) return false;
      const TypeBranch& left = input ? *other : br;
      const TypeBranch& right = input ? br : *other;
      if (input ? !subsort(right.sort, left.sort) : !subsort(left.sort, right.sort)) return false;
      premises.emplace_back(left.cont, right.cont);
    }
    theta_.insert({a, b});
    return std::all_of(premises.begin(), premises.end(),
                       [&](const TypePair& p) { return run(p.first, p.second); });
  }

  std::size_t memo_size() const { return theta_.size(); }

 private:
  PairSet theta_;
};

TypePtr single(const SessionType& t, const TypeBranch& b) {
  return t.kind == TypeKind::Inter ? SessionType::input(t.name, b.label, b.sort, b.cont)
                                   : SessionType::output(t.name, b.label, b.sort, b.cont);
}

// Components of a type read as an intersection (left of intL-uniR) or as
// a union (right of intL-uniR). A single prefix is its own component;
// anything else has none, since letting a whole intersection stand as
// one component on the right would derive A & B not<= A & B.
std::vector<TypePtr> components(const TypePtr& original, const TypePtr& head, TypeKind kind) {
  if (head->kind != kind) return head->is_prefix() ? std::vector<TypePtr>{original} : std::vector<TypePtr>{};
  std::vector<TypePtr> out;
  for (const auto& b : head->branches) out.push_back(single(*head, b));
  return out;
}

class NsubSearch {
 public:
  std::optional<NsubDerivation> run(const TypePtr& a, const TypePtr& b) {
    TypePair key{a, b};
    if (auto it = done_.find(key); it != done_.end()) return it->second;
    if (path_.count(key)) {
      cut_ = true;
      return std::nullopt;
    }
    path_.insert(key);
    bool outer_cut = cut_;
    cut_ = false;
    auto result = rules(a, b);
    path_.erase(key);
    // A failure that relied on cutting a cycle only holds on this path.
    if (result || !cut_) done_.emplace(key, result);
    cut_ = outer_cut || (cut_ && !result);
    return result;
  }

 private:
  std::optional<NsubDerivation> rules(const TypePtr& a, const TypePtr& b) {
    TypePtr x = unfold_head(a);
    TypePtr y = unfold_head(b);
    auto leaf = [&](const char* rule, std::string reason = {}) {
      return NsubDerivation{rule, a, b, std::move(reason), {}};
    };
    auto node = [&](const char* rule, std::string reason, std::vector<NsubDerivation> kids) {
      return NsubDerivation{rule, a, b, std::move(reason), std::move(kids)};
    };
    bool x_end = x->kind == TypeKind::End;
    bool y_end = y->kind == TypeKind::End;
    if (x_end && y_end) return std::nullopt;
    if (y_end) return leaf("nsub-endL");
    if (x_end) return leaf("nsub-endR");
    if (x->kind == TypeKind::Var || y->kind == TypeKind::Var) return std::nullopt;

    if (x->is_prefix() && y->is_prefix()) {
      if (x->name != y->name) return leaf("nsub-diff-part");
      bool x_in = x->kind == TypeKind::Inter;
      bool y_in = y->kind == TypeKind::Inter;
      if (!x_in && y_in) return leaf("nsub-out-in");
      if (x_in && !y_in) return leaf("nsub-in-out");
      const char* rule = x_in ? "nsub-in-in" : "nsub-out-out";
      const auto& xb = x->branches.front();
      const auto& yb = y->branches.front();
      if (xb.label != yb.label) return leaf(rule, "labels differ");
      if (x_in ? !subsort(yb.sort, xb.sort) : !subsort(xb.sort, yb.sort)) return leaf(rule, "sorts");
      if (auto c = run(xb.cont, yb.cont)) return node(rule, "continuations", {std::move(*c)});
      return std::nullopt;
    }

    if (y->kind == TypeKind::Inter && y->branches.size() > 1) {
      for (const auto& br : y->branches) {
        if (auto c = run(a, single(*y, br))) return node("nsub-intR", {}, {std::move(*c)});
      }
    }
    if (x->kind == TypeKind::Union && x->branches.size() > 1) {
      for (const auto& br : x->branches) {
        if (auto c = run(single(*x, br), b)) return node("nsub-uniL", {}, {std::move(*c)});
      }
    }
    auto left = components(a, x, TypeKind::Inter);
    auto right = components(b, y, TypeKind::Union);
    if (!left.empty() && !right.empty() && (left.size() > 1 || right.size() > 1)) {
      std::vector<NsubDerivation> kids;
      for (const auto& l : left) {
        for (const auto& r : right) {
          auto c = run(l, r);
          if (!c) return std::nullopt;
          kids.push_back(std::move(*c));
        }
      }
      return node("nsub-intL-uniR", {}, std::move(kids));
    }
    return std::nullopt;
  }

  std::unordered_map<TypePair, std::optional<NsubDerivation>, PairHash<TypePtr>, PairEqual<TypePtr>> done_;
  PairSet path_;
  bool cut_ = false;
};

bool equal(const TypePtr& a, const TypePtr& b) { return regular_tree_equal(a, b); }

bool check_node(const NsubDerivation& d) {
  TypePtr x = unfold_head(d.left);
  TypePtr y = unfold_head(d.right);
  const auto& kids = d.children;
  auto is_end = [](const TypePtr& t) { return t->kind == TypeKind::End; };
  const std::string& r = d.rule;
  if (r == "nsub-endL") return kids.empty() && is_end(y) && !is_end(x);
  if (r == "nsub-endR") return kids.empty() && is_end(x) && !is_end(y);
  if (r == "nsub-diff-part") return kids.empty() && x->is_prefix() && y->is_prefix() && x->name != y->name;
  if (r == "nsub-out-in" || r == "nsub-in-out") {
    TypeKind lk = r == "nsub-out-in" ? TypeKind::Union : TypeKind::Inter;
    TypeKind rk = r == "nsub-out-in" ? TypeKind::Inter : TypeKind::Union;
    return kids.empty() && x->is_prefix() && y->is_prefix() && x->kind == lk && y->kind == rk &&
           x->name == y->name;
  }
  if (r == "nsub-in-in" || r == "nsub-out-out") {
    TypeKind k = r == "nsub-in-in" ? TypeKind::Inter : TypeKind::Union;
    if (!x->is_prefix() || !y->is_prefix() || x->kind != k || y->kind != k || x->name != y->name) return false;
    const auto& xb = x->branches.front();
    const auto& yb = y->branches.front();
    if (d.reason == "labels differ") return kids.empty() && xb.label != yb.label;
    if (d.reason == "sorts") {
      bool bad = k == TypeKind::Inter ? !subsort(yb.sort, xb.sort) : !subsort(xb.sort, yb.sort);
      return kids.empty() && bad;
    }
    return kids.size() == 1 && equal(kids[0].left, xb.cont) && equal(kids[0].right, yb.cont);
  }
  if (r == "nsub-intR") {
    if (y->kind != TypeKind::Inter || y->branches.size() < 2 || kids.size() != 1) return false;
    if (!equal(kids[0].left, d.left)) return false;
    return std::any_of(y->branches.begin(), y->branches.end(),
                       [&](const TypeBranch& b) { return equal(kids[0].right, single(*y, b)); });
  }
  if (r == "nsub-uniL") {
    if (x->kind != TypeKind::Union || x->branches.size() < 2 || kids.size() != 1) return false;
    if (!equal(kids[0].right, d.right)) return false;
    return std::any_of(x->branches.begin(), x->branches.end(),
                       [&](const TypeBranch& b) { return equal(kids[0].left, single(*x, b)); });
  }
  if (r == "nsub-intL-uniR") {
    auto left = components(d.left, x, TypeKind::Inter);
    auto right = components(d.right, y, TypeKind::Union);
    if (left.empty() || right.empty() || (left.size() < 2 && right.size() < 2)) return false;
    if (kids.size() != left.size() * right.size()) return false;
    for (std::size_t i = 0; i < left.size(); ++i) {
      for (std::size_t j = 0; j < right.size(); ++j) {
        const auto& k = kids[i * right.size() + j];
        if (!equal(k.left, left[i]) || !equal(k.right, right[j])) return false;
      }
    }
    return true;
  }
  return false;
}

void print_at(const NsubDerivation& d, int indent, std::string& out) {
  out.append(static_cast<std::size_t>(indent) * 2, ' ');
  out += d.rule + ": " + print(d.left) + "  \xE2\x8B\xAC  " + print(d.right);
  if (!d.reason.empty()) out += "  [" + d.reason + "]";
  out += '\n';
  for (const auto& c : d.children) print_at(c, indent + 1, out);
}

}  // namespace

bool sub(const TypePtr& t, const TypePtr& tp) {
  std::size_t ignored = 0;
  return sub(t, tp, ignored);
}

bool sub(const TypePtr& t, const TypePtr& tp, std::size_t& memo_size) {
  SubProcedure proc;
  bool result = proc.run(t, tp);
  memo_size = proc.memo_size();
  return result;
}

std::size_t NsubDerivation::size() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

std::size_t NsubDerivation::depth() const {
  std::size_t deepest = 0;
  for (const auto& c : children) deepest = std::max(deepest, c.depth());
  return deepest + 1;
}

std::optional<NsubDerivation> nsub(const TypePtr& t, const TypePtr& tp) {
  NsubSearch search;
  return search.run(t, tp);
}

bool valid_derivation(const NsubDerivation& d) {
  if (!check_node(d)) return false;
  return std::all_of(d.children.begin(), d.children.end(), valid_derivation);
}

std::string print(const NsubDerivation& d) {
  std::string out;
  print_at(d, 0, out);
  return out;
}

Decision decide(const TypePtr& t, const TypePtr& tp) {
  bool leq = sub(t, tp);
  auto witness = nsub(t, tp);
  if (leq == witness.has_value()) {
    throw InternalError("sub and nsub " + std::string(leq ? "both hold" : "both fail") + " on " + print(t) +
                        " and " + print(tp));
  }
  return {leq, std::move(witness)};
}

}  // namespace mpst
