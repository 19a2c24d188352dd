#pragma once

// Abstract syntax of the synchronous multiparty session calculus and its
// types. Every node is immutable once built and is shared through
// shared_ptr<const T>; the static factories are the only way to build
// nodes and they enforce the syntactic invariants (distinct branch labels,
// guarded recursion, no self-communication in global types).

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mpst {

enum class Sort : std::uint8_t { Nat, Int, Bool };

std::string_view to_string(Sort sort);

using Participant = std::string;
using Label = std::string;
using Name = std::string;

/// `[A-Za-z_][A-Za-z0-9_]*`, keywords excluded.
bool is_identifier(std::string_view text);
bool is_keyword(std::string_view text);

// ---------------------------------------------------------------------------
// Expressions

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprKind : std::uint8_t { Var, Nat, Int, Bool, Succ, Neg, Not, Choice, Gt };

struct Expr {
  ExprKind kind;
  std::int64_t number = 0;  ///< literal payload; booleans use 0/1
  Name name;                ///< variable name
  ExprPtr lhs;              ///< operand of unary operators, left of binary ones
  ExprPtr rhs;
  std::size_t hash = 0;
  std::vector<Name> free;  ///< sorted free variables

  static ExprPtr var(Name x);
  static ExprPtr nat(std::int64_t n);  ///< n >= 0
  static ExprPtr integer(std::int64_t i);
  static ExprPtr boolean(bool b);
  static ExprPtr succ(ExprPtr e);
  static ExprPtr neg(ExprPtr e);
  static ExprPtr logical_not(ExprPtr e);
  static ExprPtr choice(ExprPtr a, ExprPtr b);
  static ExprPtr greater(ExprPtr a, ExprPtr b);

  bool is_literal() const {
    return kind == ExprKind::Nat || kind == ExprKind::Int || kind == ExprKind::Bool;
  }
};

// ---------------------------------------------------------------------------
// Processes

struct Process;
using ProcPtr = std::shared_ptr<const Process>;

enum class ProcKind : std::uint8_t { Input, Output, Choice, Cond, Rec, Var, Inact };

struct Process {
  ProcKind kind;
  Participant peer;           ///< Input/Output partner
  Label label;                ///< Input/Output label
  Name name;                  ///< Input binder x, Rec/Var process variable X
  ExprPtr expr;               ///< Output payload, Cond guard
  std::vector<ProcPtr> kids;  ///< continuation | summands | then, else | body
  std::size_t hash = 0;
  std::vector<Name> free_values;     ///< sorted free expression variables
  std::vector<Name> free_processes;  ///< sorted free process variables

  static ProcPtr input(Participant from, Label label, Name x, ProcPtr body);
  static ProcPtr output(Participant to, Label label, ExprPtr payload, ProcPtr body);
  /// External choice; nested choices are flattened, a single summand is
  /// returned unchanged.
  static ProcPtr choice(std::vector<ProcPtr> summands);
  static ProcPtr cond(ExprPtr guard, ProcPtr then_branch, ProcPtr else_branch);
  static ProcPtr rec(Name x, ProcPtr body);
  static ProcPtr var(Name x);
  static ProcPtr inact();

  const ProcPtr& body() const { return kids.front(); }
};

/// Finite map from participants to processes, at least one entry, with no
/// participant occurring in its own process.
class Session {
 public:
  using Members = std::map<Participant, ProcPtr>;

  static Session make(std::vector<std::pair<Participant, ProcPtr>> members);

  const Members& members() const { return members_; }

 private:
  explicit Session(Members members) : members_(std::move(members)) {}
  Members members_;
};

// ---------------------------------------------------------------------------
// Session types

struct SessionType;
using TypePtr = std::shared_ptr<const SessionType>;

enum class TypeKind : std::uint8_t { Inter, Union, Rec, Var, End };

struct TypeBranch {
  Label label;
  Sort sort;
  TypePtr cont;
};

struct SessionType {
  TypeKind kind;
  Name name;  ///< peer participant (Inter/Union) or type variable (Rec/Var)
  std::vector<TypeBranch> branches;  ///< sorted by label, nonempty for Inter/Union
  TypePtr body;
  std::size_t hash = 0;
  std::vector<Name> free;

  static TypePtr inter(Participant from, std::vector<TypeBranch> branches);
  static TypePtr union_of(Participant to, std::vector<TypeBranch> branches);
  static TypePtr input(Participant from, Label label, Sort sort, TypePtr cont);
  static TypePtr output(Participant to, Label label, Sort sort, TypePtr cont);
  static TypePtr rec(Name t, TypePtr body);
  static TypePtr var(Name t);
  static TypePtr end();

  bool is_prefix() const {
    return (kind == TypeKind::Inter || kind == TypeKind::Union) && branches.size() == 1;
  }
  const TypeBranch* find(const Label& label) const;
};

// ---------------------------------------------------------------------------
// Global types

struct GlobalType;
using GlobalPtr = std::shared_ptr<const GlobalType>;

enum class GlobalKind : std::uint8_t { Comm, Rec, Var, End };

struct GlobalBranch {
  Label label;
  Sort sort;
  GlobalPtr cont;
};

struct GlobalType {
  GlobalKind kind;
  Participant from;  ///< Comm sender
  Participant to;    ///< Comm receiver
  Name name;         ///< Rec/Var type variable
  std::vector<GlobalBranch> branches;
  GlobalPtr body;
  std::size_t hash = 0;
  std::vector<Name> free;

  static GlobalPtr comm(Participant from, Participant to, std::vector<GlobalBranch> branches);
  static GlobalPtr message(Participant from, Participant to, Label label, Sort sort,
                           GlobalPtr cont);
  static GlobalPtr rec(Name t, GlobalPtr body);
  static GlobalPtr var(Name t);
  static GlobalPtr end();

  const GlobalBranch* find(const Label& label) const;
};

// ---------------------------------------------------------------------------
// Structural equality (literal, binder names significant) and ordering.

bool same(const ExprPtr& a, const ExprPtr& b);
bool same(const ProcPtr& a, const ProcPtr& b);
bool same(const TypePtr& a, const TypePtr& b);
bool same(const GlobalPtr& a, const GlobalPtr& b);

/// Total structural order on processes, consistent with `same`.
int compare(const ProcPtr& a, const ProcPtr& b);
int compare(const ExprPtr& a, const ExprPtr& b);

template <class Ptr>
struct StructuralHash {
  std::size_t operator()(const Ptr& p) const { return p->hash; }
};
template <class Ptr>
struct StructuralEqual {
  bool operator()(const Ptr& a, const Ptr& b) const { return same(a, b); }
};
template <class Ptr>
struct PairHash {
  std::size_t operator()(const std::pair<Ptr, Ptr>& p) const {
    return p.first->hash * 0x9e3779b97f4a7c15ULL ^ (p.second->hash + 0x632be59bd9b4e019ULL);
  }
};
template <class Ptr>
struct PairEqual {
  bool operator()(const std::pair<Ptr, Ptr>& a, const std::pair<Ptr, Ptr>& b) const {
    return same(a.first, b.first) && same(a.second, b.second);
  }
};

// ---------------------------------------------------------------------------
// Participants

std::set<Participant> participants(const ProcPtr& p);
std::set<Participant> participants(const TypePtr& t);
/// Follows the first branch of each communication.
std::set<Participant> participants(const GlobalPtr& g);

// ---------------------------------------------------------------------------
// Substitution and unfolding. Substitution is capture avoiding; binders are
// α-renamed only when the replacement would otherwise be captured.

TypePtr substitute(const TypePtr& in, const Name& var, const TypePtr& by);
GlobalPtr substitute(const GlobalPtr& in, const Name& var, const GlobalPtr& by);
ProcPtr substitute_process(const ProcPtr& in, const Name& var, const ProcPtr& by);
ExprPtr substitute_value(const ExprPtr& in, const Name& x, const ExprPtr& value);
ProcPtr substitute_value(const ProcPtr& in, const Name& x, const ExprPtr& value);

/// One unfolding step of a rec-rooted term; identity otherwise.
TypePtr unfold(const TypePtr& t);
GlobalPtr unfold(const GlobalPtr& g);
ProcPtr unfold(const ProcPtr& p);

/// Unfolds until the root is not a binder. Terminates because recursion is
/// guarded.
TypePtr unfold_head(TypePtr t);
GlobalPtr unfold_head(GlobalPtr g);
ProcPtr unfold_head(ProcPtr p);

/// True iff both terms denote the same regular tree. Free type variables
/// are treated as opaque leaves.
bool regular_tree_equal(const TypePtr& a, const TypePtr& b);
bool regular_tree_equal(const GlobalPtr& a, const GlobalPtr& b);

/// Number of distinct subterms reachable through unfolding and
/// continuations, the bound on memo sizes of the coinductive procedures.
std::size_t unfolding_closure_size(const TypePtr& t);

/// `[name, name_1, name_2, ...]`, the first one not in `taken`.
Name fresh_name(const Name& base, const std::set<Name>& taken);

}  // namespace mpst
