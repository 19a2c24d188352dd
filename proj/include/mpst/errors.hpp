#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mpst {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text or a term that violates a syntactic invariant.
/// Raised by the parser (with a position) and by the term factories
/// (line and column are 0 there).
class ParseError : public Error {
 public:
  enum class Kind { Syntax, DuplicateLabel, UnguardedRecursion, SelfCommunication };

  ParseError(Kind kind, const std::string& message, int line = 0, int column = 0);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  Kind kind_;
  int line_;
  int column_;
  std::string detail_;
};

const char* to_string(ParseError::Kind kind);

/// Projection of a global type is undefined. `path` lists the branch labels
/// (and binder names) from the root to the offending node.
class ProjectionError : public Error {
 public:
  enum class Kind { MergeUndefined, UnguardedResult, ParticipantMismatch };

  ProjectionError(Kind kind, std::string participant, std::vector<std::string> path,
                  const std::string& message);

  Kind kind() const { return kind_; }
  const std::string& participant() const { return participant_; }
  const std::vector<std::string>& path() const { return path_; }

 private:
  Kind kind_;
  std::string participant_;
  std::vector<std::string> path_;
};

const char* to_string(ProjectionError::Kind kind);

/// Expression, process or session typing failure.
class TypeError : public Error {
 public:
  enum class Kind {
    UnboundVariable,
    SortMismatch,
    ShapeMismatch,
    DuplicateLabel,
    MissingBranch,
    UnknownLabel,
    NoSort,
    IllegalUnion,
    IllegalIntersection,
    ParticipantMissing,
    MemberIllTyped,
    Unprojectable,
  };

  TypeError(Kind kind, std::string rule, std::vector<std::string> path,
            const std::string& message);

  Kind kind() const { return kind_; }
  /// Typing rule whose premise failed, e.g. "t-out".
  const std::string& rule() const { return rule_; }
  /// Subterm path from the checked root, outermost first.
  const std::vector<std::string>& path() const { return path_; }
  const std::string& detail() const { return detail_; }

  /// Copy with `step` prepended to the path.
  TypeError within(const std::string& step) const;

 private:
  Kind kind_;
  std::string rule_;
  std::vector<std::string> path_;
  std::string detail_;
};

const char* to_string(TypeError::Kind kind);

/// A supposedly impossible state, e.g. sub and nsub disagreeing.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace mpst
