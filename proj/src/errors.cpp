#include "mpst/errors.hpp"

namespace mpst {

namespace {

std::string located(const std::string& message, int line, int column) {
  if (line == 0) return message;
  return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
}

std::string joined(const std::vector<std::string>& path) {
  std::string out;
  for (const auto& step : path) {
    if (!out.empty()) out += " / ";
    out += step;
  }
  return out.empty() ? "<root>" : out;
}

}  // namespace

ParseError::ParseError(Kind kind, const std::string& message, int line, int column)
    : Error(located(message, line, column)), kind_(kind), line_(line), column_(column), detail_(message) {}

const char* to_string(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::Syntax: return "Syntax";
    case ParseError::Kind::DuplicateLabel: return "DuplicateLabel";
    case ParseError::Kind::UnguardedRecursion: return "UnguardedRecursion";
    case ParseError::Kind::SelfCommunication: return "SelfCommunication";
  }
  return "?";
}

ProjectionError::ProjectionError(Kind kind, std::string participant, std::vector<std::string> path,
                                 const std::string& message)
    : Error("projection onto " + participant + " undefined at " + joined(path) + ": " + message),
      kind_(kind),
      participant_(std::move(participant)),
      path_(std::move(path)) {}

const char* to_string(ProjectionError::Kind kind) {
  switch (kind) {
    case ProjectionError::Kind::MergeUndefined: return "MergeUndefined";
    case ProjectionError::Kind::UnguardedResult: return "UnguardedResult";
    case ProjectionError::Kind::ParticipantMismatch: return "ParticipantMismatch";
  }
  return "?";
}

TypeError::TypeError(Kind kind, std::string rule, std::vector<std::string> path, const std::string& message)
    : Error("[" + rule + "] at " + joined(path) + ": " + message),
      kind_(kind),
      rule_(std::move(rule)),
      path_(std::move(path)),
      detail_(message) {}

TypeError TypeError::within(const std::string& step) const {
  std::vector<std::string> p{step};
  p.insert(p.end(), path_.begin(), path_.end());
  return TypeError(kind_, rule_, std::move(p), detail_);
}

const char* to_string(TypeError::Kind kind) {
  switch (kind) {
    case TypeError::Kind::UnboundVariable: return "UnboundVariable";
    case TypeError::Kind::SortMismatch: return "SortMismatch";
    case TypeError::Kind::ShapeMismatch: return "ShapeMismatch";
    case TypeError::Kind::DuplicateLabel: return "DuplicateLabel";
    case TypeError::Kind::MissingBranch: return "MissingBranch";
    case TypeError::Kind::UnknownLabel: return "UnknownLabel";
    case TypeError::Kind::NoSort: return "NoSort";
    case TypeError::Kind::IllegalUnion: return "IllegalUnion";
    case TypeError::Kind::IllegalIntersection: return "IllegalIntersection";
    case TypeError::Kind::ParticipantMissing: return "ParticipantMissing";
    case TypeError::Kind::MemberIllTyped: return "MemberIllTyped";
    case TypeError::Kind::Unprojectable: return "Unprojectable";
  }
  return "?";
}

}  // namespace mpst
