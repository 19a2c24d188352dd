#include "mpst/runtime.hpp"

#include <algorithm>
#include <deque>
#include <exception>
#include <optional>
#include <unordered_map>

#include <omp.h>

#include "mpst/text.hpp"

namespace mpst {

namespace {

// Returns `p` itself when it is already sorted, so canonical states are
// cheap to re-canonicalize.
ProcPtr sort_choices(const ProcPtr& p) {
  if (p->kind == ProcKind::Inact || p->kind == ProcKind::Var) return p;
  std::vector<ProcPtr> kids;
  bool changed = false;
  for (const auto& k : p->kids) {
    kids.push_back(sort_choices(k));
    changed = changed || kids.back() != k;
  }
  if (p->kind == ProcKind::Choice) {
    auto less = [](const ProcPtr& a, const ProcPtr& b) { return compare(a, b) < 0; };
    if (!std::is_sorted(kids.begin(), kids.end(), less)) {
      std::sort(kids.begin(), kids.end(), less);
      changed = true;
    }
  }
  if (!changed) return p;
  switch (p->kind) {
    case ProcKind::Input: return Process::input(p->peer, p->label, p->name, kids[0]);
    case ProcKind::Output: return Process::output(p->peer, p->label, p->expr, kids[0]);
    case ProcKind::Cond: return Process::cond(p->expr, kids[0], kids[1]);
    case ProcKind::Rec: return Process::rec(p->name, kids[0]);
    case ProcKind::Choice: return Process::choice(std::move(kids));
    default: return p;
  }
}

std::size_t combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

const Participant kSentinel = "_";

// The receiver's whole process is a sum of inputs from `sender`.
bool receives_from(const ProcPtr& p, const Participant& sender) {
  if (p->kind == ProcKind::Input) return p->peer == sender;
  if (p->kind != ProcKind::Choice) return false;
  return std::all_of(p->kids.begin(), p->kids.end(),
                     [&](const ProcPtr& k) { return k->kind == ProcKind::Input && k->peer == sender; });
}

SessionState replaced(const SessionState& s, std::vector<SessionState::Member> updates) {
  std::vector<SessionState::Member> members = s.members();
  for (auto& [p, proc] : updates) {
    auto it = std::find_if(members.begin(), members.end(), [&](const auto& m) { return m.first == p; });
    it->second = std::move(proc);
  }
  return SessionState::from(std::move(members));
}

struct Node {
  std::optional<std::size_t> parent;
  std::optional<Step> via;
};

// Shared bookkeeping of both searches; they differ only in how reducts of
// a batch of states are computed.
class Search {
 public:
  Search(const SessionState& init, std::size_t fuel) : fuel_(fuel) {
    if (fuel == 0) throw FuelMisuse("fuel must be positive");
    index_.emplace(init, 0);
    states_.push_back(init);
    nodes_.push_back({});
    edges_.emplace_back();
  }

  std::size_t fuel_left() const { return fuel_ - expanded_; }

  // Records the reducts of state `i`. Returns a report when the search is
  // decided by this state.
  std::optional<StuckReport> expand(std::size_t i, const std::vector<std::pair<Step, SessionState>>& next,
                                    std::vector<std::size_t>& fresh) {
    ++expanded_;
    if (next.empty() && !is_terminated(states_[i])) return report(StuckReport::Verdict::StuckFound, i);
    for (const auto& [step, state] : next) {
      auto [it, inserted] = index_.emplace(state, states_.size());
      if (inserted) {
        states_.push_back(state);
        nodes_.push_back({i, step});
        edges_.emplace_back();
        fresh.push_back(it->second);
      }
      edges_[i].push_back(it->second);
    }
    return std::nullopt;
  }

  StuckReport diverged() { return report(StuckReport::Verdict::Diverged, std::nullopt); }

  StuckReport exhausted() {
    return report(cyclic() ? StuckReport::Verdict::NoStuckWithinFuel : StuckReport::Verdict::Terminated,
                  std::nullopt);
  }

  const SessionState& state(std::size_t i) const { return states_[i]; }

 private:
  StuckReport report(StuckReport::Verdict v, std::optional<std::size_t> last) {
    StuckReport r{v, {}, {}, expanded_, states_.size()};
    for (auto at = last; at; at = nodes_[*at].parent) {
      r.states.push_back(states_[*at]);
      if (nodes_[*at].via) r.trace.push_back(*nodes_[*at].via);
    }
    std::reverse(r.states.begin(), r.states.end());
    std::reverse(r.trace.begin(), r.trace.end());
    return r;
  }

  bool cyclic() const {
    std::vector<std::size_t> indegree(states_.size(), 0);
    for (const auto& out : edges_) {
      for (auto j : out) ++indegree[j];
    }
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < indegree.size(); ++i) {
      if (indegree[i] == 0) ready.push_back(i);
    }
    std::size_t removed = 0;
    while (!ready.empty()) {
      std::size_t i = ready.back();
      ready.pop_back();
      ++removed;
      for (auto j : edges_[i]) {
        if (--indegree[j] == 0) ready.push_back(j);
      }
    }
    return removed != states_.size();
  }

  std::size_t fuel_;
  std::size_t expanded_ = 0;
  std::unordered_map<SessionState, std::size_t, SessionStateHash> index_;
  std::vector<SessionState> states_;
  std::vector<Node> nodes_;
  std::vector<std::vector<std::size_t>> edges_;
};

}  // namespace

ProcPtr canonical(const ProcPtr& p) { return sort_choices(unfold_head(sort_choices(p))); }

SessionState SessionState::from(const Session& m) {
  return from(std::vector<Member>(m.members().begin(), m.members().end()));
}

SessionState SessionState::from(std::vector<Member> members) {
  SessionState s;
  for (auto& [p, proc] : members) {
    ProcPtr c = canonical(proc);
    if (c->kind != ProcKind::Inact) s.members_.emplace_back(p, std::move(c));
  }
  if (s.members_.empty()) s.members_.emplace_back(kSentinel, Process::inact());
  std::sort(s.members_.begin(), s.members_.end(),
            [](const Member& a, const Member& b) { return a.first < b.first; });
  for (const auto& [p, proc] : s.members_) {
    s.hash_ = combine(combine(s.hash_, std::hash<std::string>{}(p)), proc->hash);
  }
  return s;
}

ProcPtr SessionState::process(const Participant& p) const {
  auto it = std::lower_bound(members_.begin(), members_.end(), p,
                             [](const Member& m, const Participant& q) { return m.first < q; });
  if (it == members_.end() || it->first != p || it->second->kind == ProcKind::Inact) return nullptr;
  return it->second;
}

bool SessionState::operator==(const SessionState& other) const {
  if (hash_ != other.hash_ || members_.size() != other.members_.size()) return false;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i].first != other.members_[i].first || !same(members_[i].second, other.members_[i].second)) {
      return false;
    }
  }
  return true;
}

std::string print(const SessionState& s) {
  std::string out;
  for (const auto& [p, proc] : s.members()) {
    if (!out.empty()) out += " || ";
    out += "@" + p + " " + print(proc);
  }
  return out;
}

const char* to_string(Step::Rule rule) {
  switch (rule) {
    case Step::Rule::Comm: return "r-comm";
    case Step::Rule::TrueCond: return "t-conditional";
    case Step::Rule::FalseCond: return "f-conditional";
  }
  return "?";
}

std::string to_string(const Step& s) {
  if (s.rule == Step::Rule::Comm) {
    return s.sender + " --" + s.label + "(" + to_string(s.value) + ")--> " + s.receiver;
  }
  return s.sender + " --if(" + to_string(s.value) + ")--> " + s.receiver;
}

std::vector<std::pair<Step, SessionState>> step_all(const SessionState& s) {
  std::vector<std::pair<Step, SessionState>> out;
  for (const auto& [p, proc] : s.members()) {
    if (proc->kind != ProcKind::Cond) continue;
    for (const Value& v : eval_all(proc->expr)) {
      if (v.tag != Sort::Bool) continue;
      bool taken = v.number != 0;
      Step step{taken ? Step::Rule::TrueCond : Step::Rule::FalseCond, p, p, {}, v};
      out.emplace_back(step, replaced(s, {{p, proc->kids[taken ? 0 : 1]}}));
    }
  }
  for (const auto& [q, proc] : s.members()) {
    if (proc->kind != ProcKind::Output) continue;
    ProcPtr target = s.process(proc->peer);
    if (!target || !receives_from(target, q)) continue;
    auto inputs = target->kind == ProcKind::Choice ? target->kids : std::vector<ProcPtr>{target};
    ValueSet values = eval_all(proc->expr);
    for (const auto& in : inputs) {
      if (in->label != proc->label) continue;
      for (const Value& v : values) {
        Step step{Step::Rule::Comm, q, proc->peer, proc->label, v};
        ProcPtr received = substitute_value(in->body(), in->name, v.to_expr());
        out.emplace_back(step, replaced(s, {{proc->peer, received}, {q, proc->body()}}));
      }
    }
  }
  return out;
}

bool is_terminated(const SessionState& s) {
  return std::all_of(s.members().begin(), s.members().end(),
                     [](const auto& m) { return m.second->kind == ProcKind::Inact; });
}

bool is_stuck(const SessionState& s) { return !is_terminated(s) && step_all(s).empty(); }

const char* to_string(StuckReport::Verdict v) {
  switch (v) {
    case StuckReport::Verdict::Terminated: return "terminated";
    case StuckReport::Verdict::StuckFound: return "stuckFound";
    case StuckReport::Verdict::NoStuckWithinFuel: return "noStuckWithinFuel";
    case StuckReport::Verdict::Diverged: return "diverged";
  }
  return "?";
}

StuckReport stuck_search_serial(const SessionState& init, std::size_t fuel) {
  Search search(init, fuel);
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    if (search.fuel_left() == 0) return search.diverged();
    std::size_t i = queue.front();
    queue.pop_front();
    std::vector<std::size_t> fresh;
    if (auto r = search.expand(i, step_all(search.state(i)), fresh)) return *r;
    queue.insert(queue.end(), fresh.begin(), fresh.end());
  }
  return search.exhausted();
}

StuckReport stuck_search(const SessionState& init, std::size_t fuel) {
  Search search(init, fuel);
  std::vector<std::size_t> frontier{0};
  while (!frontier.empty()) {
    if (search.fuel_left() == 0) return search.diverged();
    const std::size_t batch = std::min(frontier.size(), search.fuel_left());
    std::vector<std::vector<std::pair<Step, SessionState>>> reducts(batch);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < batch; ++k) {
      try {
        reducts[k] = step_all(search.state(frontier[k]));
      } catch (...) {
#pragma omp critical
        failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    std::vector<std::size_t> next;
    for (std::size_t k = 0; k < batch; ++k) {
      if (auto r = search.expand(frontier[k], reducts[k], next)) return *r;
    }
    if (batch < frontier.size()) return search.diverged();
    frontier = std::move(next);
  }
  return search.exhausted();
}

const char* to_string(RunResult::Outcome o) {
  switch (o) {
    case RunResult::Outcome::Terminated: return "terminated";
    case RunResult::Outcome::Stuck: return "stuck";
    case RunResult::Outcome::OutOfFuel: return "outOfFuel";
  }
  return "?";
}

RunResult run(const SessionState& init, std::size_t fuel) {
  if (fuel == 0) throw FuelMisuse("fuel must be positive");
  RunResult r{RunResult::Outcome::OutOfFuel, {}, init};
  for (std::size_t n = 0; n < fuel; ++n) {
    auto next = step_all(r.final_state);
    if (next.empty()) {
      r.outcome = is_terminated(r.final_state) ? RunResult::Outcome::Terminated : RunResult::Outcome::Stuck;
      return r;
    }
    r.trace.push_back(next.front().first);
    r.final_state = next.front().second;
  }
  if (step_all(r.final_state).empty()) {
    r.outcome = is_terminated(r.final_state) ? RunResult::Outcome::Terminated : RunResult::Outcome::Stuck;
  }
  return r;
}

}  // namespace mpst
