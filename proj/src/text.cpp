#include "mpst/text.hpp"

#include <charconv>
#include <utility>

#include "mpst/errors.hpp"

namespace mpst {

namespace {

enum class Tok {
  Ident,
  Number,
  Question,
  Bang,
  Dot,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Colon,
  Amp,
  Vee,
  Plus,
  Oplus,
  Gt,
  Arrow,
  At,
  Bars,
  Eof,
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::Question: return "'?'";
    case Tok::Bang: return "'!'";
    case Tok::Dot: return "'.'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Amp: return "'&'";
    case Tok::Vee: return "'\\/'";
    case Tok::Plus: return "'+'";
    case Tok::Oplus: return "'(+)'";
    case Tok::Gt: return "'>'";
    case Tok::Arrow: return "'->'";
    case Tok::At: return "'@'";
    case Tok::Bars: return "'||'";
    case Tok::Eof: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  std::int64_t number = 0;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t{Tok::Eof, {}, 0, line_, column_};
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      lex_one(t);
      out.push_back(std::move(t));
    }
  }

 private:
  char at(std::size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

  bool starts_with(std::string_view s) const { return src_.substr(pos_).starts_with(s); }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i, ++pos_) {
      unsigned char c = static_cast<unsigned char>(src_[pos_]);
      if (c == '\n') {
        ++line_;
        column_ = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++column_;
      }
    }
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = at();
      if (c == '#') {
        while (pos_ < src_.size() && at() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else {
        return;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(ParseError::Kind::Syntax, msg, line_, column_);
  }

  void lex_one(Token& t) {
    static constexpr std::pair<std::string_view, Tok> kSymbols[] = {
        {"(+)", Tok::Oplus}, {"\\/", Tok::Vee},       {"->", Tok::Arrow},      {"||", Tok::Bars},
        {"⊕", Tok::Oplus}, {"∧", Tok::Amp}, {"∨", Tok::Vee},   {"→", Tok::Arrow},
        {"?", Tok::Question}, {"!", Tok::Bang},       {".", Tok::Dot},         {"(", Tok::LParen},
        {")", Tok::RParen},   {"{", Tok::LBrace},     {"}", Tok::RBrace},      {",", Tok::Comma},
        {":", Tok::Colon},    {"&", Tok::Amp},        {"+", Tok::Plus},        {">", Tok::Gt},
        {"@", Tok::At},
    };
    for (const auto& [text, kind] : kSymbols) {
      if (starts_with(text)) {
        t.kind = kind;
        t.text = std::string(text);
        advance(text.size());
        return;
      }
    }
    if (starts_with("μ")) {
      t.kind = Tok::Ident;
      t.text = "mu";
      advance(2);
      return;
    }
    if (starts_with("¬")) {
      t.kind = Tok::Ident;
      t.text = "not";
      advance(2);
      return;
    }
    char c = at();
    bool negative = c == '-' && std::isdigit(static_cast<unsigned char>(at(1)));
    if (std::isdigit(static_cast<unsigned char>(c)) || negative) {
      std::size_t start = pos_;
      std::size_t end = pos_ + (negative ? 1 : 0);
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
      std::string_view digits = src_.substr(start, end - start);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t.number);
      if (ec != std::errc() || ptr != digits.data() + digits.size()) {
        fail("number literal out of range: " + std::string(digits));
      }
      t.kind = Tok::Number;
      t.text = std::string(digits);
      advance(end - start);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
        ++end;
      }
      t.kind = Tok::Ident;
      t.text = std::string(src_.substr(pos_, end - pos_));
      advance(end - pos_);
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(Lexer(text).run()) {}

  template <class F>
  auto whole(F parse_fn) {
    auto result = parse_fn();
    expect(Tok::Eof);
    return result;
  }

  // -- expressions ---------------------------------------------------------

  ExprPtr expr() {
    ExprPtr e = comparison();
    while (accept(Tok::Oplus)) e = Expr::choice(e, comparison());
    return e;
  }

  // -- processes -----------------------------------------------------------

  ProcPtr process() {
    const Token& start = peek();
    std::vector<ProcPtr> summands{proc_term()};
    while (accept(Tok::Plus)) summands.push_back(proc_term());
    if (summands.size() == 1) return summands.front();
    return build(start, [&] { return Process::choice(std::move(summands)); });
  }

  Session session() {
    const Token& start = peek();
    std::vector<std::pair<Participant, ProcPtr>> members;
    do {
      expect(Tok::At);
      Participant p = identifier("participant");
      members.emplace_back(std::move(p), process());
    } while (accept(Tok::Bars));
    return build(start, [&] { return Session::make(std::move(members)); });
  }

  // -- session types -------------------------------------------------------

  TypePtr type() {
    const Token& start = peek();
    if (keyword("mu")) {
      Name t = identifier("type variable");
      expect(Tok::Dot);
      TypePtr body = type();
      return build(start, [&] { return SessionType::rec(t, body); });
    }
    TypePtr first = type_prim();
    if (peek().kind != Tok::Amp && peek().kind != Tok::Vee) return first;
    Tok op = peek().kind;
    std::vector<TypePtr> operands{first};
    while (accept(op)) operands.push_back(type_prim());
    if (peek().kind == Tok::Amp || peek().kind == Tok::Vee) {
      fail("cannot mix '&' and '\\/' without parentheses");
    }
    return combine(start, op, operands);
  }

  // -- global types --------------------------------------------------------

  GlobalPtr global() {
    const Token& start = peek();
    if (keyword("mu")) {
      Name t = identifier("type variable");
      expect(Tok::Dot);
      GlobalPtr body = global();
      return build(start, [&] { return GlobalType::rec(t, body); });
    }
    if (keyword("end")) return GlobalType::end();
    if (accept(Tok::LParen)) {
      GlobalPtr g = global();
      expect(Tok::RParen);
      return g;
    }
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Arrow) {
      Participant from = identifier("participant");
      expect(Tok::Arrow);
      Participant to = identifier("participant");
      expect(Tok::Colon);
      std::vector<GlobalBranch> branches;
      if (accept(Tok::LBrace)) {
        do {
          branches.push_back(global_branch());
        } while (accept(Tok::Comma));
        expect(Tok::RBrace);
      } else {
        branches.push_back(global_branch());
      }
      return build(start, [&] { return GlobalType::comm(from, to, std::move(branches)); });
    }
    return GlobalType::var(identifier("global type"));
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }

  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    next();
    return true;
  }

  bool keyword(std::string_view word) {
    if (peek().kind != Tok::Ident || peek().text != word) return false;
    next();
    return true;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(ParseError::Kind::Syntax, msg, t.line, t.column);
  }

  void expect(Tok kind) {
    if (!accept(kind)) {
      fail(std::string("expected ") + describe(kind) + ", found " +
           (peek().kind == Tok::Ident || peek().kind == Tok::Number ? "'" + peek().text + "'"
                                                                    : describe(peek().kind)));
    }
  }

  void expect_keyword(std::string_view word) {
    if (!keyword(word)) fail("expected '" + std::string(word) + "'");
  }

  std::string identifier(const char* what) {
    if (peek().kind != Tok::Ident || is_keyword(peek().text)) {
      fail(std::string("expected ") + what + " name");
    }
    return next().text;
  }

  // Runs a factory and attaches the position of `start` to invariant
  // violations it reports.
  template <class F>
  auto build(const Token& start, F factory) -> decltype(factory()) {
    int line = start.line;
    int column = start.column;
    try {
      return factory();
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      throw ParseError(e.kind(), e.detail(), line, column);
    }
  }

  Sort sort() {
    if (keyword("nat")) return Sort::Nat;
    if (keyword("int")) return Sort::Int;
    if (keyword("bool")) return Sort::Bool;
    fail("expected a sort (nat, int or bool)");
  }

  ExprPtr comparison() {
    ExprPtr lhs = unary();
    if (accept(Tok::Gt)) {
      ExprPtr rhs = unary();
      if (peek().kind == Tok::Gt) fail("'>' is not associative; add parentheses");
      return Expr::greater(lhs, rhs);
    }
    return lhs;
  }

  ExprPtr unary() {
    if (keyword("succ")) return Expr::succ(unary());
    if (keyword("neg")) return Expr::neg(unary());
    if (keyword("not")) return Expr::logical_not(unary());
    if (keyword("true")) return Expr::boolean(true);
    if (keyword("false")) return Expr::boolean(false);
    if (peek().kind == Tok::Number) {
      std::int64_t n = next().number;
      return n >= 0 ? Expr::nat(n) : Expr::integer(n);
    }
    if (accept(Tok::LParen)) {
      ExprPtr e = expr();
      expect(Tok::RParen);
      return e;
    }
    return Expr::var(identifier("variable"));
  }

  ProcPtr proc_term() {
    const Token& start = peek();
    if (keyword("mu")) {
      Name x = identifier("process variable");
      expect(Tok::Dot);
      ProcPtr body = process();
      return build(start, [&] { return Process::rec(x, body); });
    }
    if (keyword("if")) {
      ExprPtr guard = expr();
      expect_keyword("then");
      ProcPtr a = process();
      expect_keyword("else");
      ProcPtr b = process();
      return Process::cond(guard, a, b);
    }
    if (accept(Tok::LParen)) {
      ProcPtr p = process();
      expect(Tok::RParen);
      return p;
    }
    if (peek().kind == Tok::Number) {
      if (peek().number != 0) fail("expected a process");
      next();
      return Process::inact();
    }
    if (peek().kind == Tok::Ident && (peek(1).kind == Tok::Question || peek(1).kind == Tok::Bang)) {
      Participant peer = identifier("participant");
      bool input = next().kind == Tok::Question;
      Label label = identifier("label");
      expect(Tok::LParen);
      if (input) {
        Name x = identifier("variable");
        expect(Tok::RParen);
        ProcPtr cont = accept(Tok::Dot) ? proc_term() : Process::inact();
        return Process::input(peer, label, x, cont);
      }
      ExprPtr payload = expr();
      expect(Tok::RParen);
      ProcPtr cont = accept(Tok::Dot) ? proc_term() : Process::inact();
      return Process::output(peer, label, payload, cont);
    }
    return Process::var(identifier("process"));
  }

  TypePtr type_prim() {
    if (accept(Tok::LParen)) {
      TypePtr t = type();
      expect(Tok::RParen);
      return t;
    }
    if (keyword("end")) return SessionType::end();
    const Token& start = peek();
    if (peek().kind == Tok::Ident && (peek(1).kind == Tok::Question || peek(1).kind == Tok::Bang)) {
      Participant peer = identifier("participant");
      bool input = next().kind == Tok::Question;
      Label label = identifier("label");
      expect(Tok::LParen);
      Sort s = sort();
      expect(Tok::RParen);
      TypePtr cont = SessionType::end();
      if (accept(Tok::Dot)) {
        cont = peek().kind == Tok::Ident && peek().text == "mu" ? type() : type_prim();
      }
      return build(start, [&] {
        return input ? SessionType::input(peer, label, s, cont) : SessionType::output(peer, label, s, cont);
      });
    }
    return SessionType::var(identifier("type"));
  }

  TypePtr combine(const Token& start, Tok op, const std::vector<TypePtr>& operands) {
    TypeKind want = op == Tok::Amp ? TypeKind::Inter : TypeKind::Union;
    const char* what = op == Tok::Amp ? "operands of '&' must be inputs from one sender"
                                      : "operands of '\\/' must be outputs to one receiver";
    std::vector<TypeBranch> branches;
    for (const auto& t : operands) {
      if (t->kind != want || t->name != operands.front()->name) {
        throw ParseError(ParseError::Kind::Syntax, what, start.line, start.column);
      }
      branches.insert(branches.end(), t->branches.begin(), t->branches.end());
    }
    Participant peer = operands.front()->name;
    return build(start, [&] {
      return want == TypeKind::Inter ? SessionType::inter(peer, std::move(branches))
                                     : SessionType::union_of(peer, std::move(branches));
    });
  }

  GlobalBranch global_branch() {
    Label label = identifier("label");
    expect(Tok::LParen);
    Sort s = sort();
    expect(Tok::RParen);
    GlobalPtr cont = accept(Tok::Dot) ? global() : GlobalType::end();
    return GlobalBranch{std::move(label), s, std::move(cont)};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// -- printing ---------------------------------------------------------------

// Expression precedence levels: 0 choice, 1 comparison, 2 unary/atom.
void print_expr(const Expr& e, int level, std::string& out) {
  int mine = e.kind == ExprKind::Choice ? 0 : e.kind == ExprKind::Gt ? 1 : 2;
  bool parens = mine < level;
  if (parens) out += '(';
  switch (e.kind) {
    case ExprKind::Var: out += e.name; break;
    case ExprKind::Nat:
    case ExprKind::Int: out += std::to_string(e.number); break;
    case ExprKind::Bool: out += e.number ? "true" : "false"; break;
    case ExprKind::Succ:
    case ExprKind::Neg:
    case ExprKind::Not:
      out += e.kind == ExprKind::Succ ? "succ " : e.kind == ExprKind::Neg ? "neg " : "not ";
      print_expr(*e.lhs, 2, out);
      break;
    case ExprKind::Choice:
      print_expr(*e.lhs, 0, out);
      out += " (+) ";
      print_expr(*e.rhs, 1, out);
      break;
    case ExprKind::Gt:
      print_expr(*e.lhs, 2, out);
      out += " > ";
      print_expr(*e.rhs, 2, out);
      break;
  }
  if (parens) out += ')';
}

// `open_ok` tells whether a construct that extends to the right (mu, if)
// may appear here without parentheses.
void print_proc_sum(const Process& p, bool open_ok, std::string& out);

void print_proc_term(const Process& p, bool open_ok, std::string& out) {
  bool open = p.kind == ProcKind::Rec || p.kind == ProcKind::Cond;
  if (p.kind == ProcKind::Choice || (open && !open_ok)) {
    out += '(';
    print_proc_sum(p, true, out);
    out += ')';
    return;
  }
  switch (p.kind) {
    case ProcKind::Input:
      out += p.peer + "?" + p.label + "(" + p.name + ").";
      print_proc_term(*p.body(), open_ok, out);
      break;
    case ProcKind::Output:
      out += p.peer + "!" + p.label + "(";
      print_expr(*p.expr, 0, out);
      out += ").";
      print_proc_term(*p.body(), open_ok, out);
      break;
    case ProcKind::Cond:
      out += "if ";
      print_expr(*p.expr, 0, out);
      out += " then ";
      print_proc_sum(*p.kids[0], true, out);
      out += " else ";
      print_proc_sum(*p.kids[1], true, out);
      break;
    case ProcKind::Rec:
      out += "mu " + p.name + ". ";
      print_proc_sum(*p.body(), true, out);
      break;
    case ProcKind::Var: out += p.name; break;
    case ProcKind::Inact: out += '0'; break;
    case ProcKind::Choice: break;
  }
}

void print_proc_sum(const Process& p, bool open_ok, std::string& out) {
  if (p.kind != ProcKind::Choice) {
    print_proc_term(p, open_ok, out);
    return;
  }
  for (std::size_t i = 0; i < p.kids.size(); ++i) {
    if (i) out += " + ";
    print_proc_term(*p.kids[i], open_ok && i + 1 == p.kids.size(), out);
  }
}

void print_type(const SessionType& t, bool open_ok, std::string& out);

void print_type_cont(const SessionType& t, bool open_ok, std::string& out) {
  bool multi = (t.kind == TypeKind::Inter || t.kind == TypeKind::Union) && t.branches.size() > 1;
  if (multi || (t.kind == TypeKind::Rec && !open_ok)) {
    out += '(';
    print_type(t, true, out);
    out += ')';
  } else {
    print_type(t, open_ok, out);
  }
}

void print_type(const SessionType& t, bool open_ok, std::string& out) {
  switch (t.kind) {
    case TypeKind::Inter:
    case TypeKind::Union: {
      const char* mark = t.kind == TypeKind::Inter ? "?" : "!";
      const char* sep = t.kind == TypeKind::Inter ? " & " : " \\/ ";
      for (std::size_t i = 0; i < t.branches.size(); ++i) {
        const auto& b = t.branches[i];
        if (i) out += sep;
        out += t.name + mark + b.label + "(" + std::string(to_string(b.sort)) + ").";
        print_type_cont(*b.cont, open_ok && i + 1 == t.branches.size(), out);
      }
      break;
    }
    case TypeKind::Rec:
      if (!open_ok) out += '(';
      out += "mu " + t.name + ". ";
      print_type(*t.body, true, out);
      if (!open_ok) out += ')';
      break;
    case TypeKind::Var: out += t.name; break;
    case TypeKind::End: out += "end"; break;
  }
}

void print_global(const GlobalType& g, std::string& out) {
  switch (g.kind) {
    case GlobalKind::Comm: {
      out += g.from + " -> " + g.to + " : ";
      bool multi = g.branches.size() > 1;
      if (multi) out += "{ ";
      for (std::size_t i = 0; i < g.branches.size(); ++i) {
        const auto& b = g.branches[i];
        if (i) out += ", ";
        out += b.label + "(" + std::string(to_string(b.sort)) + "). ";
        print_global(*b.cont, out);
      }
      if (multi) out += " }";
      break;
    }
    case GlobalKind::Rec:
      out += "mu " + g.name + ". ";
      print_global(*g.body, out);
      break;
    case GlobalKind::Var: out += g.name; break;
    case GlobalKind::End: out += "end"; break;
  }
}

}  // namespace

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Expr: return "expr";
    case Category::Process: return "process";
    case Category::Session: return "session";
    case Category::SessionType: return "sessiontype";
    case Category::GlobalType: return "globaltype";
  }
  return "?";
}

std::optional<Category> category_from_string(std::string_view name) {
  for (Category c : {Category::Expr, Category::Process, Category::Session, Category::SessionType,
                     Category::GlobalType}) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

ExprPtr parse_expr(std::string_view text) {
  Parser p(text);
  return p.whole([&] { return p.expr(); });
}

ProcPtr parse_process(std::string_view text) {
  Parser p(text);
  return p.whole([&] { return p.process(); });
}

Session parse_session(std::string_view text) {
  Parser p(text);
  return p.whole([&] { return p.session(); });
}

TypePtr parse_session_type(std::string_view text) {
  Parser p(text);
  return p.whole([&] { return p.type(); });
}

GlobalPtr parse_global_type(std::string_view text) {
  Parser p(text);
  return p.whole([&] { return p.global(); });
}

Term parse(Category category, std::string_view text) {
  switch (category) {
    case Category::Expr: return parse_expr(text);
    case Category::Process: return parse_process(text);
    case Category::Session: return parse_session(text);
    case Category::SessionType: return parse_session_type(text);
    case Category::GlobalType: return parse_global_type(text);
  }
  throw InternalError("unknown category");
}

std::string print(const ExprPtr& e) {
  std::string out;
  print_expr(*e, 0, out);
  return out;
}

std::string print(const ProcPtr& p) {
  std::string out;
  print_proc_sum(*p, true, out);
  return out;
}

std::string print(const Session& m) {
  std::string out;
  for (const auto& [p, proc] : m.members()) {
    if (!out.empty()) out += " || ";
    out += "@" + p + " " + print(proc);
  }
  return out;
}

std::string print(const TypePtr& t) {
  std::string out;
  print_type(*t, true, out);
  return out;
}

std::string print(const GlobalPtr& g) {
  std::string out;
  print_global(*g, out);
  return out;
}

std::string print(const Term& term) {
  return std::visit([](const auto& v) { return print(v); }, term);
}

}  // namespace mpst
