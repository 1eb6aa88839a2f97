#include "mlf/formula.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace mlf {

namespace {

int expected_arity(Op op) {
  switch (op) {
    case Op::Atom:
    case Op::Top:
    case Op::Bot:
      return 0;
    case Op::Not:
    case Op::Box:
    case Op::Diamond:
      return 1;
    default:
      return 2;
  }
}

const char* op_tag(Op op) {
  switch (op) {
    case Op::Atom: return "atom";
    case Op::Top: return "top";
    case Op::Bot: return "bot";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "implies";
    case Op::Iff: return "iff";
    case Op::Box: return "box";
    case Op::Diamond: return "diamond";
  }
  return "?";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == ',';
}

}  // namespace

Formula::Formula() : node_(top().node_) {}

const std::string& Formula::atom_name() const {
  if (node_->op != Op::Atom) throw std::logic_error("atom_name on non-atom");
  return node_->name;
}

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (node_->op != other.node_->op) return false;
  if (node_->op == Op::Atom) return node_->name == other.node_->name;
  if (node_->kids.size() != other.node_->kids.size()) return false;
  for (std::size_t i = 0; i < node_->kids.size(); ++i)
    if (node_->kids[i] != other.node_->kids[i]) return false;
  return true;
}

Formula Formula::make(Op op, std::vector<Formula> kids, std::string name) {
  if (static_cast<int>(kids.size()) != expected_arity(op))
    throw std::invalid_argument("formula arity mismatch");
  if (op == Op::Atom && name.empty())
    throw std::invalid_argument("atom needs a name");
  auto n = std::make_shared<Node>();
  n->op = op;
  n->name = std::move(name);
  n->kids = std::move(kids);
  return Formula(std::move(n));
}

Formula atom(std::string name) {
  if (name.empty() || !ident_start(name[0]) ||
      !std::all_of(name.begin(), name.end(), ident_char) ||
      name == "true" || name == "false")
    throw std::invalid_argument("bad atom name: " + name);
  return Formula::make(Op::Atom, {}, std::move(name));
}

Formula top() {
  static const Formula t = Formula::make(Op::Top, {});
  return t;
}

Formula bot() {
  static const Formula b = Formula::make(Op::Bot, {});
  return b;
}

Formula neg(Formula f) { return Formula::make(Op::Not, {std::move(f)}); }
Formula conj(Formula a, Formula b) { return Formula::make(Op::And, {std::move(a), std::move(b)}); }
Formula disj(Formula a, Formula b) { return Formula::make(Op::Or, {std::move(a), std::move(b)}); }
Formula implies(Formula a, Formula b) {
  return Formula::make(Op::Implies, {std::move(a), std::move(b)});
}
Formula iff(Formula a, Formula b) { return Formula::make(Op::Iff, {std::move(a), std::move(b)}); }
Formula box(Formula f) { return Formula::make(Op::Box, {std::move(f)}); }
Formula diamond(Formula f) { return Formula::make(Op::Diamond, {std::move(f)}); }

Formula big_conj(const std::vector<Formula>& fs) {
  if (fs.empty()) return top();
  Formula acc = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
  return acc;
}

Formula big_disj(const std::vector<Formula>& fs) {
  if (fs.empty()) return bot();
  Formula acc = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
  return acc;
}

ParseError::ParseError(std::size_t position, const std::string& message)
    : std::runtime_error("parse error at " + std::to_string(position) + ": " + message),
      position_(position) {}

namespace {

enum class Tok { Ident, True, False, Not, And, Or, Implies, Iff, Box, Diamond, LParen, RParen, End };

struct Lexer {
  std::string_view text;
  std::size_t pos = 0;
  Tok tok = Tok::End;
  std::string ident;
  std::size_t tok_pos = 0;

  explicit Lexer(std::string_view t) : text(t) { advance(); }

  void advance() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    tok_pos = pos;
    if (pos >= text.size()) {
      tok = Tok::End;
      return;
    }
    char c = text[pos];
    switch (c) {
      case '(': tok = Tok::LParen; ++pos; return;
      case ')': tok = Tok::RParen; ++pos; return;
      case '!': tok = Tok::Not; ++pos; return;
      case '&': tok = Tok::And; ++pos; return;
      case '|': tok = Tok::Or; ++pos; return;
      case '[':
        if (pos + 1 < text.size() && text[pos + 1] == ']') {
          tok = Tok::Box;
          pos += 2;
          return;
        }
        throw ParseError(pos, "expected \"[]\"");
      case '-':
        if (pos + 1 < text.size() && text[pos + 1] == '>') {
          tok = Tok::Implies;
          pos += 2;
          return;
        }
        throw ParseError(pos, "expected \"->\"");
      case '<':
        if (pos + 1 < text.size() && text[pos + 1] == '>') {
          tok = Tok::Diamond;
          pos += 2;
          return;
        }
        if (pos + 2 < text.size() && text[pos + 1] == '-' && text[pos + 2] == '>') {
          tok = Tok::Iff;
          pos += 3;
          return;
        }
        throw ParseError(pos, "expected \"<>\" or \"<->\"");
      default:
        break;
    }
    if (ident_start(c)) {
      std::size_t start = pos;
      while (pos < text.size() && ident_char(text[pos])) ++pos;
      ident.assign(text.substr(start, pos - start));
      tok = ident == "true" ? Tok::True : ident == "false" ? Tok::False : Tok::Ident;
      return;
    }
    throw ParseError(pos, std::string("unexpected character '") + c + "'");
  }
};

struct Parser {
  Lexer lex;

  explicit Parser(std::string_view t) : lex(t) {}

  bool accept(Tok t) {
    if (lex.tok != t) return false;
    lex.advance();
    return true;
  }

  void expect(Tok t, const char* what) {
    if (!accept(t)) throw ParseError(lex.tok_pos, std::string("expected ") + what);
  }

  Formula parse_formula() { return parse_iff(); }

  Formula parse_iff() {
    Formula l = parse_implies();
    while (accept(Tok::Iff)) l = iff(l, parse_implies());
    return l;
  }

  Formula parse_implies() {
    Formula l = parse_or();
    if (accept(Tok::Implies)) return implies(l, parse_implies());
    return l;
  }

  Formula parse_or() {
    Formula l = parse_and();
    while (accept(Tok::Or)) l = disj(l, parse_and());
    return l;
  }

  Formula parse_and() {
    Formula l = parse_unary();
    while (accept(Tok::And)) l = conj(l, parse_unary());
    return l;
  }

  Formula parse_unary() {
    if (accept(Tok::Not)) return neg(parse_unary());
    if (accept(Tok::Box)) return box(parse_unary());
    if (accept(Tok::Diamond)) return diamond(parse_unary());
    return parse_primary();
  }

  Formula parse_primary() {
    if (accept(Tok::LParen)) {
      Formula f = parse_formula();
      expect(Tok::RParen, "\")\"");
      return f;
    }
    if (accept(Tok::True)) return top();
    if (accept(Tok::False)) return bot();
    if (lex.tok == Tok::Ident) {
      Formula f = atom(lex.ident);
      lex.advance();
      return f;
    }
    throw ParseError(lex.tok_pos, "expected a formula");
  }
};

// Precedence levels used by the renderer; parenthesize below `min`.
constexpr int kIff = 1, kImplies = 2, kOr = 3, kAnd = 4, kUnary = 5, kPrimary = 6;

void render_rec(const Formula& f, int min, std::string& out) {
  auto binary = [&](int level, int lmin, int rmin, const char* tok) {
    bool paren = level < min;
    if (paren) out += '(';
    render_rec(f.child(0), lmin, out);
    out += tok;
    render_rec(f.child(1), rmin, out);
    if (paren) out += ')';
  };
  auto unary = [&](const char* tok, int child_min) {
    bool paren = kUnary < min;
    if (paren) out += '(';
    out += tok;
    render_rec(f.child(0), child_min, out);
    if (paren) out += ')';
  };
  switch (f.op()) {
    case Op::Atom: out += f.atom_name(); return;
    case Op::Top: out += "true"; return;
    case Op::Bot: out += "false"; return;
    case Op::Not: unary("!", kPrimary); return;
    case Op::Box: unary("[]", kUnary); return;
    case Op::Diamond: unary("<>", kUnary); return;
    case Op::And: binary(kAnd, kAnd, kAnd + 1, " & "); return;
    case Op::Or: binary(kOr, kOr, kOr + 1, " | "); return;
    case Op::Implies: binary(kImplies, kImplies + 1, kImplies, " -> "); return;
    case Op::Iff: binary(kIff, kIff, kIff + 1, " <-> "); return;
  }
}

}  // namespace

Formula parse(std::string_view text) {
  Parser p(text);
  Formula f = p.parse_formula();
  if (p.lex.tok != Tok::End) throw ParseError(p.lex.tok_pos, "trailing input");
  return f;
}

std::string render(const Formula& f) {
  std::string out;
  render_rec(f, 0, out);
  return out;
}

Formula substitute(const Formula& f, const Substitution& s) {
  switch (f.op()) {
    case Op::Atom: {
      auto it = s.bindings.find(f.atom_name());
      return it == s.bindings.end() ? f : it->second;
    }
    case Op::Top:
    case Op::Bot:
      return f;
    default: {
      std::vector<Formula> kids;
      kids.reserve(f.arity());
      for (int i = 0; i < f.arity(); ++i) kids.push_back(substitute(f.child(i), s));
      return Formula::make(f.op(), std::move(kids));
    }
  }
}

Substitution compose(const Substitution& sigma, const Substitution& tau) {
  Substitution out;
  for (const auto& [name, image] : sigma.bindings) out.bindings.emplace(name, substitute(image, tau));
  for (const auto& [name, image] : tau.bindings) out.bindings.emplace(name, image);  // keeps sigma's
  return out;
}

int modal_depth(const Formula& f) {
  int best = 0;
  for (int i = 0; i < f.arity(); ++i) best = std::max(best, modal_depth(f.child(i)));
  if (f.op() == Op::Box || f.op() == Op::Diamond) ++best;
  return best;
}

namespace {
void atoms_rec(const Formula& f, std::set<std::string>& out) {
  if (f.op() == Op::Atom) {
    out.insert(f.atom_name());
    return;
  }
  for (int i = 0; i < f.arity(); ++i) atoms_rec(f.child(i), out);
}
}  // namespace

std::set<std::string> atoms_of(const Formula& f) {
  std::set<std::string> out;
  atoms_rec(f, out);
  return out;
}

nlohmann::json formula_to_json(const Formula& f) {
  nlohmann::json j;
  j["op"] = op_tag(f.op());
  if (f.op() == Op::Atom) {
    j["name"] = f.atom_name();
  } else if (f.arity() > 0) {
    auto args = nlohmann::json::array();
    for (int i = 0; i < f.arity(); ++i) args.push_back(formula_to_json(f.child(i)));
    j["args"] = std::move(args);
  }
  return j;
}

Formula formula_from_json(const nlohmann::json& j) {
  const std::string tag = j.at("op").get<std::string>();
  if (tag == "atom") return atom(j.at("name").get<std::string>());
  if (tag == "top") return top();
  if (tag == "bot") return bot();
  static const std::map<std::string, Op> ops = {
      {"not", Op::Not},     {"and", Op::And},         {"or", Op::Or},
      {"implies", Op::Implies}, {"iff", Op::Iff},     {"box", Op::Box},
      {"diamond", Op::Diamond}};
  auto it = ops.find(tag);
  if (it == ops.end()) throw std::invalid_argument("unknown formula op: " + tag);
  std::vector<Formula> kids;
  for (const auto& a : j.at("args")) kids.push_back(formula_from_json(a));
  return Formula::make(it->second, std::move(kids));
}

}  // namespace mlf
