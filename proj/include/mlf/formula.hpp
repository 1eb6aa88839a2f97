#pragma once

// Modal formula AST, concrete syntax and uniform substitution.
//
// Grammar (loosest to tightest): `<->`, `->` (right-assoc), `|`, `&`,
// then the unary prefixes `!`, `[]`, `<>`. Atoms match
// [A-Za-z][A-Za-z0-9_:,]* except the keywords `true` / `false`.

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace mlf {

enum class Op { Atom, Top, Bot, Not, And, Or, Implies, Iff, Box, Diamond };

/// Immutable formula tree with cheap value semantics (shared subtrees).
class Formula {
 public:
  Formula();  // defaults to `true`

  Op op() const { return node_->op; }
  const std::string& atom_name() const;
  int arity() const { return static_cast<int>(node_->kids.size()); }
  const Formula& child(int i) const { return node_->kids.at(i); }

  bool operator==(const Formula& other) const;
  bool operator!=(const Formula& other) const { return !(*this == other); }

  static Formula make(Op op, std::vector<Formula> kids, std::string name = {});

 private:
  struct Node {
    Op op;
    std::string name;           // Atom only
    std::vector<Formula> kids;  // arity per op
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

Formula atom(std::string name);
Formula top();
Formula bot();
Formula neg(Formula f);
Formula conj(Formula a, Formula b);
Formula disj(Formula a, Formula b);
Formula implies(Formula a, Formula b);
Formula iff(Formula a, Formula b);
Formula box(Formula f);
Formula diamond(Formula f);
Formula big_conj(const std::vector<Formula>& fs);  // empty -> true
Formula big_disj(const std::vector<Formula>& fs);  // empty -> false

/// Finite map atom name -> formula; unmapped atoms stay themselves.
struct Substitution {
  std::map<std::string, Formula> bindings;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& message);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

Formula parse(std::string_view text);
std::string render(const Formula& f);

Formula substitute(const Formula& f, const Substitution& s);
/// sigma;tau — first sigma, then tau applied to sigma's images.
Substitution compose(const Substitution& sigma, const Substitution& tau);

int modal_depth(const Formula& f);
std::set<std::string> atoms_of(const Formula& f);

nlohmann::json formula_to_json(const Formula& f);
Formula formula_from_json(const nlohmann::json& j);

}  // namespace mlf
