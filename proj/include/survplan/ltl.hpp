#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "survplan/ts.hpp"
#include "survplan/types.hpp"

namespace survplan::ltl {

enum class Op { True, Atom, Not, Or, And, Next, Until, Always, Eventually };

struct Node;

/// Immutable LTL formula over true, atomic propositions, !, |, &, X, U, G
/// and F. Sub-formulas are shared.
class Formula {
 public:
  Formula() = default;

  Op op() const;
  PropId atom() const;
  const Formula& lhs() const;
  const Formula& rhs() const;

  bool empty() const { return node_ == nullptr; }
  /// Number of operator and leaf nodes.
  std::size_t size() const;
  std::size_t depth() const;

  friend bool operator==(const Formula& a, const Formula& b);

  friend Formula top();
  friend Formula atom(PropId p);
  friend Formula operator!(Formula f);
  friend Formula operator|(Formula a, Formula b);
  friend Formula operator&(Formula a, Formula b);
  friend Formula next(Formula f);
  friend Formula until(Formula a, Formula b);
  friend Formula always(Formula f);
  friend Formula eventually(Formula f);

 private:
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula make(Op op, PropId atom, Formula lhs, Formula rhs);

  std::shared_ptr<const Node> node_;
};

struct Node {
  Op op;
  PropId atom = 0;
  Formula lhs, rhs;
};

Formula top();
Formula atom(PropId p);
Formula operator!(Formula f);
Formula operator|(Formula a, Formula b);
Formula operator&(Formula a, Formula b);
Formula next(Formula f);
Formula until(Formula a, Formula b);
Formula always(Formula f);
Formula eventually(Formula f);
/// a -> b, written as !a | b.
Formula implies(Formula a, Formula b);

/// Parses the concrete syntax
///
///   f ::= f -> f | f '|' f | f & f | f U f | ! f | X f | G f | F f
///       | true | false | ident | ( f )
///
/// Binding from loosest to tightest: ->, |, &, U, unary. -> and U associate
/// to the right. `false` stands for !true. Identifiers must be declared in
/// `props`. Throws ParseError with the byte offset of the problem.
Formula parse(std::string_view text, const PropositionTable& props);

std::string to_string(const Formula& f, const PropositionTable& props);

/// True iff the formula is `phi & G F p` (in either conjunct order) or
/// exactly `G F p`.
bool has_surveillance_conjunct(const Formula& f, PropId p);

/// Evaluates the formula on the word stem . loop^omega directly from the
/// semantics of each operator. `loop` must be nonempty.
bool satisfied_on_lasso(const Formula& f, std::span<const LabelSet> stem,
                        std::span<const LabelSet> loop);

}  // namespace survplan::ltl
