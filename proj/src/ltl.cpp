#include "survplan/ltl.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "survplan/error.hpp"

namespace survplan::ltl {

Formula Formula::make(Op op, PropId atom, Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(Node{op, atom, std::move(lhs), std::move(rhs)}));
}

Op Formula::op() const { return node_->op; }
PropId Formula::atom() const { return node_->atom; }
const Formula& Formula::lhs() const { return node_->lhs; }
const Formula& Formula::rhs() const { return node_->rhs; }

std::size_t Formula::size() const {
  if (!node_) return 0;
  return 1 + node_->lhs.size() + node_->rhs.size();
}

std::size_t Formula::depth() const {
  if (!node_) return 0;
  return 1 + std::max(node_->lhs.depth(), node_->rhs.depth());
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  return a.op() == b.op() && a.atom() == b.atom() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
}

Formula top() { return Formula::make(Op::True, 0, {}, {}); }
Formula atom(PropId p) { return Formula::make(Op::Atom, p, {}, {}); }
Formula operator!(Formula f) { return Formula::make(Op::Not, 0, std::move(f), {}); }
Formula operator|(Formula a, Formula b) { return Formula::make(Op::Or, 0, std::move(a), std::move(b)); }
Formula operator&(Formula a, Formula b) { return Formula::make(Op::And, 0, std::move(a), std::move(b)); }
Formula next(Formula f) { return Formula::make(Op::Next, 0, std::move(f), {}); }
Formula until(Formula a, Formula b) { return Formula::make(Op::Until, 0, std::move(a), std::move(b)); }
Formula always(Formula f) { return Formula::make(Op::Always, 0, std::move(f), {}); }
Formula eventually(Formula f) { return Formula::make(Op::Eventually, 0, std::move(f), {}); }
Formula implies(Formula a, Formula b) { return (!std::move(a)) | std::move(b); }

namespace {

enum class Tok { End, LParen, RParen, Not, And, Or, Implies, Next, Until, Always, Eventually, True, False, Ident };

struct Token {
  Tok kind;
  std::size_t pos;
  std::string text;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  Token next() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    const std::size_t start = i_;
    if (i_ >= s_.size()) return {Tok::End, start, {}};
    const char c = s_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
        ++i_;
      std::string word(s_.substr(start, i_ - start));
      if (word == "X") return {Tok::Next, start, word};
      if (word == "U") return {Tok::Until, start, word};
      if (word == "G") return {Tok::Always, start, word};
      if (word == "F") return {Tok::Eventually, start, word};
      if (word == "true") return {Tok::True, start, word};
      if (word == "false") return {Tok::False, start, word};
      return {Tok::Ident, start, word};
    }
    ++i_;
    switch (c) {
      case '(': return {Tok::LParen, start, "("};
      case ')': return {Tok::RParen, start, ")"};
      case '!': return {Tok::Not, start, "!"};
      case '&':
        if (i_ < s_.size() && s_[i_] == '&') ++i_;
        return {Tok::And, start, "&"};
      case '|':
        if (i_ < s_.size() && s_[i_] == '|') ++i_;
        return {Tok::Or, start, "|"};
      case '-':
        if (i_ < s_.size() && s_[i_] == '>') {
          ++i_;
          return {Tok::Implies, start, "->"};
        }
        break;
      default:
        break;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "' at offset " +
                         std::to_string(start),
                     start);
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;
};

class Parser {
 public:
  Parser(std::string_view text, const PropositionTable& props) : lex_(text), props_(props) {
    advance();
  }

  Formula parse_all() {
    Formula f = implication();
    if (cur_.kind != Tok::End) fail("unexpected '" + cur_.text + "'");
    return f;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at offset " + std::to_string(cur_.pos), cur_.pos);
  }

  Formula implication() {
    Formula lhs = disjunction();
    if (cur_.kind == Tok::Implies) {
      advance();
      return implies(std::move(lhs), implication());
    }
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (cur_.kind == Tok::Or) {
      advance();
      f = std::move(f) | conjunction();
    }
    return f;
  }

  Formula conjunction() {
    Formula f = until_expr();
    while (cur_.kind == Tok::And) {
      advance();
      f = std::move(f) & until_expr();
    }
    return f;
  }

  Formula until_expr() {
    Formula lhs = unary();
    if (cur_.kind == Tok::Until) {
      advance();
      return until(std::move(lhs), until_expr());
    }
    return lhs;
  }

  Formula unary() {
    switch (cur_.kind) {
      case Tok::Not: advance(); return !unary();
      case Tok::Next: advance(); return next(unary());
      case Tok::Always: advance(); return always(unary());
      case Tok::Eventually: advance(); return eventually(unary());
      default: return primary();
    }
  }

  Formula primary() {
    switch (cur_.kind) {
      case Tok::True: advance(); return top();
      case Tok::False: advance(); return !top();
      case Tok::Ident: {
        auto p = props_.find(cur_.text);
        if (!p) fail("undeclared proposition '" + cur_.text + "'");
        advance();
        return atom(*p);
      }
      case Tok::LParen: {
        advance();
        Formula f = implication();
        if (cur_.kind != Tok::RParen) fail("expected ')'");
        advance();
        return f;
      }
      case Tok::End: fail("unexpected end of formula");
      default: fail("unexpected '" + cur_.text + "'");
    }
  }

  Lexer lex_;
  const PropositionTable& props_;
  Token cur_;
};

std::string print(const Formula& f, const PropositionTable& props) {
  switch (f.op()) {
    case Op::True: return "true";
    case Op::Atom: return props.name(f.atom());
    case Op::Not: return "!" + print(f.lhs(), props);
    case Op::Next: return "X " + print(f.lhs(), props);
    case Op::Always: return "G " + print(f.lhs(), props);
    case Op::Eventually: return "F " + print(f.lhs(), props);
    case Op::Or: return "(" + print(f.lhs(), props) + " | " + print(f.rhs(), props) + ")";
    case Op::And: return "(" + print(f.lhs(), props) + " & " + print(f.rhs(), props) + ")";
    case Op::Until: return "(" + print(f.lhs(), props) + " U " + print(f.rhs(), props) + ")";
  }
  return {};
}

bool is_gf(const Formula& f, PropId p) {
  return f.op() == Op::Always && f.lhs().op() == Op::Eventually &&
         f.lhs().lhs().op() == Op::Atom && f.lhs().lhs().atom() == p;
}

using Values = std::vector<char>;

class LassoEvaluator {
 public:
  LassoEvaluator(std::span<const LabelSet> stem, std::span<const LabelSet> loop)
      : word_(stem.begin(), stem.end()), loop_start_(stem.size()) {
    word_.insert(word_.end(), loop.begin(), loop.end());
  }

  Values eval(const Formula& f) const {
    const std::size_t n = word_.size();
    Values out(n, 0);
    switch (f.op()) {
      case Op::True:
        std::fill(out.begin(), out.end(), 1);
        break;
      case Op::Atom:
        for (std::size_t i = 0; i < n; ++i) out[i] = has_prop(word_[i], f.atom());
        break;
      case Op::Not: {
        const Values a = eval(f.lhs());
        for (std::size_t i = 0; i < n; ++i) out[i] = !a[i];
        break;
      }
      case Op::Or:
      case Op::And: {
        const Values a = eval(f.lhs());
        const Values b = eval(f.rhs());
        for (std::size_t i = 0; i < n; ++i)
          out[i] = f.op() == Op::Or ? (a[i] || b[i]) : (a[i] && b[i]);
        break;
      }
      case Op::Next: {
        const Values a = eval(f.lhs());
        for (std::size_t i = 0; i < n; ++i) out[i] = a[succ(i)];
        break;
      }
      case Op::Until: {
        // least fixpoint of  x = b | (a & X x)
        const Values a = eval(f.lhs());
        const Values b = eval(f.rhs());
        fixpoint(out, [&](std::size_t i, char nx) -> char { return b[i] || (a[i] && nx); });
        break;
      }
      case Op::Eventually: {
        const Values a = eval(f.lhs());
        fixpoint(out, [&](std::size_t i, char nx) -> char { return a[i] || nx; });
        break;
      }
      case Op::Always: {
        // greatest fixpoint of  x = a & X x
        const Values a = eval(f.lhs());
        std::fill(out.begin(), out.end(), 1);
        fixpoint(out, [&](std::size_t i, char nx) -> char { return a[i] && nx; });
        break;
      }
    }
    return out;
  }

 private:
  std::size_t succ(std::size_t i) const { return i + 1 < word_.size() ? i + 1 : loop_start_; }

  template <class Step>
  void fixpoint(Values& x, Step step) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t k = word_.size(); k-- > 0;) {
        const char v = step(k, x[succ(k)]);
        if (v != x[k]) {
          x[k] = v;
          changed = true;
        }
      }
    }
  }

  std::vector<LabelSet> word_;
  std::size_t loop_start_;
};

}  // namespace

Formula parse(std::string_view text, const PropositionTable& props) {
  return Parser(text, props).parse_all();
}

std::string to_string(const Formula& f, const PropositionTable& props) { return print(f, props); }

bool has_surveillance_conjunct(const Formula& f, PropId p) {
  if (is_gf(f, p)) return true;
  return f.op() == Op::And && (is_gf(f.rhs(), p) || is_gf(f.lhs(), p));
}

bool satisfied_on_lasso(const Formula& f, std::span<const LabelSet> stem,
                        std::span<const LabelSet> loop) {
  if (loop.empty()) throw ContractError("satisfied_on_lasso: loop must be nonempty");
  return LassoEvaluator(stem, loop).eval(f)[0] != 0;
}

}  // namespace survplan::ltl
