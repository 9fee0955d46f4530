#pragma once

// Text syntax for expressions and forms.
//
//   sum     := product (('+' | '-') product)*
//   product := unary (('*')? unary)*          juxtaposition multiplies
//   unary   := '-' unary | wedge
//   wedge   := power ('^' power)*              '^' not followed by an integer
//   power   := primary ('^' INT)*
//   primary := INT ('/' INT)? | NAME | NAME '(' sum (',' sum)* ')'
//            | 'd' '(' sum ')' | '(' sum ')'
//
// NAME is a declared generator name or x<k>; calls name registered
// primitives (beta0, S, Sinv2, ...). Forms are expanded to the coordinate
// basis as they are built.

#include <algorithm>
#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cartan/forms.hpp"

namespace cartan {

namespace detail {

struct Token {
  enum Kind { Number, Name, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End } kind;
  std::string text;
  std::size_t column;
};

inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Token::Number, std::string(s.substr(i, j - i)), i});
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Token::Name, std::string(s.substr(i, j - i)), i});
      i = j;
      continue;
    }
    Token::Kind kind;
    switch (c) {
      case '+': kind = Token::Plus; break;
      case '-': kind = Token::Minus; break;
      case '*': kind = Token::Star; break;
      case '/': kind = Token::Slash; break;
      case '^': kind = Token::Caret; break;
      case '(': kind = Token::LParen; break;
      case ')': kind = Token::RParen; break;
      case ',': kind = Token::Comma; break;
      default: throw SyntaxError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back({kind, std::string(1, c), i});
    ++i;
  }
  out.push_back({Token::End, "", s.size()});
  return out;
}

struct ParseNode {
  enum Kind { Number, Generator, Call, Differential, Add, Sub, Neg, Mul, Pow, Wedge } kind;
  std::size_t column = 0;
  Rational value;                 // Number
  std::size_t index = 0;          // Generator
  PrimId prim;                    // Call
  unsigned exponent = 0;          // Pow
  std::vector<std::shared_ptr<ParseNode>> children;
};
using NodePtr = std::shared_ptr<ParseNode>;

class Parser {
 public:
  Parser(std::string_view text, const NameList& names, std::size_t n) : tokens_(tokenize(text)), names_(names), n_(n) {}

  NodePtr parse() {
    NodePtr node = sum();
    if (peek().kind != Token::End) throw SyntaxError("unexpected '" + peek().text + "'", peek().column);
    return node;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)]; }
  const Token& take() { return tokens_[pos_++]; }

  void expect(Token::Kind kind, const char* what) {
    if (peek().kind != kind) {
      throw SyntaxError(std::string("expected ") + what + (peek().kind == Token::End ? "" : ", got '" + peek().text + "'"),
                        peek().column);
    }
    ++pos_;
  }

  static NodePtr make(ParseNode::Kind kind, std::size_t column, std::vector<NodePtr> children = {}) {
    auto node = std::make_shared<ParseNode>();
    node->kind = kind;
    node->column = column;
    node->children = std::move(children);
    return node;
  }

  NodePtr sum() {
    NodePtr left = product();
    while (peek().kind == Token::Plus || peek().kind == Token::Minus) {
      const Token op = take();
      NodePtr right = product();
      left = make(op.kind == Token::Plus ? ParseNode::Add : ParseNode::Sub, op.column, {left, right});
    }
    return left;
  }

  bool starts_primary() const {
    const auto k = peek().kind;
    return k == Token::Number || k == Token::Name || k == Token::LParen;
  }

  NodePtr product() {
    NodePtr left = unary();
    while (true) {
      if (peek().kind == Token::Star) {
        const std::size_t col = take().column;
        left = make(ParseNode::Mul, col, {left, unary()});
      } else if (starts_primary()) {
        const std::size_t col = peek().column;
        left = make(ParseNode::Mul, col, {left, unary()});
      } else {
        return left;
      }
    }
  }

  NodePtr unary() {
    if (peek().kind == Token::Minus) {
      const std::size_t col = take().column;
      return make(ParseNode::Neg, col, {unary()});
    }
    return wedge();
  }

  NodePtr wedge() {
    NodePtr left = power();
    while (peek().kind == Token::Caret) {
      const std::size_t col = take().column;
      left = make(ParseNode::Wedge, col, {left, power()});
    }
    return left;
  }

  NodePtr power() {
    NodePtr base = primary();
    while (peek().kind == Token::Caret && peek(1).kind == Token::Number) {
      const std::size_t col = take().column;
      const Token& exp = take();
      if (exp.text.size() > 6) throw SyntaxError("exponent too large", exp.column);
      auto node = make(ParseNode::Pow, col, {base});
      node->exponent = static_cast<unsigned>(std::stoul(exp.text));
      base = node;
    }
    return base;
  }

  NodePtr primary() {
    const Token& tok = peek();
    switch (tok.kind) {
      case Token::Number: {
        take();
        auto node = make(ParseNode::Number, tok.column);
        node->value = Rational(tok.text);
        if (peek().kind == Token::Slash) {
          const std::size_t slash = take().column;
          if (peek().kind != Token::Number) throw SyntaxError("expected an integer denominator", peek().column);
          const Rational den(take().text);
          if (den == 0) throw SyntaxError("zero denominator", slash);
          node->value /= den;
          node->value.canonicalize();
        }
        return node;
      }
      case Token::LParen: {
        take();
        NodePtr inner = sum();
        expect(Token::RParen, "')'");
        return inner;
      }
      case Token::Name: {
        take();
        if (peek().kind == Token::LParen && (tok.text == "d" || registry().lookup(tok.text) || !is_generator(tok.text)))
          return call(tok);
        auto node = make(ParseNode::Generator, tok.column);
        node->index = resolve(tok);
        return node;
      }
      case Token::Slash:
        throw SyntaxError("'/' is only allowed inside rational literals", tok.column);
      case Token::End:
        throw SyntaxError("unexpected end of input", tok.column);
      default:
        throw SyntaxError("unexpected '" + tok.text + "'", tok.column);
    }
  }

  NodePtr call(const Token& name) {
    take();  // '('
    std::vector<NodePtr> args{sum()};
    while (peek().kind == Token::Comma) {
      take();
      args.push_back(sum());
    }
    expect(Token::RParen, "')'");
    if (name.text == "d") {
      if (args.size() != 1) throw SyntaxError("d takes one argument", name.column);
      return make(ParseNode::Differential, name.column, std::move(args));
    }
    auto id = registry().lookup(name.text);
    if (!id) throw UnknownIdentifier(name.text, name.column);
    if (registry().arity(*id) != args.size())
      throw SyntaxError(name.text + " takes " + std::to_string(registry().arity(*id)) + " argument(s)", name.column);
    auto node = make(ParseNode::Call, name.column, std::move(args));
    node->prim = *id;
    return node;
  }

  std::optional<std::size_t> lookup_generator(const std::string& text) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == text) return i;
    if (text.size() > 1 && text[0] == 'x' && text.size() < 8 &&
        std::all_of(text.begin() + 1, text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      const std::size_t k = std::stoul(text.substr(1));
      if (k < n_) return k;
    }
    return std::nullopt;
  }

  bool is_generator(const std::string& text) const { return lookup_generator(text).has_value(); }

  std::size_t resolve(const Token& tok) const {
    if (auto k = lookup_generator(tok.text)) return *k;
    throw UnknownIdentifier(tok.text, tok.column);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const NameList& names_;
  std::size_t n_;
};

inline void flatten(const NodePtr& node, ParseNode::Kind kind, std::vector<NodePtr>& out) {
  if (node->kind == kind) {
    for (const auto& c : node->children) flatten(c, kind, out);
  } else {
    out.push_back(node);
  }
}

inline ExprTree to_expr_tree(const NodePtr& node) {
  switch (node->kind) {
    case ParseNode::Number:
      return ExprTree::constant(node->value);
    case ParseNode::Generator:
      return ExprTree::gen(node->index);
    case ParseNode::Call: {
      std::vector<ExprTree> args;
      for (const auto& c : node->children) args.push_back(to_expr_tree(c));
      return ExprTree::prim(node->prim, std::move(args));
    }
    case ParseNode::Add: {
      std::vector<NodePtr> parts;
      flatten(node, ParseNode::Add, parts);
      std::vector<ExprTree> terms;
      for (const auto& p : parts) terms.push_back(to_expr_tree(p));
      return ExprTree::sum(std::move(terms));
    }
    case ParseNode::Sub:
      return ExprTree::sum({to_expr_tree(node->children[0]),
                            ExprTree::product({ExprTree::constant(-1), to_expr_tree(node->children[1])})});
    case ParseNode::Neg:
      if (node->children[0]->kind == ParseNode::Number) return ExprTree::constant(-node->children[0]->value);
      return ExprTree::product({ExprTree::constant(-1), to_expr_tree(node->children[0])});
    case ParseNode::Mul: {
      std::vector<NodePtr> parts;
      flatten(node, ParseNode::Mul, parts);
      std::vector<ExprTree> factors;
      for (const auto& p : parts) factors.push_back(to_expr_tree(p));
      return ExprTree::product(std::move(factors));
    }
    case ParseNode::Pow:
      return ExprTree::power(to_expr_tree(node->children[0]), node->exponent);
    case ParseNode::Differential:
    case ParseNode::Wedge:
      throw SyntaxError("differential forms are not allowed in a function expression", node->column);
  }
  throw SyntaxError("unsupported syntax", node->column);
}

inline SmoothExpr require_scalar(const DifferentialForm& a, std::size_t column) {
  for (const auto& [idx, c] : a.terms())
    if (!idx.empty()) throw SyntaxError("expected a function, got a form of positive degree", column);
  return a.coefficient({});
}

inline DifferentialForm to_form(const NodePtr& node, const RingPresentation& ring) {
  switch (node->kind) {
    case ParseNode::Number:
    case ParseNode::Generator:
    case ParseNode::Call:
      if (node->kind != ParseNode::Call) return DifferentialForm::scalar(ring, normalize(to_expr_tree(node)));
      {
        std::vector<SmoothExpr> args;
        for (const auto& c : node->children) args.push_back(require_scalar(to_form(c, ring), c->column));
        return DifferentialForm::scalar(ring, SmoothExpr::primitive(node->prim, std::move(args)));
      }
    case ParseNode::Differential:
      return exterior_derivative(to_form(node->children[0], ring));
    case ParseNode::Add:
      return to_form(node->children[0], ring) + to_form(node->children[1], ring);
    case ParseNode::Sub:
      return to_form(node->children[0], ring) - to_form(node->children[1], ring);
    case ParseNode::Neg:
      return -to_form(node->children[0], ring);
    case ParseNode::Mul:
    case ParseNode::Wedge:
      return wedge(to_form(node->children[0], ring), to_form(node->children[1], ring));
    case ParseNode::Pow: {
      const SmoothExpr base = require_scalar(to_form(node->children[0], ring), node->column);
      return DifferentialForm::scalar(ring, base.pow(node->exponent));
    }
  }
  throw SyntaxError("unsupported syntax", node->column);
}

}  // namespace detail

inline ExprTree parse_expr(std::string_view text, const NameList& names, std::size_t n) {
  return detail::to_expr_tree(detail::Parser(text, names, n).parse());
}

inline ExprTree parse_expr(std::string_view text, const NameList& names) { return parse_expr(text, names, names.size()); }

inline ExprTree parse_expr(std::string_view text, const RingPresentation& ring) {
  return parse_expr(text, ring.names(), ring.size());
}

/// Parses and normalizes (reducing modulo the ring's ideal).
inline SmoothExpr parse_smooth(std::string_view text, const RingPresentation& ring) {
  return ring.canonical(normalize(parse_expr(text, ring)));
}

inline DifferentialForm parse_form(std::string_view text, const RingPresentation& ring) {
  return detail::to_form(detail::Parser(text, ring.names(), ring.size()).parse(), ring);
}

/// Splits "a, f(b, c), d" at commas outside parentheses.
inline std::vector<std::string> split_arguments(std::string_view text) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '(') ++depth;
    if (text[i] == ')' && --depth < 0) throw SyntaxError("unbalanced ')'", i);
    if (text[i] == ',' && depth == 0) {
      out.emplace_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (depth != 0) throw SyntaxError("unbalanced '('", text.size());
  out.emplace_back(text.substr(start));
  return out;
}

}  // namespace cartan
