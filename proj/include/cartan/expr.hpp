#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cartan/primitives.hpp"
#include "cartan/smooth_expr.hpp"

namespace cartan {

/// Display names for generators; index i falls back to "x<i>" when absent.
using NameList = std::vector<std::string>;

inline std::string generator_name(std::size_t i, const NameList& names) {
  return i < names.size() ? names[i] : "x" + std::to_string(i);
}

inline std::string to_string(const SmoothExpr& e, const NameList& names = {});

namespace detail {

inline std::string monomial_string(const Monomial& m, const NameList& names) {
  std::string out;
  for (const auto& f : m.factors()) {
    if (!out.empty()) out += '*';
    if (f.atom.is_generator()) {
      out += generator_name(f.atom.index(), names);
    } else {
      out += registry().name(f.atom.call().id);
      out += '(';
      const auto& args = f.atom.call().args;
      for (std::size_t k = 0; k < args.size(); ++k) {
        if (k) out += ", ";
        out += to_string(args[k], names);
      }
      out += ')';
    }
    if (f.exponent != 1) out += '^' + std::to_string(f.exponent);
  }
  return out;
}

}  // namespace detail

/// Canonical serialization: terms in monomial order, primitive arguments
/// parenthesized. Parsing the output yields the same normal form.
inline std::string to_string(const SmoothExpr& e, const NameList& names) {
  if (e.is_zero()) return "0";
  std::string out;
  for (const auto& [m, c] : e.terms()) {
    std::string term;
    if (m.empty()) {
      term = to_string(c);
    } else if (c == 1) {
      term = detail::monomial_string(m, names);
    } else if (c == -1) {
      term = "-" + detail::monomial_string(m, names);
    } else {
      term = to_string(c) + "*" + detail::monomial_string(m, names);
    }
    if (out.empty()) {
      out = term;
    } else if (term.front() == '-') {
      out += " - " + term.substr(1);
    } else {
      out += " + " + term;
    }
  }
  return out;
}

namespace detail {

inline SmoothExpr atom_partial(const Atom& atom, std::size_t i);

}  // namespace detail

/// Partial derivative ∂/∂x_i: the C∞-derivation with x_j ↦ δ_ij, extended
/// through primitive calls by the chain rule with registry rules.
inline SmoothExpr differentiate(const SmoothExpr& e, std::size_t i) {
  SmoothExpr out;
  for (const auto& [m, c] : e.terms()) {
    const auto& factors = m.factors();
    for (std::size_t k = 0; k < factors.size(); ++k) {
      const auto& f = factors[k];
      const Rational coef = c * f.exponent;
      if (f.atom.is_generator()) {
        if (f.atom.index() == i) out.add_term(m.lowered(k), coef);
        continue;
      }
      SmoothExpr inner = detail::atom_partial(f.atom, i);
      if (inner.is_zero()) continue;
      out += SmoothExpr::from_monomial(m.lowered(k), coef) * inner;
    }
  }
  return out;
}

namespace detail {

inline SmoothExpr atom_partial(const Atom& atom, std::size_t i) {
  if (atom.is_generator()) return atom.index() == i ? SmoothExpr(1) : SmoothExpr();
  const auto& call = atom.call();
  SmoothExpr out;
  for (std::size_t slot = 0; slot < call.args.size(); ++slot) {
    SmoothExpr d_arg = differentiate(call.args[slot], i);
    if (d_arg.is_zero()) continue;
    out += substitute(registry().partial(call.id, slot), call.args) * d_arg;
  }
  return out;
}

}  // namespace detail

/// Numeric value at a point; primitive calls use the registry evaluators.
inline double eval_numeric(const SmoothExpr& e, std::span<const double> point) {
  double sum = 0.0;
  for (const auto& [m, c] : e.terms()) {
    double term = c.get_d();
    for (const auto& f : m.factors()) {
      double base;
      if (f.atom.is_generator()) {
        if (f.atom.index() >= point.size()) throw Error("evaluation point has too few coordinates");
        base = point[f.atom.index()];
      } else {
        std::vector<double> args;
        for (const auto& arg : f.atom.call().args) args.push_back(eval_numeric(arg, point));
        base = registry().evaluate(f.atom.call().id, args);
      }
      term *= std::pow(base, static_cast<double>(f.exponent));
    }
    sum += term;
  }
  return sum;
}

inline double eval_numeric(const SmoothExpr& e, std::initializer_list<double> point) {
  return eval_numeric(e, std::span<const double>(point.begin(), point.size()));
}

/// Exact value of a polynomial at a rational point.
inline Rational eval_exact(const SmoothExpr& e, std::span<const Rational> point) {
  if (!e.is_polynomial()) throw NonPolynomial("exact evaluation requires a polynomial");
  Rational sum = 0;
  for (const auto& [m, c] : e.terms()) {
    Rational term = c;
    for (const auto& f : m.factors()) {
      if (f.atom.index() >= point.size()) throw Error("evaluation point has too few coordinates");
      for (unsigned k = 0; k < f.exponent; ++k) term *= point[f.atom.index()];
    }
    sum += term;
  }
  return sum;
}

/// Returns a with p = x_i · a, for polynomial p vanishing on {x_i = 0}.
inline SmoothExpr hadamard_factor(const SmoothExpr& p, std::size_t i) {
  if (!p.is_polynomial()) throw NonPolynomial("hadamard_factor requires a polynomial");
  const Atom xi = Atom::generator(i);
  SmoothExpr out;
  for (const auto& [m, c] : p.terms()) {
    const auto& factors = m.factors();
    std::size_t pos = factors.size();
    for (std::size_t k = 0; k < factors.size(); ++k)
      if (factors[k].atom == xi) pos = k;
    if (pos == factors.size())
      throw NotDivisible("polynomial does not vanish on x" + std::to_string(i) + " = 0");
    out.add_term(m.lowered(pos), c);
  }
  return out;
}

/// Identity on values that are already canonical; kept so callers can state
/// normalization explicitly.
inline SmoothExpr normalize(const SmoothExpr& e) { return e; }

// ---------------------------------------------------------------------------
// Syntax trees (what the parser produces before normalization).

class ExprTree {
 public:
  struct Const {
    Rational value;
  };
  struct Gen {
    std::size_t index;
  };
  struct Sum {
    std::vector<ExprTree> terms;
  };
  struct Product {
    std::vector<ExprTree> factors;
  };
  struct IntPow {
    std::vector<ExprTree> base;  // exactly one element
    unsigned exponent;
  };
  struct Prim {
    PrimId id;
    std::vector<ExprTree> args;
  };
  using Node = std::variant<Const, Gen, Sum, Product, IntPow, Prim>;

  static ExprTree constant(Rational q) { return ExprTree(Const{std::move(q)}); }
  static ExprTree gen(std::size_t i) { return ExprTree(Gen{i}); }
  static ExprTree sum(std::vector<ExprTree> terms) { return ExprTree(Sum{std::move(terms)}); }
  static ExprTree product(std::vector<ExprTree> factors) { return ExprTree(Product{std::move(factors)}); }
  static ExprTree power(ExprTree base, unsigned exponent) { return ExprTree(IntPow{{std::move(base)}, exponent}); }
  static ExprTree prim(PrimId id, std::vector<ExprTree> args) { return ExprTree(Prim{id, std::move(args)}); }

  const Node& node() const { return *node_; }
  template <class T>
  bool is() const {
    return std::holds_alternative<T>(*node_);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(*node_);
  }

 private:
  explicit ExprTree(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}
  std::shared_ptr<const Node> node_;
};

inline SmoothExpr normalize(const ExprTree& t) {
  return std::visit(
      [](const auto& n) -> SmoothExpr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ExprTree::Const>) {
          return SmoothExpr(n.value);
        } else if constexpr (std::is_same_v<T, ExprTree::Gen>) {
          return SmoothExpr::generator(n.index);
        } else if constexpr (std::is_same_v<T, ExprTree::Sum>) {
          SmoothExpr out;
          for (const auto& s : n.terms) out += normalize(s);
          return out;
        } else if constexpr (std::is_same_v<T, ExprTree::Product>) {
          SmoothExpr out(1);
          for (const auto& f : n.factors) out *= normalize(f);
          return out;
        } else if constexpr (std::is_same_v<T, ExprTree::IntPow>) {
          return normalize(n.base.front()).pow(n.exponent);
        } else {
          std::vector<SmoothExpr> args;
          for (const auto& a : n.args) args.push_back(normalize(a));
          return SmoothExpr::primitive(n.id, std::move(args));
        }
      },
      t.node());
}

/// Canonical tree of a normal form: Sum of Products of IntPow atoms.
inline ExprTree to_tree(const SmoothExpr& e) {
  std::vector<ExprTree> terms;
  for (const auto& [m, c] : e.terms()) {
    std::vector<ExprTree> factors;
    if (c != 1 || m.empty()) factors.push_back(ExprTree::constant(c));
    for (const auto& f : m.factors()) {
      ExprTree base = ExprTree::gen(0);
      if (f.atom.is_generator()) {
        base = ExprTree::gen(f.atom.index());
      } else {
        std::vector<ExprTree> args;
        for (const auto& a : f.atom.call().args) args.push_back(to_tree(a));
        base = ExprTree::prim(f.atom.call().id, std::move(args));
      }
      factors.push_back(f.exponent == 1 ? base : ExprTree::power(base, f.exponent));
    }
    terms.push_back(factors.size() == 1 ? factors.front() : ExprTree::product(std::move(factors)));
  }
  if (terms.empty()) return ExprTree::constant(0);
  return terms.size() == 1 ? terms.front() : ExprTree::sum(std::move(terms));
}

/// S-expression style dump of a tree, e.g. Sum(Product(x, y), Const(1/2)).
inline std::string to_string(const ExprTree& t, const NameList& names = {}) {
  auto list = [&](const std::vector<ExprTree>& items) {
    std::string out;
    for (std::size_t k = 0; k < items.size(); ++k) {
      if (k) out += ", ";
      out += to_string(items[k], names);
    }
    return out;
  };
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ExprTree::Const>) {
          return "Const(" + to_string(n.value) + ")";
        } else if constexpr (std::is_same_v<T, ExprTree::Gen>) {
          return generator_name(n.index, names);
        } else if constexpr (std::is_same_v<T, ExprTree::Sum>) {
          return "Sum(" + list(n.terms) + ")";
        } else if constexpr (std::is_same_v<T, ExprTree::Product>) {
          return "Product(" + list(n.factors) + ")";
        } else if constexpr (std::is_same_v<T, ExprTree::IntPow>) {
          return "IntPow(" + list(n.base) + ", " + std::to_string(n.exponent) + ")";
        } else {
          return "Prim(" + registry().name(n.id) + ", [" + list(n.args) + "])";
        }
      },
      t.node());
}

// ---------------------------------------------------------------------------
// Bump functions.

/// ρ(x) = S(r_out² − |x−c|², |x−c|² − r_in²): identically 1 on the closed
/// ball of radius r_in, identically 0 outside the open ball of radius r_out.
inline SmoothExpr make_bump(std::span<const Rational> center, const Rational& r_in, const Rational& r_out) {
  if (!(r_in > 0) || !(r_in < r_out)) throw BadRadii("bump radii must satisfy 0 < r_in < r_out");
  SmoothExpr dist2;
  for (std::size_t i = 0; i < center.size(); ++i) {
    const SmoothExpr diff = SmoothExpr::generator(i) - SmoothExpr(center[i]);
    dist2 += diff * diff;
  }
  return smooth_step(SmoothExpr(r_out * r_out) - dist2, dist2 - SmoothExpr(r_in * r_in));
}

inline SmoothExpr make_bump(std::initializer_list<Rational> center, const Rational& r_in, const Rational& r_out) {
  return make_bump(std::span<const Rational>(center.begin(), center.size()), r_in, r_out);
}

}  // namespace cartan
