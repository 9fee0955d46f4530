#pragma once

// Derivations, contraction and Lie derivative on Λ•Ω¹, graded operators
// with their graded commutator, and the Cartan identity harness.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cartan/forms.hpp"

namespace cartan {

/// A derivation Σ a_i ∂/∂x_i of a presented ring.
class VectorField {
 public:
  VectorField() = default;
  VectorField(RingPresentation ring, std::vector<SmoothExpr> coefficients) : ring_(std::move(ring)) {
    if (coefficients.size() != ring_.size())
      throw RingMismatch("vector field needs " + std::to_string(ring_.size()) + " coefficients");
    for (auto& c : coefficients) coefficients_.push_back(ring_.canonical(c));
  }

  static VectorField zero(const RingPresentation& ring) {
    return VectorField(ring, std::vector<SmoothExpr>(ring.size()));
  }

  /// ∂/∂x_i
  static VectorField coordinate(const RingPresentation& ring, std::size_t i) {
    std::vector<SmoothExpr> c(ring.size());
    c.at(i) = 1;
    return VectorField(ring, std::move(c));
  }

  const RingPresentation& ring() const noexcept { return ring_; }
  const std::vector<SmoothExpr>& coefficients() const noexcept { return coefficients_; }
  const SmoothExpr& operator[](std::size_t i) const { return coefficients_.at(i); }

  bool is_zero() const {
    for (const auto& c : coefficients_)
      if (!c.is_zero()) return false;
    return true;
  }

  friend VectorField operator+(const VectorField& a, const VectorField& b) {
    require_same_ring(a.ring_, b.ring_);
    std::vector<SmoothExpr> c;
    for (std::size_t i = 0; i < a.coefficients_.size(); ++i) c.push_back(a.coefficients_[i] + b.coefficients_[i]);
    return VectorField(a.ring_, std::move(c));
  }
  friend VectorField operator-(const VectorField& a, const VectorField& b) {
    require_same_ring(a.ring_, b.ring_);
    std::vector<SmoothExpr> c;
    for (std::size_t i = 0; i < a.coefficients_.size(); ++i) c.push_back(a.coefficients_[i] - b.coefficients_[i]);
    return VectorField(a.ring_, std::move(c));
  }
  friend VectorField operator*(const SmoothExpr& f, const VectorField& v) {
    std::vector<SmoothExpr> c;
    for (const auto& a : v.coefficients_) c.push_back(f * a);
    return VectorField(v.ring_, std::move(c));
  }
  friend bool operator==(const VectorField& a, const VectorField& b) {
    return a.ring_ == b.ring_ && a.coefficients_ == b.coefficients_;
  }

 private:
  RingPresentation ring_;
  std::vector<SmoothExpr> coefficients_;
};

inline std::string to_string(const VectorField& v) {
  std::string out;
  for (std::size_t i = 0; i < v.coefficients().size(); ++i) {
    if (v[i].is_zero()) continue;
    std::string coef = v.ring().format(v[i]) + "*";
    if (v[i].terms().size() > 1) coef = "(" + coef.substr(0, coef.size() - 1) + ")*";
    if (v[i] == SmoothExpr(1)) coef.clear();
    if (v[i] == SmoothExpr(-1)) coef = "-";
    if (!out.empty()) out += " + ";
    out += coef + "d/d" + generator_name(i, v.ring().names());
  }
  return out.empty() ? "0" : out;
}

/// v(f) = Σ a_i ∂_i f
inline SmoothExpr vf_apply(const VectorField& v, const SmoothExpr& f) {
  if (f.generator_span() > v.ring().size()) throw RingMismatch("function is not over the vector field's ring");
  SmoothExpr out;
  for (std::size_t i = 0; i < v.coefficients().size(); ++i) {
    if (v[i].is_zero()) continue;
    SmoothExpr partial = differentiate(f, i);
    if (!partial.is_zero()) out += v[i] * partial;
  }
  return v.ring().canonical(out);
}

/// [v, w]_i = v(w_i) − w(v_i)
inline VectorField vf_bracket(const VectorField& v, const VectorField& w) {
  require_same_ring(v.ring(), w.ring());
  std::vector<SmoothExpr> c;
  for (std::size_t i = 0; i < v.coefficients().size(); ++i) c.push_back(vf_apply(v, w[i]) - vf_apply(w, v[i]));
  return VectorField(v.ring(), std::move(c));
}

/// ι(v): f dx_{i1}∧…∧dx_{ik} ↦ Σ_s (−1)^{s+1} f v_{is} dx_{i1}∧…ŝ…∧dx_{ik}
inline DifferentialForm contract(const VectorField& v, const DifferentialForm& a) {
  require_same_ring(v.ring(), a.ring());
  DifferentialForm out(a.ring());
  for (const auto& [idx, c] : a.terms()) {
    for (std::size_t s = 0; s < idx.size(); ++s) {
      const SmoothExpr& vs = v[idx[s]];
      if (vs.is_zero()) continue;
      BasisIndex rest = idx;
      rest.erase(rest.begin() + static_cast<long>(s));
      const SmoothExpr term = c * vs;
      out.add_term(rest, s % 2 == 0 ? term : -term);
    }
  }
  return out;
}

/// L(v) = d ∘ ι(v) + ι(v) ∘ d
inline DifferentialForm lie_derivative(const VectorField& v, const DifferentialForm& a) {
  require_same_ring(v.ring(), a.ring());
  return exterior_derivative(contract(v, a)) + contract(v, exterior_derivative(a));
}

// ---------------------------------------------------------------------------
// Graded operators on the forms complex.

class GradedOperator {
 public:
  enum class Kind { ExteriorD, Contraction, Lie, Sum, Compose, Scale, Zero };

  static GradedOperator exterior_d() { return GradedOperator(Kind::ExteriorD, 1); }
  static GradedOperator contraction(VectorField v) {
    GradedOperator op(Kind::Contraction, -1);
    op.node_->field = std::move(v);
    return op;
  }
  static GradedOperator lie(VectorField v) {
    GradedOperator op(Kind::Lie, 0);
    op.node_->field = std::move(v);
    return op;
  }
  static GradedOperator zero(int degree) { return GradedOperator(Kind::Zero, degree); }

  /// All summands must share `degree`.
  static GradedOperator sum(int degree, std::vector<GradedOperator> terms) {
    for (const auto& t : terms)
      if (t.degree() != degree) throw DegreeMismatch("sum of graded operators with different degrees");
    GradedOperator op(Kind::Sum, degree);
    op.node_->operands = std::move(terms);
    return op;
  }
  static GradedOperator sum(GradedOperator a, GradedOperator b) {
    const int degree = a.degree();
    return sum(degree, {std::move(a), std::move(b)});
  }

  /// outer ∘ inner (inner applied first).
  static GradedOperator compose(GradedOperator outer, GradedOperator inner) {
    GradedOperator op(Kind::Compose, outer.degree() + inner.degree());
    op.node_->operands = {std::move(outer), std::move(inner)};
    return op;
  }

  static GradedOperator scale(SmoothExpr factor, GradedOperator op) {
    GradedOperator out(Kind::Scale, op.degree());
    out.node_->factor = std::move(factor);
    out.node_->operands = {std::move(op)};
    return out;
  }

  Kind kind() const noexcept { return node_->kind; }
  int degree() const noexcept { return node_->degree; }
  const VectorField& field() const { return node_->field; }
  const std::vector<GradedOperator>& operands() const noexcept { return node_->operands; }
  const SmoothExpr& factor() const noexcept { return node_->factor; }

 private:
  struct Node {
    Kind kind;
    int degree;
    VectorField field;
    std::vector<GradedOperator> operands;
    SmoothExpr factor;
  };

  GradedOperator(Kind kind, int degree) : node_(std::make_shared<Node>(Node{kind, degree, {}, {}, {}})) {}

  std::shared_ptr<Node> node_;
};

inline std::string to_string(const GradedOperator& op) {
  switch (op.kind()) {
    case GradedOperator::Kind::ExteriorD:
      return "d";
    case GradedOperator::Kind::Contraction:
      return "i(" + to_string(op.field()) + ")";
    case GradedOperator::Kind::Lie:
      return "L(" + to_string(op.field()) + ")";
    case GradedOperator::Kind::Zero:
      return "0";
    case GradedOperator::Kind::Compose:
      return "(" + to_string(op.operands()[0]) + " o " + to_string(op.operands()[1]) + ")";
    case GradedOperator::Kind::Scale:
      return "(" + to_string(op.factor()) + ")*" + to_string(op.operands()[0]);
    case GradedOperator::Kind::Sum: {
      std::string out = "(";
      for (std::size_t k = 0; k < op.operands().size(); ++k) out += (k ? " + " : "") + to_string(op.operands()[k]);
      return out + ")";
    }
  }
  return "?";
}

inline DifferentialForm op_apply(const GradedOperator& op, const DifferentialForm& a) {
  using Kind = GradedOperator::Kind;
  switch (op.kind()) {
    case Kind::ExteriorD:
      return exterior_derivative(a);
    case Kind::Contraction:
      return contract(op.field(), a);
    case Kind::Lie:
      return lie_derivative(op.field(), a);
    case Kind::Zero:
      return DifferentialForm::zero(a.ring());
    case Kind::Compose:
      return op_apply(op.operands()[0], op_apply(op.operands()[1], a));
    case Kind::Scale:
      return op.factor() * op_apply(op.operands()[0], a);
    case Kind::Sum: {
      DifferentialForm out(a.ring());
      for (const auto& t : op.operands()) out += op_apply(t, a);
      return out;
    }
  }
  return DifferentialForm::zero(a.ring());
}

/// [X, Y] = X∘Y − (−1)^{|X||Y|} Y∘X
inline GradedOperator graded_commutator(const GradedOperator& x, const GradedOperator& y) {
  const int sign = ((x.degree() * y.degree()) % 2 == 0) ? 1 : -1;
  return GradedOperator::sum(GradedOperator::compose(x, y),
                             GradedOperator::scale(SmoothExpr(-sign), GradedOperator::compose(y, x)));
}

/// ad(d)(X) = [d, X]
inline GradedOperator ad_d(const GradedOperator& x) { return graded_commutator(GradedOperator::exterior_d(), x); }

/// First test form on which the two operators disagree, if any.
inline std::optional<DifferentialForm> first_disagreement(const GradedOperator& x, const GradedOperator& y,
                                                          const std::vector<DifferentialForm>& forms) {
  for (const auto& a : forms)
    if (!(op_apply(x, a) == op_apply(y, a))) return a;
  return std::nullopt;
}

/// The spanning set f·dx_T with f a monomial of degree ≤ max_degree and T
/// any increasing index tuple.
inline std::vector<DifferentialForm> monomial_basis_forms(const RingPresentation& ring, unsigned max_degree) {
  const std::size_t n = ring.size();
  std::vector<SmoothExpr> monomials{SmoothExpr(1)};
  std::vector<SmoothExpr> layer{SmoothExpr(1)};
  std::vector<std::size_t> last_index{0};
  for (unsigned deg = 1; deg <= max_degree; ++deg) {
    std::vector<SmoothExpr> next;
    std::vector<std::size_t> next_index;
    for (std::size_t k = 0; k < layer.size(); ++k)
      for (std::size_t i = last_index[k]; i < n; ++i) {
        next.push_back(layer[k] * SmoothExpr::generator(i));
        next_index.push_back(i);
      }
    monomials.insert(monomials.end(), next.begin(), next.end());
    layer = std::move(next);
    last_index = std::move(next_index);
  }
  std::vector<DifferentialForm> out;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    BasisIndex idx;
    for (std::uint32_t i = 0; i < n; ++i)
      if (mask & (1U << i)) idx.push_back(i);
    for (const auto& m : monomials) {
      auto form = DifferentialForm::monomial(ring, m, idx);
      if (!form.is_zero()) out.push_back(std::move(form));
    }
  }
  return out;
}

struct IdentityResult {
  std::string identity;  // "i" .. "v"
  bool pass = true;
  std::optional<DifferentialForm> witness;
};

struct IdentityReport {
  std::vector<IdentityResult> results;

  bool all_pass() const {
    for (const auto& r : results)
      if (!r.pass) return false;
    return true;
  }
};

/// Checks the five Cartan identities for v, w on every test form:
///   (i)   L(v)∘d = d∘L(v)          (ii) L([v,w]) = [L(v), L(w)]
///   (iii) [L(v), ι(w)] = ι([v,w])   (iv) [ι(v), ι(w)] = 0
///   (v)   L(v) = [d, ι(v)]
inline IdentityReport verify_cartan(const VectorField& v, const VectorField& w,
                                    const std::vector<DifferentialForm>& test_forms) {
  require_same_ring(v.ring(), w.ring());
  for (const auto& a : test_forms) require_same_ring(v.ring(), a.ring());
  using Op = GradedOperator;
  const Op d = Op::exterior_d();
  const Op lv = Op::lie(v), lw = Op::lie(w), iv = Op::contraction(v), iw = Op::contraction(w);
  const VectorField vw = vf_bracket(v, w);

  const std::vector<std::pair<std::string, std::pair<Op, Op>>> identities{
      {"i", {Op::compose(lv, d), Op::compose(d, lv)}},
      {"ii", {Op::lie(vw), graded_commutator(lv, lw)}},
      {"iii", {graded_commutator(lv, iw), Op::contraction(vw)}},
      {"iv", {graded_commutator(iv, iw), Op::zero(-2)}},
      {"v", {lv, graded_commutator(d, iv)}},
  };
  IdentityReport report;
  for (const auto& [name, sides] : identities) {
    auto witness = first_disagreement(sides.first, sides.second, test_forms);
    report.results.push_back({name, !witness.has_value(), witness});
  }
  return report;
}

/// v on the source and w on the target are f-related: f(v(a)) = w(f(a))
/// for every source generator a.
inline bool f_related(const RingHom& f, const VectorField& v, const VectorField& w) {
  require_same_ring(f.source(), v.ring());
  require_same_ring(f.target(), w.ring());
  for (std::size_t j = 0; j < f.source().size(); ++j) {
    const SmoothExpr x = SmoothExpr::generator(j);
    if (!(hom_apply(f, vf_apply(v, x)) == vf_apply(w, hom_apply(f, x)))) return false;
  }
  return true;
}

/// Λ•(f)∘ι(v) = ι(w)∘Λ•(f) and Λ•(f)∘L(v) = L(w)∘Λ•(f) on every test form.
inline bool naturality_check(const RingHom& f, const VectorField& v, const VectorField& w,
                             const std::vector<DifferentialForm>& test_forms) {
  if (!f_related(f, v, w)) throw NotRelated("vector fields are not related by the ring map");
  for (const auto& a : test_forms) {
    const DifferentialForm pushed = pushforward(f, a);
    if (!(pushforward(f, contract(v, a)) == contract(w, pushed))) return false;
    if (!(pushforward(f, lie_derivative(v, a)) == lie_derivative(w, pushed))) return false;
  }
  return true;
}

}  // namespace cartan
