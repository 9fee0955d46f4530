#pragma once

// Derivations of C∞(ℝ^m)|_M for M = Z(I), as the quotient D/J where
//   D = { V : V(I) ⊆ I }   and   J = { V ∈ D : V(x_i) ∈ I for all i }.
//
// Tangency is certified on the ideal generators only. This suffices because
// V(Σ h_j g_j) = Σ h_j V(g_j) + Σ V(h_j) g_j.

#include <string>
#include <utility>
#include <vector>

#include "cartan/calculus.hpp"

namespace cartan {

/// An ambient vector field together with certificates that it preserves the
/// ideal: vf_apply(field, g_k) = Σ_j certificates[k][j] · g_j exactly.
class TangentField {
 public:
  TangentField(VectorField field, IdealPresentation ideal, std::vector<std::vector<SmoothExpr>> certificates)
      : field_(std::move(field)), ideal_(std::move(ideal)), certificates_(std::move(certificates)) {
    if (field_.ring().size() != ideal_.nvars()) throw RingMismatch("field and ideal have different generator counts");
    const auto& gens = ideal_.generators();
    if (certificates_.size() != gens.size()) throw NotTangent(certificates_.size(), "missing certificates");
    for (std::size_t k = 0; k < gens.size(); ++k) {
      if (certificates_[k].size() != gens.size()) throw NotTangent(k, "malformed certificate");
      SmoothExpr residual = vf_apply(field_, gens[k]);
      for (std::size_t j = 0; j < gens.size(); ++j) residual -= certificates_[k][j] * gens[j];
      if (!residual.is_zero()) throw NotTangent(k, "certificate residual " + to_string(residual));
    }
  }

  const VectorField& field() const noexcept { return field_; }
  const IdealPresentation& ideal() const noexcept { return ideal_; }
  const std::vector<std::vector<SmoothExpr>>& certificates() const noexcept { return certificates_; }

 private:
  VectorField field_;
  IdealPresentation ideal_;
  std::vector<std::vector<SmoothExpr>> certificates_;
};

namespace detail {

inline void require_polynomial_field(const VectorField& v) {
  for (const auto& c : v.coefficients())
    if (!c.is_polynomial()) throw NonPolynomial("vector field coefficients must be polynomials");
}

}  // namespace detail

/// Certifies V(I) ⊆ I, or throws NotTangent naming the first failing generator.
inline TangentField preserves_ideal(const VectorField& v, const IdealPresentation& ideal) {
  detail::require_polynomial_field(v);
  if (!v.ring().is_free()) throw RingMismatch("tangency is decided for fields over the ambient free ring");
  std::vector<std::vector<SmoothExpr>> certificates;
  const auto& gens = ideal.generators();
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const SmoothExpr image = vf_apply(v, gens[k]);
    auto m = ideal_member(image, ideal);
    if (!m.member) throw NotTangent(k, to_string(reduce_mod_ideal(image, ideal), v.ring().names()));
    certificates.push_back(std::move(m.cofactors));
  }
  return TangentField(v, ideal, std::move(certificates));
}

inline bool is_tangent(const VectorField& v, const IdealPresentation& ideal) {
  try {
    preserves_ideal(v, ideal);
    return true;
  } catch (const NotTangent&) {
    return false;
  }
}

/// V ∈ J: every coefficient V(x_i) lies in I.
inline bool in_J(const VectorField& v, const IdealPresentation& ideal) {
  detail::require_polynomial_field(v);
  for (const auto& c : v.coefficients())
    if (!ideal_member(c, ideal).member) return false;
  return true;
}

/// A coset V + J in D/J.
class DerClass {
 public:
  explicit DerClass(TangentField representative) : rep_(std::move(representative)) {}

  /// Certifies V and wraps it as a class.
  static DerClass of(const VectorField& v, const IdealPresentation& ideal) { return DerClass(preserves_ideal(v, ideal)); }

  const TangentField& representative() const noexcept { return rep_; }
  const VectorField& field() const noexcept { return rep_.field(); }
  const IdealPresentation& ideal() const noexcept { return rep_.ideal(); }

 private:
  TangentField rep_;
};

namespace detail {

inline void require_same_ideal(const DerClass& a, const DerClass& b) {
  if (!a.ideal().same_ideal(b.ideal())) throw IdealMismatch("classes live over different ideals");
}

}  // namespace detail

inline bool class_equal(const DerClass& a, const DerClass& b) {
  detail::require_same_ideal(a, b);
  return in_J(a.field() - b.field(), a.ideal());
}

inline DerClass class_add(const DerClass& a, const DerClass& b) {
  detail::require_same_ideal(a, b);
  return DerClass::of(a.field() + b.field(), a.ideal());
}

inline DerClass class_sub(const DerClass& a, const DerClass& b) {
  detail::require_same_ideal(a, b);
  return DerClass::of(a.field() - b.field(), a.ideal());
}

/// g · [V]; the module action of functions on D/J.
inline DerClass class_scale(const SmoothExpr& g, const DerClass& a) { return DerClass::of(g * a.field(), a.ideal()); }

/// [A, B] represented by the bracket of representatives, re-certified.
inline DerClass class_bracket(const DerClass& a, const DerClass& b) {
  detail::require_same_ideal(a, b);
  return DerClass::of(vf_bracket(a.field(), b.field()), a.ideal());
}

/// For I = ⟨xy⟩ in ℝ², writes the representative as x a1 ∂x + y a2 ∂y and
/// returns (a1(x, 0), a2(0, y)): the pair of vector fields on the two axes.
inline std::pair<SmoothExpr, SmoothExpr> canonical_pair_cross(const DerClass& a) {
  const SmoothExpr x = SmoothExpr::generator(0), y = SmoothExpr::generator(1);
  if (a.ideal().nvars() != 2 || !a.ideal().same_ideal(IdealPresentation(2, {x * y})))
    throw WrongIdeal("canonical pairs are defined for the ideal <x*y> in two variables");
  const SmoothExpr a1 = hadamard_factor(a.field()[0], 0);
  const SmoothExpr a2 = hadamard_factor(a.field()[1], 1);
  return {substitute(a1, 1, SmoothExpr(0)), substitute(a2, 0, SmoothExpr(0))};
}

/// For a set with dense interior the ideal is zero, so J = {0}.
inline bool vanishes_on_dense_interior(const VectorField& v) {
  detail::require_polynomial_field(v);
  return v.is_zero();
}

}  // namespace cartan
