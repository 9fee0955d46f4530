#pragma once

// Seeded generators of random polynomials, vector fields, forms, graded
// operators and related (f, v, w) triples. Only raw mt19937_64 output is
// used, so a seed reproduces the same objects on every platform.

#include <cstdint>
#include <random>
#include <vector>

#include "cartan/calculus.hpp"

namespace cartan {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }
  /// Uniform in [lo, hi].
  long range(long lo, long hi) { return lo + static_cast<long>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
  bool chance(unsigned percent) { return below(100) < percent; }

 private:
  std::mt19937_64 engine_;
};

struct PolynomialShape {
  unsigned max_degree = 2;
  unsigned max_terms = 4;
  long max_coefficient = 3;
};

inline SmoothExpr random_monomial(Rng& rng, std::size_t n, unsigned degree) {
  SmoothExpr m(1);
  for (unsigned k = 0; k < degree && n > 0; ++k) m *= SmoothExpr::generator(rng.below(n));
  return m;
}

/// Sum of up to max_terms monomials of degree ≤ max_degree with small
/// nonzero coefficients (occasionally halves). May be zero.
inline SmoothExpr random_polynomial(Rng& rng, std::size_t n, const PolynomialShape& shape = {}) {
  SmoothExpr out;
  const auto terms = rng.below(shape.max_terms + 1);
  for (std::uint64_t t = 0; t < terms; ++t) {
    long c = rng.range(1, shape.max_coefficient);
    if (rng.chance(50)) c = -c;
    const Rational coef = rng.chance(15) ? Rational(c) / 2 : Rational(c);
    out += SmoothExpr(coef) * random_monomial(rng, n, static_cast<unsigned>(rng.below(shape.max_degree + 1)));
  }
  return out;
}

/// A random polynomial plus, sometimes, a term with β_k, S or β_0² calls.
inline SmoothExpr random_smooth_expr(Rng& rng, std::size_t n, int depth = 1) {
  SmoothExpr out = random_polynomial(rng, n, {2, 3, 3});
  if (depth <= 0) return out;
  switch (rng.below(4)) {
    case 0:
      out += random_polynomial(rng, n, {1, 2, 2}) *
             beta(static_cast<int>(rng.below(3)), random_smooth_expr(rng, n, depth - 1));
      break;
    case 1:
      out += smooth_step(random_polynomial(rng, n, {2, 2, 2}), random_polynomial(rng, n, {2, 2, 2}));
      break;
    case 2:
      out += beta(0, random_polynomial(rng, n, {2, 3, 2})).pow(2);
      break;
    default:
      break;
  }
  return out;
}

inline VectorField random_vector_field(Rng& rng, const RingPresentation& ring, const PolynomialShape& shape = {}) {
  std::vector<SmoothExpr> c;
  for (std::size_t i = 0; i < ring.size(); ++i) c.push_back(random_polynomial(rng, ring.size(), shape));
  return VectorField(ring, std::move(c));
}

inline BasisIndex random_basis_index(Rng& rng, std::size_t n, std::size_t max_form_degree) {
  BasisIndex idx;
  for (std::uint32_t i = 0; i < n; ++i)
    if (rng.chance(50)) idx.push_back(i);
  while (idx.size() > max_form_degree) idx.erase(idx.begin() + static_cast<long>(rng.below(idx.size())));
  return idx;
}

/// Random (possibly inhomogeneous) form with polynomial coefficients.
inline DifferentialForm random_form(Rng& rng, const RingPresentation& ring, std::size_t max_form_degree,
                                    const PolynomialShape& shape = {}, unsigned max_terms = 3) {
  DifferentialForm out(ring);
  const auto terms = 1 + rng.below(max_terms);
  for (std::uint64_t t = 0; t < terms; ++t)
    out += DifferentialForm::monomial(ring, random_polynomial(rng, ring.size(), shape),
                                      random_basis_index(rng, ring.size(), max_form_degree));
  return out;
}

/// Random homogeneous form of the given degree.
inline DifferentialForm random_homogeneous_form(Rng& rng, const RingPresentation& ring, std::size_t degree,
                                                const PolynomialShape& shape = {}) {
  DifferentialForm out(ring);
  if (degree > ring.size()) return out;
  for (int t = 0; t < 3; ++t) {
    BasisIndex idx;
    std::vector<std::uint32_t> pool(ring.size());
    for (std::uint32_t i = 0; i < pool.size(); ++i) pool[i] = i;
    for (std::size_t k = 0; k < degree; ++k) {
      const auto pick = rng.below(pool.size());
      idx.push_back(pool[pick]);
      pool.erase(pool.begin() + static_cast<long>(pick));
    }
    out += DifferentialForm::monomial(ring, random_polynomial(rng, ring.size(), shape), idx);
  }
  return out;
}

/// A random operator with the given degree built from d, ι(v) and L(v).
inline GradedOperator random_operator_of_degree(Rng& rng, const RingPresentation& ring, int degree,
                                                const PolynomialShape& shape = {1, 2, 2}) {
  using Op = GradedOperator;
  auto field = [&] { return random_vector_field(rng, ring, shape); };
  if (degree > 1) return Op::compose(Op::exterior_d(), random_operator_of_degree(rng, ring, degree - 1, shape));
  if (degree < -1) return Op::compose(Op::contraction(field()), random_operator_of_degree(rng, ring, degree + 1, shape));
  const bool plain = rng.chance(50);
  if (degree == 1) return plain ? Op::exterior_d() : Op::compose(Op::lie(field()), Op::exterior_d());
  if (degree == 0) return plain ? Op::lie(field()) : Op::compose(Op::exterior_d(), Op::contraction(field()));
  return plain ? Op::contraction(field()) : Op::compose(Op::lie(field()), Op::contraction(field()));
}

/// Random operator tree over d, ι(v), L(v), sums, compositions and scalings.
inline GradedOperator random_operator(Rng& rng, const RingPresentation& ring, unsigned depth,
                                      const PolynomialShape& shape = {1, 2, 2}) {
  using Op = GradedOperator;
  if (depth == 0 || rng.chance(30)) return random_operator_of_degree(rng, ring, static_cast<int>(rng.range(-1, 1)), shape);
  switch (rng.below(3)) {
    case 0: {
      Op a = random_operator(rng, ring, depth - 1, shape);
      return Op::sum(a, random_operator_of_degree(rng, ring, a.degree(), shape));
    }
    case 1:
      return Op::compose(random_operator(rng, ring, depth - 1, shape), random_operator(rng, ring, depth - 1, shape));
    default:
      return Op::scale(random_polynomial(rng, ring.size(), shape), random_operator(rng, ring, depth - 1, shape));
  }
}

/// Runs verify_cartan on `trials` pairs of fresh random fields. Each identity
/// keeps the first failing witness.
inline IdentityReport cartan_trials(const RingPresentation& ring, std::uint64_t seed, std::size_t trials,
                                    const std::vector<DifferentialForm>& forms, const PolynomialShape& shape = {}) {
  Rng rng(seed);
  IdentityReport merged;
  for (std::size_t t = 0; t < trials; ++t) {
    const VectorField v = random_vector_field(rng, ring, shape);
    const VectorField w = random_vector_field(rng, ring, shape);
    const IdentityReport r = verify_cartan(v, w, forms);
    if (merged.results.empty()) {
      merged = r;
      continue;
    }
    for (std::size_t k = 0; k < r.results.size(); ++k)
      if (merged.results[k].pass && !r.results[k].pass) merged.results[k] = r.results[k];
  }
  return merged;
}

struct RelatedTriple {
  RingHom map;
  VectorField source_field;
  VectorField target_field;
};

/// f: C(ℝ^m) → C(ℝ^{m+extra}), x_j ↦ u_j + g_j(u_m, ..., u_{m+extra-1}); a
/// random v on the source and w = Σ_j f(v_j) ∂/∂u_j, which is f-related to v
/// because w(f(x_j)) = w(u_j) = f(v_j).
inline RelatedTriple random_related_triple(Rng& rng, std::size_t m, std::size_t extra,
                                           const PolynomialShape& shape = {2, 3, 2}) {
  const RingPresentation source = RingPresentation::free(m);
  const RingPresentation target = RingPresentation::free(m + extra);
  std::vector<SmoothExpr> images;
  for (std::size_t j = 0; j < m; ++j) {
    SmoothExpr g = random_polynomial(rng, extra, shape);
    std::vector<SmoothExpr> shift;
    for (std::size_t k = 0; k < extra; ++k) shift.push_back(SmoothExpr::generator(m + k));
    images.push_back(SmoothExpr::generator(j) + substitute(g, shift));
  }
  RingHom f(source, target, images);
  VectorField v = random_vector_field(rng, source, shape);
  std::vector<SmoothExpr> wc(m + extra);
  for (std::size_t j = 0; j < m; ++j) wc[j] = hom_apply(f, v[j]);
  return {f, v, VectorField(target, std::move(wc))};
}

}  // namespace cartan
