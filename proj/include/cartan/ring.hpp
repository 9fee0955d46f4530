#pragma once

// Finitely presented rings: free rings on n generators and their quotients
// by polynomial ideals, ideal membership through Gröbner bases, and ring
// homomorphisms given by generator substitution.

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cartan/expr.hpp"

namespace cartan {

using Exponents = std::vector<unsigned>;

/// Graded lexicographic order with x0 > x1 > ... ; sorts larger first.
struct GrlexGreater {
  bool operator()(const Exponents& a, const Exponents& b) const {
    unsigned da = 0, db = 0;
    for (auto e : a) da += e;
    for (auto e : b) db += e;
    if (da != db) return da > db;
    return a > b;
  }
};

/// Dense-exponent polynomial over Q in a fixed number of variables, used by
/// the Gröbner machinery. Terms are kept leading-term first.
class Poly {
 public:
  using Terms = std::map<Exponents, Rational, GrlexGreater>;

  explicit Poly(std::size_t nvars = 0) : nvars_(nvars) {}

  static Poly from_expr(const SmoothExpr& e, std::size_t nvars) {
    if (!e.is_polynomial()) throw NonPolynomial("expected a polynomial, got " + to_string(e));
    Poly p(nvars);
    for (const auto& [m, c] : e.terms()) {
      Exponents exps(nvars, 0);
      for (const auto& f : m.factors()) {
        if (f.atom.index() >= nvars)
          throw RingMismatch("generator x" + std::to_string(f.atom.index()) + " outside a ring with " +
                             std::to_string(nvars) + " generators");
        exps[f.atom.index()] = f.exponent;
      }
      p.terms_.emplace(std::move(exps), c);
    }
    return p;
  }

  SmoothExpr to_expr() const {
    SmoothExpr out;
    for (const auto& [exps, c] : terms_) {
      SmoothExpr term(c);
      for (std::size_t i = 0; i < exps.size(); ++i)
        if (exps[i]) term *= SmoothExpr::generator(i).pow(exps[i]);
      out += term;
    }
    return out;
  }

  std::size_t nvars() const noexcept { return nvars_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  const Exponents& leading_monomial() const { return terms_.begin()->first; }
  const Rational& leading_coefficient() const { return terms_.begin()->second; }

  void add_term(const Exponents& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  /// this += c · x^m · other
  void add_scaled(const Poly& other, const Rational& c, const Exponents& m) {
    for (const auto& [e, k] : other.terms_) {
      Exponents prod = e;
      for (std::size_t i = 0; i < prod.size(); ++i) prod[i] += m[i];
      add_term(prod, c * k);
    }
  }

  friend Poly operator+(Poly a, const Poly& b) {
    for (const auto& [e, c] : b.terms_) a.add_term(e, c);
    return a;
  }
  friend Poly operator-(Poly a, const Poly& b) {
    for (const auto& [e, c] : b.terms_) a.add_term(e, -c);
    return a;
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly out(std::max(a.nvars_, b.nvars_));
    for (const auto& [e, c] : b.terms_) out.add_scaled(a, c, e);
    return out;
  }
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

 private:
  std::size_t nvars_;
  Terms terms_;
};

namespace detail {

inline bool divides(const Exponents& a, const Exponents& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

inline Exponents lcm(const Exponents& a, const Exponents& b) {
  Exponents out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::max(a[i], b[i]);
  return out;
}

inline Exponents quotient(const Exponents& a, const Exponents& b) {
  Exponents out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline bool coprime(const Exponents& a, const Exponents& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && b[i]) return false;
  return true;
}

}  // namespace detail

/// A basis element together with its expression in the input generators:
/// value = Σ cofactors[j] · input[j].
struct TrackedPoly {
  Poly value;
  std::vector<Poly> cofactors;
};

struct Division {
  Poly remainder;
  std::vector<Poly> quotients;  // one per divisor
};

/// Full multivariate division of f by `divisors` (remainder has no term
/// divisible by any leading monomial).
inline Division divide(const Poly& f, const std::vector<TrackedPoly>& divisors) {
  Division out{Poly(f.nvars()), std::vector<Poly>(divisors.size(), Poly(f.nvars()))};
  Poly rest = f;
  while (!rest.is_zero()) {
    const Exponents lm = rest.leading_monomial();
    const Rational lc = rest.leading_coefficient();
    bool reduced = false;
    for (std::size_t k = 0; k < divisors.size(); ++k) {
      const Poly& g = divisors[k].value;
      if (!detail::divides(g.leading_monomial(), lm)) continue;
      const Exponents q = detail::quotient(lm, g.leading_monomial());
      const Rational c = lc / g.leading_coefficient();
      rest.add_scaled(g, -c, q);
      out.quotients[k].add_term(q, c);
      reduced = true;
      break;
    }
    if (!reduced) {
      out.remainder.add_term(lm, lc);
      rest.add_term(lm, -lc);
    }
  }
  return out;
}

namespace detail {

inline std::vector<Poly> combine_cofactors(const std::vector<Poly>& quotients, const std::vector<TrackedPoly>& basis,
                                           std::size_t ninputs, std::size_t nvars) {
  std::vector<Poly> cof(ninputs, Poly(nvars));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (quotients[k].is_zero()) continue;
    for (std::size_t j = 0; j < ninputs; ++j) cof[j] = cof[j] + quotients[k] * basis[k].cofactors[j];
  }
  return cof;
}

}  // namespace detail

/// Reduced Gröbner basis (grlex) by Buchberger's algorithm with the product
/// and chain criteria. Each element carries cofactors over `inputs` unless
/// `track_cofactors` is false, in which case the cofactor lists are empty.
inline std::vector<TrackedPoly> groebner_basis(const std::vector<Poly>& inputs, std::size_t nvars,
                                               bool track_cofactors = true) {
  const std::size_t ninputs = track_cofactors ? inputs.size() : 0;
  std::vector<TrackedPoly> basis;
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    if (inputs[j].is_zero()) continue;
    std::vector<Poly> cof(ninputs, Poly(nvars));
    if (track_cofactors) cof[j].add_term(Exponents(nvars, 0), 1);
    basis.push_back({inputs[j], std::move(cof)});
  }

  std::set<std::pair<std::size_t, std::size_t>> pending;
  for (std::size_t j = 1; j < basis.size(); ++j)
    for (std::size_t i = 0; i < j; ++i) pending.insert({i, j});

  auto is_pending = [&](std::size_t a, std::size_t b) { return pending.count({std::min(a, b), std::max(a, b)}) > 0; };

  while (!pending.empty()) {
    const auto [i, j] = *pending.begin();
    pending.erase(pending.begin());
    const Exponents& lmi = basis[i].value.leading_monomial();
    const Exponents& lmj = basis[j].value.leading_monomial();
    if (detail::coprime(lmi, lmj)) continue;
    const Exponents l = detail::lcm(lmi, lmj);
    bool chain = false;
    for (std::size_t k = 0; k < basis.size() && !chain; ++k) {
      if (k == i || k == j) continue;
      chain = detail::divides(basis[k].value.leading_monomial(), l) && !is_pending(i, k) && !is_pending(j, k);
    }
    if (chain) continue;

    const Rational ci = 1 / basis[i].value.leading_coefficient();
    const Rational cj = 1 / basis[j].value.leading_coefficient();
    const Exponents qi = detail::quotient(l, lmi), qj = detail::quotient(l, lmj);
    TrackedPoly s{Poly(nvars), std::vector<Poly>(ninputs, Poly(nvars))};
    s.value.add_scaled(basis[i].value, ci, qi);
    s.value.add_scaled(basis[j].value, -cj, qj);
    for (std::size_t t = 0; t < ninputs; ++t) {
      s.cofactors[t].add_scaled(basis[i].cofactors[t], ci, qi);
      s.cofactors[t].add_scaled(basis[j].cofactors[t], -cj, qj);
    }

    Division div = divide(s.value, basis);
    if (div.remainder.is_zero()) continue;
    auto q = detail::combine_cofactors(div.quotients, basis, ninputs, nvars);
    for (std::size_t t = 0; t < ninputs; ++t) s.cofactors[t] = s.cofactors[t] - q[t];
    s.value = std::move(div.remainder);
    const std::size_t idx = basis.size();
    basis.push_back(std::move(s));
    for (std::size_t k = 0; k < idx; ++k) pending.insert({k, idx});
  }

  // Minimalize: drop elements whose leading monomial is divisible by another's.
  std::vector<TrackedPoly> minimal;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    bool redundant = false;
    for (std::size_t t = 0; t < basis.size() && !redundant; ++t) {
      if (t == k) continue;
      const auto& a = basis[t].value.leading_monomial();
      const auto& b = basis[k].value.leading_monomial();
      redundant = detail::divides(a, b) && (a != b || t < k);
    }
    if (!redundant) minimal.push_back(basis[k]);
  }

  // Interreduce and make monic.
  for (std::size_t k = 0; k < minimal.size(); ++k) {
    std::vector<TrackedPoly> others;
    std::vector<std::size_t> index;
    for (std::size_t t = 0; t < minimal.size(); ++t)
      if (t != k) {
        others.push_back(minimal[t]);
        index.push_back(t);
      }
    Division div = divide(minimal[k].value, others);
    auto q = detail::combine_cofactors(div.quotients, others, ninputs, nvars);
    for (std::size_t t = 0; t < ninputs; ++t) minimal[k].cofactors[t] = minimal[k].cofactors[t] - q[t];
    minimal[k].value = std::move(div.remainder);
  }
  for (auto& g : minimal) {
    const Rational inv = 1 / g.value.leading_coefficient();
    Poly one(nvars);
    one.add_term(Exponents(nvars, 0), inv);
    g.value = g.value * one;
    for (auto& c : g.cofactors) c = c * one;
  }
  std::sort(minimal.begin(), minimal.end(), [](const TrackedPoly& a, const TrackedPoly& b) {
    return GrlexGreater{}(a.value.leading_monomial(), b.value.leading_monomial());
  });
  return minimal;
}

namespace detail {

/// The k-element subsets of {0..n-1} as increasing lists, in lexicographic order.
inline std::vector<std::vector<std::uint32_t>> index_subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::uint32_t>> out;
  if (k > n) return out;
  std::vector<std::uint32_t> cur(k);
  for (std::size_t i = 0; i < k; ++i) cur[i] = static_cast<std::uint32_t>(i);
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == n - k + i - 1) --i;
    if (i == 0) return out;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
}

}  // namespace detail

/// Polynomial ideal given by generators, with its Gröbner basis computed
/// lazily once and shared by copies.
class IdealPresentation {
 public:
  IdealPresentation() : IdealPresentation(0, {}) {}

  IdealPresentation(std::size_t nvars, std::vector<SmoothExpr> generators, bool dense_interior = false)
      : state_(std::make_shared<State>()) {
    state_->nvars = nvars;
    for (auto& g : generators) {
      if (!g.is_polynomial()) throw NonPolynomial("ideal generators must be polynomials: " + to_string(g));
      if (g.generator_span() > nvars) throw RingMismatch("ideal generator uses a generator outside the ring");
      if (g.is_zero()) throw Error("ideal generators must be nonzero");
      state_->generators.push_back(std::move(g));
    }
    if (dense_interior && !state_->generators.empty())
      throw Error("the dense-interior flag requires the zero ideal");
    state_->dense_interior = dense_interior;
  }

  /// The zero ideal of a closed set with dense interior.
  static IdealPresentation dense_interior_set(std::size_t nvars) { return IdealPresentation(nvars, {}, true); }

  std::size_t nvars() const noexcept { return state_->nvars; }
  const std::vector<SmoothExpr>& generators() const noexcept { return state_->generators; }
  bool is_zero() const noexcept { return state_->generators.empty(); }
  bool dense_interior() const noexcept { return state_->dense_interior; }

  const std::vector<TrackedPoly>& groebner() const {
    std::call_once(state_->once, [this] {
      std::vector<Poly> inputs;
      for (const auto& g : state_->generators) inputs.push_back(Poly::from_expr(g, state_->nvars));
      state_->basis = groebner_basis(inputs, state_->nvars);
    });
    return state_->basis;
  }

  /// The reduced Gröbner basis as expressions (monic, leading term first).
  std::vector<SmoothExpr> basis_exprs() const {
    std::vector<SmoothExpr> out;
    for (const auto& g : groebner()) out.push_back(g.value.to_expr());
    return out;
  }

  /// Gröbner basis of the submodule I·Λᵏ + dI ∧ Λᵏ⁻¹ of the free module Λᵏ
  /// on the k-subsets of generators. Basis element number r of
  /// detail::index_subsets(nvars, k) is the extra variable nvars + r; all
  /// products of two extra variables are included, so the e-linear elements
  /// of the result form a module Gröbner basis.
  const std::vector<TrackedPoly>& conormal_basis(std::size_t k) const {
    std::lock_guard<std::mutex> lock(state_->module_mutex);
    auto it = state_->module_bases.find(k);
    if (it != state_->module_bases.end()) return it->second;
    return state_->module_bases.emplace(k, compute_conormal_basis(k)).first->second;
  }

  /// Same ideal (equal reduced Gröbner bases).
  bool same_ideal(const IdealPresentation& o) const {
    if (state_ == o.state_) return true;
    if (nvars() != o.nvars()) return false;
    const auto& a = groebner();
    const auto& b = o.groebner();
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k)
      if (!(a[k].value == b[k].value)) return false;
    return true;
  }

  friend bool operator==(const IdealPresentation& a, const IdealPresentation& b) {
    return a.state_ == b.state_ ||
           (a.nvars() == b.nvars() && a.generators() == b.generators() && a.dense_interior() == b.dense_interior());
  }

 private:
  struct State {
    std::size_t nvars = 0;
    std::vector<SmoothExpr> generators;
    bool dense_interior = false;
    std::once_flag once;
    std::vector<TrackedPoly> basis;
    std::mutex module_mutex;
    std::map<std::size_t, std::vector<TrackedPoly>> module_bases;
  };

  std::vector<TrackedPoly> compute_conormal_basis(std::size_t k) const {
    const std::size_t n = state_->nvars;
    const auto subsets = detail::index_subsets(n, k);
    const std::size_t total = n + subsets.size();
    auto rank = [&](const std::vector<std::uint32_t>& s) {
      return static_cast<std::size_t>(std::lower_bound(subsets.begin(), subsets.end(), s) - subsets.begin());
    };
    auto lift = [&](const Poly& p, std::size_t slot) {
      Poly out(total);
      for (const auto& [e, c] : p.terms()) {
        Exponents f = e;
        f.resize(total, 0);
        ++f[n + slot];
        out.add_term(f, c);
      }
      return out;
    };
    std::vector<Poly> inputs;
    for (const auto& g : state_->generators) {
      const Poly gp = Poly::from_expr(g, n);
      for (std::size_t r = 0; r < subsets.size(); ++r) inputs.push_back(lift(gp, r));
      if (k == 0) continue;
      std::vector<Poly> partials;
      for (std::size_t i = 0; i < n; ++i) partials.push_back(Poly::from_expr(differentiate(g, i), n));
      for (const auto& rest : detail::index_subsets(n, k - 1)) {
        Poly rel(total);
        for (std::uint32_t i = 0; i < n; ++i) {
          auto pos = std::lower_bound(rest.begin(), rest.end(), i);
          if (pos != rest.end() && *pos == i) continue;
          std::vector<std::uint32_t> merged = rest;
          const auto offset = pos - rest.begin();
          merged.insert(merged.begin() + offset, i);
          Poly term = lift(partials[i], rank(merged));
          rel = offset % 2 == 0 ? rel + term : rel - term;
        }
        if (!rel.is_zero()) inputs.push_back(std::move(rel));
      }
    }
    if (inputs.empty()) return {};
    for (std::size_t a = 0; a < subsets.size(); ++a)
      for (std::size_t b = a; b < subsets.size(); ++b) {
        Exponents e(total, 0);
        ++e[n + a];
        ++e[n + b];
        Poly p(total);
        p.add_term(e, 1);
        inputs.push_back(std::move(p));
      }
    return groebner_basis(inputs, total, false);
  }
  std::shared_ptr<State> state_;
};

struct Membership {
  bool member = false;
  /// When member: p = Σ cofactors[j] · generators[j] exactly.
  std::vector<SmoothExpr> cofactors;
};

inline Membership ideal_member(const SmoothExpr& p, const IdealPresentation& ideal) {
  const Poly f = Poly::from_expr(p, ideal.nvars());
  if (ideal.is_zero()) return {f.is_zero(), {}};
  const auto& basis = ideal.groebner();
  Division div = divide(f, basis);
  if (!div.remainder.is_zero()) return {false, {}};
  auto cof = detail::combine_cofactors(div.quotients, basis, ideal.generators().size(), ideal.nvars());
  Membership out{true, {}};
  for (const auto& c : cof) out.cofactors.push_back(c.to_expr());
  return out;
}

/// Normal form of p modulo the Gröbner basis; reduce(p) == reduce(q) iff p − q ∈ I.
inline SmoothExpr reduce_mod_ideal(const SmoothExpr& p, const IdealPresentation& ideal) {
  const Poly f = Poly::from_expr(p, ideal.nvars());
  if (ideal.is_zero()) return p;
  return divide(f, ideal.groebner()).remainder.to_expr();
}

/// A finitely presented ring: n generators modulo a polynomial ideal.
/// Cheap to copy; copies compare equal by identity first.
class RingPresentation {
 public:
  RingPresentation() : RingPresentation(0) {}
  explicit RingPresentation(std::size_t n, NameList names = {}) : RingPresentation(n, std::move(names), IdealPresentation(n, {})) {}
  RingPresentation(std::size_t n, NameList names, IdealPresentation ideal) {
    if (ideal.nvars() != n) throw RingMismatch("ideal and ring have different generator counts");
    if (!names.empty() && names.size() != n) throw Error("expected " + std::to_string(n) + " generator names");
    auto data = std::make_shared<Data>();
    data->n = n;
    data->names = std::move(names);
    data->ideal = std::move(ideal);
    data_ = std::move(data);
  }

  static RingPresentation free(std::size_t n, NameList names = {}) { return RingPresentation(n, std::move(names)); }

  std::size_t size() const noexcept { return data_->n; }
  const NameList& names() const noexcept { return data_->names; }
  const IdealPresentation& ideal() const noexcept { return data_->ideal; }
  bool is_free() const noexcept { return data_->ideal.is_zero(); }

  SmoothExpr generator(std::size_t i) const {
    if (i >= size()) throw RingMismatch("generator index out of range");
    return SmoothExpr::generator(i);
  }

  /// Canonical representative: polynomials are reduced modulo the ideal.
  SmoothExpr canonical(const SmoothExpr& e) const {
    if (e.generator_span() > size()) throw RingMismatch("expression uses generators outside the ring: " + to_string(e));
    if (is_free() || !e.is_polynomial()) return e;
    return reduce_mod_ideal(e, ideal());
  }

  std::string format(const SmoothExpr& e) const { return to_string(e, names()); }

  friend bool operator==(const RingPresentation& a, const RingPresentation& b) {
    return a.data_ == b.data_ || (a.size() == b.size() && a.ideal() == b.ideal());
  }

 private:
  struct Data {
    std::size_t n = 0;
    NameList names;
    IdealPresentation ideal;
  };
  std::shared_ptr<const Data> data_;
};

inline void require_same_ring(const RingPresentation& a, const RingPresentation& b) {
  if (!(a == b)) throw RingMismatch("operands live over different rings");
}

/// A ring map given by the images of the source generators.
class RingHom {
 public:
  RingHom(RingPresentation source, RingPresentation target, std::vector<SmoothExpr> images)
      : source_(std::move(source)), target_(std::move(target)) {
    if (images.size() != source_.size())
      throw NotAHomomorphism("expected " + std::to_string(source_.size()) + " generator images");
    for (auto& im : images) images_.push_back(target_.canonical(im));
    for (std::size_t k = 0; k < source_.ideal().generators().size(); ++k) {
      const SmoothExpr image = substitute(source_.ideal().generators()[k], images_);
      if (!ideal_member(image, target_.ideal()).member)
        throw NotAHomomorphism("image of ideal generator #" + std::to_string(k) + " is not in the target ideal");
    }
  }

  static RingHom identity(const RingPresentation& ring) {
    std::vector<SmoothExpr> images;
    for (std::size_t i = 0; i < ring.size(); ++i) images.push_back(SmoothExpr::generator(i));
    return RingHom(ring, ring, std::move(images));
  }

  const RingPresentation& source() const noexcept { return source_; }
  const RingPresentation& target() const noexcept { return target_; }
  const std::vector<SmoothExpr>& images() const noexcept { return images_; }

 private:
  RingPresentation source_, target_;
  std::vector<SmoothExpr> images_;
};

/// Substitutes generator images and reduces polynomial results modulo the
/// target ideal. Expressions with primitive calls are not reduced.
inline SmoothExpr hom_apply(const RingHom& f, const SmoothExpr& e) {
  if (e.generator_span() > f.source().size()) throw RingMismatch("expression is not over the source ring");
  return f.target().canonical(substitute(e, f.images()));
}

}  // namespace cartan
