#pragma once

// The algebraic de Rham complex Λ•Ω¹ over a presented ring, stored fully
// expanded in the coordinate basis dx_{i1} ∧ ... ∧ dx_{ik} (i1 < ... < ik).
//
// For a free ring Ω¹ is free on dx_0..dx_{n-1} with d f = Σ ∂_i f dx_i.
// For a quotient by I the model is Ω¹_free / (I·Ω¹ + C·dI). A degree-k
// component with polynomial coefficients is stored as its normal form modulo
// I·Λᵏ + dI ∧ Λᵏ⁻¹, so equal classes compare equal. Components carrying
// primitive calls only have their coefficients reduced modulo I.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cartan/ring.hpp"

namespace cartan {

/// Strictly increasing generator indices of a basis k-form.
using BasisIndex = std::vector<std::uint32_t>;

struct BasisLess {
  bool operator()(const BasisIndex& a, const BasisIndex& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

class DifferentialForm {
 public:
  using Terms = std::map<BasisIndex, SmoothExpr, BasisLess>;

  DifferentialForm() = default;
  explicit DifferentialForm(RingPresentation ring) : ring_(std::move(ring)) {}

  static DifferentialForm zero(const RingPresentation& ring) { return DifferentialForm(ring); }

  static DifferentialForm scalar(const RingPresentation& ring, const SmoothExpr& f) {
    return monomial(ring, f, {});
  }

  /// f · dx_{index[0]} ∧ ... ; the index list may be unsorted (sign applied)
  /// and yields zero when it repeats a generator.
  static DifferentialForm monomial(const RingPresentation& ring, const SmoothExpr& f, BasisIndex index) {
    DifferentialForm out(ring);
    int sign = 1;
    for (std::size_t a = 0; a < index.size(); ++a) {
      if (index[a] >= ring.size()) throw RingMismatch("basis index out of range");
      for (std::size_t b = a + 1; b < index.size(); ++b) {
        if (index[a] == index[b]) return out;
        if (index[a] > index[b]) sign = -sign;
      }
    }
    std::sort(index.begin(), index.end());
    out.add_term(index, sign > 0 ? f : -f);
    return out;
  }

  /// dx_i
  static DifferentialForm differential(const RingPresentation& ring, std::size_t i) {
    return monomial(ring, SmoothExpr(1), {static_cast<std::uint32_t>(i)});
  }

  const RingPresentation& ring() const noexcept { return ring_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  SmoothExpr coefficient(const BasisIndex& index) const {
    auto it = terms_.find(index);
    return it == terms_.end() ? SmoothExpr() : it->second;
  }

  /// Degrees carrying a nonzero component.
  std::set<std::size_t> degrees() const {
    std::set<std::size_t> out;
    for (const auto& [idx, c] : terms_) out.insert(idx.size());
    return out;
  }

  bool is_homogeneous() const { return degrees().size() <= 1; }

  /// Degree of a homogeneous nonzero form; 0 for the zero form.
  std::size_t degree() const { return terms_.empty() ? 0 : terms_.begin()->first.size(); }

  DifferentialForm component(std::size_t k) const {
    DifferentialForm out(ring_);
    for (const auto& [idx, c] : terms_)
      if (idx.size() == k) out.terms_.emplace(idx, c);
    return out;
  }

  void add_term(const BasisIndex& index, const SmoothExpr& coef) {
    SmoothExpr c = ring_.canonical(coef);
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(index, c);
    if (!inserted) {
      it->second = ring_.canonical(it->second + c);
      if (it->second.is_zero()) terms_.erase(it);
    }
    if (!ring_.is_free() && !index.empty()) reduce_component(index.size());
  }

  DifferentialForm& operator+=(const DifferentialForm& o) {
    require_same_ring(ring_, o.ring_);
    for (const auto& [idx, c] : o.terms_) add_term(idx, c);
    return *this;
  }
  DifferentialForm& operator-=(const DifferentialForm& o) {
    require_same_ring(ring_, o.ring_);
    for (const auto& [idx, c] : o.terms_) add_term(idx, -c);
    return *this;
  }
  friend DifferentialForm operator+(DifferentialForm a, const DifferentialForm& b) { return a += b; }
  friend DifferentialForm operator-(DifferentialForm a, const DifferentialForm& b) { return a -= b; }
  friend DifferentialForm operator-(const DifferentialForm& a) {
    DifferentialForm out(a.ring_);
    for (const auto& [idx, c] : a.terms_) out.terms_.emplace(idx, -c);
    return out;
  }

  /// Multiplication by a function (a degree-0 form).
  friend DifferentialForm operator*(const SmoothExpr& f, const DifferentialForm& a) {
    DifferentialForm out(a.ring_);
    if (f.is_zero()) return out;
    for (const auto& [idx, c] : a.terms_) out.add_term(idx, f * c);
    return out;
  }

  friend bool operator==(const DifferentialForm& a, const DifferentialForm& b) {
    return a.ring_ == b.ring_ && a.terms_ == b.terms_;
  }

 private:
  void reduce_component(std::size_t k) {
    const std::size_t n = ring_.size();
    const auto subsets = detail::index_subsets(n, k);
    const std::size_t total = n + subsets.size();
    Poly encoded(total);
    for (const auto& [idx, c] : terms_) {
      if (idx.size() != k) continue;
      if (!c.is_polynomial()) return;
      const std::size_t slot = std::lower_bound(subsets.begin(), subsets.end(), idx) - subsets.begin();
      const Poly coefficient = Poly::from_expr(c, n);
      for (const auto& [e, coef] : coefficient.terms()) {
        Exponents f = e;
        f.resize(total, 0);
        ++f[n + slot];
        encoded.add_term(f, coef);
      }
    }
    const Poly reduced = divide(encoded, ring_.ideal().conormal_basis(k)).remainder;
    std::erase_if(terms_, [k](const auto& t) { return t.first.size() == k; });
    std::map<std::size_t, Poly> by_slot;
    for (const auto& [e, coef] : reduced.terms()) {
      std::size_t slot = n;
      while (e[slot] == 0) ++slot;
      Exponents f(e.begin(), e.begin() + n);
      by_slot.try_emplace(slot - n, Poly(n)).first->second.add_term(f, coef);
    }
    for (const auto& [slot, p] : by_slot)
      terms_.emplace(BasisIndex(subsets[slot].begin(), subsets[slot].end()), p.to_expr());
  }

  RingPresentation ring_;
  Terms terms_;
};

/// Sign of the permutation sorting the concatenation a ++ b (both sorted);
/// 0 when they share an index.
inline int merge_sign(const BasisIndex& a, const BasisIndex& b) {
  std::size_t inversions = 0;
  std::size_t j = 0;
  for (auto x : a) {
    while (j < b.size() && b[j] < x) ++j;
    if (j < b.size() && b[j] == x) return 0;
    inversions += j;
  }
  return inversions % 2 == 0 ? 1 : -1;
}

inline DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  require_same_ring(a.ring(), b.ring());
  DifferentialForm out(a.ring());
  for (const auto& [ia, ca] : a.terms())
    for (const auto& [ib, cb] : b.terms()) {
      const int sign = merge_sign(ia, ib);
      if (sign == 0) continue;
      BasisIndex merged;
      merged.reserve(ia.size() + ib.size());
      std::merge(ia.begin(), ia.end(), ib.begin(), ib.end(), std::back_inserter(merged));
      out.add_term(merged, sign > 0 ? ca * cb : -(ca * cb));
    }
  return out;
}

/// d f = Σ ∂_i f dx_i
inline DifferentialForm exterior_derivative(const RingPresentation& ring, const SmoothExpr& f) {
  DifferentialForm out(ring);
  for (std::size_t i = 0; i < ring.size(); ++i) out.add_term({static_cast<std::uint32_t>(i)}, differentiate(f, i));
  return out;
}

/// d(f dx_T) = d f ∧ dx_T, extended linearly.
inline DifferentialForm exterior_derivative(const DifferentialForm& a) {
  DifferentialForm out(a.ring());
  for (const auto& [idx, c] : a.terms()) {
    for (std::uint32_t i = 0; i < a.ring().size(); ++i) {
      const int sign = merge_sign({i}, idx);
      if (sign == 0) continue;
      SmoothExpr partial = differentiate(c, i);
      if (partial.is_zero()) continue;
      BasisIndex merged = idx;
      merged.insert(std::upper_bound(merged.begin(), merged.end(), i), i);
      out.add_term(merged, sign > 0 ? partial : -partial);
    }
  }
  return out;
}

/// Λ•(f): a_0 da_1 ∧ ... ∧ da_k ↦ f(a_0) d f(a_1) ∧ ... ∧ d f(a_k).
inline DifferentialForm pushforward(const RingHom& f, const DifferentialForm& a) {
  require_same_ring(f.source(), a.ring());
  std::vector<DifferentialForm> d_images;
  for (const auto& image : f.images()) d_images.push_back(exterior_derivative(f.target(), image));
  DifferentialForm out(f.target());
  for (const auto& [idx, c] : a.terms()) {
    DifferentialForm term = DifferentialForm::scalar(f.target(), hom_apply(f, c));
    for (auto i : idx) {
      term = wedge(term, d_images[i]);
      if (term.is_zero()) break;
    }
    out += term;
  }
  return out;
}

/// The 1-forms dg for the ideal generators g; zero in the quotient model.
inline std::vector<DifferentialForm> conormal_relations(const RingPresentation& ring) {
  std::vector<DifferentialForm> out;
  const RingPresentation free_ring = RingPresentation::free(ring.size(), ring.names());
  for (const auto& g : ring.ideal().generators()) out.push_back(exterior_derivative(free_ring, g));
  return out;
}

/// Text form: "2*x d(x)^d(y) + (x + y) d(z)". Parsing it gives the form back.
inline std::string to_string(const DifferentialForm& a) {
  if (a.is_zero()) return "0";
  const auto& names = a.ring().names();
  std::string out;
  for (const auto& [idx, c] : a.terms()) {
    std::string basis;
    for (auto i : idx) {
      if (!basis.empty()) basis += '^';
      basis += "d(" + generator_name(i, names) + ")";
    }
    std::string term;
    const std::string coef = to_string(c, names);
    if (basis.empty()) {
      term = coef;
    } else if (c == SmoothExpr(1)) {
      term = basis;
    } else if (c == SmoothExpr(-1)) {
      term = "-" + basis;
    } else if (c.terms().size() == 1) {
      term = coef + " " + basis;
    } else {
      term = "(" + coef + ") " + basis;
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

}  // namespace cartan
