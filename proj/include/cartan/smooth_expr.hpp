#pragma once

// Core representation of elements of the computable C∞-ring fragment:
// sparse polynomials with rational coefficients over "atoms", where an atom
// is a generator or a registered primitive applied to normal-form arguments.

#include <gmpxx.h>

#include <algorithm>
#include <atomic>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cartan/error.hpp"

namespace cartan {

using Rational = mpq_class;

inline std::strong_ordering compare_rational(const Rational& a, const Rational& b) {
  const int c = cmp(a, b);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

namespace detail {
inline std::atomic<unsigned>& degree_bound_storage() {
  static std::atomic<unsigned> bound{64};
  return bound;
}
}  // namespace detail

/// Largest total degree a monomial may reach before ExponentOverflow is raised.
inline unsigned degree_bound() { return detail::degree_bound_storage().load(std::memory_order_relaxed); }
inline void set_degree_bound(unsigned bound) { detail::degree_bound_storage().store(bound); }

/// Identifies a registered primitive: a family index plus an integer
/// parameter (0 for non-parametric primitives).
struct PrimId {
  std::uint32_t family = 0;
  std::int32_t param = 0;

  friend auto operator<=>(const PrimId&, const PrimId&) = default;
};

class SmoothExpr;
struct PrimCall;
class Monomial;

namespace detail {
// Families whose relations the normal form knows about; the registry installs
// them first, in this order.
inline constexpr std::uint32_t kBetaFamily = 0;
inline constexpr std::uint32_t kStepFamily = 1;
inline constexpr std::uint32_t kStepInvFamily = 2;

std::optional<SmoothExpr> reduce_step_relations(const Monomial& m);
}  // namespace detail

class Atom {
 public:
  static Atom generator(std::size_t index) {
    Atom a;
    a.index_ = index;
    return a;
  }
  static Atom primitive(PrimId id, std::vector<SmoothExpr> args);

  bool is_generator() const noexcept { return call_ == nullptr; }
  std::size_t index() const noexcept { return index_; }
  const PrimCall& call() const noexcept { return *call_; }

  friend std::strong_ordering compare(const Atom& a, const Atom& b);
  friend bool operator==(const Atom& a, const Atom& b) { return compare(a, b) == 0; }

 private:
  std::size_t index_ = 0;
  std::shared_ptr<const PrimCall> call_;
};

struct Factor {
  Atom atom;
  unsigned exponent = 1;
};

/// Product of atom powers, kept sorted by atom with positive exponents.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(Atom atom, unsigned exponent = 1) {
    if (exponent > 0) factors_.push_back({std::move(atom), exponent});
    check_bound();
  }

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  bool empty() const noexcept { return factors_.empty(); }

  unsigned degree() const noexcept {
    unsigned d = 0;
    for (const auto& f : factors_) d += f.exponent;
    return d;
  }

  unsigned exponent_of(const Atom& atom) const {
    for (const auto& f : factors_)
      if (f.atom == atom) return f.exponent;
    return 0;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.factors_.reserve(a.factors_.size() + b.factors_.size());
    auto i = a.factors_.begin();
    auto j = b.factors_.begin();
    while (i != a.factors_.end() && j != b.factors_.end()) {
      const auto c = compare(i->atom, j->atom);
      if (c < 0) {
        out.factors_.push_back(*i++);
      } else if (c > 0) {
        out.factors_.push_back(*j++);
      } else {
        out.factors_.push_back({i->atom, i->exponent + j->exponent});
        ++i;
        ++j;
      }
    }
    out.factors_.insert(out.factors_.end(), i, a.factors_.end());
    out.factors_.insert(out.factors_.end(), j, b.factors_.end());
    out.check_bound();
    return out;
  }

  /// Removes one power of the factor at position `pos`.
  Monomial lowered(std::size_t pos) const {
    Monomial out = *this;
    if (--out.factors_[pos].exponent == 0) out.factors_.erase(out.factors_.begin() + static_cast<long>(pos));
    return out;
  }

  /// Removes the factor at position `pos` entirely.
  Monomial without(std::size_t pos) const {
    Monomial out = *this;
    out.factors_.erase(out.factors_.begin() + static_cast<long>(pos));
    return out;
  }

  /// Graded by total degree, then lexicographic on (atom, exponent) lists.
  friend std::strong_ordering compare(const Monomial& a, const Monomial& b) {
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    const std::size_t n = std::min(a.factors_.size(), b.factors_.size());
    for (std::size_t k = 0; k < n; ++k) {
      if (auto c = compare(a.factors_[k].atom, b.factors_[k].atom); c != 0) return c;
      if (auto c = b.factors_[k].exponent <=> a.factors_[k].exponent; c != 0) return c;
    }
    return a.factors_.size() <=> b.factors_.size();
  }
  friend bool operator==(const Monomial& a, const Monomial& b) { return compare(a, b) == 0; }

 private:
  void check_bound() const {
    if (degree() > degree_bound())
      throw ExponentOverflow("monomial degree " + std::to_string(degree()) + " exceeds bound " +
                             std::to_string(degree_bound()));
  }

  std::vector<Factor> factors_;
};

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return compare(a, b) < 0; }
};

/// An element of the fragment, always stored in canonical normal form.
/// Two SmoothExpr values are equal iff they denote the same element.
class SmoothExpr {
 public:
  using Terms = std::map<Monomial, Rational, MonomialLess>;

  SmoothExpr() = default;
  SmoothExpr(const Rational& c) {  // NOLINT(google-explicit-constructor)
    Rational q = c;
    q.canonicalize();
    if (q != 0) terms_.emplace(Monomial{}, std::move(q));
  }
  SmoothExpr(long c) : SmoothExpr(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  SmoothExpr(int c) : SmoothExpr(Rational(c)) {}   // NOLINT(google-explicit-constructor)

  static SmoothExpr generator(std::size_t index) { return from_monomial(Monomial(Atom::generator(index)), 1); }
  static SmoothExpr primitive(PrimId id, std::vector<SmoothExpr> args) {
    if (id.family == detail::kStepInvFamily && id.param == 0) return SmoothExpr(1);
    return from_monomial(Monomial(Atom::primitive(id, std::move(args))), 1);
  }
  static SmoothExpr from_monomial(Monomial m, const Rational& c) {
    SmoothExpr e;
    if (c != 0) e.terms_.emplace(std::move(m), c);
    return e;
  }

  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const noexcept { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }
  Rational constant_term() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Rational(0) : it->second;
  }

  /// True when no primitive call occurs anywhere in the expression.
  bool is_polynomial() const {
    for (const auto& [m, c] : terms_)
      for (const auto& f : m.factors())
        if (!f.atom.is_generator()) return false;
    return true;
  }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }

  /// One past the largest generator index occurring (recursively).
  std::size_t generator_span() const;

  SmoothExpr& operator+=(const SmoothExpr& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  SmoothExpr& operator-=(const SmoothExpr& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  SmoothExpr& operator*=(const SmoothExpr& o) { return *this = *this * o; }

  friend SmoothExpr operator+(SmoothExpr a, const SmoothExpr& b) { return a += b; }
  friend SmoothExpr operator-(SmoothExpr a, const SmoothExpr& b) { return a -= b; }
  friend SmoothExpr operator-(SmoothExpr a) {
    for (auto& [m, c] : a.terms_) c = -c;
    return a;
  }
  friend SmoothExpr operator*(const SmoothExpr& a, const SmoothExpr& b) {
    if (a.is_zero() || b.is_zero()) return {};
    SmoothExpr out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m = ma * mb;
        if (auto r = detail::reduce_step_relations(m)) {
          for (const auto& [mr, cr] : r->terms_) out.add_term(mr, cr * ca * cb);
        } else {
          out.add_term(m, ca * cb);
        }
      }
    return out;
  }

  SmoothExpr pow(unsigned exponent) const {
    SmoothExpr result(1);
    SmoothExpr base = *this;
    while (exponent > 0) {
      if (exponent & 1U) result *= base;
      exponent >>= 1U;
      if (exponent > 0) base *= base;
    }
    return result;
  }

  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  friend std::strong_ordering compare(const SmoothExpr& a, const SmoothExpr& b) {
    if (auto c = a.terms_.size() <=> b.terms_.size(); c != 0) return c;
    for (auto i = a.terms_.begin(), j = b.terms_.begin(); i != a.terms_.end(); ++i, ++j) {
      if (auto c = compare(i->first, j->first); c != 0) return c;
      if (auto c = compare_rational(i->second, j->second); c != 0) return c;
    }
    return std::strong_ordering::equal;
  }
  friend bool operator==(const SmoothExpr& a, const SmoothExpr& b) { return compare(a, b) == 0; }

 private:
  Terms terms_;
};

struct PrimCall {
  PrimId id;
  std::vector<SmoothExpr> args;
};

inline Atom Atom::primitive(PrimId id, std::vector<SmoothExpr> args) {
  Atom a;
  a.call_ = std::make_shared<const PrimCall>(PrimCall{id, std::move(args)});
  return a;
}

inline std::strong_ordering compare(const Atom& a, const Atom& b) {
  if (a.is_generator() != b.is_generator())
    return a.is_generator() ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.is_generator()) return a.index_ <=> b.index_;
  if (a.call_ == b.call_) return std::strong_ordering::equal;
  if (auto c = a.call_->id <=> b.call_->id; c != 0) return c;
  const auto& x = a.call_->args;
  const auto& y = b.call_->args;
  if (auto c = x.size() <=> y.size(); c != 0) return c;
  for (std::size_t k = 0; k < x.size(); ++k)
    if (auto c = compare(x[k], y[k]); c != 0) return c;
  return std::strong_ordering::equal;
}

inline std::size_t SmoothExpr::generator_span() const {
  std::size_t span = 0;
  for (const auto& [m, c] : terms_)
    for (const auto& f : m.factors()) {
      if (f.atom.is_generator()) {
        span = std::max(span, f.atom.index() + 1);
      } else {
        for (const auto& arg : f.atom.call().args) span = std::max(span, arg.generator_span());
      }
    }
  return span;
}

namespace detail {

// With a = β0(u), b = β0(v), S = S(u, v) and s_c = (a + b)^(-c), the normal
// form rewrites
//   s_i s_j -> s_(i+j),   a s_c -> S s_(c-1),   b s_c -> s_(c-1) - S s_(c-1),
//   b S -> a - a S        (the last two only when u != v).
// Irreducible monomials then form a basis of Q[a, b, 1/(a + b)], so equal
// elements have equal normal forms. The relations hold wherever
// a + b > 0, the domain on which S and s_c are smooth.
inline std::optional<SmoothExpr> reduce_step_relations(const Monomial& m) {
  const auto& fs = m.factors();
  auto step_args = [&](std::size_t k) -> const std::vector<SmoothExpr>* {
    const Atom& a = fs[k].atom;
    if (a.is_generator()) return nullptr;
    const auto family = a.call().id.family;
    return family == kStepFamily || family == kStepInvFamily ? &a.call().args : nullptr;
  };
  auto find_beta0 = [&](const SmoothExpr& arg) -> std::optional<std::size_t> {
    for (std::size_t k = 0; k < fs.size(); ++k) {
      const Atom& a = fs[k].atom;
      if (!a.is_generator() && a.call().id == PrimId{kBetaFamily, 0} && a.call().args[0] == arg) return k;
    }
    return std::nullopt;
  };
  // Removes one power at each of two distinct positions.
  auto rest_without = [&](std::size_t p, std::size_t q) {
    return SmoothExpr::from_monomial(m.lowered(std::max(p, q)).lowered(std::min(p, q)), 1);
  };
  auto sinv = [](std::int32_t c, const SmoothExpr& u, const SmoothExpr& v) {
    return SmoothExpr::primitive({kStepInvFamily, c}, {u, v});
  };
  auto step = [](const SmoothExpr& u, const SmoothExpr& v) { return SmoothExpr::primitive({kStepFamily, 0}, {u, v}); };

  for (std::size_t i = 0; i < fs.size(); ++i) {
    const auto* args = step_args(i);
    if (!args) continue;
    const SmoothExpr& u = (*args)[0];
    const SmoothExpr& v = (*args)[1];
    const bool inverse = fs[i].atom.call().id.family == kStepInvFamily;
    if (inverse) {
      const std::int32_t c = fs[i].atom.call().id.param;
      if (fs[i].exponent >= 2)
        return SmoothExpr::from_monomial(m.lowered(i).lowered(i), 1) * sinv(2 * c, u, v);
      for (std::size_t j = i + 1; j < fs.size(); ++j) {
        const auto* other = step_args(j);
        if (other && fs[j].atom.call().id.family == kStepInvFamily && *other == *args)
          return rest_without(i, j) * sinv(c + fs[j].atom.call().id.param, u, v);
      }
      if (auto j = find_beta0(u)) return rest_without(i, *j) * step(u, v) * sinv(c - 1, u, v);
      if (!(u == v))
        if (auto j = find_beta0(v)) return rest_without(i, *j) * (sinv(c - 1, u, v) - step(u, v) * sinv(c - 1, u, v));
    } else if (!(u == v)) {
      if (auto j = find_beta0(v)) {
        const SmoothExpr a = SmoothExpr::primitive({kBetaFamily, 0}, {u});
        return rest_without(i, *j) * (a - a * step(u, v));
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Ring substitution x_j ↦ images[j], applied recursively inside primitive
/// arguments. Generators beyond `images` are left untouched.
inline SmoothExpr substitute(const SmoothExpr& e, std::span<const SmoothExpr> images) {
  SmoothExpr out;
  for (const auto& [m, c] : e.terms()) {
    SmoothExpr term(c);
    for (const auto& f : m.factors()) {
      SmoothExpr base;
      if (f.atom.is_generator()) {
        base = f.atom.index() < images.size() ? images[f.atom.index()] : SmoothExpr::generator(f.atom.index());
      } else {
        std::vector<SmoothExpr> args;
        args.reserve(f.atom.call().args.size());
        for (const auto& arg : f.atom.call().args) args.push_back(substitute(arg, images));
        base = SmoothExpr::primitive(f.atom.call().id, std::move(args));
      }
      term *= base.pow(f.exponent);
    }
    out += term;
  }
  return out;
}

/// Substitutes a single generator.
inline SmoothExpr substitute(const SmoothExpr& e, std::size_t index, const SmoothExpr& image) {
  std::vector<SmoothExpr> images;
  images.reserve(index + 1);
  for (std::size_t j = 0; j < index; ++j) images.push_back(SmoothExpr::generator(j));
  images.push_back(image);
  return substitute(e, images);
}

}  // namespace cartan
