#pragma once

// Presheaves of forms over a finite poset of open sets, each open described
// by a finite union of open rational boxes. All opens share one ambient
// ring and restriction maps are the identity on expressions; equality over
// an open is decided on its region.

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cartan/calculus.hpp"

namespace cartan {

/// Open interval; a missing bound is infinite.
struct Interval {
  std::optional<Rational> lo;
  std::optional<Rational> hi;
};

using Box = std::vector<Interval>;

/// Finite union of open boxes, or all of ℝⁿ.
struct Region {
  bool all = false;
  std::vector<Box> boxes;

  static Region whole() { return Region{true, {}}; }
  static Region of(std::vector<Box> boxes) { return Region{false, std::move(boxes)}; }
};

class NotACover : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Raised when two local fields disagree on the overlap of their opens.
class IncompatibleOverlap : public Incompatible {
 public:
  IncompatibleOverlap(std::string first, std::string second, std::vector<Rational> witness)
      : Incompatible("local fields on '" + first + "' and '" + second + "' disagree on their overlap"),
        first_(std::move(first)),
        second_(std::move(second)),
        witness_(std::move(witness)) {}

  const std::string& first() const noexcept { return first_; }
  const std::string& second() const noexcept { return second_; }
  const std::vector<Rational>& witness() const noexcept { return witness_; }

 private:
  std::string first_, second_;
  std::vector<Rational> witness_;
};

namespace detail {

inline bool interval_valid(const Interval& iv) { return !(iv.lo && iv.hi) || *iv.lo < *iv.hi; }

inline bool in_interval(const Interval& iv, const Rational& x) {
  return (!iv.lo || *iv.lo < x) && (!iv.hi || x < *iv.hi);
}

inline Box full_box(std::size_t dim) { return Box(dim); }

inline std::vector<Box> boxes_of(const Region& r, std::size_t dim) {
  return r.all ? std::vector<Box>{full_box(dim)} : r.boxes;
}

// Base-p radical inverse of k, a point of (0, 1) for k ≥ 1.
inline Rational radical_inverse(std::size_t k, unsigned base) {
  Rational out = 0, scale = Rational(1, base);
  while (k > 0) {
    out += Rational(static_cast<long>(k % base)) * scale;
    k /= base;
    scale /= base;
  }
  return out;
}

inline Rational place_in(const Interval& iv, const Rational& t) {
  if (iv.lo && iv.hi) return *iv.lo + (*iv.hi - *iv.lo) * t;
  if (iv.lo) return *iv.lo + 4 * t;
  if (iv.hi) return *iv.hi - 4 * t;
  return 4 * t - 2;
}

}  // namespace detail

inline bool contains_point(const Box& b, std::span<const Rational> p) {
  for (std::size_t i = 0; i < b.size(); ++i)
    if (!detail::in_interval(b[i], p[i])) return false;
  return true;
}

inline bool contains_point(const Region& r, std::span<const Rational> p) {
  if (r.all) return true;
  for (const auto& b : r.boxes)
    if (contains_point(b, p)) return true;
  return false;
}

inline std::optional<Box> intersect(const Box& a, const Box& b) {
  Box out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i].lo = a[i].lo;
    if (b[i].lo && (!out[i].lo || *b[i].lo > *out[i].lo)) out[i].lo = b[i].lo;
    out[i].hi = a[i].hi;
    if (b[i].hi && (!out[i].hi || *b[i].hi < *out[i].hi)) out[i].hi = b[i].hi;
    if (!detail::interval_valid(out[i])) return std::nullopt;
  }
  return out;
}

inline Region intersect(const Region& a, const Region& b, std::size_t dim) {
  if (a.all) return b;
  if (b.all) return a;
  Region out;
  for (const auto& x : detail::boxes_of(a, dim))
    for (const auto& y : detail::boxes_of(b, dim))
      if (auto box = intersect(x, y)) out.boxes.push_back(*box);
  return out;
}

inline bool is_empty(const Region& r) { return !r.all && r.boxes.empty(); }

/// inner ⊆ outer, decided on the cell decomposition induced by all box
/// boundaries (boundary points are cells of their own).
inline bool region_contains(const Region& outer, const Region& inner, std::size_t dim) {
  if (outer.all) return true;
  std::vector<std::vector<Rational>> cuts(dim);
  for (const Region* r : {&outer, &inner})
    for (const auto& b : r->boxes)
      for (std::size_t i = 0; i < dim; ++i) {
        if (b[i].lo) cuts[i].push_back(*b[i].lo);
        if (b[i].hi) cuts[i].push_back(*b[i].hi);
      }
  std::vector<std::vector<Rational>> reps(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    auto& c = cuts[i];
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    if (c.empty()) {
      reps[i].push_back(0);
      continue;
    }
    reps[i].push_back(c.front() - 1);
    for (std::size_t k = 0; k < c.size(); ++k) {
      reps[i].push_back(c[k]);
      reps[i].push_back(k + 1 < c.size() ? Rational((c[k] + c[k + 1]) / 2) : Rational(c[k] + 1));
    }
  }
  std::vector<std::size_t> at(dim, 0);
  std::vector<Rational> point(dim);
  while (true) {
    for (std::size_t i = 0; i < dim; ++i) point[i] = reps[i][at[i]];
    if (contains_point(inner, point) && !contains_point(outer, point)) return false;
    std::size_t i = 0;
    while (i < dim && ++at[i] == reps[i].size()) at[i++] = 0;
    if (i == dim) return true;
  }
}

/// Deterministic rational sample points inside a region: the first is the
/// center of the first box, the rest follow a Halton sequence, cycling
/// through the boxes.
inline std::vector<std::vector<Rational>> sample_points(const Region& r, std::size_t dim, std::size_t count) {
  static constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  const auto boxes = detail::boxes_of(r, dim);
  std::vector<std::vector<Rational>> out;
  if (boxes.empty()) return out;
  for (std::size_t k = 0; k < count; ++k) {
    const Box& b = boxes[k % boxes.size()];
    const std::size_t round = k / boxes.size();
    std::vector<Rational> p(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const Rational t = round == 0 ? Rational(1, 2) : detail::radical_inverse(round, kPrimes[i % 12]);
      p[i] = detail::place_in(b[i], t);
    }
    out.push_back(std::move(p));
  }
  return out;
}

/// Number of sample points used for expressions with primitive calls.
inline constexpr std::size_t kRegionSamples = 25;

/// Decides e1 = e2 on a region. Polynomials are compared by normal form (a
/// polynomial vanishing on an open box is zero); expressions with primitive
/// calls are sampled. Returns a witness point when they differ.
inline std::optional<std::vector<Rational>> disagreement_on_region(const SmoothExpr& e1, const SmoothExpr& e2,
                                                                   const Region& region, std::size_t dim) {
  const SmoothExpr diff = e1 - e2;
  if (diff.is_zero() || is_empty(region)) return std::nullopt;
  if (diff.is_polynomial()) {
    auto points = sample_points(region, dim, 64);
    for (const auto& p : points)
      if (eval_exact(diff, p) != 0) return p;
    return points.front();
  }
  for (const auto& p : sample_points(region, dim, kRegionSamples)) {
    std::vector<double> x;
    for (const auto& q : p) x.push_back(q.get_d());
    const double a = eval_numeric(e1, x), b = eval_numeric(e2, x);
    if (std::abs(a - b) > 1e-9 * std::max(1.0, std::max(std::abs(a), std::abs(b)))) return p;
  }
  return std::nullopt;
}

inline bool agree_on_region(const SmoothExpr& e1, const SmoothExpr& e2, const Region& region, std::size_t dim) {
  return !disagreement_on_region(e1, e2, region, dim).has_value();
}

inline bool agree_on_region(const DifferentialForm& a, const DifferentialForm& b, const Region& region) {
  const DifferentialForm diff = a - b;
  for (const auto& [idx, c] : diff.terms())
    if (!agree_on_region(c, SmoothExpr(), region, a.ring().size())) return false;
  return true;
}

/// Finite poset of named opens with a top element, at most 32 opens.
class OpenPoset {
 public:
  static constexpr std::size_t kMaxOpens = 32;

  struct Open {
    std::string name;
    Region region;
  };

  OpenPoset() = default;

  /// `leq` lists pairs (smaller, larger); the reflexive-transitive closure
  /// is taken and must be antisymmetric with a top element.
  OpenPoset(std::size_t dim, std::vector<Open> opens, const std::vector<std::pair<std::string, std::string>>& leq)
  {
    auto data = std::make_shared<Data>();
    auto& d = *data;
    d.dim = dim;
    if (opens.empty()) throw InvalidPoset("poset has no opens");
    if (opens.size() > kMaxOpens) throw InvalidPoset("poset exceeds " + std::to_string(kMaxOpens) + " opens");
    for (std::size_t k = 0; k < opens.size(); ++k) {
      if (d.index.count(opens[k].name)) throw InvalidPoset("duplicate open '" + opens[k].name + "'");
      for (const auto& b : opens[k].region.boxes) {
        if (b.size() != dim) throw InvalidPoset("box dimension mismatch in '" + opens[k].name + "'");
        for (const auto& iv : b)
          if (!detail::interval_valid(iv)) throw InvalidPoset("empty interval in '" + opens[k].name + "'");
      }
      d.index[opens[k].name] = k;
    }
    d.opens = std::move(opens);
    const std::size_t n = d.opens.size();
    d.order.assign(n, std::vector<bool>(n, false));
    for (std::size_t k = 0; k < n; ++k) d.order[k][k] = true;
    auto lookup = [&](const std::string& name) {
      auto it = d.index.find(name);
      if (it == d.index.end()) throw InvalidPoset("unknown open '" + name + "'");
      return it->second;
    };
    for (const auto& [lo, hi] : leq) d.order[lookup(lo)][lookup(hi)] = true;
    for (std::size_t m = 0; m < n; ++m)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          if (d.order[a][m] && d.order[m][b]) d.order[a][b] = true;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (d.order[a][b] && d.order[b][a])
          throw InvalidPoset("order is not antisymmetric on '" + d.opens[a].name + "', '" + d.opens[b].name + "'");
    std::optional<std::size_t> top;
    for (std::size_t t = 0; t < n && !top; ++t) {
      bool is_top = true;
      for (std::size_t a = 0; a < n; ++a) is_top = is_top && d.order[a][t];
      if (is_top) top = t;
    }
    if (!top) throw InvalidPoset("poset has no top element");
    d.top = *top;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (a != b && d.order[a][b] && !region_contains(d.opens[b].region, d.opens[a].region, dim))
          throw InvalidPoset("region of '" + d.opens[a].name + "' is not contained in '" + d.opens[b].name + "'");
    data_ = std::move(data);
  }

  std::size_t dim() const { return data_->dim; }
  std::size_t size() const { return data_->opens.size(); }
  std::size_t top() const { return data_->top; }
  const std::string& name(std::size_t k) const { return data_->opens.at(k).name; }
  const Region& region(std::size_t k) const { return data_->opens.at(k).region; }
  bool leq(std::size_t a, std::size_t b) const { return data_->order.at(a).at(b); }
  std::size_t index(const std::string& name) const {
    auto it = data_->index.find(name);
    if (it == data_->index.end()) throw InvalidPoset("unknown open '" + name + "'");
    return it->second;
  }

 private:
  struct Data {
    std::size_t dim = 0;
    std::vector<Open> opens;
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<bool>> order;
    std::size_t top = 0;
  };
  std::shared_ptr<const Data> data_;
};

/// A form on a specific open.
struct Section {
  std::size_t open;
  DifferentialForm form;
};

/// U ↦ Λ•Ω¹ over the shared ring, with identity restriction maps.
class PresheafCDGA {
 public:
  PresheafCDGA(OpenPoset poset, RingPresentation ring) : poset_(std::move(poset)), ring_(std::move(ring)) {
    if (ring_.size() != poset_.dim()) throw RingMismatch("ring and poset have different dimensions");
  }

  const OpenPoset& poset() const noexcept { return poset_; }
  const RingPresentation& ring() const noexcept { return ring_; }

  /// ρ^U_V for V ⊆ U.
  Section restrict(const Section& s, std::size_t to) const {
    if (!poset_.leq(to, s.open))
      throw InvalidPoset("cannot restrict from '" + poset_.name(s.open) + "' to '" + poset_.name(to) + "'");
    require_same_ring(ring_, s.form.ring());
    return Section{to, s.form};
  }

  /// Sections are equal when their forms agree on the open's region.
  bool equal(const Section& a, const Section& b) const {
    return a.open == b.open && agree_on_region(a.form, b.form, poset_.region(a.open));
  }

 private:
  OpenPoset poset_;
  RingPresentation ring_;
};

/// A vector field per open.
class LocalDerivationFamily {
 public:
  explicit LocalDerivationFamily(const PresheafCDGA& presheaf) : presheaf_(presheaf) {}

  static LocalDerivationFamily from_global(const PresheafCDGA& presheaf, const VectorField& v) {
    LocalDerivationFamily out(presheaf);
    for (std::size_t k = 0; k < presheaf.poset().size(); ++k) out.set(presheaf.poset().name(k), v);
    return out;
  }

  void set(const std::string& open, VectorField v) {
    presheaf_.poset().index(open);
    require_same_ring(presheaf_.ring(), v.ring());
    members_.insert_or_assign(open, std::move(v));
  }

  bool defined_on_all() const { return members_.size() == presheaf_.poset().size(); }
  bool has(const std::string& open) const { return members_.count(open) > 0; }
  const VectorField& at(const std::string& open) const {
    auto it = members_.find(open);
    if (it == members_.end()) throw InvalidPoset("family has no field on '" + open + "'");
    return it->second;
  }
  const VectorField& at(std::size_t open) const { return at(presheaf_.poset().name(open)); }
  const std::map<std::string, VectorField>& members() const noexcept { return members_; }
  const PresheafCDGA& presheaf() const noexcept { return presheaf_; }

  /// The global derivation: the component on the top open.
  const VectorField& global() const { return at(presheaf_.poset().top()); }

  /// Every component vanishes on its open.
  bool is_zero() const {
    for (const auto& [name, v] : members_)
      for (const auto& c : v.coefficients())
        if (!agree_on_region(c, SmoothExpr(), presheaf_.poset().region(presheaf_.poset().index(name)),
                             presheaf_.ring().size()))
          return false;
    return true;
  }

 private:
  PresheafCDGA presheaf_;
  std::map<std::string, VectorField> members_;
};

struct SquareWitness {
  std::string above;     // U
  std::string below;     // V ⊆ U
  std::string op;        // "i", "L" or "d"
  DifferentialForm form;
};

struct SquareReport {
  bool ok = true;
  std::optional<SquareWitness> witness;
};

/// For every V ⊆ U and test form a, restricting after applying the U-instance
/// of ι(v), L(v), d equals applying the V-instance after restricting.
inline SquareReport check_restriction_squares(const LocalDerivationFamily& family,
                                              const std::vector<DifferentialForm>& forms) {
  const auto& P = family.presheaf();
  const auto& poset = P.poset();
  if (!family.defined_on_all()) throw IncompatibleFamily("family is not defined on every open");
  using Op = GradedOperator;
  for (std::size_t u = 0; u < poset.size(); ++u)
    for (std::size_t v = 0; v < poset.size(); ++v) {
      if (u == v || !poset.leq(v, u)) continue;
      const std::vector<std::pair<std::string, std::pair<Op, Op>>> ops{
          {"i", {Op::contraction(family.at(u)), Op::contraction(family.at(v))}},
          {"L", {Op::lie(family.at(u)), Op::lie(family.at(v))}},
          {"d", {Op::exterior_d(), Op::exterior_d()}},
      };
      for (const auto& [name, pair] : ops)
        for (const auto& a : forms) {
          const Section lhs = P.restrict(Section{u, op_apply(pair.first, a)}, v);
          const Section rhs{v, op_apply(pair.second, P.restrict(Section{u, a}, v).form)};
          if (!P.equal(lhs, rhs)) return {false, SquareWitness{poset.name(u), poset.name(v), name, a}};
        }
    }
  return {};
}

struct PresheafReport {
  std::map<std::string, IdentityReport> per_open;

  bool all_pass() const {
    for (const auto& [name, r] : per_open)
      if (!r.all_pass()) return false;
    return true;
  }
};

/// Cartan identities open by open, after both families pass the restriction
/// squares. Opens are verified concurrently and merged by name.
inline PresheafReport presheaf_cartan_verify(const LocalDerivationFamily& v, const LocalDerivationFamily& w,
                                             const std::vector<DifferentialForm>& forms) {
  for (const auto* fam : {&v, &w}) {
    auto squares = check_restriction_squares(*fam, forms);
    if (!squares.ok)
      throw IncompatibleFamily("restriction square fails from '" + squares.witness->above + "' to '" +
                               squares.witness->below + "' for " + squares.witness->op);
  }
  const auto& poset = v.presheaf().poset();
  std::vector<std::future<IdentityReport>> tasks;
  for (std::size_t k = 0; k < poset.size(); ++k)
    tasks.push_back(std::async(std::launch::async, [&, k] { return verify_cartan(v.at(k), w.at(k), forms); }));
  PresheafReport report;
  for (std::size_t k = 0; k < poset.size(); ++k) report.per_open.emplace(poset.name(k), tasks[k].get());
  return report;
}

/// Glues local fields on a cover of the top open into the global field.
/// Polynomial fields that agree on an overlap agree everywhere, so the
/// result is the common representative.
inline VectorField glue_derivations(const OpenPoset& poset, const std::map<std::string, VectorField>& locals) {
  if (locals.empty()) throw NotACover("empty cover");
  const std::size_t dim = poset.dim();
  Region covered;
  for (const auto& [name, v] : locals) {
    const Region& r = poset.region(poset.index(name));
    if (r.all) covered.all = true;
    covered.boxes.insert(covered.boxes.end(), r.boxes.begin(), r.boxes.end());
  }
  if (!region_contains(covered, poset.region(poset.top()), dim)) throw NotACover("opens do not cover the top element");

  for (auto a = locals.begin(); a != locals.end(); ++a)
    for (auto b = std::next(a); b != locals.end(); ++b) {
      require_same_ring(a->second.ring(), b->second.ring());
      const Region overlap = intersect(poset.region(poset.index(a->first)), poset.region(poset.index(b->first)), dim);
      const auto& va = a->second.coefficients();
      const auto& vb = b->second.coefficients();
      for (std::size_t i = 0; i < va.size(); ++i) {
        if (auto w = disagreement_on_region(va[i], vb[i], overlap, dim))
          throw IncompatibleOverlap(a->first, b->first, *w);
        // Disjoint pieces still carry polynomial data, which is rigid.
        if (is_empty(overlap) && va[i].is_polynomial() && vb[i].is_polynomial() && !(va[i] == vb[i]))
          throw IncompatibleOverlap(a->first, b->first, {});
      }
    }
  return locals.begin()->second;
}

/// If f vanishes on the box then v(f) vanishes there. For polynomial data
/// both conditions reduce to normal-form zero tests.
inline bool locality_witness(const VectorField& v, const SmoothExpr& f, const Box& box) {
  const Region region = Region::of({box});
  const std::size_t dim = v.ring().size();
  if (!agree_on_region(f, SmoothExpr(), region, dim)) return true;
  return agree_on_region(vf_apply(v, f), SmoothExpr(), region, dim);
}

/// ρ·a1 + (1 − ρ)·a2 for two overlapping bounded intervals, with ρ ≡ 1 on
/// the part of the first interval left of the second and ρ ≡ 0 from the
/// right end of the first interval on.
inline SmoothExpr partition_glue_demo(Interval first, Interval second, SmoothExpr a1, SmoothExpr a2) {
  if (!first.lo || !first.hi || !second.lo || !second.hi) throw Error("partition demo needs bounded intervals");
  if (*second.lo < *first.lo) {
    std::swap(first, second);
    std::swap(a1, a2);
  }
  if (!(*first.lo < *second.lo && *second.lo < *first.hi && *first.hi < *second.hi))
    throw Error("partition demo needs two overlapping intervals, neither containing the other");
  const Region overlap = Region::of({Box{Interval{second.lo, first.hi}}});
  if (auto w = disagreement_on_region(a1, a2, overlap, 1)) throw IncompatibleOverlap("first", "second", *w);
  const Rational center = (*first.lo + *second.lo) / 2;
  const Rational r_in = (*second.lo - *first.lo) / 2;
  const Rational r_out = r_in + (*first.hi - *second.lo);
  const SmoothExpr rho = make_bump({center}, r_in, r_out);
  return rho * a1 + (SmoothExpr(1) - rho) * a2;
}

}  // namespace cartan
