#pragma once

// Independent oracles used by the tests: a dense exponent-vector polynomial
// type with schoolbook arithmetic, and finite differences.

#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <vector>

#include "cartan/cartan.hpp"

namespace cartan {

inline void PrintTo(const SmoothExpr& e, std::ostream* os) { *os << to_string(e); }
inline void PrintTo(const DifferentialForm& a, std::ostream* os) { *os << to_string(a); }
inline void PrintTo(const VectorField& v, std::ostream* os) { *os << to_string(v); }

}  // namespace cartan

namespace oracle {

using cartan::Rational;
using cartan::SmoothExpr;

/// exponent vector -> coefficient, zero coefficients never stored.
using Dense = std::map<std::vector<unsigned>, Rational>;

inline void add_to(Dense& p, const std::vector<unsigned>& e, const Rational& c) {
  Rational& slot = p[e];
  slot += c;
  if (slot == 0) p.erase(e);
}

inline Dense add(const Dense& a, const Dense& b) {
  Dense out = a;
  for (const auto& [e, c] : b) add_to(out, e, c);
  return out;
}

inline Dense scale(const Dense& a, const Rational& k) {
  Dense out;
  for (const auto& [e, c] : a) add_to(out, e, c * k);
  return out;
}

inline Dense mul(const Dense& a, const Dense& b) {
  Dense out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<unsigned> e(std::max(ea.size(), eb.size()), 0);
      for (std::size_t i = 0; i < ea.size(); ++i) e[i] += ea[i];
      for (std::size_t i = 0; i < eb.size(); ++i) e[i] += eb[i];
      add_to(out, e, ca * cb);
    }
  return out;
}

inline Dense partial(const Dense& a, std::size_t i) {
  Dense out;
  for (const auto& [e, c] : a) {
    if (i >= e.size() || e[i] == 0) continue;
    auto lowered = e;
    --lowered[i];
    add_to(out, lowered, c * e[i]);
  }
  return out;
}

/// Reads a polynomial SmoothExpr into exponent vectors of length n.
inline Dense to_dense(const SmoothExpr& p, std::size_t n) {
  Dense out;
  for (const auto& [m, c] : p.terms()) {
    std::vector<unsigned> e(n, 0);
    for (const auto& f : m.factors()) e.at(f.atom.index()) += f.exponent;
    add_to(out, e, c);
  }
  return out;
}

inline Dense pad(const Dense& a, std::size_t n) {
  Dense out;
  for (const auto& [e, c] : a) {
    auto f = e;
    f.resize(n, 0);
    add_to(out, f, c);
  }
  return out;
}

inline Rational eval(const Dense& a, const std::vector<Rational>& x) {
  Rational sum = 0;
  for (const auto& [e, c] : a) {
    Rational t = c;
    for (std::size_t i = 0; i < e.size(); ++i)
      for (unsigned k = 0; k < e[i]; ++k) t *= x[i];
    sum += t;
  }
  return sum;
}

/// Central difference of f along coordinate i.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x, std::size_t i, double h = 1e-5) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double up = f(x);
  x[i] = x0 - h;
  const double down = f(x);
  return (up - down) / (2 * h);
}

// Forms as basis tuple -> dense polynomial, with wedge and d done by sorting
// with explicit transposition counting.
using DenseForm = std::map<std::vector<std::uint32_t>, Dense>;

inline DenseForm to_dense(const cartan::DifferentialForm& a) {
  DenseForm out;
  for (const auto& [idx, c] : a.terms()) out[idx] = to_dense(c, a.ring().size());
  return out;
}

inline void add_into(DenseForm& f, const std::vector<std::uint32_t>& idx, const Dense& p) {
  auto& slot = f[idx];
  slot = add(slot, p);
  if (slot.empty()) f.erase(idx);
}

// Bubble sort of the concatenated index list; 0 on a repeated index.
inline int sort_sign(std::vector<std::uint32_t>& v) {
  int sign = 1;
  for (std::size_t a = 0; a < v.size(); ++a)
    for (std::size_t b = 0; b + 1 < v.size() - a; ++b) {
      if (v[b] == v[b + 1]) return 0;
      if (v[b] > v[b + 1]) {
        std::swap(v[b], v[b + 1]);
        sign = -sign;
      }
    }
  for (std::size_t b = 0; b + 1 < v.size(); ++b)
    if (v[b] == v[b + 1]) return 0;
  return sign;
}

inline DenseForm dense_wedge(const DenseForm& a, const DenseForm& b) {
  DenseForm out;
  for (const auto& [ia, pa] : a)
    for (const auto& [ib, pb] : b) {
      std::vector<std::uint32_t> cat = ia;
      cat.insert(cat.end(), ib.begin(), ib.end());
      const int s = sort_sign(cat);
      if (s == 0) continue;
      add_into(out, cat, scale(mul(pa, pb), s));
    }
  return out;
}

inline DenseForm dense_d(const DenseForm& a, std::size_t n) {
  DenseForm out;
  for (const auto& [idx, p] : a)
    for (std::uint32_t i = 0; i < n; ++i) {
      std::vector<std::uint32_t> cat{i};
      cat.insert(cat.end(), idx.begin(), idx.end());
      const int s = sort_sign(cat);
      if (s == 0) continue;
      add_into(out, cat, scale(partial(p, i), s));
    }
  return out;
}

inline DenseForm pad_form(const DenseForm& a, std::size_t n) {
  DenseForm out;
  for (const auto& [idx, p] : a) out[idx] = pad(p, n);
  return out;
}

}  // namespace oracle
