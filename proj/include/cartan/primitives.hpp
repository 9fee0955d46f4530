#pragma once

// Registry of smooth primitives. Each family stores a total numeric
// evaluator and, per argument slot, the partial derivative as an expression
// template over placeholder generators x0..x{arity-1}. Rules may only
// mention registered families, so the fragment is closed under
// differentiation.

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cartan/smooth_expr.hpp"

namespace cartan {

struct PrimitiveFamily {
  std::string name;
  std::size_t arity = 1;
  /// Parametric families are addressed as name<k>, e.g. beta3.
  bool parametric = false;
  std::int32_t min_param = 0;
  std::function<double(std::int32_t param, std::span<const double> args)> evaluate;
  std::function<SmoothExpr(std::int32_t param, std::size_t slot)> partial;
};

class PrimitiveRegistry {
 public:
  static constexpr std::uint32_t kBeta = detail::kBetaFamily;
  static constexpr std::uint32_t kStep = detail::kStepFamily;
  static constexpr std::uint32_t kStepInv = detail::kStepInvFamily;

  static PrimitiveRegistry& global() {
    static PrimitiveRegistry registry;
    return registry;
  }

  std::uint32_t add(PrimitiveFamily family) {
    std::unique_lock lock(mutex_);
    for (const auto& f : families_)
      if (f.name == family.name) throw Error("primitive '" + family.name + "' already registered");
    families_.push_back(std::move(family));
    return static_cast<std::uint32_t>(families_.size() - 1);
  }

  const PrimitiveFamily& family(std::uint32_t id) const {
    std::shared_lock lock(mutex_);
    if (id >= families_.size()) throw Error("unregistered primitive family " + std::to_string(id));
    return families_[id];
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return families_.size();
  }

  std::string name(PrimId id) const {
    const auto& f = family(id.family);
    return f.parametric ? f.name + std::to_string(id.param) : f.name;
  }

  std::size_t arity(PrimId id) const { return family(id.family).arity; }

  /// Resolves a printed name ("S", "beta0", "Sinv2") to an id.
  std::optional<PrimId> lookup(std::string_view text) const {
    std::shared_lock lock(mutex_);
    for (std::uint32_t k = 0; k < families_.size(); ++k) {
      const auto& f = families_[k];
      if (!f.parametric) {
        if (text == f.name) return PrimId{k, 0};
        continue;
      }
      if (text.size() <= f.name.size() || text.substr(0, f.name.size()) != f.name) continue;
      const auto digits = text.substr(f.name.size());
      if (digits.size() > 6 || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
        continue;
      const auto param = static_cast<std::int32_t>(std::stoi(std::string(digits)));
      if (param >= f.min_param) return PrimId{k, param};
    }
    return std::nullopt;
  }

  double evaluate(PrimId id, std::span<const double> args) const { return family(id.family).evaluate(id.param, args); }

  /// Partial derivative template in slot `slot`, over placeholder generators.
  SmoothExpr partial(PrimId id, std::size_t slot) const { return family(id.family).partial(id.param, slot); }

 private:
  PrimitiveRegistry() { install_builtins(); }
  void install_builtins();

  mutable std::shared_mutex mutex_;
  std::deque<PrimitiveFamily> families_;
};

inline SmoothExpr beta(std::int32_t k, SmoothExpr arg) {
  return SmoothExpr::primitive({PrimitiveRegistry::kBeta, k}, {std::move(arg)});
}

/// S(u, v) = β0(u) / (β0(u) + β0(v)).
inline SmoothExpr smooth_step(SmoothExpr u, SmoothExpr v) {
  return SmoothExpr::primitive({PrimitiveRegistry::kStep, 0}, {std::move(u), std::move(v)});
}

/// Sinv_c(u, v) = (β0(u) + β0(v))^(-c).
inline SmoothExpr smooth_step_inv(std::int32_t c, SmoothExpr u, SmoothExpr v) {
  return SmoothExpr::primitive({PrimitiveRegistry::kStepInv, c}, {std::move(u), std::move(v)});
}

namespace detail {

// β_k = exp(-1/t) P_k(1/t) for t > 0, with P_0 = 1 and
// P_{k+1}(s) = s^2 (P_k(s) - P_k'(s)).
inline std::vector<double> beta_polynomial(std::int32_t k) {
  std::vector<double> p{1.0};
  for (std::int32_t step = 0; step < k; ++step) {
    std::vector<double> diff(p.size() + 1, 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) diff[j] += p[j];
    for (std::size_t j = 1; j < p.size(); ++j) diff[j - 1] -= static_cast<double>(j) * p[j];
    std::vector<double> next(diff.size() + 2, 0.0);
    for (std::size_t j = 0; j < diff.size(); ++j) next[j + 2] = diff[j];
    while (next.size() > 1 && next.back() == 0.0) next.pop_back();
    p = std::move(next);
  }
  return p;
}

inline double beta_value(std::int32_t k, double t) {
  if (!(t > 0.0)) return 0.0;
  const double s = 1.0 / t;
  const double log_s = std::log(s);
  double sum = 0.0;
  const auto p = beta_polynomial(k);
  for (std::size_t j = 0; j < p.size(); ++j)
    if (p[j] != 0.0) sum += p[j] * std::exp(-s + static_cast<double>(j) * log_s);
  return sum;
}

inline SmoothExpr placeholder(std::size_t i) { return SmoothExpr::generator(i); }

}  // namespace detail

inline void PrimitiveRegistry::install_builtins() {
  using detail::placeholder;
  auto& r = *this;

  // β_k: the k-th derivative of β_0(t) = exp(-1/t) (t > 0), 0 (t <= 0).
  r.families_.push_back(PrimitiveFamily{
      "beta", 1, true, 0,
      [](std::int32_t k, std::span<const double> a) { return detail::beta_value(k, a[0]); },
      [](std::int32_t k, std::size_t) { return beta(k + 1, placeholder(0)); }});

  r.families_.push_back(PrimitiveFamily{
      "S", 2, false, 0,
      [](std::int32_t, std::span<const double> a) {
        const double bu = detail::beta_value(0, a[0]);
        const double den = bu + detail::beta_value(0, a[1]);
        return den > 0.0 ? bu / den : 0.0;
      },
      [](std::int32_t, std::size_t slot) {
        const SmoothExpr u = placeholder(0), v = placeholder(1);
        if (slot == 0) return beta(1, u) * beta(0, v) * smooth_step_inv(2, u, v);
        return -(beta(0, u) * beta(1, v) * smooth_step_inv(2, u, v));
      }});

  r.families_.push_back(PrimitiveFamily{
      "Sinv", 2, true, 0,
      [](std::int32_t c, std::span<const double> a) {
        const double den = detail::beta_value(0, a[0]) + detail::beta_value(0, a[1]);
        return den > 0.0 ? std::pow(den, -static_cast<double>(c)) : 0.0;
      },
      [](std::int32_t c, std::size_t slot) {
        const SmoothExpr u = placeholder(0), v = placeholder(1);
        return SmoothExpr(-c) * beta(1, placeholder(slot)) * smooth_step_inv(c + 1, u, v);
      }});
}

inline PrimitiveRegistry& registry() { return PrimitiveRegistry::global(); }

}  // namespace cartan
