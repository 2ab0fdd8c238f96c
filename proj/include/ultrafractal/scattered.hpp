#pragma once

// Cantor-Bendixson calculus on the compact ordinal intervals [0, g] and on
// the Cantor set. Every countable compact space is homeomorphic to some
// [0, g], so these two families cover the zero-dimensional compacta we
// can name symbolically.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ultrafractal/errors.hpp"
#include "ultrafractal/ordinal.hpp"

namespace ultrafractal {

class OrdinalSpace {
 public:
  enum class Kind { Empty, Interval, Cantor };

  static OrdinalSpace empty() { return OrdinalSpace(Kind::Empty, {}); }
  /// The closed interval [0, gamma] with the order topology.
  static OrdinalSpace interval(Ordinal gamma) { return OrdinalSpace(Kind::Interval, std::move(gamma)); }
  static OrdinalSpace cantor() { return OrdinalSpace(Kind::Cantor, {}); }

  Kind kind() const noexcept { return kind_; }
  bool is_empty() const noexcept { return kind_ == Kind::Empty; }
  bool is_cantor() const noexcept { return kind_ == Kind::Cantor; }
  bool is_interval() const noexcept { return kind_ == Kind::Interval; }

  const Ordinal& gamma() const {
    if (!is_interval()) throw DomainError("space is not an ordinal interval");
    return gamma_;
  }

  friend bool operator==(const OrdinalSpace&, const OrdinalSpace&) = default;

 private:
  OrdinalSpace(Kind kind, Ordinal gamma) : kind_(kind), gamma_(std::move(gamma)) {}

  Kind kind_;
  Ordinal gamma_;
};

/// "cantor", "empty", or an ordinal literal g meaning [0, g].
inline OrdinalSpace parse_space(std::string_view text) {
  if (text == "cantor") return OrdinalSpace::cantor();
  if (text == "empty") return OrdinalSpace::empty();
  return OrdinalSpace::interval(parse_cnf(text));
}

inline std::string to_string(const OrdinalSpace& x) {
  switch (x.kind()) {
    case OrdinalSpace::Kind::Empty: return "empty";
    case OrdinalSpace::Kind::Cantor: return "cantor";
    case OrdinalSpace::Kind::Interval: return to_string(x.gamma());
  }
  return "?";
}

namespace detail {

/// The unique d with w * d = g - (finite part of g): each exponent e is
/// replaced by the b with 1 + b = e.
inline Ordinal left_quotient_by_omega(const Ordinal& gamma) {
  std::vector<CnfTerm> out;
  for (const CnfTerm& t : gamma.terms()) {
    if (t.exponent.is_zero()) continue;
    Ordinal e = t.exponent.is_finite() ? predecessor(t.exponent) : t.exponent;
    out.push_back(CnfTerm{std::move(e), t.coefficient});
  }
  return Ordinal(std::move(out));
}

inline void require_nonempty(const OrdinalSpace& x) {
  if (x.is_empty()) throw DomainError("operation undefined on the empty space");
}

}  // namespace detail

/// One Cantor-Bendixson derivative (the set of non-isolated points), up to homeomorphism.
///
/// The limit points of [0, g] are the ordinals w*x with 1 <= x <= d, where
/// d = g / w; as a space that is [1, d], i.e. [0, d-1] for finite d and
/// [0, d] otherwise.
inline OrdinalSpace derived_set(const OrdinalSpace& x) {
  if (!x.is_interval()) return x;
  const Ordinal d = detail::left_quotient_by_omega(x.gamma());
  if (d.is_zero()) return OrdinalSpace::empty();
  if (d.is_finite()) return OrdinalSpace::interval(predecessor(d));
  return OrdinalSpace::interval(d);
}

struct ScatteredHeight {
  ExtHeight height;
  /// Size of the top derived set X^(h(X)); nullopt when it is infinite (Cantor).
  std::optional<std::uint64_t> multiplicity;

  friend bool operator==(const ScatteredHeight&, const ScatteredHeight&) = default;
};

inline ScatteredHeight scattered_height(const OrdinalSpace& x) {
  detail::require_nonempty(x);
  if (x.is_cantor()) return {ExtHeight::infinity(), std::nullopt};
  const Ordinal& g = x.gamma();
  if (g.is_finite()) {
    const std::uint64_t n = g.finite_value();
    return {ExtHeight::finite(0), detail::checked_add(n, 1)};
  }
  return {g.leading_exponent(), g.leading_coefficient()};
}

/// Uncountable, or countable with a one-point top derived set.
inline bool is_unital(const OrdinalSpace& x) {
  const ScatteredHeight h = scattered_height(x);
  return !h.multiplicity || *h.multiplicity == 1;
}

/// Splits [0, w^a*m + r] (r < w^a) into m-1 copies of [0, w^a] followed by
/// [0, w^a + r]; a finite [0, n] splits into n+1 points. Every piece is
/// unital with the height of the whole space.
inline std::vector<OrdinalSpace> unital_decomposition(const OrdinalSpace& x) {
  detail::require_nonempty(x);
  if (x.is_cantor()) return {x};
  const Ordinal& g = x.gamma();
  if (g.is_finite()) {
    return std::vector<OrdinalSpace>(g.finite_value() + 1, OrdinalSpace::interval(Ordinal{}));
  }
  const Ordinal& a = g.leading_exponent();
  const std::uint64_t m = g.leading_coefficient();
  std::vector<CnfTerm> tail(g.terms().begin() + 1, g.terms().end());
  std::vector<OrdinalSpace> pieces(m - 1, OrdinalSpace::interval(Ordinal::omega_power(a)));
  pieces.push_back(OrdinalSpace::interval(Ordinal::omega_power(a) + Ordinal(std::move(tail))));
  return pieces;
}

enum class FractalVerdict { BanachUltrafractal, NotTopologicalFractal };

inline const char* to_string(FractalVerdict v) {
  return v == FractalVerdict::BanachUltrafractal ? "BanachUltrafractal" : "NotTopologicalFractal";
}

/// A zero-dimensional compactum is a (topological, Banach, Banach ultra-)
/// fractal exactly when its scattered height is not a limit ordinal.
/// Height 0 (finite nonempty spaces) counts as a fractal.
inline FractalVerdict classify_fractal(const OrdinalSpace& x) {
  const ScatteredHeight h = scattered_height(x);
  return classify_kind(h.height) == HeightKind::Limit ? FractalVerdict::NotTopologicalFractal
                                                     : FractalVerdict::BanachUltrafractal;
}

}  // namespace ultrafractal
