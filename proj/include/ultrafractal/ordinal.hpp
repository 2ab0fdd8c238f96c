#pragma once

// Ordinals below epsilon-zero in Cantor normal form, extended by -1 and
// infinity. Values are immutable; every operation is pure.

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ultrafractal/errors.hpp"

namespace ultrafractal {

struct CnfTerm;

/// An ordinal w^e1*m1 + ... + w^ek*mk with e1 > ... > ek and every mi >= 1.
/// The empty term list is zero.
class Ordinal {
 public:
  Ordinal() = default;
  /// Throws DomainError unless the terms are in normal form.
  explicit Ordinal(std::vector<CnfTerm> terms);

  static Ordinal finite(std::uint64_t n);
  static Ordinal omega();
  static Ordinal omega_power(Ordinal exponent, std::uint64_t coefficient = 1);

  const std::vector<CnfTerm>& terms() const noexcept { return terms_; }

  bool is_zero() const noexcept;
  bool is_finite() const noexcept;
  bool is_successor() const noexcept;
  bool is_limit() const noexcept;
  /// Value of a finite ordinal; throws DomainError for infinite ones.
  std::uint64_t finite_value() const;

  const Ordinal& leading_exponent() const;
  std::uint64_t leading_coefficient() const;

  friend bool operator==(const Ordinal& a, const Ordinal& b);
  friend std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b);

 private:
  std::vector<CnfTerm> terms_;
};

struct CnfTerm {
  Ordinal exponent;
  std::uint64_t coefficient = 1;

  friend bool operator==(const CnfTerm&, const CnfTerm&) = default;
};

// ---------------------------------------------------------------------------

inline bool operator==(const Ordinal& a, const Ordinal& b) { return a.terms_ == b.terms_; }

inline std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b) {
  const auto& x = a.terms_;
  const auto& y = b.terms_;
  const std::size_t common = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (auto c = x[i].exponent <=> y[i].exponent; c != 0) return c;
    if (auto c = x[i].coefficient <=> y[i].coefficient; c != 0) return c;
  }
  return x.size() <=> y.size();
}

inline Ordinal::Ordinal(std::vector<CnfTerm> terms) : terms_(std::move(terms)) {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].coefficient == 0) throw DomainError("CNF coefficient must be positive");
    if (i > 0 && !(terms_[i].exponent < terms_[i - 1].exponent)) {
      throw DomainError("CNF exponents must be strictly descending");
    }
  }
}

inline Ordinal Ordinal::finite(std::uint64_t n) {
  Ordinal o;
  if (n != 0) o.terms_.push_back(CnfTerm{Ordinal{}, n});
  return o;
}

inline Ordinal Ordinal::omega() { return omega_power(finite(1)); }

inline Ordinal Ordinal::omega_power(Ordinal exponent, std::uint64_t coefficient) {
  if (coefficient == 0) throw DomainError("CNF coefficient must be positive");
  Ordinal o;
  o.terms_.push_back(CnfTerm{std::move(exponent), coefficient});
  return o;
}

inline bool Ordinal::is_zero() const noexcept { return terms_.empty(); }

inline bool Ordinal::is_finite() const noexcept {
  return terms_.empty() || (terms_.size() == 1 && terms_.front().exponent.is_zero());
}

inline bool Ordinal::is_successor() const noexcept {
  return !terms_.empty() && terms_.back().exponent.is_zero();
}

inline bool Ordinal::is_limit() const noexcept {
  return !terms_.empty() && !terms_.back().exponent.is_zero();
}

inline std::uint64_t Ordinal::finite_value() const {
  if (!is_finite()) throw DomainError("ordinal is not finite");
  return terms_.empty() ? 0 : terms_.front().coefficient;
}

inline const Ordinal& Ordinal::leading_exponent() const {
  if (terms_.empty()) throw DomainError("zero has no leading term");
  return terms_.front().exponent;
}

inline std::uint64_t Ordinal::leading_coefficient() const {
  if (terms_.empty()) throw DomainError("zero has no leading term");
  return terms_.front().coefficient;
}

namespace detail {

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b) {
    throw DomainError("CNF coefficient overflow");
  }
  return a + b;
}

}  // namespace detail

/// Ordinal sum a + b. Terms of a below the leading exponent of b are absorbed.
inline Ordinal ord_add(const Ordinal& a, const Ordinal& b) {
  if (b.is_zero()) return a;
  const Ordinal& lead = b.leading_exponent();
  std::vector<CnfTerm> out;
  std::uint64_t carry = 0;
  for (const CnfTerm& t : a.terms()) {
    if (lead < t.exponent) {
      out.push_back(t);
    } else if (t.exponent == lead) {
      carry = t.coefficient;
    }
  }
  bool first = true;
  for (const CnfTerm& t : b.terms()) {
    out.push_back(t);
    if (first) {
      out.back().coefficient = detail::checked_add(out.back().coefficient, carry);
      first = false;
    }
  }
  return Ordinal(std::move(out));
}

inline Ordinal operator+(const Ordinal& a, const Ordinal& b) { return ord_add(a, b); }

/// Immediate predecessor of a successor ordinal.
inline Ordinal predecessor(const Ordinal& a) {
  if (!a.is_successor()) throw DomainError("predecessor of a non-successor ordinal");
  std::vector<CnfTerm> terms = a.terms();
  if (--terms.back().coefficient == 0) terms.pop_back();
  return Ordinal(std::move(terms));
}

/// The n-th element of the fundamental sequence of a limit ordinal:
///   (g + w^(b+1))[n] = g + w^b * n,   (g + w^d)[n] = g + w^(d[n]) for limit d.
inline Ordinal fundamental_sequence(const Ordinal& a, std::uint64_t n) {
  if (!a.is_limit()) throw DomainError("fundamental sequence requested for a non-limit ordinal");
  if (n == 0) throw DomainError("fundamental sequence index must be positive");
  std::vector<CnfTerm> base = a.terms();
  const Ordinal exponent = base.back().exponent;
  if (--base.back().coefficient == 0) base.pop_back();
  const Ordinal gamma(std::move(base));
  if (exponent.is_successor()) {
    return gamma + Ordinal::omega_power(predecessor(exponent), n);
  }
  return gamma + Ordinal::omega_power(fundamental_sequence(exponent, n));
}

// ---------------------------------------------------------------------------
// Extended heights: {-1} < ordinals < {inf}

class ExtHeight {
 public:
  enum class Tag { MinusOne, Ord, Infinity };

  ExtHeight() = default;
  ExtHeight(Ordinal o) : ordinal_(std::move(o)) {}  // NOLINT(google-explicit-constructor)

  static ExtHeight minus_one() { return ExtHeight(Tag::MinusOne); }
  static ExtHeight infinity() { return ExtHeight(Tag::Infinity); }
  static ExtHeight finite(std::uint64_t n) { return ExtHeight(Ordinal::finite(n)); }

  Tag tag() const noexcept { return tag_; }
  bool is_minus_one() const noexcept { return tag_ == Tag::MinusOne; }
  bool is_infinity() const noexcept { return tag_ == Tag::Infinity; }
  bool is_ordinal() const noexcept { return tag_ == Tag::Ord; }

  const Ordinal& ordinal() const {
    if (!is_ordinal()) throw DomainError("height is not an ordinal");
    return ordinal_;
  }

  friend bool operator==(const ExtHeight&, const ExtHeight&) = default;
  friend std::strong_ordering operator<=>(const ExtHeight& a, const ExtHeight& b) {
    if (a.tag_ != b.tag_) return static_cast<int>(a.tag_) <=> static_cast<int>(b.tag_);
    if (a.is_ordinal()) return a.ordinal_ <=> b.ordinal_;
    return std::strong_ordering::equal;
  }

 private:
  explicit ExtHeight(Tag tag) : tag_(tag) {}

  Tag tag_ = Tag::Ord;
  Ordinal ordinal_;
};

inline std::strong_ordering compare(const ExtHeight& a, const ExtHeight& b) { return a <=> b; }

enum class HeightKind { MinusOne, Zero, Successor, Limit, Infinity };

inline HeightKind classify_kind(const ExtHeight& h) {
  if (h.is_minus_one()) return HeightKind::MinusOne;
  if (h.is_infinity()) return HeightKind::Infinity;
  const Ordinal& o = h.ordinal();
  if (o.is_zero()) return HeightKind::Zero;
  return o.is_successor() ? HeightKind::Successor : HeightKind::Limit;
}

inline const char* to_string(HeightKind k) {
  switch (k) {
    case HeightKind::MinusOne: return "minus-one";
    case HeightKind::Zero: return "zero";
    case HeightKind::Successor: return "successor";
    case HeightKind::Limit: return "limit";
    case HeightKind::Infinity: return "infinity";
  }
  return "?";
}

/// sup{b : b + 1 <= a}: predecessor for successors, identity on 0, limits and infinity.
inline ExtHeight height_minus_one(const ExtHeight& h) {
  switch (classify_kind(h)) {
    case HeightKind::MinusOne: throw DomainError("height_minus_one is undefined at -1");
    case HeightKind::Successor: return predecessor(h.ordinal());
    default: return h;
  }
}

/// h + 1, with inf + 1 = inf and -1 + 1 = 0.
inline ExtHeight height_plus_one(const ExtHeight& h) {
  if (h.is_infinity()) return h;
  if (h.is_minus_one()) return ExtHeight::finite(0);
  return h.ordinal() + Ordinal::finite(1);
}

// ---------------------------------------------------------------------------
// Literals.
//
//   height   := "-1" | "inf" | ordinal
//   ordinal  := term ("+" term)*
//   term     := nat | "w" ["^" exponent] ["*" nat]
//   exponent := nat | "w" ["^" exponent] | "(" ordinal ")"

inline std::string to_string(const Ordinal& o);

namespace detail {

inline bool exponent_is_bare(const Ordinal& e) { return e.is_finite() || e == Ordinal::omega(); }

inline std::string term_to_string(const CnfTerm& t) {
  if (t.exponent.is_zero()) return std::to_string(t.coefficient);
  std::string s = "w";
  if (!(t.exponent == Ordinal::finite(1))) {
    s += '^';
    if (exponent_is_bare(t.exponent)) {
      s += to_string(t.exponent);
    } else {
      s += '(' + to_string(t.exponent) + ')';
    }
  }
  if (t.coefficient != 1) s += '*' + std::to_string(t.coefficient);
  return s;
}

class OrdinalParser {
 public:
  explicit OrdinalParser(std::string_view text) : text_(text) {}

  ExtHeight parse_height() {
    skip_ws();
    if (consume_word("-1")) {
      expect_end();
      return ExtHeight::minus_one();
    }
    if (consume_word("inf")) {
      expect_end();
      return ExtHeight::infinity();
    }
    Ordinal o = parse_sum();
    expect_end();
    return o;
  }

  Ordinal parse_ordinal_only() {
    Ordinal o = parse_sum();
    expect_end();
    return o;
  }

 private:
  Ordinal parse_sum() {
    std::vector<CnfTerm> terms;
    std::vector<std::size_t> offsets;
    do {
      skip_ws();
      offsets.push_back(pos_);
      terms.push_back(parse_term());
      skip_ws();
    } while (consume('+'));
    if (terms.size() == 1 && terms.front().coefficient == 0 && terms.front().exponent.is_zero()) {
      return Ordinal{};
    }
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (terms[i].coefficient == 0) throw ParseError("zero coefficient", offsets[i]);
      if (i > 0 && !(terms[i].exponent < terms[i - 1].exponent)) {
        throw ParseError("non-descending exponents", offsets[i]);
      }
    }
    return Ordinal(std::move(terms));
  }

  CnfTerm parse_term() {
    skip_ws();
    if (at_digit()) return CnfTerm{Ordinal{}, parse_nat()};
    if (!consume('w')) throw ParseError("expected 'w' or a natural number", pos_);
    Ordinal exponent = Ordinal::finite(1);
    skip_ws();
    if (consume('^')) exponent = parse_exponent();
    skip_ws();
    std::uint64_t coefficient = 1;
    if (consume('*')) {
      skip_ws();
      const std::size_t at = pos_;
      coefficient = parse_nat();
      if (coefficient == 0) throw ParseError("zero coefficient", at);
    }
    return CnfTerm{std::move(exponent), coefficient};
  }

  Ordinal parse_exponent() {
    skip_ws();
    if (at_digit()) return Ordinal::finite(parse_nat());
    if (consume('(')) {
      Ordinal o = parse_sum();
      skip_ws();
      if (!consume(')')) throw ParseError("expected ')'", pos_);
      return o;
    }
    if (!consume('w')) throw ParseError("expected exponent", pos_);
    skip_ws();
    if (consume('^')) return Ordinal::omega_power(parse_exponent());
    return Ordinal::omega();
  }

  std::uint64_t parse_nat() {
    const std::size_t start = pos_;
    std::uint64_t value = 0;
    while (at_digit()) {
      const auto digit = static_cast<std::uint64_t>(text_[pos_] - '0');
      if (value > (std::numeric_limits<std::uint64_t>::max() - digit) / 10) {
        throw ParseError("natural number too large", start);
      }
      value = value * 10 + digit;
      ++pos_;
    }
    if (pos_ == start) throw ParseError("expected a natural number", start);
    return value;
  }

  bool at_digit() const {
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0;
  }

  bool consume(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool consume_word(std::string_view word) {
    if (text_.substr(pos_, word.size()) == word) {
      pos_ += word.size();
      return true;
    }
    return false;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) ++pos_;
  }

  void expect_end() {
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Canonical printer; emits the literal grammar.
inline std::string to_string(const Ordinal& o) {
  if (o.is_zero()) return "0";
  std::string s;
  for (const CnfTerm& t : o.terms()) {
    if (!s.empty()) s += '+';
    s += detail::term_to_string(t);
  }
  return s;
}

inline std::string to_string(const ExtHeight& h) {
  if (h.is_minus_one()) return "-1";
  if (h.is_infinity()) return "inf";
  return to_string(h.ordinal());
}

/// Parses a height literal. Non-normal-form input is rejected, never normalized.
inline ExtHeight parse_ordinal(std::string_view text) { return detail::OrdinalParser(text).parse_height(); }

/// Parses a plain ordinal literal ("-1" and "inf" are rejected).
inline Ordinal parse_cnf(std::string_view text) { return detail::OrdinalParser(text).parse_ordinal_only(); }

}  // namespace ultrafractal
