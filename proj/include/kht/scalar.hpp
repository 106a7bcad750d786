#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace kht {

// Exact rational number. Values that fit in 64-bit numerator/denominator stay
// on the machine-word path; everything else falls back to GMP.
class Scalar {
 public:
  Scalar() = default;
  Scalar(long long v) : num_(v) {}  // NOLINT(google-explicit-constructor)
  Scalar(int v) : num_(v) {}        // NOLINT(google-explicit-constructor)
  static Scalar fraction(long long num, long long den);
  static Scalar from_mpq(const mpq_class& q);
  static Scalar parse(std::string_view text);

  bool is_zero() const { return !big_ && num_ == 0; }
  bool is_one() const { return !big_ && num_ == 1 && den_ == 1; }
  bool is_integer() const;
  int sign() const;
  bool is_small() const { return !big_; }
  // Only meaningful when is_small().
  std::int64_t small_num() const { return num_; }
  std::int64_t small_den() const { return den_; }

  mpq_class to_mpq() const;
  mpz_class numerator() const;
  mpz_class denominator() const;
  std::string str() const;

  // Exponent of p in the value; the value must be nonzero.
  int valuation(long p) const;
  Scalar abs() const { return sign() < 0 ? -*this : *this; }

  // Truncated integer division; both operands must be integers.
  static Scalar int_quotient(const Scalar& a, const Scalar& b);

  Scalar operator-() const;
  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend Scalar operator/(const Scalar& a, const Scalar& b);
  Scalar& operator+=(const Scalar& b) { return *this = *this + b; }
  Scalar& operator-=(const Scalar& b) { return *this = *this - b; }
  Scalar& operator*=(const Scalar& b) { return *this = *this * b; }
  Scalar& operator/=(const Scalar& b) { return *this = *this / b; }

  friend bool operator==(const Scalar& a, const Scalar& b);
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }
  friend bool operator<(const Scalar& a, const Scalar& b);

  std::size_t hash() const;

 private:
  static Scalar normalized(mpq_class q);
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::shared_ptr<const mpq_class> big_;
};

std::ostream& operator<<(std::ostream& os, const Scalar& s);

// Coefficient ring: the integers, the rationals, or the integers localized at
// a prime p.
class Ring {
 public:
  enum class Kind { Integers, Rationals, Local };

  static Ring integers() { return Ring(Kind::Integers, 0); }
  static Ring rationals() { return Ring(Kind::Rationals, 0); }
  static Ring localized(long p);
  // Accepts "Z", "Q", "Zp:<p>" and "Z(<p>)".
  static Ring parse(std::string_view text);

  Kind kind() const { return kind_; }
  long prime() const { return p_; }
  std::string name() const;

  bool contains(const Scalar& s) const;
  bool is_unit(const Scalar& s) const;
  Scalar unit_inverse(const Scalar& s) const;
  // Throws if the value does not lie in the ring.
  void check(const Scalar& s) const;

  // Pivot preference for Smith normal form; smaller is better. Nonzero input.
  mpz_class pivot_norm(const Scalar& s) const;
  bool divides(const Scalar& a, const Scalar& b) const;  // a | b
  // q with b - q*a "smaller" than a (exact quotient when a | b).
  Scalar quotient(const Scalar& b, const Scalar& a) const;
  // Canonical associate: |s| over Z, p^v over Z(p), 1 over Q.
  Scalar canonical_associate(const Scalar& s) const;

  friend bool operator==(const Ring& a, const Ring& b) { return a.kind_ == b.kind_ && a.p_ == b.p_; }
  friend bool operator!=(const Ring& a, const Ring& b) { return !(a == b); }

 private:
  Ring(Kind k, long p) : kind_(k), p_(p) {}
  Kind kind_;
  long p_;
};

}  // namespace kht

template <>
struct std::hash<kht::Scalar> {
  std::size_t operator()(const kht::Scalar& s) const noexcept { return s.hash(); }
};
