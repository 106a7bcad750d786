#include "kht/scalar.hpp"

#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace kht {

namespace {

using i128 = __int128;

constexpr i128 kMax = std::numeric_limits<std::int64_t>::max();
constexpr i128 kMin = std::numeric_limits<std::int64_t>::min() + 1;

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

mpz_class to_mpz(std::int64_t v) {
  mpz_class z;
  mpz_set_si(z.get_mpz_t(), v);
  return z;
}

bool fits(const mpz_class& z) { return mpz_fits_slong_p(z.get_mpz_t()) != 0 && z != to_mpz(std::numeric_limits<std::int64_t>::min()); }

bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

}  // namespace

Scalar Scalar::normalized(mpq_class q) {
  q.canonicalize();
  Scalar s;
  if (fits(q.get_num()) && fits(q.get_den())) {
    s.num_ = q.get_num().get_si();
    s.den_ = q.get_den().get_si();
  } else {
    s.big_ = std::make_shared<const mpq_class>(std::move(q));
  }
  return s;
}

Scalar Scalar::fraction(long long num, long long den) {
  if (den == 0) throw std::domain_error("zero denominator");
  return from_mpq(mpq_class(to_mpz(num), to_mpz(den)));
}

Scalar Scalar::from_mpq(const mpq_class& q) { return normalized(q); }

Scalar Scalar::parse(std::string_view text) {
  mpq_class q;
  std::string t(text);
  if (q.set_str(t, 10) != 0) throw std::invalid_argument("bad number: " + t);
  if (q.get_den() == 0) throw std::invalid_argument("bad number: " + t);
  return normalized(q);
}

bool Scalar::is_integer() const { return big_ ? big_->get_den() == 1 : den_ == 1; }

int Scalar::sign() const {
  if (big_) return sgn(*big_);
  return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0);
}

mpq_class Scalar::to_mpq() const {
  if (big_) return *big_;
  return mpq_class(to_mpz(num_), to_mpz(den_));
}

mpz_class Scalar::numerator() const { return big_ ? big_->get_num() : to_mpz(num_); }
mpz_class Scalar::denominator() const { return big_ ? big_->get_den() : to_mpz(den_); }

std::string Scalar::str() const {
  if (big_) return big_->get_str();
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

int Scalar::valuation(long p) const {
  if (is_zero()) throw std::domain_error("valuation of zero");
  if (!big_) {
    int v = 0;
    std::int64_t n = num_, d = den_;
    while (n % p == 0) { n /= p; ++v; }
    while (d % p == 0) { d /= p; --v; }
    return v;
  }
  mpz_class n = big_->get_num(), d = big_->get_den(), pp = p;
  int v = static_cast<int>(mpz_remove(n.get_mpz_t(), n.get_mpz_t(), pp.get_mpz_t()));
  v -= static_cast<int>(mpz_remove(d.get_mpz_t(), d.get_mpz_t(), pp.get_mpz_t()));
  return v;
}

Scalar Scalar::int_quotient(const Scalar& a, const Scalar& b) {
  if (!a.is_integer() || !b.is_integer()) throw std::domain_error("int_quotient on non-integers");
  if (b.is_zero()) throw std::domain_error("division by zero");
  if (!a.big_ && !b.big_ && !(a.num_ == std::numeric_limits<std::int64_t>::min())) {
    return Scalar(static_cast<long long>(a.num_ / b.num_));
  }
  mpz_class q;
  mpz_tdiv_q(q.get_mpz_t(), a.numerator().get_mpz_t(), b.numerator().get_mpz_t());
  return normalized(mpq_class(q));
}

Scalar Scalar::operator-() const {
  if (!big_) {
    Scalar s;
    s.num_ = -num_;
    s.den_ = den_;
    return s;
  }
  return normalized(-*big_);
}

Scalar operator+(const Scalar& a, const Scalar& b) {
  if (!a.big_ && !b.big_) {
    if (a.den_ == 1 && b.den_ == 1) {
      std::int64_t r;
      if (!__builtin_add_overflow(a.num_, b.num_, &r) && r != std::numeric_limits<std::int64_t>::min()) return Scalar(static_cast<long long>(r));
    } else {
      i128 n = static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_;
      i128 d = static_cast<i128>(a.den_) * b.den_;
      i128 g = gcd128(n, d);
      if (g > 1) { n /= g; d /= g; }
      if (n <= kMax && n >= kMin && d <= kMax) {
        Scalar s;
        s.num_ = static_cast<std::int64_t>(n);
        s.den_ = static_cast<std::int64_t>(d);
        return s;
      }
    }
  }
  return Scalar::normalized(a.to_mpq() + b.to_mpq());
}

Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

Scalar operator*(const Scalar& a, const Scalar& b) {
  if (!a.big_ && !b.big_) {
    if (a.den_ == 1 && b.den_ == 1) {
      std::int64_t r;
      if (!__builtin_mul_overflow(a.num_, b.num_, &r) && r != std::numeric_limits<std::int64_t>::min()) return Scalar(static_cast<long long>(r));
    } else {
      i128 n = static_cast<i128>(a.num_) * b.num_;
      i128 d = static_cast<i128>(a.den_) * b.den_;
      i128 g = gcd128(n, d);
      if (g > 1) { n /= g; d /= g; }
      if (n <= kMax && n >= kMin && d <= kMax) {
        Scalar s;
        s.num_ = static_cast<std::int64_t>(n);
        s.den_ = static_cast<std::int64_t>(d);
        return s;
      }
    }
  }
  return Scalar::normalized(a.to_mpq() * b.to_mpq());
}

Scalar operator/(const Scalar& a, const Scalar& b) {
  if (b.is_zero()) throw std::domain_error("division by zero");
  if (!a.big_ && !b.big_) {
    i128 n = static_cast<i128>(a.num_) * b.den_;
    i128 d = static_cast<i128>(a.den_) * b.num_;
    if (d < 0) { n = -n; d = -d; }
    i128 g = gcd128(n, d);
    if (g > 1) { n /= g; d /= g; }
    if (n <= kMax && n >= kMin && d <= kMax) {
      Scalar s;
      s.num_ = static_cast<std::int64_t>(n);
      s.den_ = static_cast<std::int64_t>(d);
      return s;
    }
  }
  return Scalar::normalized(a.to_mpq() / b.to_mpq());
}

bool operator==(const Scalar& a, const Scalar& b) {
  if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
  if (a.big_ && b.big_) return *a.big_ == *b.big_;
  return false;  // normalized representation is unique
}

bool operator<(const Scalar& a, const Scalar& b) {
  if (!a.big_ && !b.big_) return static_cast<i128>(a.num_) * b.den_ < static_cast<i128>(b.num_) * a.den_;
  return a.to_mpq() < b.to_mpq();
}

std::size_t Scalar::hash() const {
  if (!big_) return std::hash<std::int64_t>()(num_) * 1000003u ^ std::hash<std::int64_t>()(den_);
  return std::hash<std::string>()(big_->get_str());
}

std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

Ring Ring::localized(long p) {
  if (!is_prime(p)) throw std::invalid_argument("localization requires a prime, got " + std::to_string(p));
  return Ring(Kind::Local, p);
}

Ring Ring::parse(std::string_view text) {
  std::string t(text);
  if (t == "Z") return integers();
  if (t == "Q") return rationals();
  std::string digits;
  if (t.rfind("Zp:", 0) == 0) digits = t.substr(3);
  else if (t.size() > 3 && t.rfind("Z(", 0) == 0 && t.back() == ')') digits = t.substr(2, t.size() - 3);
  else throw std::invalid_argument("unknown ring: " + t);
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("unknown ring: " + t);
  return localized(std::stol(digits));
}

std::string Ring::name() const {
  switch (kind_) {
    case Kind::Integers: return "Z";
    case Kind::Rationals: return "Q";
    case Kind::Local: return "Z(" + std::to_string(p_) + ")";
  }
  return "?";
}

bool Ring::contains(const Scalar& s) const {
  switch (kind_) {
    case Kind::Integers: return s.is_integer();
    case Kind::Rationals: return true;
    case Kind::Local:
      if (s.is_small()) return s.small_den() % p_ != 0;
      return mpz_divisible_ui_p(s.denominator().get_mpz_t(), static_cast<unsigned long>(p_)) == 0;
  }
  return false;
}

void Ring::check(const Scalar& s) const {
  if (!contains(s)) throw std::domain_error(s.str() + " is not an element of " + name());
}

bool Ring::is_unit(const Scalar& s) const {
  if (s.is_zero()) return false;
  switch (kind_) {
    case Kind::Integers: return s.is_small() && s.small_den() == 1 && (s.small_num() == 1 || s.small_num() == -1);
    case Kind::Rationals: return true;
    case Kind::Local: return s.valuation(p_) == 0;
  }
  return false;
}

Scalar Ring::unit_inverse(const Scalar& s) const {
  if (!is_unit(s)) throw std::domain_error(s.str() + " is not a unit in " + name());
  return Scalar(1) / s;
}

mpz_class Ring::pivot_norm(const Scalar& s) const {
  switch (kind_) {
    case Kind::Integers: return abs(s.numerator());
    case Kind::Rationals: return 0;
    case Kind::Local: return s.valuation(p_);
  }
  return 0;
}

bool Ring::divides(const Scalar& a, const Scalar& b) const {
  if (b.is_zero()) return true;
  if (a.is_zero()) return false;
  switch (kind_) {
    case Kind::Integers:
      if (a.is_small() && b.is_small()) return b.small_num() % a.small_num() == 0;
      return mpz_divisible_p(b.numerator().get_mpz_t(), a.numerator().get_mpz_t()) != 0;
    case Kind::Rationals: return true;
    case Kind::Local: return b.valuation(p_) >= a.valuation(p_);
  }
  return false;
}

Scalar Ring::quotient(const Scalar& b, const Scalar& a) const {
  if (kind_ == Kind::Integers) return Scalar::int_quotient(b, a);
  if (divides(a, b)) return b / a;
  return Scalar(0);
}

Scalar Ring::canonical_associate(const Scalar& s) const {
  if (s.is_zero()) return s;
  switch (kind_) {
    case Kind::Integers: return s.abs();
    case Kind::Rationals: return Scalar(1);
    case Kind::Local: {
      Scalar r(1);
      for (int i = 0; i < s.valuation(p_); ++i) r *= Scalar(static_cast<long long>(p_));
      return r;
    }
  }
  return s;
}

}  // namespace kht
