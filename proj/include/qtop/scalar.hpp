#pragma once

// Exact arithmetic in the cyclotomic field Q(zeta_{4r}) for odd r >= 3.
//
// The field houses everything the quantum-group constructions need at once:
// q = zeta^4 (a primitive r-th root of unity), i = zeta^r, and sqrt(r) (built
// from a quadratic Gauss sum). Elements are stored in canonical reduced form
// on the power basis zeta^0 .. zeta^{phi(4r)-1}, so equality is coefficient
// equality.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtop/rational.hpp"

namespace qtop {

class FieldContext;
using FieldPtr = std::shared_ptr<const FieldContext>;

namespace detail {

// Dense polynomial over Q, lowest degree first.
using Poly = std::vector<Rational>;

inline void poly_trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

// Exact division, asserts zero remainder.
inline Poly poly_div(Poly num, const Poly& den) {
  Poly quot(num.size() >= den.size() ? num.size() - den.size() + 1 : 0, Rational(0));
  while (num.size() >= den.size() && !num.empty()) {
    Rational c = num.back() / den.back();
    std::size_t shift = num.size() - den.size();
    quot[shift] = c;
    for (std::size_t k = 0; k < den.size(); ++k) num[shift + k] -= c * den[k];
    poly_trim(num);
  }
  if (!num.empty()) throw std::logic_error("poly_div: nonzero remainder");
  return quot;
}

// n-th cyclotomic polynomial via x^n - 1 divided by Phi_d for proper d | n.
inline Poly cyclotomic(unsigned n) {
  Poly p(n + 1, Rational(0));
  p[0] = -1;
  p[n] = 1;
  for (unsigned d = 1; d < n; ++d) {
    if (n % d == 0) p = poly_div(std::move(p), cyclotomic(d));
  }
  return p;
}

}  // namespace detail

/// An element of Q(zeta_{4r}), always reduced modulo the 4r-th cyclotomic
/// polynomial. Immutable in practice: operations return new values.
class CycScalar {
 public:
  CycScalar() = default;
  CycScalar(FieldPtr ctx, std::vector<Rational> coeffs);

  const FieldPtr& ctx() const { return ctx_; }
  const std::vector<Rational>& coeffs() const { return coeffs_; }

  bool is_zero() const {
    for (const auto& c : coeffs_)
      if (c != 0) return false;
    return true;
  }
  bool is_rational() const {
    for (std::size_t k = 1; k < coeffs_.size(); ++k)
      if (coeffs_[k] != 0) return false;
    return true;
  }
  /// Valid only when is_rational().
  const Rational& rational_part() const { return coeffs_[0]; }

  CycScalar operator-() const;
  CycScalar& operator+=(const CycScalar& o);
  CycScalar& operator-=(const CycScalar& o);
  CycScalar& operator*=(const CycScalar& o);
  CycScalar& operator/=(const CycScalar& o);
  CycScalar inverse() const;
  CycScalar pow(long e) const;

  friend CycScalar operator+(CycScalar a, const CycScalar& b) { return a += b; }
  friend CycScalar operator-(CycScalar a, const CycScalar& b) { return a -= b; }
  friend CycScalar operator*(CycScalar a, const CycScalar& b) { return a *= b; }
  friend CycScalar operator/(CycScalar a, const CycScalar& b) { return a /= b; }
  friend bool operator==(const CycScalar& a, const CycScalar& b) {
    return a.coeffs_ == b.coeffs_;
  }
  friend bool operator!=(const CycScalar& a, const CycScalar& b) { return !(a == b); }

  /// Floating-point value at zeta = exp(2*pi*i/4r). Reporting only.
  std::complex<double> approx() const;

  std::string str() const;

 private:
  FieldPtr ctx_;
  std::vector<Rational> coeffs_;  // length phi(4r), power basis
};

/// Shared, read-only context for one choice of odd r: the reduction data of
/// Q(zeta_{4r}) plus the named constants and quantum-integer notation.
class FieldContext : public std::enable_shared_from_this<FieldContext> {
 public:
  /// Builds the context for an odd r >= 3. Throws std::invalid_argument otherwise.
  static FieldPtr make(long r);

  long r() const { return r_; }
  long order() const { return 4 * r_; }
  std::size_t degree() const { return degree_; }
  const detail::Poly& minimal_polynomial() const { return minpoly_; }

  CycScalar zero() const { return scalar_from(std::vector<Rational>(degree_, Rational(0))); }
  CycScalar one() const { return from_rational(1); }
  CycScalar from_rational(Rational x) const {
    x.canonicalize();  // two-argument mpq construction does not canonicalize
    std::vector<Rational> c(degree_, Rational(0));
    c[0] = std::move(x);
    return scalar_from(std::move(c));
  }
  CycScalar from_int(long n) const { return from_rational(Rational(n)); }

  /// zeta^k for any integer k (reduced mod 4r).
  CycScalar zeta_pow(long k) const;
  /// q^k with q = zeta^4 = e^{2 pi i / r}.
  CycScalar q_pow(long k) const { return zeta_pow(4 * mod(k, r_)); }
  /// i^k with i = zeta^r.
  CycScalar i_pow(long k) const { return zeta_pow(r_ * mod(k, 4)); }
  CycScalar q() const { return q_pow(1); }
  CycScalar imag_unit() const { return i_pow(1); }

  /// {k} = q^k - q^{-k}
  CycScalar qbrace(long k) const { return q_pow(k) - q_pow(-k); }
  /// {k}' = q^k + q^{-k}
  CycScalar qbrace_prime(long k) const { return q_pow(k) + q_pow(-k); }
  /// [k] = {k}/{1}
  CycScalar qint(long k) const { return qbrace(k) / qbrace(1); }
  /// [k]! ; rejects negative k.
  CycScalar qfact(long k) const {
    if (k < 0) throw std::invalid_argument("qfact: negative argument");
    CycScalar acc = one();
    for (long j = 1; j <= k; ++j) acc *= qint(j);
    return acc;
  }

  /// The square root of r with positive real value, built once from the
  /// quadratic Gauss sum sum_k q^{k^2} and cached.
  const CycScalar& sqrt_r() const { return sqrt_r_; }

  static long mod(long a, long m) {
    long v = a % m;
    return v < 0 ? v + m : v;
  }

 private:
  friend class CycScalar;
  FieldContext() = default;

  CycScalar scalar_from(std::vector<Rational> coeffs) const {
    return CycScalar(shared_from_this(), std::move(coeffs));
  }

  // Reduce a raw coefficient vector (any length < 4r) in place to degree_.
  void reduce(std::vector<Rational>& c) const;

  long r_ = 0;
  std::size_t degree_ = 0;
  detail::Poly minpoly_;
  // reduction_[k] = coefficients of zeta^{degree_+k} on the power basis
  std::vector<std::vector<Rational>> reduction_;
  CycScalar sqrt_r_;
};

inline CycScalar::CycScalar(FieldPtr ctx, std::vector<Rational> coeffs)
    : ctx_(std::move(ctx)), coeffs_(std::move(coeffs)) {
  assert(coeffs_.size() == ctx_->degree());
}

inline CycScalar CycScalar::operator-() const {
  CycScalar out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

inline CycScalar& CycScalar::operator+=(const CycScalar& o) {
  assert(ctx_ == o.ctx_);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  return *this;
}

inline CycScalar& CycScalar::operator-=(const CycScalar& o) {
  assert(ctx_ == o.ctx_);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
  return *this;
}

inline CycScalar& CycScalar::operator*=(const CycScalar& o) {
  assert(ctx_ == o.ctx_);
  const std::size_t n = coeffs_.size();
  std::vector<Rational> prod(2 * n - 1, Rational(0));
  for (std::size_t a = 0; a < n; ++a) {
    if (coeffs_[a] == 0) continue;
    for (std::size_t b = 0; b < n; ++b) {
      if (o.coeffs_[b] == 0) continue;
      prod[a + b] += coeffs_[a] * o.coeffs_[b];
    }
  }
  ctx_->reduce(prod);
  coeffs_ = std::move(prod);
  return *this;
}

inline CycScalar CycScalar::inverse() const {
  if (is_zero()) throw std::domain_error("CycScalar: division by zero");
  // Extended Euclid in Q[x] against the minimal polynomial.
  detail::Poly r0 = ctx_->minimal_polynomial();
  detail::Poly r1(coeffs_);
  detail::poly_trim(r1);
  detail::Poly s0{}, s1{Rational(1)};  // coefficients of the input element
  while (!r1.empty()) {
    // quotient of r0 by r1
    detail::Poly q;
    detail::Poly rem = r0;
    while (rem.size() >= r1.size() && !rem.empty()) {
      Rational c = rem.back() / r1.back();
      std::size_t shift = rem.size() - r1.size();
      if (q.size() < shift + 1) q.resize(shift + 1, Rational(0));
      q[shift] += c;
      for (std::size_t k = 0; k < r1.size(); ++k) rem[shift + k] -= c * r1[k];
      detail::poly_trim(rem);
    }
    // (r0, r1) <- (r1, rem); (s0, s1) <- (s1, s0 - q*s1)
    detail::Poly s2 = s0;
    if (s2.size() < q.size() + s1.size()) s2.resize(q.size() + s1.size(), Rational(0));
    for (std::size_t a = 0; a < q.size(); ++a) {
      if (q[a] == 0) continue;
      for (std::size_t b = 0; b < s1.size(); ++b) s2[a + b] -= q[a] * s1[b];
    }
    detail::poly_trim(s2);
    r0 = std::move(r1);
    r1 = std::move(rem);
    s0 = std::move(s1);
    s1 = std::move(s2);
  }
  // r0 is the gcd, a nonzero constant since the minimal polynomial is irreducible.
  if (r0.size() != 1) throw std::logic_error("CycScalar: gcd not constant");
  std::vector<Rational> out(ctx_->degree(), Rational(0));
  for (std::size_t k = 0; k < s0.size(); ++k) out[k] = s0[k] / r0[0];
  return CycScalar(ctx_, std::move(out));
}

inline CycScalar& CycScalar::operator/=(const CycScalar& o) { return *this *= o.inverse(); }

inline CycScalar CycScalar::pow(long e) const {
  CycScalar base = e < 0 ? inverse() : *this;
  unsigned long n = e < 0 ? -(unsigned long)e : (unsigned long)e;
  CycScalar acc = ctx_->one();
  while (n) {
    if (n & 1) acc *= base;
    base *= base;
    n >>= 1;
  }
  return acc;
}

inline std::complex<double> CycScalar::approx() const {
  const double theta = 2.0 * std::numbers::pi / double(ctx_->order());
  const std::complex<double> zeta = std::polar(1.0, theta);
  std::complex<double> acc = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * zeta + to_double(coeffs_[k]);
  return acc;
}

inline std::string CycScalar::str() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (coeffs_[k] == 0) continue;
    if (!first) os << " + ";
    os << to_string(coeffs_[k]);
    if (k > 0) os << "*z^" << k;
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

inline void FieldContext::reduce(std::vector<Rational>& c) const {
  for (std::size_t k = c.size(); k-- > degree_;) {
    if (c[k] == 0) continue;
    const auto& row = reduction_[k - degree_];
    for (std::size_t j = 0; j < degree_; ++j) c[j] += c[k] * row[j];
    c[k] = 0;
  }
  c.resize(degree_);
}

inline CycScalar FieldContext::zeta_pow(long k) const {
  long e = mod(k, 4 * r_);
  std::vector<Rational> c(degree_, Rational(0));
  if ((std::size_t)e < degree_) {
    c[e] = 1;
  } else {
    c = reduction_[e - degree_];
  }
  return scalar_from(std::move(c));
}

inline FieldPtr FieldContext::make(long r) {
  if (r < 3 || r % 2 == 0) throw std::invalid_argument("r must be odd >= 3");
  auto ctx = std::shared_ptr<FieldContext>(new FieldContext());
  ctx->r_ = r;
  ctx->minpoly_ = detail::cyclotomic(unsigned(4 * r));
  ctx->degree_ = ctx->minpoly_.size() - 1;
  // zeta^{degree} = -(lower part of minpoly); then push upward one power at a time.
  const std::size_t d = ctx->degree_;
  ctx->reduction_.resize(std::size_t(4 * r) - d);
  {
    std::vector<Rational> cur(d, Rational(0));
    for (std::size_t j = 0; j < d; ++j) cur[j] = -ctx->minpoly_[j];
    ctx->reduction_[0] = cur;
    for (std::size_t k = 1; k < ctx->reduction_.size(); ++k) {
      std::vector<Rational> next(d, Rational(0));
      // multiply by zeta
      Rational top = cur[d - 1];
      for (std::size_t j = d - 1; j > 0; --j) next[j] = cur[j - 1];
      next[0] = 0;
      if (top != 0)
        for (std::size_t j = 0; j < d; ++j) next[j] += top * ctx->reduction_[0][j];
      ctx->reduction_[k] = next;
      cur = std::move(next);
    }
  }
  // sqrt(r) from the quadratic Gauss sum: G = sum_k q^{k^2} equals sqrt(r) for
  // r = 1 mod 4 and i*sqrt(r) for r = 3 mod 4. Sign pinned by the numeric value.
  {
    CycScalar g = ctx->zero();
    for (long k = 0; k < r; ++k) g += ctx->q_pow(k * k);
    CycScalar s = (r % 4 == 1) ? g : g * ctx->i_pow(-1);
    if (s.approx().real() < 0) s = -s;
    if (s * s != ctx->from_int(r)) throw std::logic_error("gauss sqrt_r: square != r");
    ctx->sqrt_r_ = s;
  }
  return ctx;
}

/// Context factory matching the library entry point naming.
inline FieldPtr field_init(long r) { return FieldContext::make(r); }

}  // namespace qtop
