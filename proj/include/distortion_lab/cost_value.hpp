#pragma once

#include <compare>
#include <ostream>
#include <sstream>
#include <string>

#include "distortion_lab/rational.hpp"

namespace distortion_lab {

/// A non-negative cost: exact rational on rational metrics, floating point once
/// a Euclidean square root has entered the computation. Mixing the two
/// degrades to floating point.
class CostValue {
 public:
  CostValue() = default;

  static CostValue exact(Rational q) {
    CostValue c;
    c.q_ = std::move(q);
    return c;
  }
  static CostValue real(double x) {
    CostValue c;
    c.exact_ = false;
    c.x_ = x;
    return c;
  }

  bool is_exact() const { return exact_; }
  const Rational& rational() const {
    if (!exact_) throw Error("cost value is not exact");
    return q_;
  }
  double to_double() const { return exact_ ? distortion_lab::to_double(q_) : x_; }
  bool is_zero() const { return exact_ ? q_ == 0 : x_ == 0.0; }

  friend CostValue operator+(const CostValue& a, const CostValue& b) {
    if (a.exact_ && b.exact_) return exact(a.q_ + b.q_);
    return real(a.to_double() + b.to_double());
  }
  friend CostValue operator-(const CostValue& a, const CostValue& b) {
    if (a.exact_ && b.exact_) return exact(a.q_ - b.q_);
    return real(a.to_double() - b.to_double());
  }
  friend CostValue operator*(const CostValue& a, const Rational& s) {
    if (a.exact_) return exact(a.q_ * s);
    return real(a.x_ * distortion_lab::to_double(s));
  }
  friend CostValue operator/(const CostValue& a, const Rational& s) {
    if (a.exact_) return exact(a.q_ / s);
    return real(a.x_ / distortion_lab::to_double(s));
  }
  /// Ratio of two costs; the divisor must be non-zero.
  friend CostValue operator/(const CostValue& a, const CostValue& b) {
    if (b.is_zero()) throw Error("division by a zero cost");
    if (a.exact_ && b.exact_) return exact(a.q_ / b.q_);
    return real(a.to_double() / b.to_double());
  }
  CostValue& operator+=(const CostValue& o) { return *this = *this + o; }

  friend std::partial_ordering operator<=>(const CostValue& a, const CostValue& b) {
    if (a.exact_ && b.exact_) {
      if (a.q_ < b.q_) return std::partial_ordering::less;
      if (b.q_ < a.q_) return std::partial_ordering::greater;
      return std::partial_ordering::equivalent;
    }
    return a.to_double() <=> b.to_double();
  }
  friend bool operator==(const CostValue& a, const CostValue& b) { return (a <=> b) == 0; }

  /// "p/q" when exact, shortest round-trip decimal otherwise.
  std::string str() const {
    if (exact_) return format_rational(q_);
    std::ostringstream os;
    os.precision(17);
    os << x_;
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const CostValue& c) { return os << c.str(); }

 private:
  bool exact_ = true;
  Rational q_ = 0;
  double x_ = 0.0;
};

inline const CostValue& max_cost(const CostValue& a, const CostValue& b) { return (b > a) ? b : a; }

}  // namespace distortion_lab
