#pragma once

#include <cmath>
#include <stdexcept>

namespace polygas {

/// Value in R united with +infinity. +infinity marks an incompatible pair.
/// The tag is explicit so that exp(-inf) = 0 and sums with infinite terms
/// never depend on IEEE sentinel arithmetic.
class ExtendedReal {
public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : finite_(true), value_(v) {}  // NOLINT: implicit by design

  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.finite_ = false;
    r.value_ = 0.0;
    return r;
  }

  constexpr bool is_finite() const { return finite_; }
  constexpr bool is_infinite() const { return !finite_; }

  // Finite value; throws on +infinity so silent sentinel reads cannot happen.
  double value() const {
    if (!finite_) throw std::logic_error("ExtendedReal: value() called on +infinity");
    return value_;
  }

  // exp(-x), with exp(-inf) = 0 exactly.
  double exp_neg() const { return finite_ ? std::exp(-value_) : 0.0; }

  // exp(-x) - 1, with the incompatible branch equal to -1 exactly.
  double expm1_neg() const { return finite_ ? std::expm1(-value_) : -1.0; }

  friend constexpr ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (!a.finite_ || !b.finite_) return infinity();
    return ExtendedReal(a.value_ + b.value_);
  }
  ExtendedReal& operator+=(ExtendedReal o) { return *this = *this + o; }

  friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.value_ == b.value_;
  }
  friend constexpr bool operator!=(ExtendedReal a, ExtendedReal b) { return !(a == b); }

  // Total order with +infinity as the greatest element.
  friend constexpr bool operator<(ExtendedReal a, ExtendedReal b) {
    if (!a.finite_) return false;
    if (!b.finite_) return true;
    return a.value_ < b.value_;
  }
  friend constexpr bool operator<=(ExtendedReal a, ExtendedReal b) { return a < b || a == b; }
  friend constexpr bool operator>(ExtendedReal a, ExtendedReal b) { return b < a; }
  friend constexpr bool operator>=(ExtendedReal a, ExtendedReal b) { return b <= a; }

private:
  bool finite_ = true;
  double value_ = 0.0;
};

}  // namespace polygas
