#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aclab {

/// Exact decimal number, value = num / 10^exp.  Vertex weights and penalty
/// strengths are decimal strings in instance files; keeping them exact makes
/// weight comparisons and the w -> (h, J) -> w round trip bit-stable.
class Decimal {
 public:
  Decimal() = default;
  Decimal(long long units) : num_(units), exp_(0) {}

  static Decimal parse(std::string_view text) {
    Decimal d;
    bool neg = false;
    size_t i = 0;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      neg = text[i] == '-';
      ++i;
    }
    bool any_digit = false;
    long long num = 0;
    int exp = 0;
    bool after_point = false;
    for (; i < text.size(); ++i) {
      char c = text[i];
      if (c == '.') {
        if (after_point) throw std::invalid_argument("bad decimal: " + std::string(text));
        after_point = true;
        continue;
      }
      if (c < '0' || c > '9') throw std::invalid_argument("bad decimal: " + std::string(text));
      if (num > (1LL << 56)) throw std::invalid_argument("decimal too long: " + std::string(text));
      num = num * 10 + (c - '0');
      if (after_point) ++exp;
      any_digit = true;
    }
    if (!any_digit) throw std::invalid_argument("bad decimal: " + std::string(text));
    d.num_ = neg ? -num : num;
    d.exp_ = exp;
    d.normalize();
    return d;
  }

  /// num * 10^-exp, e.g. from_scaled(134, 2) == 1.34.
  static Decimal from_scaled(long long num, int exp) {
    Decimal d;
    d.num_ = num;
    d.exp_ = exp;
    d.normalize();
    return d;
  }

  double to_double() const {
    double v = static_cast<double>(num_);
    for (int i = 0; i < exp_; ++i) v /= 10.0;
    return v;
  }

  std::string str() const {
    long long a = num_ < 0 ? -num_ : num_;
    std::string digits = std::to_string(a);
    std::string out;
    if (num_ < 0) out += '-';
    if (exp_ == 0) {
      out += digits;
    } else {
      while (static_cast<int>(digits.size()) <= exp_) digits.insert(digits.begin(), '0');
      out += digits.substr(0, digits.size() - exp_);
      out += '.';
      out += digits.substr(digits.size() - exp_);
    }
    return out;
  }

  long long raw_num() const { return num_; }
  int raw_exp() const { return exp_; }
  bool is_zero() const { return num_ == 0; }
  bool is_positive() const { return num_ > 0; }

  friend Decimal operator+(Decimal a, Decimal b) {
    align(a, b);
    a.num_ += b.num_;
    a.normalize();
    return a;
  }
  friend Decimal operator-(Decimal a, Decimal b) {
    align(a, b);
    a.num_ -= b.num_;
    a.normalize();
    return a;
  }
  Decimal operator-() const { return from_scaled(-num_, exp_); }

  Decimal times(long long k) const { return from_scaled(num_ * k, exp_); }
  /// Division by two is always exact in decimal (multiply by 5, shift).
  Decimal half() const { return from_scaled(num_ * 5, exp_ + 1); }

  friend Decimal operator*(Decimal a, Decimal b) {
    return from_scaled(a.num_ * b.num_, a.exp_ + b.exp_);
  }

  friend bool operator==(Decimal a, Decimal b) {
    align(a, b);
    return a.num_ == b.num_;
  }
  friend bool operator!=(Decimal a, Decimal b) { return !(a == b); }
  friend bool operator<(Decimal a, Decimal b) {
    align(a, b);
    return a.num_ < b.num_;
  }
  friend bool operator>(Decimal a, Decimal b) { return b < a; }
  friend bool operator<=(Decimal a, Decimal b) { return !(b < a); }
  friend bool operator>=(Decimal a, Decimal b) { return !(a < b); }

 private:
  long long num_ = 0;
  int exp_ = 0;

  void normalize() {
    while (exp_ > 0 && num_ % 10 == 0) {
      num_ /= 10;
      --exp_;
    }
  }

  static void align(Decimal& a, Decimal& b) {
    while (a.exp_ < b.exp_) {
      if (std::abs(a.num_) > (1LL << 59)) throw std::overflow_error("decimal overflow");
      a.num_ *= 10;
      ++a.exp_;
    }
    while (b.exp_ < a.exp_) {
      if (std::abs(b.num_) > (1LL << 59)) throw std::overflow_error("decimal overflow");
      b.num_ *= 10;
      ++b.exp_;
    }
  }
};

}  // namespace aclab
