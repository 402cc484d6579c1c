#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace mqsim {

// Exact rational time. Every operation is exact; nothing here ever rounds.
class Time {
 public:
  using Rep = boost::multiprecision::cpp_rational;

  Time() : v_(0) {}
  Time(long long n) : v_(n) {}
  Time(long long num, long long den) {
    if (den == 0) throw std::invalid_argument("Time: zero denominator");
    boost::multiprecision::cpp_int n(num), d(den);
    if (d < 0) {
      n = -n;
      d = -d;
    }
    v_ = Rep(n, d);
  }
  explicit Time(Rep v) : v_(std::move(v)) {}

  // Accepts "p" or "p/q" with optional leading '-' on p.
  static std::optional<Time> parse(std::string_view s) {
    auto is_int = [](std::string_view t) {
      if (!t.empty() && t.front() == '-') t.remove_prefix(1);
      if (t.empty()) return false;
      for (char c : t)
        if (c < '0' || c > '9') return false;
      return true;
    };
    auto slash = s.find('/');
    std::string_view num = s.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : s.substr(slash + 1);
    if (!is_int(num) || !is_int(den) || den.front() == '-') return std::nullopt;
    boost::multiprecision::cpp_int n{std::string(num)};
    boost::multiprecision::cpp_int d{std::string(den)};
    if (d == 0) return std::nullopt;
    return Time(Rep(n, d));
  }

  std::string num_str() const { return numerator(v_).str(); }
  std::string den_str() const { return denominator(v_).str(); }

  // "p" when integral, else "p/q" in lowest terms with q > 0.
  std::string str() const {
    if (denominator(v_) == 1) return num_str();
    return num_str() + "/" + den_str();
  }

  const Rep& raw() const { return v_; }
  bool is_zero() const { return v_.is_zero(); }
  int sign() const { return v_.sign(); }

  friend Time operator+(const Time& a, const Time& b) { return Time(Rep(a.v_ + b.v_)); }
  friend Time operator-(const Time& a, const Time& b) { return Time(Rep(a.v_ - b.v_)); }
  friend Time operator*(const Time& a, const Time& b) { return Time(Rep(a.v_ * b.v_)); }
  friend Time operator/(const Time& a, const Time& b) {
    if (b.is_zero()) throw std::invalid_argument("Time: division by zero");
    return Time(Rep(a.v_ / b.v_));
  }
  Time operator-() const { return Time(Rep(-v_)); }

  Time& operator+=(const Time& o) { v_ += o.v_; return *this; }
  Time& operator-=(const Time& o) { v_ -= o.v_; return *this; }
  Time& operator*=(const Time& o) { v_ *= o.v_; return *this; }

  friend bool operator==(const Time& a, const Time& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Time& a, const Time& b) { return a.v_ != b.v_; }
  friend bool operator<(const Time& a, const Time& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Time& a, const Time& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Time& a, const Time& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Time& a, const Time& b) { return a.v_ >= b.v_; }

 private:
  Rep v_;
};

inline Time abs(const Time& t) { return t.sign() < 0 ? -t : t; }
inline const Time& min(const Time& a, const Time& b) { return b < a ? b : a; }
inline const Time& max(const Time& a, const Time& b) { return a < b ? b : a; }

}  // namespace mqsim
