#pragma once

#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace hiercubes {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Extended precision for iterations that sit on a repulsive fixed point,
// where double round-off is amplified geometrically.
using HighPrec = boost::multiprecision::cpp_bin_float_50;

// Compensated (Neumaier) summation.
class KahanSum {
 public:
  KahanSum() = default;
  explicit KahanSum(double init) : sum_(init) {}

  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  KahanSum& operator+=(double x) {
    add(x);
    return *this;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  if (x == kInf) return kInf;
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

/// x / (1 + x) given log x.
inline double logistic_from_log(double log_x) {
  if (log_x == -kInf) return 0.0;
  if (log_x >= 0) return 1.0 / (1.0 + std::exp(-log_x));
  const double x = std::exp(log_x);
  return x / (1.0 + x);
}

/// 1 / (1 + x) given log x.
inline double complement_from_log(double log_x) {
  if (log_x == -kInf) return 1.0;
  if (log_x <= 0) return 1.0 / (1.0 + std::exp(log_x));
  const double inv = std::exp(-log_x);
  return inv / (1.0 + inv);
}

/// x log x with 0 log 0 = 0.
inline double xlogx(double x) { return x > 0 ? x * std::log(x) : 0.0; }

/// Binary entropy term x log x + (1-x) log(1-x).
inline double bernoulli_neg_entropy(double x) { return xlogx(x) + xlogx(1.0 - x); }

inline HighPrec softplus(const HighPrec& x) {
  using boost::multiprecision::exp;
  using boost::multiprecision::log1p;
  if (x > 0) return x + log1p(exp(-x));
  return log1p(exp(x));
}

}  // namespace hiercubes
