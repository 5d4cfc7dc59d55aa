#pragma once

// q-combinatorial primitives: q-numbers, q-factorials, Gaussian binomials,
// q-Pochhammer symbols and the W_n bound constants.

#include <cmath>
#include <cstdint>
#include <vector>

namespace qnormal {

// Deformation parameter q in (-1, 1]. q = 1 is the classical (Gaussian)
// limit; product-based code must branch on is_classical().
class QParam {
 public:
  explicit QParam(double q);

  double value() const noexcept { return q_; }
  bool is_classical() const noexcept { return q_ == 1.0; }

  friend bool operator==(const QParam&, const QParam&) = default;

 private:
  double q_;
};

// Controls for every infinite product or series in the library.
struct TruncationPolicy {
  double tail_tol = 1e-15;
  std::int64_t max_terms = 200000;
  std::int64_t min_terms = 8;

  void validate() const;
};

// Infinite products are only evaluated for |q| strictly below this cap.
inline constexpr double kMaxProductQ = 0.9995;

struct Infinite {};
inline constexpr Infinite infinity{};

double q_number(std::int64_t n, QParam q);
double q_factorial(std::int64_t n, QParam q);
// Gaussian binomial; 0 unless n >= k >= 0.
double q_binomial(std::int64_t n, std::int64_t k, QParam q);

// (a|q)_n = prod_{i<n} (1 - a q^i).
double q_pochhammer(double a, QParam q, std::int64_t n);
double q_pochhammer(double a, QParam q, Infinite, const TruncationPolicy& policy = {});

// W_n(q) = sum_i [n over i]_q.
double w_bound(std::int64_t n, QParam q);

// Yields W_0(q), W_1(q), ... using the q-Pascal rule, O(n) per step.
class WBoundSequence {
 public:
  explicit WBoundSequence(QParam q);
  double next();

 private:
  double q_;
  std::vector<double> row_;  // [n over i]_q for the last emitted n
};

// Rejects q values for which an infinite product cannot be evaluated:
// q = 1 (InfiniteProductAtQ1) and |q| >= kMaxProductQ (SlowConvergence).
void require_product_q(QParam q);

// Number of factors k = 0..K-1 to take from a product whose k-th factor
// differs from 1 by at most coeff_bound * |q|^k.
std::int64_t product_terms(QParam q, double coeff_bound, const TruncationPolicy& policy);

// Running product kept as mantissa * 2^exponent so long products of large
// or tiny factors never overflow before the final value is formed.
class ScaledProduct {
 public:
  void multiply(double f) {
    mantissa_ *= f;
    const double a = std::fabs(mantissa_);
    if (a > kHi || (a < kLo && a != 0.0)) renormalize();
  }
  void divide(double f) { multiply(1.0 / f); }
  double value() const { return std::ldexp(mantissa_, exponent_); }

 private:
  static constexpr double kHi = 0x1p+500;
  static constexpr double kLo = 0x1p-500;
  void renormalize() {
    int e = 0;
    mantissa_ = std::frexp(mantissa_, &e);
    exponent_ += e;
  }

  double mantissa_ = 1.0;
  long exponent_ = 0;
};

}  // namespace qnormal
