#include "qnormal/qseries.hpp"

#include <algorithm>
#include <string>

#include "qnormal/errors.hpp"

namespace qnormal {

QParam::QParam(double q) : q_(q) {
  if (!(q > -1.0 && q <= 1.0)) {
    throw ParamOutOfRange("q must lie in (-1, 1], got " + std::to_string(q));
  }
}

void TruncationPolicy::validate() const {
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw ParamOutOfRange("tail_tol must lie in (0, 1)");
  if (min_terms < 1 || max_terms < 1) throw ParamOutOfRange("term counts must be positive");
  if (min_terms > max_terms) throw ParamOutOfRange("min_terms exceeds max_terms");
}

double q_number(std::int64_t n, QParam q) {
  if (n <= 0) return 0.0;
  const double qv = q.value();
  if (q.is_classical()) return static_cast<double>(n);
  if (n <= 64) {
    double sum = 0.0;
    double p = 1.0;
    for (std::int64_t i = 0; i < n; ++i) {
      sum += p;
      p *= qv;
    }
    return sum;
  }
  return (1.0 - std::pow(qv, static_cast<double>(n))) / (1.0 - qv);
}

double q_factorial(std::int64_t n, QParam q) {
  double r = 1.0;
  for (std::int64_t i = 2; i <= n; ++i) r *= q_number(i, q);
  return r;
}

double q_binomial(std::int64_t n, std::int64_t k, QParam q) {
  if (!(n >= k && k >= 0)) return 0.0;
  // Same operation sequence for k and n - k keeps the symmetry exact.
  const std::int64_t j = std::min(k, n - k);
  double r = 1.0;
  for (std::int64_t i = 1; i <= j; ++i) {
    r *= q_number(n - j + i, q) / q_number(i, q);
  }
  return r;
}

double q_pochhammer(double a, QParam q, std::int64_t n) {
  double r = 1.0;
  double p = 1.0;
  for (std::int64_t i = 0; i < n; ++i) {
    r *= 1.0 - a * p;
    p *= q.value();
  }
  return r;
}

void require_product_q(QParam q) {
  if (q.is_classical()) throw InfiniteProductAtQ1("infinite q-product diverges at q = 1");
  if (std::fabs(q.value()) >= kMaxProductQ) {
    throw SlowConvergence("|q| = " + std::to_string(std::fabs(q.value())) +
                          " is at or above the infinite-product cap " + std::to_string(kMaxProductQ));
  }
}

std::int64_t product_terms(QParam q, double coeff_bound, const TruncationPolicy& policy) {
  const double aq = std::fabs(q.value());
  if (aq == 0.0 || coeff_bound == 0.0) return policy.min_terms;
  const double target = policy.tail_tol * (1.0 - aq);
  const double c = std::fabs(coeff_bound);
  std::int64_t k = 0;
  if (c >= target) k = static_cast<std::int64_t>(std::ceil(std::log(target / c) / std::log(aq)));
  // Guard against log rounding: step until the bound really holds.
  while (c * std::pow(aq, static_cast<double>(k)) >= target) ++k;
  k = std::max(k, policy.min_terms);
  if (k > policy.max_terms) {
    throw SlowConvergence("infinite product needs " + std::to_string(k) + " factors, max_terms is " +
                          std::to_string(policy.max_terms));
  }
  return k;
}

double q_pochhammer(double a, QParam q, Infinite, const TruncationPolicy& policy) {
  if (q.is_classical()) {
    if (a == 0.0) return 1.0;
    throw InfiniteProductAtQ1("(a|1)_inf diverges for a != 0");
  }
  require_product_q(q);
  const std::int64_t terms = product_terms(q, a, policy);
  ScaledProduct prod;
  double p = 1.0;
  for (std::int64_t i = 0; i < terms; ++i) {
    prod.multiply(1.0 - a * p);
    p *= q.value();
  }
  return prod.value();
}

double w_bound(std::int64_t n, QParam q) {
  double s = 0.0;
  for (std::int64_t i = 0; i <= n; ++i) s += q_binomial(n, i, q);
  return s;
}

WBoundSequence::WBoundSequence(QParam q) : q_(q.value()) {}

double WBoundSequence::next() {
  if (row_.empty()) {
    row_.push_back(1.0);
    return 1.0;
  }
  // [n over i] = [n-1 over i-1] + q^i [n-1 over i]
  std::vector<double> nxt(row_.size() + 1);
  nxt.front() = 1.0;
  nxt.back() = 1.0;
  double qi = q_;
  for (std::size_t i = 1; i < row_.size(); ++i) {
    nxt[i] = row_[i - 1] + qi * row_[i];
    qi *= q_;
  }
  row_ = std::move(nxt);
  double s = 0.0;
  for (double v : row_) s += v;
  return s;
}

}  // namespace qnormal
