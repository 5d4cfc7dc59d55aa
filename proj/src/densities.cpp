#include "qnormal/densities.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qnormal/errors.hpp"

namespace qnormal {
namespace {

constexpr double kEdgeSlack = 1e-12;

void check_rho(double rho) {
  if (!(std::fabs(rho) < 1.0)) throw ParamOutOfRange("|rho| must be < 1, got " + std::to_string(rho));
}

// Membership in S(q) with a relative slack for values computed at the edge.
bool in_support(double x, QParam q) {
  if (q.is_classical()) return std::isfinite(x);
  return (1.0 - q.value()) * x * x <= 4.0 * (1.0 + kEdgeSlack);
}

void check_in_support(double v, QParam q, const char* name) {
  if (!in_support(v, q)) throw OutOfSupport(std::string(name) + " lies outside S(q)");
}

void check_t(double t, QParam q) {
  if (!((1.0 - q.value()) * t * t < 1.0)) throw ParamOutOfRange("need (1-q) t^2 < 1");
}

// Radicand 4 - (1-q)x^2 of the k = 0 density factor; <= 0 off the support.
double radicand(double x, QParam q) { return 4.0 - (1.0 - q.value()) * x * x; }

double w_value(double s, double t, double rho, double one_minus_q, double qk) {
  const double r2q2k = rho * rho * qk * qk;
  const double a = 1.0 - r2q2k;
  return a * a - one_minus_q * rho * qk * (1.0 + r2q2k) * s * t + one_minus_q * r2q2k * (s * s + t * t);
}

// Leading factor sqrt(1-q) sqrt(4-(1-q)x^2)/(2 pi) left after cancelling the
// k = 0 density factor against the radicand in the denominator.
double edge_prefactor(double rad, QParam q) {
  return std::sqrt(1.0 - q.value()) * std::sqrt(rad) / (2.0 * std::numbers::pi);
}

}  // namespace

Support Support::of(QParam q) {
  if (q.is_classical()) {
    const double inf = std::numeric_limits<double>::infinity();
    return Support{q, -inf, inf};
  }
  const double c = 2.0 / std::sqrt(1.0 - q.value());
  return Support{q, -c, c};
}

CondParams::CondParams(double y_, double rho_, QParam q_) : y(y_), rho(rho_), q(q_) {
  check_rho(rho);
  check_in_support(y, q, "y");
}

double normal_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

double f_N(double x, QParam q, const TruncationPolicy& policy) {
  if (q.is_classical()) return normal_pdf(x, 0.0, 1.0);
  require_product_q(q);
  const double rad = radicand(x, q);
  if (rad <= 0.0) return 0.0;
  const double qv = q.value();
  const double omq = 1.0 - qv;
  const std::int64_t terms = product_terms(q, 8.0, policy);
  ScaledProduct prod;
  prod.multiply(edge_prefactor(rad, q) * omq);  // k = 0: (1 - q^{1})
  double qk = qv;
  for (std::int64_t k = 1; k < terms; ++k) {
    const double a = 1.0 + qk;
    prod.multiply((1.0 - qk * qv) * (a * a - omq * x * x * qk));
    qk *= qv;
  }
  return prod.value();
}

double f_CN(double x, const CondParams& cond, const TruncationPolicy& policy) {
  const QParam q = cond.q;
  const double y = cond.y;
  const double rho = cond.rho;
  if (q.is_classical()) return normal_pdf(x, rho * y, 1.0 - rho * rho);
  if (rho == 0.0) return f_N(x, q, policy);
  require_product_q(q);
  const double rad = radicand(x, q);
  if (rad <= 0.0) return 0.0;
  const double qv = q.value();
  const double omq = 1.0 - qv;
  const std::int64_t terms = product_terms(q, 32.0, policy);
  ScaledProduct prod;
  prod.multiply(edge_prefactor(rad, q) * (1.0 - rho * rho) * omq / w_value(x, y, rho, omq, 1.0));
  double qk = qv;
  for (std::int64_t k = 1; k < terms; ++k) {
    const double a = 1.0 + qk;
    prod.multiply((1.0 - rho * rho * qk) * (1.0 - qk * qv) * (a * a - omq * x * x * qk));
    prod.divide(w_value(x, y, rho, omq, qk));
    qk *= qv;
  }
  return prod.value();
}

double w_factor(const WFactorArgs& args, QParam q) {
  check_rho(args.rho);
  if (args.k < 0) throw ParamOutOfRange("k must be nonnegative");
  const double qk = std::pow(q.value(), static_cast<double>(args.k));
  return w_value(args.s, args.t, args.rho, 1.0 - q.value(), qk);
}

double phi_gen(double x, double t, QParam q, const TruncationPolicy& policy) {
  check_t(t, q);
  check_in_support(x, q, "x");
  if (q.is_classical()) return std::exp(x * t - 0.5 * t * t);
  require_product_q(q);
  const double qv = q.value();
  const double omq = 1.0 - qv;
  const std::int64_t terms = product_terms(q, 3.0, policy);
  ScaledProduct prod;
  double qk = 1.0;
  for (std::int64_t k = 0; k < terms; ++k) {
    prod.divide(1.0 - omq * x * t * qk + omq * t * t * qk * qk);
    qk *= qv;
  }
  return prod.value();
}

double tau_gen(double x, double t, const CondParams& cond, const TruncationPolicy& policy) {
  const QParam q = cond.q;
  check_t(t, q);
  check_in_support(x, q, "x");
  const double y = cond.y;
  const double rho = cond.rho;
  if (q.is_classical()) return std::exp(t * (x - rho * y) - 0.5 * t * t * (1.0 - rho * rho));
  require_product_q(q);
  const double qv = q.value();
  const double omq = 1.0 - qv;
  const std::int64_t terms = product_terms(q, 6.0, policy);
  ScaledProduct prod;
  double qk = 1.0;
  for (std::int64_t k = 0; k < terms; ++k) {
    const double t2 = t * t * qk * qk;
    prod.multiply(1.0 - omq * rho * y * t * qk + omq * rho * rho * t2);
    prod.divide(1.0 - omq * x * t * qk + omq * t2);
    qk *= qv;
  }
  return prod.value();
}

double f_MN(double x, double t, QParam q, const TruncationPolicy& policy) {
  check_t(t, q);
  if (!in_support(x, q)) return 0.0;
  const double base = f_N(x, q, policy);
  if (base == 0.0) return 0.0;
  return phi_gen(x, t, q, policy) * base;
}

double f_MCN(double x, double t, const CondParams& cond, const TruncationPolicy& policy) {
  check_t(t, cond.q);
  if (!in_support(x, cond.q)) return 0.0;
  const double base = f_CN(x, cond, policy);
  if (base == 0.0) return 0.0;
  return tau_gen(x, t, cond, policy) * base;
}

double aw_conditional(double x, double y, double z, double rho1, double rho2, QParam q,
                      const TruncationPolicy& policy) {
  check_rho(rho1);
  check_rho(rho2);
  check_in_support(y, q, "y");
  check_in_support(z, q, "z");
  if (q.is_classical()) {
    const double p2 = rho1 * rho1 * rho2 * rho2;
    const double mean = (y * rho1 * (1.0 - rho2 * rho2) + z * rho2 * (1.0 - rho1 * rho1)) / (1.0 - p2);
    const double var = (1.0 - rho1 * rho1) * (1.0 - rho2 * rho2) / (1.0 - p2);
    return normal_pdf(x, mean, var);
  }
  // a zero correlation decouples one neighbour entirely
  if (rho2 == 0.0) return f_CN(x, CondParams(y, rho1, q), policy);
  if (rho1 == 0.0) return f_CN(x, CondParams(z, rho2, q), policy);
  require_product_q(q);
  const double rad = radicand(x, q);
  if (rad <= 0.0) return 0.0;
  const double qv = q.value();
  const double omq = 1.0 - qv;
  const double r12 = rho1 * rho2;
  const double a1 = rho1 * rho1;
  const double a2 = rho2 * rho2;
  const double a12 = r12 * r12;
  const std::int64_t terms = product_terms(q, 64.0, policy);
  ScaledProduct prod;
  prod.multiply(edge_prefactor(rad, q));
  double qk = 1.0;
  for (std::int64_t k = 0; k < terms; ++k) {
    // f_N factor for k >= 1 (k = 0 is folded into the prefactor), then the
    // (rho1^2, rho2^2)_inf / (rho1^2 rho2^2)_inf prefactor and the w ratio.
    double fn = 1.0 - qk * qv;
    if (k > 0) {
      const double a = 1.0 + qk;
      fn *= a * a - omq * x * x * qk;
    }
    prod.multiply(fn * (1.0 - a1 * qk) * (1.0 - a2 * qk) / (1.0 - a12 * qk));
    prod.multiply(w_value(y, z, r12, omq, qk));
    prod.divide(w_value(x, y, rho1, omq, qk) * w_value(x, z, rho2, omq, qk));
    qk *= qv;
  }
  return prod.value();
}

double fcn_envelope_constant(double rho, QParam q, const TruncationPolicy& policy) {
  check_rho(rho);
  if (q.is_classical()) throw Q1Unsupported("f_CN / f_N is unbounded at q = 1");
  const double a = std::fabs(rho);
  const double p = q_pochhammer(a, q, infinity, policy);
  return q_pochhammer(rho * rho, q, infinity, policy) / (p * p * p * p);
}

}  // namespace qnormal
