#pragma once

// One-dimensional densities of the q-Normal family and their generating
// functions. Every function is pure; q = 1 dispatches to closed Gaussian forms.

#include <cstdint>

#include "qnormal/qseries.hpp"

namespace qnormal {

// S(q) = [-2/sqrt(1-q), 2/sqrt(1-q)] for |q| < 1, the real line for q = 1.
struct Support {
  QParam q;
  double lo;
  double hi;

  static Support of(QParam q);
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool bounded() const { return !q.is_classical(); }
  double width() const { return hi - lo; }
};

// Conditioning data (y, rho, q) of the conditional q-Normal law.
struct CondParams {
  double y;
  double rho;
  QParam q;

  CondParams(double y, double rho, QParam q);
};

// w_k(s, t, rho, q) of the Askey-Wilson product.
struct WFactorArgs {
  double s;
  double t;
  double rho;
  std::int64_t k;
};

double normal_pdf(double x, double mean, double variance);

// q-Normal density f_N(x|q).
double f_N(double x, QParam q, const TruncationPolicy& policy = {});

// (y, rho, q)-Conditional Normal density f_CN(x|y, rho, q).
double f_CN(double x, const CondParams& cond, const TruncationPolicy& policy = {});

double w_factor(const WFactorArgs& args, QParam q);

// phi(x, t|q) = sum_i t^i/[i]_q! H_i(x|q), in product form.
double phi_gen(double x, double t, QParam q, const TruncationPolicy& policy = {});

// tau(x, t|y, rho, q) = sum_i t^i/[i]_q! P_i(x|y, rho, q), in product form.
double tau_gen(double x, double t, const CondParams& cond, const TruncationPolicy& policy = {});

// Modified (t, q)-Normal density phi * f_N.
double f_MN(double x, double t, QParam q, const TruncationPolicy& policy = {});

// Modified (y, rho, t, q)-Conditional Normal density tau * f_CN.
double f_MCN(double x, double t, const CondParams& cond, const TruncationPolicy& policy = {});

// Conditional density of the middle coordinate of a three-step chain given
// both neighbours: a rescaled, normalised Askey-Wilson weight.
double aw_conditional(double x, double y, double z, double rho1, double rho2, QParam q,
                      const TruncationPolicy& policy = {});

// Largest ratio f_CN / f_N over x, y in S(q): (rho^2)_inf / (|rho|)_inf^4.
double fcn_envelope_constant(double rho, QParam q, const TruncationPolicy& policy = {});

}  // namespace qnormal
