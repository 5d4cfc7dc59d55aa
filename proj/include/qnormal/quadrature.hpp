#pragma once

// Adaptive integration over S(q). With the trigonometric transform the
// variable is x = (2/sqrt(1-q)) cos(theta), theta in [0, pi], which turns the
// square-root edge behaviour of the q-Normal family into smooth integrands.

#include <functional>
#include <span>
#include <vector>

#include "qnormal/qseries.hpp"

namespace qnormal {

enum class Transform { trigonometric, none };

struct QuadratureSpec {
  QParam q{0.0};
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  int max_subdivisions = 20000;
  Transform transform = Transform::trigonometric;
  // Half width of the integration window used for q = 1 (whole real line).
  double line_half_width = 40.0;

  explicit QuadratureSpec(QParam qp) : q(qp) {}
  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

struct VectorQuadratureResult {
  std::vector<double> values;
  std::vector<double> error_estimates;
  int panels = 0;
};

using Integrand = std::function<double(double)>;
// Writes count integrand values at x into out.
using VectorIntegrand = std::function<void(double x, std::span<double> out)>;

// Integral over S(q) (the real line when q = 1).
QuadratureResult integrate(const Integrand& f, const QuadratureSpec& spec);
// Integral over [a, b] intersected with S(q).
QuadratureResult integrate_interval(const Integrand& f, double a, double b, const QuadratureSpec& spec);
VectorQuadratureResult integrate_many(std::size_t count, const VectorIntegrand& f, const QuadratureSpec& spec);

double cdf(const Integrand& density, double x, const QuadratureSpec& spec);

// Integral of f(x, y) over S(q) x S(q).
QuadratureResult double_integrate(const std::function<double(double, double)>& f, const QuadratureSpec& spec);

// Support end points as used by the integrator.
double support_lo(const QuadratureSpec& spec);
double support_hi(const QuadratureSpec& spec);

}  // namespace qnormal
