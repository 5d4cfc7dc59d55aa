#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qnormal/densities.hpp"
#include "qnormal/errors.hpp"
#include "qnormal/orthopoly.hpp"
#include "qnormal/quadrature.hpp"

using namespace qnormal;

TEST_CASE("q-Normal normalization and orthogonality") {
  QuadratureSpec spec(QParam(0.5));
  CHECK(integrate([](double x) { return f_N(x, QParam(0.5)); }, spec).value == doctest::Approx(1.0).epsilon(1e-10));
  const auto h33 = integrate(
      [](double x) {
        const double h = q_hermite(3, x, QParam(0.5));
        return h * h * f_N(x, QParam(0.5));
      },
      spec);
  CHECK(h33.value == doctest::Approx(2.625).epsilon(1e-10));
  const auto h24 = integrate(
      [](double x) { return q_hermite(2, x, QParam(0.5)) * q_hermite(4, x, QParam(0.5)) * f_N(x, QParam(0.5)); },
      spec);
  CHECK(std::fabs(h24.value) < 1e-10);
}

TEST_CASE("semicircle moments are Catalan numbers") {
  QuadratureSpec spec(QParam(0.0));
  double catalan = 1.0;
  int hits = 0, cases = 0;
  for (int n = 0; n <= 10; ++n) {
    if (n > 0) catalan = catalan * 2 * (2 * n - 1) / (n + 1);
    const auto r = integrate([n](double x) { return std::pow(x, 2 * n) * std::sqrt(4 - x * x) / (2 * std::numbers::pi); },
                             spec);
    CHECK(r.value == doctest::Approx(catalan).epsilon(1e-10));
    // odd moments vanish
    const auto odd = integrate(
        [n](double x) { return std::pow(x, 2 * n + 1) * std::sqrt(4 - x * x) / (2 * std::numbers::pi); }, spec);
    CHECK(std::fabs(odd.value) < 1e-10);
    ++cases;
    if (std::fabs(r.value - catalan) <= std::max(r.error_estimate, 1e-14 * catalan)) ++hits;
  }
  // the estimate should cover the true error nearly always
  CHECK(hits >= 0.95 * cases);
}

TEST_CASE("raw-x transform and intervals") {
  QuadratureSpec spec(QParam(0.0));
  spec.transform = Transform::none;
  const auto r = integrate([](double x) { return x * x; }, spec);
  CHECK(r.value == doctest::Approx(16.0 / 3.0).epsilon(1e-12));
  QuadratureSpec trig(QParam(0.0));
  CHECK(integrate_interval([](double x) { return x * x; }, -1.0, 1.0, trig).value ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-11));
  // clipped to the support
  CHECK(integrate_interval([](double) { return 1.0; }, -10.0, 0.0, trig).value == doctest::Approx(2.0).epsilon(1e-11));
  CHECK(integrate_interval([](double) { return 1.0; }, 3.0, 5.0, trig).value == 0.0);
}

TEST_CASE("cdf") {
  for (double qv : {-0.5, 0.0, 0.7}) {
    const QParam q(qv);
    QuadratureSpec spec(q);
    auto dens = [q](double x) { return f_N(x, q); };
    CHECK(cdf(dens, support_lo(spec), spec) == 0.0);
    CHECK(cdf(dens, support_hi(spec), spec) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cdf(dens, 0.0, spec) == doctest::Approx(0.5).epsilon(1e-10));
    double prev = 0.0;
    for (double x = support_lo(spec); x <= support_hi(spec); x += 0.25) {
      const double c = cdf(dens, x, spec);
      CHECK(c >= prev - 1e-14);
      prev = c;
    }
  }
}

TEST_CASE("q = 1 integrates over the line") {
  QuadratureSpec spec(QParam(1.0));
  CHECK(integrate([](double x) { return normal_pdf(x, 0, 1); }, spec).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(integrate([](double x) { return x * x * x * x * f_N(x, QParam(1.0)); }, spec).value ==
        doctest::Approx(3.0).epsilon(1e-11));
  // semicircle-free cdf: Phi(1)
  CHECK(cdf([](double x) { return normal_pdf(x, 0, 1); }, 1.0, spec) ==
        doctest::Approx(0.5 * std::erfc(-1.0 / std::numbers::sqrt2)).epsilon(1e-11));
}

TEST_CASE("vector integrands") {
  QuadratureSpec spec(QParam(0.3));
  const auto r = integrate_many(
      6,
      [](double x, std::span<double> out) {
        const double w = f_N(x, QParam(0.3));
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::pow(x, static_cast<double>(i)) * w;
      },
      spec);
  CHECK(r.values[0] == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(r.values[2] == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(r.values[4] == doctest::Approx(2.3).epsilon(1e-11));
  CHECK(std::fabs(r.values[1]) < 1e-12);
}

TEST_CASE("double integrals of the bivariate law") {
  const QParam q(0.5);
  const double rho = 0.6;
  QuadratureSpec spec(q);
  spec.abs_tol = 1e-11;
  spec.rel_tol = 1e-10;
  auto joint = [&](double x, double y) { return f_CN(x, CondParams(y, rho, q)) * f_N(y, q); };
  CHECK(double_integrate(joint, spec).value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(double_integrate([&](double x, double y) { return x * y * joint(x, y); }, spec).value ==
        doctest::Approx(rho).epsilon(1e-9));
  CHECK(double_integrate([&](double x, double y) { return q_hermite(2, x, q) * q_hermite(2, y, q) * joint(x, y); },
                         spec)
            .value == doctest::Approx(rho * rho * 1.5).epsilon(1e-9));
}

TEST_CASE("errors") {
  QuadratureSpec spec(QParam(0.5));
  spec.abs_tol = 0.0;
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, spec), ParamOutOfRange);
  QuadratureSpec tight(QParam(0.5));
  tight.max_subdivisions = 16;
  tight.abs_tol = 1e-300;
  tight.rel_tol = 1e-300;
  // a jump cannot be resolved in 16 panels
  CHECK_THROWS_AS(integrate([](double x) { return x > 0.1 ? 1.0 : 0.0; }, tight), ToleranceNotMet);
}
