#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qnormal/densities.hpp"
#include "qnormal/errors.hpp"
#include "qnormal/orthopoly.hpp"
#include "qnormal/quadrature.hpp"

using namespace qnormal;

namespace {

constexpr double kPi = std::numbers::pi;

double moment(const Integrand& f, int p, QParam q) {
  return integrate([&](double x) { return std::pow(x, p) * f(x); }, QuadratureSpec(q)).value;
}

}  // namespace

TEST_CASE("support") {
  const auto s = Support::of(QParam(0.75));
  CHECK(s.hi == doctest::Approx(4.0));
  CHECK(s.lo == doctest::Approx(-4.0));
  CHECK(s.bounded());
  CHECK_FALSE(Support::of(QParam(1.0)).bounded());
  CHECK(Support::of(QParam(1.0)).contains(1e6));
}

TEST_CASE("f_N special cases") {
  CHECK(f_N(0.0, QParam(0.0)) == doctest::Approx(1 / kPi).epsilon(1e-14));
  CHECK(f_N(0.0, QParam(1.0)) == doctest::Approx(0.3989422804).epsilon(1e-10));
  CHECK(f_N(5.0, QParam(0.0)) == 0.0);
  for (double x : {-1.9, -0.5, 1.2}) CHECK(f_N(x, QParam(0.0)) == doctest::Approx(std::sqrt(4 - x * x) / (2 * kPi)));
  CHECK(normal_pdf(1.0, 1.0, 4.0) == doctest::Approx(1 / std::sqrt(8 * kPi)));
}

TEST_CASE("f_N moments") {
  // E x^6 = 5 + 6q + 3q^2 + q^3 counts pairings weighted by crossings
  for (double qv : {-0.8, -0.3, 0.2, 0.6, 0.9}) {
    const QParam q(qv);
    auto f = [q](double x) { return f_N(x, q); };
    CHECK(moment(f, 0, q) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(moment(f, 2, q) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(moment(f, 4, q) == doctest::Approx(2 + qv).epsilon(1e-10));
    CHECK(moment(f, 6, q) == doctest::Approx(5 + 6 * qv + 3 * qv * qv + qv * qv * qv).epsilon(1e-9));
  }
}

TEST_CASE("f_CN special cases") {
  const QParam q(0.4);
  for (double x : {-1.5, 0.0, 0.7}) CHECK(f_CN(x, CondParams(0.3, 0.0, q)) == f_N(x, q));
  const double rho = 0.45, y = -0.8;
  for (double x : {-1.7, -0.2, 1.1}) {
    const double r2 = rho * rho;
    const double ref = (1 - r2) * std::sqrt(4 - x * x) /
                       (2 * kPi * ((1 - r2) * (1 - r2) - rho * (1 + r2) * x * y + r2 * (x * x + y * y)));
    CHECK(f_CN(x, CondParams(y, rho, QParam(0.0))) == doctest::Approx(ref).epsilon(1e-13));
  }
  CHECK_THROWS_AS(CondParams(0.0, 1.0, q), ParamOutOfRange);
  CHECK_THROWS_AS(CondParams(10.0, 0.3, q), ParamOutOfRange);
}

TEST_CASE("f_CN: normalization, mean and Mehler expansion") {
  for (double qv : {-0.5, 0.3, 0.8}) {
    const QParam q(qv);
    const double y = 0.6, rho = -0.55;
    const CondParams cp(y, rho, q);
    auto f = [&](double x) { return f_CN(x, cp); };
    CHECK(moment(f, 0, q) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(moment(f, 1, q) == doctest::Approx(rho * y).epsilon(1e-10));
    // truncated sum_n rho^n H_n(x) H_n(y) / [n]! reproduces f_CN / f_N
    for (double x : {-1.0, 0.2, 1.4}) {
      double s = 0.0, fact = 1.0;
      for (int n = 0; n <= 64; ++n) {
        if (n > 0) fact *= (1 - std::pow(qv, n)) / (1 - qv);
        s += std::pow(rho, n) * q_hermite(n, x, q) * q_hermite(n, y, q) / fact;
      }
      CHECK(f_CN(x, cp) == doctest::Approx(s * f_N(x, q)).epsilon(1e-10));
    }
  }
}

TEST_CASE("q = 1 closed forms") {
  const QParam q(1.0);
  CHECK(f_CN(0.3, CondParams(1.0, 0.5, q)) == doctest::Approx(normal_pdf(0.3, 0.5, 0.75)));
  CHECK(phi_gen(0.7, 0.4, q) == doctest::Approx(std::exp(0.7 * 0.4 - 0.08)));
  CHECK_THROWS_AS(fcn_envelope_constant(0.5, q), Q1Unsupported);
}

TEST_CASE("w_k") {
  const QParam q(0.5);
  CHECK(w_factor({0.3, -0.4, 0.0, 3}, q) == 1.0);
  CHECK(w_factor({0.3, -0.4, 0.6, 2}, QParam(0.0)) == 1.0);
  const double rho = 0.6;
  CHECK(w_factor({0.0, 0.0, rho, 2}, q) == doctest::Approx(std::pow(1 - rho * rho * std::pow(0.5, 4), 2)));
}

TEST_CASE("generating functions against their series") {
  for (double qv : {-0.4, 0.0, 0.5}) {
    const QParam q(qv);
    CHECK(phi_gen(0.3, 0.0, q) == 1.0);
    const CondParams cp(0.4, 0.5, q);
    CHECK(tau_gen(0.9, 0.0, cp) == 1.0);
    for (double t : {-0.3, 0.45}) {
      for (double x : {-1.2, 0.1, 1.3}) {
        double sp = 0.0, st = 0.0, fact = 1.0;
        for (int n = 0; n <= 60; ++n) {
          if (n > 0) fact *= (1 - std::pow(qv, n)) / (1 - qv);
          sp += std::pow(t, n) * q_hermite(n, x, q) / fact;
          st += std::pow(t, n) * al_salam_chihara(n, x, cp.y, cp.rho, q) / fact;
        }
        CHECK(phi_gen(x, t, q) == doctest::Approx(sp).epsilon(1e-11));
        CHECK(tau_gen(x, t, cp) == doctest::Approx(st).epsilon(1e-11));
        CHECK(tau_gen(x, t, CondParams(cp.y, 0.0, q)) == doctest::Approx(phi_gen(x, t, q)).epsilon(1e-14));
      }
    }
  }
  CHECK_THROWS_AS(phi_gen(0.0, 2.0, QParam(0.5)), ParamOutOfRange);
}

TEST_CASE("modified densities") {
  const QParam q(0.5);
  const double t = 0.4;
  CHECK(f_MN(0.3, 0.0, q) == doctest::Approx(f_N(0.3, q)));
  auto fm = [&](double x) { return f_MN(x, t, q); };
  CHECK(moment(fm, 0, q) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(moment(fm, 1, q) == doctest::Approx(t).epsilon(1e-10));
  CHECK(moment(fm, 2, q) == doctest::Approx(1 + t * t).epsilon(1e-10));
  // E X^4 from x^4 = H_4 + (3+2q+q^2) H_2 + (2+q) and E H_n = t^n
  CHECK(moment(fm, 4, q) == doctest::Approx(std::pow(t, 4) + 4.25 * t * t + 2.5).epsilon(1e-10));

  const CondParams cp(0.5, 0.6, q);
  CHECK(f_MCN(0.2, 0.0, cp) == doctest::Approx(f_CN(0.2, cp)));
  auto fmc = [&](double x) { return f_MCN(x, 0.3, cp); };
  CHECK(moment(fmc, 0, q) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(moment(fmc, 1, q) == doctest::Approx(0.6 * 0.5 + 0.64 * 0.3).epsilon(1e-10));
}

TEST_CASE("Askey-Wilson conditional") {
  const QParam q(0.5);
  const double y = 0.3, z = -0.2, r1 = 0.5, r2 = 0.4;
  for (double x : {-1.0, 0.4}) {
    CHECK(aw_conditional(x, y, z, r1, 0.0, q) == doctest::Approx(f_CN(x, CondParams(y, r1, q))));
    CHECK(aw_conditional(x, y, z, 0.0, r2, q) == doctest::Approx(f_CN(x, CondParams(z, r2, q))));
    // Bayes: f_CN(x|y) f_CN(z|x) / f_CN(z|y, r1 r2)
    const double bayes =
        f_CN(x, CondParams(y, r1, q)) * f_CN(z, CondParams(x, r2, q)) / f_CN(z, CondParams(y, r1 * r2, q));
    CHECK(aw_conditional(x, y, z, r1, r2, q) == doctest::Approx(bayes).epsilon(1e-12));
  }
  auto f = [&](double x) { return aw_conditional(x, y, z, r1, r2, q); };
  CHECK(moment(f, 0, q) == doctest::Approx(1.0).epsilon(1e-10));
  const double mean = (r1 * (1 - r2 * r2) * y + r2 * (1 - r1 * r1) * z) / (1 - r1 * r1 * r2 * r2);
  CHECK(moment(f, 1, q) == doctest::Approx(mean).epsilon(1e-10));
  // q = 1: Gaussian with the usual regression mean
  const double m1 = aw_conditional(mean, y, z, r1, r2, QParam(1.0));
  const double var = (1 - r1 * r1) * (1 - r2 * r2) / (1 - r1 * r1 * r2 * r2);
  CHECK(m1 == doctest::Approx(normal_pdf(mean, mean, var)));
}

TEST_CASE("f_CN <= C2 f_N") {
  for (double qv : {-0.6, 0.0, 0.5, 0.85})
    for (double rho : {-0.7, 0.3, 0.8}) {
      const QParam q(qv);
      const double c2 = fcn_envelope_constant(rho, q);
      const double c = 2 / std::sqrt(1 - qv);
      for (int i = 1; i < 40; ++i)
        for (int j = 0; j <= 40; ++j) {
          const double x = -c + 2 * c * i / 40.0, y = -c + 2 * c * j / 40.0;
          CHECK(f_CN(x, CondParams(y, rho, q)) <= c2 * f_N(x, q) * (1 + 1e-12));
        }
    }
}

TEST_CASE("q -> 1 trend") {
  for (double x : {-1.0, 0.0, 1.0}) CHECK(std::fabs(f_N(x, QParam(0.999)) - normal_pdf(x, 0, 1)) < 0.02);
}
