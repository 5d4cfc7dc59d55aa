#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <vector>

#include "qnormal/errors.hpp"
#include "qnormal/qseries.hpp"

using namespace qnormal;
using boost::multiprecision::cpp_rational;

TEST_CASE("q-numbers and factorials") {
  CHECK(q_number(0, QParam(0.3)) == 0.0);
  CHECK(q_number(3, QParam(1.0)) == 3.0);
  CHECK(q_number(3, QParam(0.5)) == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(q_factorial(0, QParam(-0.4)) == 1.0);
  CHECK(q_factorial(3, QParam(1.0)) == 6.0);
  CHECK(q_factorial(3, QParam(0.5)) == doctest::Approx(2.625).epsilon(1e-15));
  // long sums vs closed form
  const QParam q(0.7);
  CHECK(q_number(100, q) == doctest::Approx((1 - std::pow(0.7, 100)) / 0.3).epsilon(1e-14));
}

TEST_CASE("QParam and policy validation") {
  CHECK_THROWS_AS(QParam(1.5), ParamOutOfRange);
  CHECK_THROWS_AS(QParam(-1.0), ParamOutOfRange);
  CHECK(QParam(1.0).is_classical());
  CHECK_FALSE(QParam(0.999).is_classical());
  TruncationPolicy p;
  p.tail_tol = 0.0;
  CHECK_THROWS_AS(p.validate(), ParamOutOfRange);
  p = TruncationPolicy{};
  p.min_terms = p.max_terms + 1;
  CHECK_THROWS_AS(p.validate(), ParamOutOfRange);
}

TEST_CASE("Gaussian binomials") {
  CHECK(q_binomial(4, 5, QParam(0.3)) == 0.0);
  CHECK(q_binomial(4, -1, QParam(0.3)) == 0.0);
  CHECK(q_binomial(4, 2, QParam(1.0)) == 6.0);
  CHECK(q_binomial(4, 2, QParam(0.5)) == doctest::Approx(2.1875).epsilon(1e-15));
  for (double qv : {-0.8, -0.3, 0.0, 0.4, 0.9})
    for (int n = 0; n <= 20; ++n)
      for (int k = 0; k <= n; ++k) CHECK(q_binomial(n, k, QParam(qv)) == q_binomial(n, n - k, QParam(qv)));
}

TEST_CASE("Pascal rule against exact rational arithmetic") {
  // q = 1/2 and q = -2/3 as exact rationals
  for (auto [num, den] : std::vector<std::pair<int, int>>{{1, 2}, {-2, 3}}) {
    const cpp_rational qr(num, den);
    const QParam q(static_cast<double>(num) / den);
    std::vector<std::vector<cpp_rational>> B(13, std::vector<cpp_rational>(13, 0));
    for (int n = 0; n <= 12; ++n) {
      B[n][0] = 1;
      for (int k = 1; k <= n; ++k) {
        cpp_rational qk = 1;
        for (int i = 0; i < k; ++i) qk *= qr;
        B[n][k] = B[n - 1][k - 1] + qk * B[n - 1][k];
      }
    }
    for (int n = 0; n <= 12; ++n)
      for (int k = 0; k <= n; ++k) {
        const double exact = static_cast<double>(B[n][k]);
        CHECK(q_binomial(n, k, q) == doctest::Approx(exact).epsilon(1e-12));
      }
  }
}

TEST_CASE("finite Pochhammer and factorial relation") {
  CHECK(q_pochhammer(0.7, QParam(0.3), 0) == 1.0);
  for (double qv : {-0.6, 0.2, 0.8})
    for (int n = 0; n <= 15; ++n) {
      const QParam q(qv);
      CHECK(q_factorial(n, q) * std::pow(1 - qv, n) == doctest::Approx(q_pochhammer(qv, q, n)).epsilon(1e-12));
    }
}

TEST_CASE("infinite Pochhammer") {
  CHECK(q_pochhammer(0.5, QParam(0.0), infinity) == 0.5);
  // Euler's pentagonal number series for (q;q)_inf
  auto euler = [](double q) {
    double s = 1.0;
    for (int k = 1; k < 60; ++k) {
      const double sg = (k % 2) ? -1.0 : 1.0;
      s += sg * (std::pow(q, k * (3.0 * k - 1) / 2) + std::pow(q, k * (3.0 * k + 1) / 2));
    }
    return s;
  };
  CHECK(q_pochhammer(0.5, QParam(0.5), infinity) == doctest::Approx(0.2887880951).epsilon(1e-10));
  for (double qv : {-0.7, -0.2, 0.3, 0.5, 0.8})
    CHECK(q_pochhammer(qv, QParam(qv), infinity) == doctest::Approx(euler(qv)).epsilon(1e-13));
  // q-binomial theorem: 1/(a)_inf = sum a^n/(q)_n
  for (double a : {-0.6, 0.3, 0.7}) {
    const QParam q(0.6);
    double s = 0.0;
    for (int n = 0; n < 200; ++n) s += std::pow(a, n) / q_pochhammer(0.6, q, n);
    CHECK(1.0 / q_pochhammer(a, q, infinity) == doctest::Approx(s).epsilon(1e-13));
  }
}

TEST_CASE("product guards") {
  CHECK(q_pochhammer(0.0, QParam(1.0), infinity) == 1.0);
  CHECK_THROWS_AS(q_pochhammer(0.3, QParam(1.0), infinity), InfiniteProductAtQ1);
  CHECK_THROWS_AS(q_pochhammer(0.3, QParam(0.9995), infinity), SlowConvergence);
  CHECK_THROWS_AS(q_pochhammer(0.3, QParam(-0.9996), infinity), SlowConvergence);
  CHECK_NOTHROW(q_pochhammer(0.3, QParam(0.999), infinity));
  TruncationPolicy small;
  small.max_terms = 100;
  CHECK_THROWS_AS(q_pochhammer(0.3, QParam(0.99), infinity, small), SlowConvergence);
}

TEST_CASE("W_n bound constants") {
  CHECK(w_bound(0, QParam(0.2)) == 1.0);
  CHECK(w_bound(2, QParam(0.5)) == doctest::Approx(3.5));
  CHECK(w_bound(1, QParam(1.0)) == 2.0);
  WBoundSequence seq(QParam(-0.4));
  for (int n = 0; n <= 25; ++n) CHECK(seq.next() == doctest::Approx(w_bound(n, QParam(-0.4))).epsilon(1e-13));
}

TEST_CASE("generating series of W_n") {
  for (double qv : {-0.8, 0.0, 0.5, 0.8})
    for (double t : {-0.8, 0.3, 0.8}) {
      const QParam q(qv);
      WBoundSequence seq(q);
      double s1 = 0.0, s2 = 0.0;
      for (int i = 0; i < 400; ++i) {
        const double w = seq.next();
        const double c = std::pow(t, i) / q_pochhammer(qv, q, i);
        s1 += w * c;
        s2 += w * w * c;
      }
      const double pt = q_pochhammer(t, q, infinity);
      CHECK(s1 == doctest::Approx(1.0 / (pt * pt)).epsilon(1e-8));
      CHECK(s2 == doctest::Approx(q_pochhammer(t * t, q, infinity) / std::pow(pt, 4)).epsilon(1e-8));
    }
}

TEST_CASE("ScaledProduct survives overflow of intermediates") {
  ScaledProduct p;
  for (int i = 0; i < 10; ++i) p.multiply(1e200);
  for (int i = 0; i < 10; ++i) p.divide(1e200);
  CHECK(p.value() == doctest::Approx(1.0).epsilon(1e-12));
}
