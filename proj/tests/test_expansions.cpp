#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qnormal/densities.hpp"
#include "qnormal/errors.hpp"
#include "qnormal/expansions.hpp"
#include "qnormal/orthopoly.hpp"
#include "qnormal/quadrature.hpp"

using namespace qnormal;

TEST_CASE("G series basics") {
  const QParam q(0.5);
  for (int k = 0; k <= 3; ++k)
    for (int l = 0; l <= 3; ++l)
      CHECK(g_series(k, l, GPoint{0.4, -1.1, 0.0, q}) ==
            doctest::Approx(q_hermite(k, 0.4, q) * q_hermite(l, -1.1, q)));
  // G_00 is the Mehler kernel f_CN(y|z,t) / f_N(y)
  const GPoint p{0.3, -0.2, 0.5, q};
  CHECK(g_series(0, 0, p) == doctest::Approx(f_CN(0.3, CondParams(-0.2, 0.5, q)) / f_N(0.3, q)).epsilon(1e-10));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-2.5, 2.5);
  for (int i = 0; i < 10; ++i) {
    const double y = U(rng), z = U(rng);
    CHECK(g_series(2, 1, GPoint{y, z, 0.35, q}) == doctest::Approx(g_series(1, 2, GPoint{z, y, 0.35, q})));
  }
  const auto rep = g_series_report(GEvalRequest{1, 1, p, {}});
  CHECK(rep.terms > 0);
  CHECK(rep.tail_estimate < 1e-14 * std::max(1.0, std::fabs(rep.value)));
  CHECK_THROWS_AS(g_series(0, 0, GPoint{0.0, 0.0, 0.3, QParam(1.0)}), Q1Unsupported);
  CHECK_THROWS_AS(g_series(0, 0, GPoint{0.0, 0.0, 1.0, q}), ParamOutOfRange);
}

TEST_CASE("G reductions") {
  const QParam q(0.5);
  const GPoint p{0.4, 0.1, 0.3, q};
  CHECK(g_reduce_kl(2, 1, 1, p) == doctest::Approx(g_series(2, 1, p)).epsilon(1e-9));
  const GPoint r{-0.8, 1.3, -0.45, QParam(0.2)};
  CHECK(g_reduce_kl(3, 0, 2, r) == doctest::Approx(g_series(3, 0, r)).epsilon(1e-9));
  CHECK(g_reduce_kl(3, 0, 3, r) == doctest::Approx(g_series(3, 0, r)).epsilon(1e-9));
  CHECK_THROWS_AS(g_reduce_kl(2, 0, 3, p), ParamOutOfRange);
  CHECK(g_closed_k0(0, p) == g_series(0, 0, p));
  const GPoint c{0.2, 0.5, 0.4, QParam(0.3)};
  CHECK(g_closed_k0(1, c) == doctest::Approx(g_series(1, 0, c)).epsilon(1e-9));
  CHECK(g_closed_k0(3, r) == doctest::Approx(g_series(3, 0, r)).epsilon(1e-8));
}

TEST_CASE("Theta polynomials") {
  const QParam q(0.5);
  for (int n = 0; n <= 3; ++n) {
    const auto a = theta_poly(0, n, 0.0, q);
    const auto b = theta_poly(n, 0, 0.0, q);
    for (double y : {-1.0, 0.6})
      for (double z : {-0.3, 1.7}) {
        CHECK(a(y, z) == doctest::Approx(q_hermite(n, z, q)).epsilon(1e-10).scale(1.0));
        CHECK(b(y, z) == doctest::Approx(q_hermite(n, y, q)).epsilon(1e-10).scale(1.0));
      }
  }
  // (z - t y)/(1 - t^2): already a y term at (k, l) = (0, 1)
  const double t = 0.2;
  const auto th01 = theta_poly(0, 1, t, q);
  CHECK(th01(0.3, -0.2) == doctest::Approx((-0.2 - t * 0.3) / (1 - t * t)).epsilon(1e-10));
  // with two extra degrees fitted, coefficients past total degree k + l vanish
  const auto th = theta_poly(2, 1, 0.3, q, 2);
  CHECK(th.residual < 1e-7);
  for (Eigen::Index i = 0; i < th.coeffs.rows(); ++i)
    for (Eigen::Index j = 0; j < th.coeffs.cols(); ++j)
      if (i + j > 3) CHECK(std::fabs(th.coeffs(i, j)) < 1e-8);
  CHECK(std::fabs(th.coeffs(3, 0)) > 1e-3);  // y-degree exceeds k
  CHECK_THROWS_AS(theta_poly(1, 1, 1.0, q), ParamOutOfRange);
}

TEST_CASE("g_n by quadrature and by structure") {
  const QParam q(0.5);
  const double y = 0.3, z = -0.2, r1 = 0.5, r2 = 0.4;
  CHECK(g_n_coeff(0, y, z, r1, r2, q).quadrature == doctest::Approx(1.0).epsilon(1e-12));
  const double mean = (r1 * (1 - r2 * r2) * y + r2 * (1 - r1 * r1) * z) / (1 - r1 * r1 * r2 * r2);
  CHECK(g_n_coeff(1, y, z, r1, r2, q).quadrature == doctest::Approx(mean).epsilon(1e-12));
  for (int n = 0; n <= 4; ++n) CHECK(std::fabs(g_n_coeff(n, y, z, r1, r2, q).difference()) < 1e-7);
  const auto all = g_n_all(4, y, z, r1, r2, q);
  CHECK(all[3] == doctest::Approx(g_n_coeff(3, y, z, r1, r2, q).quadrature));
}

TEST_CASE("expansion of the Askey-Wilson conditional") {
  const QParam q(0.5);
  CHECK(poisson_mehler_expand(0.1, 0.3, -0.2, 0.5, 0.4, q, 0) == doctest::Approx(f_N(0.1, q)));
  // with rho2 = 0 the partial sums are those of f_CN
  const int N = 8;
  double s = 0.0, fact = 1.0;
  for (int n = 0; n <= N; ++n) {
    if (n > 0) fact *= q_number(n, q);
    s += std::pow(0.5, n) * q_hermite(n, 0.3, q) * q_hermite(n, 0.1, q) / fact;
  }
  CHECK(poisson_mehler_expand(0.1, 0.3, -0.2, 0.5, 0.0, q, N) == doctest::Approx(s * f_N(0.1, q)).epsilon(1e-10));
  // converges to the density
  const MehlerExpansion m(30, 0.3, -0.2, 0.5, 0.4, q);
  for (double x : {-1.5, 0.1, 2.0})
    CHECK(m(x) == doctest::Approx(aw_conditional(x, 0.3, -0.2, 0.5, 0.4, q)).epsilon(1e-10));
  const MehlerExpansion m12(12, 0.3, -0.2, 0.5, 0.4, q);
  // twelve terms leave a truncation error of a few 1e-5 here
  const double e12 = std::fabs(m12(0.1) - aw_conditional(0.1, 0.3, -0.2, 0.5, 0.4, q));
  CHECK(e12 < 1e-4);
  const MehlerExpansion m20(20, 0.3, -0.2, 0.5, 0.4, q);
  CHECK(std::fabs(m20(0.1) - aw_conditional(0.1, 0.3, -0.2, 0.5, 0.4, q)) < 1e-6);
  CHECK(e12 > std::fabs(m(0.1) - aw_conditional(0.1, 0.3, -0.2, 0.5, 0.4, q)));
}

TEST_CASE("A coefficients") {
  const QParam q(0.5);
  const double L = 0.5, R = 0.4;
  for (int n = 1; n <= 6; ++n) CHECK(a_index(n).size() == static_cast<std::size_t>(((n + 2) / 2) * ((n + 3) / 2)));
  const auto a1 = solve_A(1, L, R, q, ARoute::linear_system);
  REQUIRE(a1.entries.size() == 2);
  const double den = 1 - L * L * R * R;
  // the r = 0 row: l = s + floor(n/2) counts the powers of rho_R
  CHECK(a1.at(0, 0) == doctest::Approx(L * (1 - R * R) / den));
  CHECK(a1.at(0, 1) == doctest::Approx(R * (1 - L * L) / den));
  for (int n = 1; n <= 4; ++n) {
    const auto lin = solve_A(n, L, R, q, ARoute::linear_system);
    const auto fit = solve_A(n, L, R, q, ARoute::interpolation_oracle);
    for (const auto& [key, v] : lin.entries) CHECK(fit.entries.at(key) == doctest::Approx(v).epsilon(1e-8).scale(1.0));
    // against the conditional expectation by quadrature
    for (auto [xl, xr] : std::vector<std::pair<double, double>>{{0.3, -0.2}, {-1.1, 0.9}}) {
      QuadratureSpec qs(q);
      const double direct =
          integrate([&](double x) { return q_hermite(n, x, q) * aw_conditional(x, xl, xr, L, R, q); }, qs).value;
      CHECK(lin.regression(xl, xr) == doctest::Approx(direct).epsilon(1e-9).scale(1.0));
    }
    for (int s = -n / 2; s <= -n / 2 + n; ++s)
      CHECK(lin.at(0, s) == doctest::Approx(a_closed_form(n, s, L, R, q)).epsilon(1e-10));
  }
  const auto a3 = solve_A(3, L, R, q, ARoute::linear_system);
  for (int s = 0; s <= 1; ++s) CHECK(a3.at(1, s) == doctest::Approx(-1.5 * L * R * a3.at(0, s)).epsilon(1e-10));
  CHECK_THROWS_AS(solve_A(2, 0.0, R, q, ARoute::linear_system), ParamOutOfRange);
  CHECK_THROWS_AS(solve_A(5, L, R, q, ARoute::linear_system), ParamOutOfRange);
  const nlohmann::json j = a1;
  CHECK(j["entries"].contains("0,0"));
}

TEST_CASE("two-sided conditional variance") {
  const QParam q(0.5);
  auto rep = cond_var_two_sided(0.3, -0.1, 0.5, 0.4, q);
  QuadratureSpec qs(q);
  auto f = [](double x) { return aw_conditional(x, 0.3, -0.1, 0.5, 0.4, QParam(0.5)); };
  const double m1 = integrate([&](double x) { return x * f(x); }, qs).value;
  const double m2 = integrate([&](double x) { return x * x * f(x); }, qs).value;
  CHECK(rep.oracle == doctest::Approx(m2 - m1 * m1).epsilon(1e-10));
  CHECK(rep.derived == doctest::Approx(rep.oracle).epsilon(1e-10));
  rep = cond_var_two_sided(0.3, -0.1, 0.5, 0.0, q);
  CHECK(rep.oracle == doctest::Approx(0.75).epsilon(1e-10));
  const double classical = 0.75 * 0.84 / (1 - 0.04);
  for (auto [a, b] : std::vector<std::pair<double, double>>{{0.3, -0.1}, {2.0, 1.0}})
    CHECK(cond_var_two_sided(a, b, 0.5, 0.4, QParam(1.0)).derived == doctest::Approx(classical));
}

TEST_CASE("conjecture probe") {
  const QParam q(0.5);
  for (int n = 1; n <= 5; ++n) {
    const auto rep = conjecture_probe(n, 0.5, 0.4, q);
    CHECK(rep.n == n);
    CHECK_FALSE(rep.entries.empty());
    for (const auto& e : rep.entries) {
      if (e.r == 0) CHECK(e.ratio == doctest::Approx(1.0));
      if (e.has_printed) CHECK(e.ratio == doctest::Approx(e.printed).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(conjecture_probe(7, 0.5, 0.4, q), ParamOutOfRange);
}
