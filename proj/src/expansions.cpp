#include "qnormal/expansions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qnormal/densities.hpp"
#include "qnormal/errors.hpp"
#include "qnormal/orthopoly.hpp"
#include "qnormal/quadrature.hpp"

namespace qnormal {
namespace {

constexpr double kSupportSlack = 1e-12;

double half_width(QParam q) { return q.is_classical() ? 3.0 : 2.0 / std::sqrt(1.0 - q.value()); }

// K interior Chebyshev-Gauss nodes scaled to S(q); never on the edge.
std::vector<double> cheb_nodes(int K, QParam q) {
  std::vector<double> v(K);
  const double c = half_width(q);
  for (int j = 0; j < K; ++j) v[j] = c * std::cos(std::numbers::pi * (2.0 * j + 1.0) / (2.0 * K));
  return v;
}

// Deterministic off-grid check points in the open interior.
double probe_point(int i, int salt, QParam q) {
  const double g = std::numbers::phi - 1.0;
  const double u = std::fmod(0.137 * (salt + 1) + g * (i + 1), 1.0);
  return half_width(q) * std::cos(std::numbers::pi * (0.02 + 0.96 * u));
}

double q_pow_binom2(QParam q, int i) { return std::pow(q.value(), i * (i - 1) / 2); }

double sign(int i) { return (i % 2 == 0) ? 1.0 : -1.0; }

double condition_number(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

std::vector<double> hermite_values(int n, double x, QParam q) {
  std::vector<double> h(n + 1);
  q_hermite_all(x, q, h);
  return h;
}

// E(H_n(X)|y,z) by quadrature against the Askey-Wilson conditional.
double g_quadrature(int n, double y, double z, double r1, double r2, QParam q) {
  QuadratureSpec spec(q);
  std::vector<double> h(n + 1);
  const auto res = integrate(
      [&](double x) {
        const double w = aw_conditional(x, y, z, r1, r2, q);
        if (w == 0.0) return 0.0;
        q_hermite_all(x, q, h);
        return h[n] * w;
      },
      spec);
  return res.value;
}

void check_a_params(int n, double rl, double rr, QParam q) {
  if (n < 1) throw ParamOutOfRange("n must be >= 1");
  if (!(std::fabs(rl) < 1.0 && std::fabs(rr) < 1.0)) throw ParamOutOfRange("|rho| must be < 1");
  if (rl == 0.0 || rr == 0.0) throw ParamOutOfRange("rho_left and rho_right must be nonzero");
  if (std::fabs(rl * rr) > 0.95) throw ParamOutOfRange("|rho_left rho_right| must be <= 0.95");
  const double p2 = rl * rl * rr * rr;
  if (std::fabs(q_pochhammer(p2, q, n)) < 1e-12) throw ParamOutOfRange("(rho_L^2 rho_R^2)_n too close to 0");
}

}  // namespace

void GEvalRequest::validate() const {
  if (k < 0 || l < 0) throw ParamOutOfRange("k, l must be nonnegative");
  if (at.q.is_classical()) throw Q1Unsupported("G series tail bound needs q < 1");
  if (!(std::fabs(at.t) < 1.0)) throw ParamOutOfRange("|t| must be < 1");
  const double omq = 1.0 - at.q.value();
  if (!(omq * at.t * at.t < 1.0)) throw ParamOutOfRange("need (1-q) t^2 < 1");
  for (double v : {at.y, at.z})
    if (!(omq * v * v <= 4.0 * (1.0 + kSupportSlack))) throw OutOfSupport("y and z must lie in S(q)");
  policy.validate();
}

GSeriesResult g_series_report(const GEvalRequest& req) {
  req.validate();
  const double qv = req.at.q.value();
  const double c = 1.0 / std::sqrt(1.0 - qv);
  const double t = req.at.t;
  const int k = req.k;
  const int l = req.l;

  // H_n(y), H_n(z) and W_n grown on demand
  std::vector<double> hy{1.0, req.at.y}, hz{1.0, req.at.z};
  std::vector<double> w;
  WBoundSequence wseq(req.at.q);
  auto grow = [&](std::size_t deg) {
    while (hy.size() <= deg) {
      const std::size_t n = hy.size() - 1;
      const double qn = q_number(static_cast<std::int64_t>(n), req.at.q);
      hy.push_back(req.at.y * hy[n] - qn * hy[n - 1]);
      hz.push_back(req.at.z * hz[n] - qn * hz[n - 1]);
    }
    while (w.size() <= deg) w.push_back(wseq.next());
  };

  GSeriesResult out;
  double sum = 0.0;
  double coef = 1.0;  // t^m / [m]_q!
  double prev_bound = 0.0;
  const double ck = std::pow(c, k + l);
  double c2m = 1.0;
  for (std::int64_t m = 0; m <= req.policy.max_terms; ++m) {
    if (m > 0) {
      coef *= t / q_number(m, req.at.q);
      c2m *= c * c;
    }
    grow(static_cast<std::size_t>(m + std::max(k, l)));
    sum += coef * hy[m + k] * hz[m + l];
    out.terms = static_cast<int>(m + 1);
    if (t == 0.0) break;
    // |H_n| <= W_n (1-q)^{-n/2} on S(q)
    const double bound = std::fabs(coef) * w[m + k] * w[m + l] * ck * c2m;
    if (m >= req.policy.min_terms && bound < prev_bound) {
      const double ratio = bound / prev_bound;
      out.tail_estimate = bound * ratio / (1.0 - ratio);
      if (out.tail_estimate < req.policy.tail_tol * std::max(std::fabs(sum), 1.0)) {
        out.value = sum;
        return out;
      }
    }
    prev_bound = bound;
  }
  if (t != 0.0) throw SlowConvergence("G series did not reach the tail tolerance within max_terms");
  out.value = sum;
  return out;
}

double g_series(const GEvalRequest& req) { return g_series_report(req).value; }

double g_series(int k, int l, const GPoint& p, const TruncationPolicy& policy) {
  return g_series(GEvalRequest{k, l, p, policy});
}

double g_reduce_kl(int k, int l, int j, const GPoint& p, const TruncationPolicy& policy) {
  if (j < 1 || j > k) throw ParamOutOfRange("need 1 <= j <= k");
  if (l < 0) throw ParamOutOfRange("l must be nonnegative");
  const QParam q = p.q;
  const auto hy = hermite_values(k, p.y, q);
  double s = 0.0;
  double ti = 1.0;
  for (int i = 0; i < j; ++i) {
    s += sign(i) * q_binomial(k, i, q) * q_pow_binom2(q, i) * ti * hy[k - i] * g_series(0, i + l, p, policy);
    ti *= p.t;
  }
  double s2 = 0.0;
  ti = std::pow(p.t, j);
  for (int i = j; i <= k; ++i) {
    s2 += q_binomial(k, i, q) * q_binomial(i - 1, j - 1, q) * ti * g_series(k - i, i + l, p, policy);
    ti *= p.t;
  }
  return s + sign(j) * q_pow_binom2(q, j) * s2;
}

double g_closed_k0(int k, const GPoint& p, const TruncationPolicy& policy) {
  if (k < 0) throw ParamOutOfRange("k must be nonnegative");
  if (k == 0) return g_series(0, 0, p, policy);
  const QParam q = p.q;
  const double denom = 1.0 - std::pow(q.value(), k * (k - 1)) * std::pow(p.t, 2 * k);
  if (std::fabs(denom) < 1e-12) throw DegenerateDenominator("1 - q^{k(k-1)} t^{2k} vanishes");
  const auto hy = hermite_values(k, p.y, q);
  const auto hz = hermite_values(k, p.z, q);
  const double tail = sign(k) * q_pow_binom2(q, k) * std::pow(p.t, k);
  double s = 0.0;
  double ti = 1.0;
  for (int i = 0; i < k; ++i) {
    const double tau = hy[k - i] * g_series(0, i, p, policy) + tail * hz[k - i] * g_series(i, 0, p, policy);
    s += sign(i) * q_pow_binom2(q, i) * q_binomial(k, i, q) * ti * tau;
    ti *= p.t;
  }
  return s / denom;
}

double ThetaPoly::operator()(double y, double z) const {
  const auto hy = hermite_values(static_cast<int>(coeffs.rows()) - 1, y, q);
  const auto hz = hermite_values(static_cast<int>(coeffs.cols()) - 1, z, q);
  double s = 0.0;
  for (Eigen::Index i = 0; i < coeffs.rows(); ++i)
    for (Eigen::Index j = 0; j < coeffs.cols(); ++j) s += coeffs(i, j) * hy[i] * hz[j];
  return s;
}

ThetaPoly theta_poly(int k, int l, double t, QParam q, int extra, const TruncationPolicy& policy) {
  if (k < 0 || l < 0 || extra < 0) throw ParamOutOfRange("k, l, extra must be nonnegative");
  if (!(std::fabs(t) < 1.0)) throw ParamOutOfRange("|t| must be < 1");
  ThetaPoly th;
  th.k = k;
  th.l = l;
  th.t = t;
  th.q = q;
  // t mixes the variables: Theta_{0,1} = (z - t y)/(1 - t^2) already has a y
  // term, so each variable needs degree k + l.
  const int ky = k + l + 1 + extra;
  const int kz = k + l + 1 + extra;
  const auto ys = cheb_nodes(ky, q);
  const auto zs = cheb_nodes(kz, q);

  auto theta_at = [&](double y, double z) {
    const GPoint p{y, z, t, q};
    return g_series(k, l, p, policy) / g_series(0, 0, p, policy);
  };

  Eigen::MatrixXd vy(ky, ky), vz(kz, kz), vals(ky, kz);
  for (int a = 0; a < ky; ++a) {
    const auto h = hermite_values(ky - 1, ys[a], q);
    for (int i = 0; i < ky; ++i) vy(a, i) = h[i];
  }
  for (int b = 0; b < kz; ++b) {
    const auto h = hermite_values(kz - 1, zs[b], q);
    for (int j = 0; j < kz; ++j) vz(b, j) = h[j];
  }
  // condition of the Kronecker system is the product of the factors'
  th.condition = condition_number(vy) * condition_number(vz);
  if (th.condition > 1e10) throw IllConditioned("theta interpolation system", th.condition);
  for (int a = 0; a < ky; ++a)
    for (int b = 0; b < kz; ++b) vals(a, b) = theta_at(ys[a], zs[b]);

  const Eigen::PartialPivLU<Eigen::MatrixXd> luy(vy), luz(vz);
  const Eigen::MatrixXd left = luy.solve(vals);                  // Vy^{-1} T
  th.coeffs = luz.solve(left.transpose()).transpose();          // ... Vz^{-T}

  for (int i = 0; i < 50; ++i) {
    const double y = probe_point(i, 0, q);
    const double z = probe_point(i, 7, q);
    th.residual = std::max(th.residual, std::fabs(th(y, z) - theta_at(y, z)));
  }
  return th;
}

std::vector<double> g_n_all(int n, double y, double z, double rho1, double rho2, QParam q) {
  if (n < 0) throw ParamOutOfRange("n must be nonnegative");
  QuadratureSpec spec(q);
  const auto res = integrate_many(
      static_cast<std::size_t>(n + 1),
      [&](double x, std::span<double> out) {
        const double w = aw_conditional(x, y, z, rho1, rho2, q);
        if (w == 0.0) {
          std::fill(out.begin(), out.end(), 0.0);
          return;
        }
        q_hermite_all(x, q, out);
        for (double& v : out) v *= w;
      },
      spec);
  return res.values;
}

GnResult g_n_coeff(int n, double y, double z, double rho1, double rho2, QParam q) {
  if (n < 0) throw ParamOutOfRange("n must be nonnegative");
  GnResult r;
  r.quadrature = g_quadrature(n, y, z, rho1, rho2, q);
  const double t = rho1 * rho2;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const ThetaPoly th = theta_poly(i, n - i, t, q);
    if (th.residual > 1e-7) throw ToleranceNotMet("theta fit residual", th(y, z), th.residual);
    s += q_binomial(n, i, q) * std::pow(rho1, i) * std::pow(rho2, n - i) * th(y, z);
  }
  r.structural = s;
  return r;
}

MehlerExpansion::MehlerExpansion(int N, double y, double z, double rho1, double rho2, QParam q)
    : N_(N), q_(q), g_(g_n_all(N, y, z, rho1, rho2, q)) {}

double MehlerExpansion::operator()(double x) const {
  const double base = f_N(x, q_);
  if (base == 0.0) return 0.0;
  const auto h = hermite_values(N_, x, q_);
  double s = 0.0;
  double fact = 1.0;
  for (int n = 0; n <= N_; ++n) {
    if (n > 0) fact *= q_number(n, q_);
    s += h[n] * g_[n] / fact;
  }
  return base * s;
}

double poisson_mehler_expand(double x, double y, double z, double rho1, double rho2, QParam q, int N) {
  if (N < 0) throw ParamOutOfRange("N must be nonnegative");
  return MehlerExpansion(N, y, z, rho1, rho2, q)(x);
}

std::vector<std::pair<int, int>> a_index(int n) {
  std::vector<std::pair<int, int>> keys;
  const int h = n / 2;
  for (int r = 0; r <= h; ++r)
    for (int l = 0; l <= n - 2 * r; ++l) keys.emplace_back(r, -h + r + l);
  return keys;
}

double ACoeffTable::at(int r, int s) const {
  const auto it = entries.find({r, s});
  if (it == entries.end()) throw ParamOutOfRange("no A entry (" + std::to_string(r) + "," + std::to_string(s) + ")");
  return it->second;
}

double ACoeffTable::regression(double x_left, double x_right) const {
  const auto hl = hermite_values(n, x_left, q);
  const auto hr = hermite_values(n, x_right, q);
  double s = 0.0;
  for (const auto& [key, a] : entries) {
    const int l = key.second + n / 2 - key.first;
    s += a * hl[n - 2 * key.first - l] * hr[l];
  }
  return s;
}

double a_closed_form(int n, int s, double rl, double rr, QParam q) {
  const int l = s + n / 2;
  if (l < 0 || l > n) throw ParamOutOfRange("s out of range for r = 0");
  return q_binomial(n, l, q) * std::pow(rl, n - l) * q_pochhammer(rr * rr, q, n - l) * std::pow(rr, l) *
         q_pochhammer(rl * rl, q, l) / q_pochhammer(rl * rl * rr * rr, q, n);
}

namespace {

ACoeffTable solve_linear(int n, double rl, double rr, QParam q) {
  ACoeffTable t;
  t.n = n;
  t.rho_left = rl;
  t.rho_right = rr;
  t.q = q;
  t.provenance = ARoute::linear_system;
  const double P = rl * rr;
  const double P2 = P * P;
  const double P3 = P2 * P;
  const double q2 = q_number(2, q);
  const double q3 = q_number(3, q);
  const double qv = q.value();

  if (n == 4) {
    // the order-4 system is not available in closed matrix form; use the
    // A_{0,.} closed form and the relations for r = 1, 2
    for (int s = -2; s <= 2; ++s) t.entries[{0, s}] = a_closed_form(4, s, rl, rr, q);
    t.entries[{1, -1}] = -q3 * P * t.entries[{0, -1}];
    t.entries[{1, 1}] = -q3 * P * t.entries[{0, 1}];
    t.entries[{1, 0}] = -q2 * q2 * P * t.entries[{0, 0}];
    t.entries[{2, 0}] = qv * (1.0 + qv) * P2 * t.entries[{0, 0}];
    return t;
  }

  Eigen::MatrixXd M;
  Eigen::VectorXd b;
  if (n == 1) {
    M.resize(2, 2);
    M << 1, P, P, 1;
    b.resize(2);
    b << rl, rr;
  } else if (n == 2) {
    M.resize(4, 4);
    M << 1, P, P2, 0,
         P2, P, 1, 0,
         0, P, 0, 1,
         q2 * P, 1 + q2 * P2, q2 * P, P;
    b.resize(4);
    b << rl * rl, rr * rr, 0, q2 * P;
  } else if (n == 3) {
    const double q1p = 1.0 + qv;
    M.resize(6, 6);
    M << 1, P, P2, P3, 0, 0,
         P3, P2, P, 1, 0, 0,
         0, q1p * P, q1p * P2, 0, 1, P,
         0, q1p * P2, q1p * P, 0, P, 1,
         q3 * P, 1 + q2 * q2 * P2, q2 * P + q3 * P3, q3 * P2, P, P2,
         q3 * P2, q2 * P + q3 * P3, 1 + q2 * q2 * P2, q3 * P, P2, P;
    b.resize(6);
    b << rl * rl * rl, rr * rr * rr, 0, 0, q3 * rl * rl * rr, q3 * rl * rr * rr;
  } else {
    throw ParamOutOfRange("linear_system route covers n = 1..4");
  }
  t.condition = condition_number(M);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible() || !(t.condition < 1e12)) throw SingularSystem("A coefficient system", t.condition);
  const Eigen::VectorXd x = lu.solve(b);
  const auto keys = a_index(n);
  for (std::size_t i = 0; i < keys.size(); ++i) t.entries[keys[i]] = x(static_cast<Eigen::Index>(i));
  return t;
}

ACoeffTable solve_interpolation(int n, double rl, double rr, QParam q) {
  ACoeffTable t;
  t.n = n;
  t.rho_left = rl;
  t.rho_right = rr;
  t.q = q;
  t.provenance = ARoute::interpolation_oracle;
  const auto keys = a_index(n);
  const int K = n + 3;
  const auto nodes = cheb_nodes(K, q);
  const int rows = K * K;
  const int cols = static_cast<int>(keys.size());
  Eigen::MatrixXd V(rows, cols);
  Eigen::VectorXd g(rows);
  Eigen::VectorXd scale(cols);
  for (int c = 0; c < cols; ++c) {
    const auto [r, s] = keys[c];
    const int l = s + n / 2 - r;
    scale(c) = std::sqrt(q_factorial(n - 2 * r - l, q) * q_factorial(l, q));
  }
  int row = 0;
  for (double a : nodes) {
    const auto ha = hermite_values(n, a, q);
    for (double bz : nodes) {
      const auto hb = hermite_values(n, bz, q);
      for (int c = 0; c < cols; ++c) {
        const auto [r, s] = keys[c];
        const int l = s + n / 2 - r;
        V(row, c) = ha[n - 2 * r - l] * hb[l] / scale(c);
      }
      g(row) = g_quadrature(n, a, bz, rl, rr, q);
      ++row;
    }
  }
  t.condition = condition_number(V);
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);
  if (qr.rank() < cols || !(t.condition < 1e12)) throw SingularSystem("A coefficient least squares", t.condition);
  const Eigen::VectorXd x = qr.solve(g);
  t.fit_residual = (V * x - g).cwiseAbs().maxCoeff();
  for (int c = 0; c < cols; ++c) t.entries[keys[c]] = x(c) / scale(c);
  return t;
}

}  // namespace

ACoeffTable solve_A(int n, double rho_left, double rho_right, QParam q, ARoute route) {
  if (n > 4 && route == ARoute::linear_system) throw ParamOutOfRange("linear_system route covers n = 1..4");
  check_a_params(n, rho_left, rho_right, q);
  return route == ARoute::linear_system ? solve_linear(n, rho_left, rho_right, q)
                                        : solve_interpolation(n, rho_left, rho_right, q);
}

void to_json(nlohmann::json& j, const ACoeffTable& t) {
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [key, v] : t.entries) entries[std::to_string(key.first) + "," + std::to_string(key.second)] = v;
  j = nlohmann::json{{"n", t.n},
                     {"rho_left", t.rho_left},
                     {"rho_right", t.rho_right},
                     {"q", t.q.value()},
                     {"provenance", t.provenance == ARoute::linear_system ? "linear_system" : "interpolation_oracle"},
                     {"entries", entries}};
}

CondVarReport cond_var_two_sided(double xl, double xr, double rl, double rr, QParam q) {
  if (!(std::fabs(rl) < 1.0 && std::fabs(rr) < 1.0)) throw ParamOutOfRange("|rho| must be < 1");
  const double qv = q.value();
  const double P = rl * rr;
  const double D = 1.0 - P * P;
  const double base = (1.0 - rl * rl) * (1.0 - rr * rr) / (1.0 - qv * P * P);
  const double mean = (rl * (1.0 - rr * rr) * xl + rr * (1.0 - rl * rl) * xr) / D;
  auto printed = [&](double xi) { return base * (1.0 - (1.0 - qv) * (xl - P * xr) * (xi - xl * P) / (D * D)); };

  CondVarReport rep;
  rep.as_printed_next = printed(xr);
  rep.as_printed_mean = printed(mean);
  rep.as_printed_prev = printed(xl);
  rep.derived = base * (1.0 - (1.0 - qv) * P * (xl - P * xr) * (xr - P * xl) / (D * D));

  QuadratureSpec spec(q);
  const auto m = integrate_many(
      3,
      [&](double x, std::span<double> out) {
        const double w = aw_conditional(x, xl, xr, rl, rr, q);
        out[0] = w;
        out[1] = x * w;
        out[2] = x * x * w;
      },
      spec);
  const double mu = m.values[1] / m.values[0];
  rep.oracle = m.values[2] / m.values[0] - mu * mu;

  const double tol = 1e-8 * std::max(1.0, std::fabs(rep.oracle));
  std::string hit;
  auto note = [&](double v, const char* name) {
    if (std::fabs(v - rep.oracle) < tol) hit += hit.empty() ? name : std::string(",") + name;
  };
  note(rep.as_printed_next, "next");
  note(rep.as_printed_mean, "mean");
  note(rep.as_printed_prev, "prev");
  rep.matches = hit.empty() ? "none" : hit;
  return rep;
}

ConjectureReport conjecture_probe(int n, double rho_left, double rho_right, QParam q) {
  if (n < 1 || n > 6) throw ParamOutOfRange("conjecture probe covers n = 1..6");
  ConjectureReport rep;
  rep.n = n;
  const std::vector<std::pair<double, double>> grid{{rho_left, rho_right}, {0.3, 0.5}, {0.5, 0.3},
                                                    {0.6, 0.7}, {-0.4, 0.6}, {0.7, -0.5}};
  std::vector<ACoeffTable> tables;
  for (const auto& [a, b] : grid) {
    tables.push_back(solve_A(n, a, b, q, ARoute::interpolation_oracle));
    rep.max_fit_residual = std::max(rep.max_fit_residual, tables.back().fit_residual);
  }
  const double q2 = q_number(2, q);
  const double q3 = q_number(3, q);
  for (const auto& [r, s] : a_index(n)) {
    ConjectureEntry e;
    e.r = r;
    e.s = s;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double P = grid[g].first * grid[g].second;
      const double v = tables[g].at(r, s) / (tables[g].at(0, s) * std::pow(P, r));
      if (g == 0) e.ratio = v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    e.spread = hi - lo;
    e.factorizes = e.spread < 1e-6 * std::max(1.0, std::fabs(e.ratio));
    if (r == 0) {
      e.has_printed = true;
      e.printed = 1.0;
    } else if (n <= 3 && r == 1) {
      e.has_printed = true;
      e.printed = -q_number(n - 1, q);
    } else if (n == 4) {
      e.has_printed = true;
      const double qv = q.value();
      e.printed = r == 2 ? qv * (1.0 + qv) : (s == 0 ? -q2 * q2 : -q3);
    }
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace qnormal
