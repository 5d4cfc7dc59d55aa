#include "qnormal/orthopoly.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <utility>

#include "qnormal/errors.hpp"

namespace qnormal {
namespace {

void check_degree(int n) {
  if (n < 0 || n > kMaxDegree) {
    throw ParamOutOfRange("polynomial degree must lie in [0, " + std::to_string(kMaxDegree) + "]");
  }
}

void check_rho(double rho) {
  if (!(std::fabs(rho) < 1.0)) throw ParamOutOfRange("|rho| must be < 1");
}

// Lower-triangular change-of-basis matrices for one (degree, q).
struct BasisChange {
  std::vector<std::vector<double>> mono_of_h;  // [n][k]: x^k coefficient of H_n
  std::vector<std::vector<double>> h_of_mono;  // [n][k]: H_k coefficient of x^n
};

BasisChange build_basis(int degree, QParam q) {
  BasisChange b;
  b.mono_of_h.assign(degree + 1, {});
  b.h_of_mono.assign(degree + 1, {});
  b.mono_of_h[0] = {1.0};
  b.h_of_mono[0] = {1.0};
  for (int n = 0; n < degree; ++n) {
    // H_{n+1} = x H_n - [n] H_{n-1}
    std::vector<double> next(n + 2, 0.0);
    for (int k = 0; k <= n; ++k) next[k + 1] += b.mono_of_h[n][k];
    if (n >= 1) {
      const double qn = q_number(n, q);
      for (int k = 0; k < n; ++k) next[k] -= qn * b.mono_of_h[n - 1][k];
    }
    b.mono_of_h[n + 1] = std::move(next);

    // x H_k = H_{k+1} + [k] H_{k-1}
    std::vector<double> up(n + 2, 0.0);
    for (int k = 0; k <= n; ++k) {
      const double c = b.h_of_mono[n][k];
      up[k + 1] += c;
      if (k >= 1) up[k - 1] += q_number(k, q) * c;
    }
    b.h_of_mono[n + 1] = std::move(up);
  }
  return b;
}

class BasisCache {
 public:
  std::shared_ptr<const BasisChange> get(int degree, QParam q) {
    const Key key{degree, std::bit_cast<std::uint64_t>(q.value())};
    {
      std::shared_lock lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto built = std::make_shared<const BasisChange>(build_basis(degree, q));
    std::unique_lock lock(mutex_);
    return cache_.try_emplace(key, std::move(built)).first->second;
  }

 private:
  using Key = std::pair<int, std::uint64_t>;
  std::shared_mutex mutex_;
  std::map<Key, std::shared_ptr<const BasisChange>> cache_;
};

BasisCache& basis_cache() {
  static BasisCache cache;
  return cache;
}

}  // namespace

void q_hermite_all(double x, QParam q, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = x;
  for (std::size_t n = 1; n + 1 < out.size(); ++n) {
    out[n + 1] = x * out[n] - q_number(static_cast<std::int64_t>(n), q) * out[n - 1];
  }
}

double q_hermite(int n, double x, QParam q) {
  check_degree(n);
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next = x * cur - q_number(k, q) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double continuous_q_hermite(int n, double x, QParam q) {
  if (q.is_classical()) throw Q1Unsupported("continuous q-Hermite polynomials need q < 1");
  const double s = std::sqrt(1.0 - q.value());
  return std::pow(s, n) * q_hermite(n, 2.0 * x / s, q);
}

void al_salam_chihara_all(double x, double y, double rho, QParam q, std::span<double> out) {
  check_rho(rho);
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = x - rho * y;
  const double qv = q.value();
  double qn = qv;  // q^n
  double qnm1 = 1.0;  // q^{n-1}
  for (std::size_t n = 1; n + 1 < out.size(); ++n) {
    out[n + 1] = (x - rho * y * qn) * out[n] -
                 (1.0 - rho * rho * qnm1) * q_number(static_cast<std::int64_t>(n), q) * out[n - 1];
    qnm1 = qn;
    qn *= qv;
  }
}

double al_salam_chihara(int n, double x, double y, double rho, QParam q) {
  check_degree(n);
  std::vector<double> v(n + 1);
  al_salam_chihara_all(x, y, rho, q, v);
  return v[n];
}

double chebyshev_u(int n, double x) {
  check_degree(n);
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite_prob(int n, double x) {
  check_degree(n);
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

LinearizationTable linearize(int n, int m, QParam q) {
  if (n < 0 || m < 0) throw ParamOutOfRange("degrees must be nonnegative");
  LinearizationTable t{n, m, {}};
  for (int j = 0; j <= std::min(n, m); ++j) {
    t.coeffs[n + m - 2 * j] = q_binomial(m, j, q) * q_binomial(n, j, q) * q_factorial(j, q);
  }
  return t;
}

std::vector<double> hermite_expand(std::span<const double> monomial, QParam q) {
  if (monomial.empty()) return {};
  const int degree = static_cast<int>(monomial.size()) - 1;
  check_degree(degree);
  const auto basis = basis_cache().get(degree, q);
  std::vector<double> out(monomial.size(), 0.0);
  for (int n = 0; n <= degree; ++n) {
    for (int k = 0; k <= n; ++k) out[k] += monomial[n] * basis->h_of_mono[n][k];
  }
  return out;
}

std::vector<double> hermite_to_monomial(std::span<const double> hermite, QParam q) {
  if (hermite.empty()) return {};
  const int degree = static_cast<int>(hermite.size()) - 1;
  check_degree(degree);
  const auto basis = basis_cache().get(degree, q);
  std::vector<double> out(hermite.size(), 0.0);
  for (int n = 0; n <= degree; ++n) {
    for (int k = 0; k <= n; ++k) out[k] += hermite[n] * basis->mono_of_h[n][k];
  }
  return out;
}

double hermite_series(std::span<const double> coeffs, double x, QParam q) {
  if (coeffs.empty()) return 0.0;
  std::vector<double> h(coeffs.size());
  q_hermite_all(x, q, h);
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * h[i];
  return s;
}

bool q_hermite_bound_check(int n, double x, QParam q) {
  if (q.is_classical()) throw Q1Unsupported("the q-Hermite sup bound needs q < 1");
  const double edge = 2.0 / std::sqrt(1.0 - q.value());
  if (std::fabs(x) > edge * (1.0 + 1e-14)) throw OutOfSupport("x lies outside S(q)");
  const double lhs = std::fabs(q_hermite(n, x, q));
  const double rhs = w_bound(n, q) * std::pow(1.0 - q.value(), -0.5 * n);
  // The bound is attained at the support edge; allow for roundoff.
  return lhs <= rhs * (1.0 + 1e-12);
}

}  // namespace qnormal
