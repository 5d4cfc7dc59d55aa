#pragma once

// G_{k,l}(y,z,t|q) = sum_m t^m/[m]_q! H_{m+k}(y|q) H_{m+l}(z|q), its
// recursions, the expansion of the Askey-Wilson conditional density in
// q-Hermite polynomials, and the regression coefficients A^{(n)}_{r,s}.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qnormal/qseries.hpp"

namespace qnormal {

struct GPoint {
  double y = 0.0;
  double z = 0.0;
  double t = 0.0;
  QParam q{0.0};
};

struct GEvalRequest {
  int k = 0;  // paired with y
  int l = 0;  // paired with z
  GPoint at;
  TruncationPolicy policy;

  void validate() const;
};

struct GSeriesResult {
  double value = 0.0;
  double tail_estimate = 0.0;
  int terms = 0;
};

GSeriesResult g_series_report(const GEvalRequest& req);
double g_series(const GEvalRequest& req);
double g_series(int k, int l, const GPoint& p, const TruncationPolicy& policy = {});

// Right side of the (k, l, j) reduction identity, 1 <= j <= k.
double g_reduce_kl(int k, int l, int j, const GPoint& p, const TruncationPolicy& policy = {});
// G_{k,0} from G_{0,i} and G_{i,0}, i < k.
double g_closed_k0(int k, const GPoint& p, const TruncationPolicy& policy = {});

// Theta_{k,l} = G_{k,l} / G_{0,0} as a polynomial in the H(.|q) x H(.|q) basis.
struct ThetaPoly {
  int k = 0;
  int l = 0;
  double t = 0.0;
  QParam q{0.0};
  Eigen::MatrixXd coeffs;  // coeffs(i, j) multiplies H_i(y) H_j(z)
  double condition = 1.0;
  double residual = 0.0;  // max abs error at off-grid check points

  double operator()(double y, double z) const;
};

// extra > 0 fits extra degrees in each variable (used to check that the
// true degree is not exceeded).
ThetaPoly theta_poly(int k, int l, double t, QParam q, int extra = 0, const TruncationPolicy& policy = {});

struct GnResult {
  double quadrature = 0.0;
  double structural = 0.0;
  double difference() const { return quadrature - structural; }
};

// g_n = E(H_n(X) | y, z) under the Askey-Wilson conditional, by two routes.
GnResult g_n_coeff(int n, double y, double z, double rho1, double rho2, QParam q);
// g_0..g_n by quadrature only.
std::vector<double> g_n_all(int n, double y, double z, double rho1, double rho2, QParam q);

// Truncated expansion f_N(x) sum_{n<=N} H_n(x) g_n / [n]_q!; the g_n are
// computed once per (y, z).
class MehlerExpansion {
 public:
  MehlerExpansion(int N, double y, double z, double rho1, double rho2, QParam q);
  double operator()(double x) const;
  const std::vector<double>& g() const { return g_; }

 private:
  int N_;
  QParam q_;
  std::vector<double> g_;
};

double poisson_mehler_expand(double x, double y, double z, double rho1, double rho2, QParam q, int N);

enum class ARoute { linear_system, interpolation_oracle };

// E(H_n(X_i) | X_{i-1} = a, X_{i+1} = b)
//   = sum_{r,s} A_{r,s} H_{n-2r-l}(a) H_l(b),  l = s + floor(n/2) - r.
struct ACoeffTable {
  int n = 1;
  double rho_left = 0.0;
  double rho_right = 0.0;
  QParam q{0.0};
  ARoute provenance = ARoute::linear_system;
  std::map<std::pair<int, int>, double> entries;
  double condition = 1.0;
  double fit_residual = 0.0;  // interpolation route only

  double at(int r, int s) const;
  double regression(double x_left, double x_right) const;
};

// Keys (r, s) of an order-n table in canonical order.
std::vector<std::pair<int, int>> a_index(int n);
// Closed form of A_{0,s}.
double a_closed_form(int n, int s, double rho_left, double rho_right, QParam q);

ACoeffTable solve_A(int n, double rho_left, double rho_right, QParam q, ARoute route);

void to_json(nlohmann::json& j, const ACoeffTable& t);

struct CondVarReport {
  double as_printed_next = 0.0;  // X_i read as X_{i+1}
  double as_printed_mean = 0.0;  // X_i read as E(X_i | neighbours)
  double as_printed_prev = 0.0;  // X_i read as X_{i-1}
  double oracle = 0.0;
  double derived = 0.0;
  std::string matches;  // which reading agrees with the oracle, or "none"
};

CondVarReport cond_var_two_sided(double x_left, double x_right, double rho_left, double rho_right, QParam q);

struct ConjectureEntry {
  int r = 0;
  int s = 0;
  double ratio = 0.0;   // A_{r,s} / (A_{0,s} (rho_L rho_R)^r) at the requested point
  double spread = 0.0;  // max - min of that ratio over the rho grid
  bool factorizes = false;
  bool has_printed = false;
  double printed = 0.0;  // printed relation's value for n <= 4
};

struct ConjectureReport {
  int n = 0;
  std::vector<ConjectureEntry> entries;
  double max_fit_residual = 0.0;
};

ConjectureReport conjecture_probe(int n, double rho_left, double rho_right, QParam q);

}  // namespace qnormal
