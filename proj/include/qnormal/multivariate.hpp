#pragma once

// d-dimensional q-Normal laws: a Markov chain X_1 -> X_2 -> ... -> X_d with
// f_N start and f_CN transitions, optionally modified by a leading phi factor.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qnormal/qseries.hpp"

namespace qnormal {

// Two densities for which marginals are not known; evaluation only.
enum class ExperimentalFamily {
  none,
  phi_tau,  // phi(x1,t) f_N(x1) tau(x2,t|x1,rho1) prod f_CN
  tau,      // f_N(x1) tau(x2,t|x1,rho1) prod f_CN
};

struct MVQNormalSpec {
  int d = 1;
  std::vector<double> m{0.0};
  std::vector<double> sigma2{1.0};
  std::vector<double> rho;  // rho[k-1] couples X_k and X_{k+1}
  QParam q{0.0};
  std::optional<double> t;  // present: modified (MMN) law, standardized
  ExperimentalFamily experimental = ExperimentalFamily::none;

  // Standardized chain (m = 0, sigma = 1).
  static MVQNormalSpec standard(std::vector<double> rho, QParam q, std::optional<double> t = std::nullopt);

  void validate() const;
  bool standardized() const;
};

// Sorted, strictly increasing, 1-based coordinate indices.
class IndexSet {
 public:
  IndexSet(std::vector<int> indices, int d);
  static IndexSet range(int first, int last, int d);

  const std::vector<int>& indices() const { return idx_; }
  std::size_t size() const { return idx_.size(); }
  int operator[](std::size_t i) const { return idx_[i]; }
  int front() const { return idx_.front(); }
  int back() const { return idx_.back(); }

 private:
  std::vector<int> idx_;
};

double joint_density(std::span<const double> x, const MVQNormalSpec& spec, const TruncationPolicy& policy = {});

MVQNormalSpec marginal(const MVQNormalSpec& spec, const IndexSet& keep);

Eigen::MatrixXd covariance(const MVQNormalSpec& spec);

// E(H_n(X_i)|past) = r^n H_n(X_anchor) in standardized coordinates.
struct CondExpectation {
  double r = 1.0;
  int n = 0;
  int anchor = 0;
  double scale = 1.0;  // r^n
  double variance() const { return 1.0 - r * r; }
};

CondExpectation cond_expect_qhermite(const MVQNormalSpec& spec, int i, const IndexSet& past, int n);

// a_i -> a_i rho^i on coefficients in the H(.|q) basis.
std::vector<double> contraction_apply(std::span<const double> coeffs, double rho, QParam q);

// Density in x of X_i given X_left = y and X_right = z, left < i < right.
std::function<double(double)> two_sided_conditional(const MVQNormalSpec& spec, int i, int left, double y, int right,
                                                    double z, const TruncationPolicy& policy = {});

struct GebeleinResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double r = 0.0;
  bool holds() const { return lhs <= rhs; }
};

GebeleinResult gebelein_check(double r, std::span<const double> g_coeffs, QParam q);
GebeleinResult gebelein_check(const MVQNormalSpec& spec, int i, const IndexSet& past, std::span<const double> g_coeffs);

void to_json(nlohmann::json& j, const MVQNormalSpec& spec);
void from_json(const nlohmann::json& j, MVQNormalSpec& spec);

}  // namespace qnormal
