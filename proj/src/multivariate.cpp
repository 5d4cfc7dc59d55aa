#include "qnormal/multivariate.hpp"

#include <cmath>
#include <string>

#include "qnormal/densities.hpp"
#include "qnormal/errors.hpp"

namespace qnormal {
namespace {

// prod rho_k for k in [from, to), 1-based; empty product is 1.
double rho_product(const MVQNormalSpec& spec, int from, int to) {
  if (from >= to) return 1.0;
  double p = spec.rho[from - 1];
  for (int k = from + 1; k < to; ++k) p *= spec.rho[k - 1];
  return p;
}

void check_index(const MVQNormalSpec& spec, int i, const char* what) {
  if (i < 1 || i > spec.d) throw BadIndexSet(std::string(what) + " index out of range: " + std::to_string(i));
}

double standardize(const MVQNormalSpec& spec, int i, double v) {
  return (v - spec.m[i - 1]) / std::sqrt(spec.sigma2[i - 1]);
}

}  // namespace

MVQNormalSpec MVQNormalSpec::standard(std::vector<double> rho, QParam q, std::optional<double> t) {
  MVQNormalSpec s;
  s.d = static_cast<int>(rho.size()) + 1;
  s.m.assign(s.d, 0.0);
  s.sigma2.assign(s.d, 1.0);
  s.rho = std::move(rho);
  s.q = q;
  s.t = t;
  s.validate();
  return s;
}

bool MVQNormalSpec::standardized() const {
  for (int i = 0; i < d; ++i)
    if (m[i] != 0.0 || sigma2[i] != 1.0) return false;
  return true;
}

void MVQNormalSpec::validate() const {
  if (d < 1) throw ParamOutOfRange("d must be positive");
  if (static_cast<int>(m.size()) != d || static_cast<int>(sigma2.size()) != d)
    throw ParamOutOfRange("m and sigma2 need d entries");
  if (static_cast<int>(rho.size()) != d - 1) throw ParamOutOfRange("rho needs d-1 entries");
  for (double s : sigma2)
    if (!(s > 0.0) || !std::isfinite(s)) throw ParamOutOfRange("sigma2 entries must be positive");
  for (double v : m)
    if (!std::isfinite(v)) throw ParamOutOfRange("m entries must be finite");
  for (double r : rho)
    if (!(std::fabs(r) < 1.0)) throw ParamOutOfRange("|rho_i| must be < 1");
  if (t) {
    if (!((1.0 - q.value()) * *t * *t < 1.0)) throw ParamOutOfRange("need (1-q) t^2 < 1");
    if (!standardized()) throw ParamOutOfRange("modified law is defined in standardized form only");
  }
  if (experimental != ExperimentalFamily::none) {
    if (!t) throw ParamOutOfRange("experimental families need t");
    if (d < 2) throw ParamOutOfRange("experimental families need d >= 2");
  }
}

IndexSet::IndexSet(std::vector<int> indices, int d) : idx_(std::move(indices)) {
  if (idx_.empty()) throw BadIndexSet("index set is empty");
  for (std::size_t k = 0; k < idx_.size(); ++k) {
    if (idx_[k] < 1 || idx_[k] > d) throw BadIndexSet("index " + std::to_string(idx_[k]) + " outside 1.." + std::to_string(d));
    if (k > 0 && idx_[k] <= idx_[k - 1]) throw BadIndexSet("indices must be strictly increasing");
  }
}

IndexSet IndexSet::range(int first, int last, int d) {
  std::vector<int> v;
  for (int i = first; i <= last; ++i) v.push_back(i);
  return IndexSet(std::move(v), d);
}

double joint_density(std::span<const double> x, const MVQNormalSpec& spec, const TruncationPolicy& policy) {
  spec.validate();
  if (static_cast<int>(x.size()) != spec.d) throw ParamOutOfRange("x needs d coordinates");
  const Support sup = Support::of(spec.q);
  std::vector<double> z(spec.d);
  double jac = 1.0;
  for (int i = 1; i <= spec.d; ++i) {
    z[i - 1] = standardize(spec, i, x[i - 1]);
    if (!sup.contains(z[i - 1])) return 0.0;
    jac *= std::sqrt(spec.sigma2[i - 1]);
  }
  double f = f_N(z[0], spec.q, policy);
  if (spec.t && spec.experimental != ExperimentalFamily::tau) f *= phi_gen(z[0], *spec.t, spec.q, policy);
  if (spec.experimental != ExperimentalFamily::none)
    f *= tau_gen(z[1], *spec.t, CondParams(z[0], spec.rho[0], spec.q), policy);
  for (int i = 1; i < spec.d && f != 0.0; ++i) f *= f_CN(z[i], CondParams(z[i - 1], spec.rho[i - 1], spec.q), policy);
  return f / jac;
}

MVQNormalSpec marginal(const MVQNormalSpec& spec, const IndexSet& keep) {
  spec.validate();
  if (keep.back() > spec.d) throw BadIndexSet("index set exceeds d");
  if (spec.experimental != ExperimentalFamily::none && static_cast<int>(keep.size()) != spec.d)
    throw BadIndexSet("marginals of experimental families are not known");
  MVQNormalSpec out;
  out.d = static_cast<int>(keep.size());
  out.q = spec.q;
  out.experimental = spec.experimental;
  out.m.clear();
  out.sigma2.clear();
  for (int i : keep.indices()) {
    out.m.push_back(spec.m[i - 1]);
    out.sigma2.push_back(spec.sigma2[i - 1]);
  }
  for (std::size_t j = 0; j + 1 < keep.size(); ++j) out.rho.push_back(rho_product(spec, keep[j], keep[j + 1]));
  if (spec.t) out.t = keep.front() == 1 ? *spec.t : *spec.t * rho_product(spec, 1, keep.front());
  return out;
}

Eigen::MatrixXd covariance(const MVQNormalSpec& spec) {
  spec.validate();
  if (spec.t) throw ParamOutOfRange("covariance is defined for specs without t");
  Eigen::MatrixXd c(spec.d, spec.d);
  for (int i = 1; i <= spec.d; ++i) {
    c(i - 1, i - 1) = spec.sigma2[i - 1];
    for (int j = i + 1; j <= spec.d; ++j) {
      const double v = std::sqrt(spec.sigma2[i - 1] * spec.sigma2[j - 1]) * rho_product(spec, i, j);
      c(i - 1, j - 1) = v;
      c(j - 1, i - 1) = v;
    }
  }
  return c;
}

CondExpectation cond_expect_qhermite(const MVQNormalSpec& spec, int i, const IndexSet& past, int n) {
  spec.validate();
  check_index(spec, i, "target");
  if (past.back() >= i) throw BadIndexSet("conditioning indices must precede the target");
  if (n < 0) throw ParamOutOfRange("degree must be nonnegative");
  CondExpectation ce;
  ce.anchor = past.back();  // Markov: only the nearest past coordinate matters
  ce.r = rho_product(spec, ce.anchor, i);
  ce.n = n;
  ce.scale = std::pow(ce.r, n);
  return ce;
}

std::vector<double> contraction_apply(std::span<const double> coeffs, double rho, QParam) {
  if (!(std::fabs(rho) <= 1.0)) throw ParamOutOfRange("|rho| must be <= 1");
  std::vector<double> out(coeffs.begin(), coeffs.end());
  double p = 1.0;
  for (double& a : out) {
    a *= p;
    p *= rho;
  }
  return out;
}

std::function<double(double)> two_sided_conditional(const MVQNormalSpec& spec, int i, int left, double y, int right,
                                                    double z, const TruncationPolicy& policy) {
  spec.validate();
  check_index(spec, i, "target");
  check_index(spec, left, "left");
  check_index(spec, right, "right");
  if (!(left < i && i < right)) throw BadIndexSet("need left < i < right");
  if (spec.experimental != ExperimentalFamily::none) throw BadIndexSet("not available for experimental families");
  const double r1 = rho_product(spec, left, i);
  const double r2 = rho_product(spec, i, right);
  const double ys = standardize(spec, left, y);
  const double zs = standardize(spec, right, z);
  const double mi = spec.m[i - 1];
  const double si = std::sqrt(spec.sigma2[i - 1]);
  const QParam q = spec.q;
  // validate the conditioning values now rather than on first call
  aw_conditional(0.0, ys, zs, r1, r2, q, policy);
  return [=](double x) { return aw_conditional((x - mi) / si, ys, zs, r1, r2, q, policy) / si; };
}

GebeleinResult gebelein_check(double r, std::span<const double> g_coeffs, QParam q) {
  if (!g_coeffs.empty() && g_coeffs[0] != 0.0) throw NonCenteredFunction("g must have zero mean (a_0 = 0)");
  GebeleinResult res;
  res.r = r;
  double fact = 1.0;
  double r2i = 1.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < g_coeffs.size(); ++i) {
    if (i > 0) {
      fact *= q_number(static_cast<std::int64_t>(i), q);
      r2i *= r * r;
    }
    const double a2 = g_coeffs[i] * g_coeffs[i];
    res.lhs += a2 * r2i * fact;
    norm += a2 * fact;
  }
  res.rhs = r * r * norm;
  return res;
}

GebeleinResult gebelein_check(const MVQNormalSpec& spec, int i, const IndexSet& past, std::span<const double> g_coeffs) {
  const CondExpectation ce = cond_expect_qhermite(spec, i, past, 1);
  return gebelein_check(ce.r, g_coeffs, spec.q);
}

void to_json(nlohmann::json& j, const MVQNormalSpec& spec) {
  j = nlohmann::json{{"d", spec.d}, {"m", spec.m}, {"sigma2", spec.sigma2}, {"rho", spec.rho}, {"q", spec.q.value()}};
  if (spec.t) j["t"] = *spec.t;
  if (spec.experimental == ExperimentalFamily::phi_tau) j["experimental"] = "phi_tau";
  if (spec.experimental == ExperimentalFamily::tau) j["experimental"] = "tau";
}

void from_json(const nlohmann::json& j, MVQNormalSpec& spec) {
  MVQNormalSpec s;
  s.d = j.at("d").get<int>();
  s.m = j.contains("m") ? j.at("m").get<std::vector<double>>() : std::vector<double>(s.d, 0.0);
  s.sigma2 = j.contains("sigma2") ? j.at("sigma2").get<std::vector<double>>() : std::vector<double>(s.d, 1.0);
  s.rho = j.contains("rho") ? j.at("rho").get<std::vector<double>>() : std::vector<double>{};
  s.q = QParam(j.at("q").get<double>());
  if (j.contains("t") && !j.at("t").is_null()) s.t = j.at("t").get<double>();
  if (j.contains("experimental")) {
    const auto e = j.at("experimental").get<std::string>();
    if (e == "phi_tau") s.experimental = ExperimentalFamily::phi_tau;
    else if (e == "tau") s.experimental = ExperimentalFamily::tau;
    else if (e != "none") throw ParamOutOfRange("unknown experimental family: " + e);
  }
  s.validate();
  spec = std::move(s);
}

}  // namespace qnormal
