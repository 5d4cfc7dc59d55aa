#include "qnormal/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "qnormal/errors.hpp"

namespace qnormal {
namespace {

// Gauss-Kronrod 7/15 nodes on [-1, 1] (abscissae >= 0, symmetric).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Maps the panel variable u to (x, dx/du).
struct Mapping {
  bool trig;
  double c;  // support half width for the trig transform
  void operator()(double u, double& x, double& jac) const {
    if (trig) {
      x = c * std::cos(u);
      jac = c * std::sin(u);
    } else {
      x = u;
      jac = 1.0;
    }
  }
};

struct Panel {
  std::vector<double> kronrod;
  std::vector<double> error;
  std::vector<double> magnitude;  // Kronrod rule applied to |f|
};

// Below this multiple of eps * integral of |f| the Kronrod-Gauss difference
// is round-off; bisecting further cannot reduce it.
constexpr double kRoundoffFactor = 50.0 * std::numeric_limits<double>::epsilon();

class Integrator {
 public:
  Integrator(std::size_t count, const VectorIntegrand& f, Mapping map, const QuadratureSpec& spec)
      : count_(count), f_(f), map_(map), spec_(spec), buf_(count) {}

  VectorQuadratureResult run(double lo, double hi) {
    VectorQuadratureResult res;
    res.values.assign(count_, 0.0);
    res.error_estimates.assign(count_, 0.0);
    if (hi <= lo) return res;

    // Coarse pass fixes the global tolerance per component.
    constexpr int kInitial = 16;
    const double h = (hi - lo) / kInitial;
    std::vector<Panel> first;
    std::vector<double> scale(count_, 0.0);
    for (int i = 0; i < kInitial; ++i) {
      first.push_back(eval(lo + i * h, lo + (i + 1) * h));
      for (std::size_t j = 0; j < count_; ++j) scale[j] += first.back().kronrod[j];
    }
    tol_.resize(count_);
    for (std::size_t j = 0; j < count_; ++j) {
      tol_[j] = std::max(spec_.abs_tol, spec_.rel_tol * std::fabs(scale[j])) / kInitial;
    }
    for (int i = 0; i < kInitial; ++i) {
      refine(lo + i * h, lo + (i + 1) * h, first[static_cast<std::size_t>(i)], 1.0, res);
    }
    res.panels = panels_;
    if (exhausted_) {
      double worst = 0.0;
      for (double e : res.error_estimates) worst = std::max(worst, e);
      throw ToleranceNotMet("quadrature tolerance not met within max_subdivisions",
                            res.values.empty() ? 0.0 : res.values[0], worst);
    }
    return res;
  }

 private:
  Panel eval(double a, double b) {
    ++panels_;
    Panel p;
    p.kronrod.assign(count_, 0.0);
    p.magnitude.assign(count_, 0.0);
    std::vector<double> gauss(count_, 0.0);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto add = [&](double u, double wk, double wg) {
      double x = 0.0;
      double jac = 0.0;
      map_(u, x, jac);
      std::fill(buf_.begin(), buf_.end(), 0.0);
      if (jac != 0.0) f_(x, buf_);
      for (std::size_t j = 0; j < count_; ++j) {
        const double v = buf_[j] * jac;
        p.kronrod[j] += wk * v;
        p.magnitude[j] += wk * std::fabs(v);
        gauss[j] += wg * v;
      }
    };
    for (std::size_t i = 0; i < 7; ++i) {
      const double wg = (i % 2 == 1) ? kWg[i / 2] : 0.0;
      add(mid - half * kXgk[i], kWgk[i], wg);
      add(mid + half * kXgk[i], kWgk[i], wg);
    }
    add(mid, kWgk[7], kWg[3]);
    p.error.resize(count_);
    for (std::size_t j = 0; j < count_; ++j) {
      p.kronrod[j] *= half;
      p.magnitude[j] *= std::fabs(half);
      p.error[j] = std::fabs(p.kronrod[j] - gauss[j] * half);
    }
    return p;
  }

  // Depth-first bisection; the tolerance halves with every split so the
  // summation tree, and hence the result, is independent of timing.
  void refine(double a, double b, const Panel& p, double frac, VectorQuadratureResult& res) {
    bool ok = true;
    for (std::size_t j = 0; j < count_; ++j) {
      if (p.error[j] > tol_[j] * frac && p.error[j] > kRoundoffFactor * p.magnitude[j]) ok = false;
    }
    if (ok || panels_ >= spec_.max_subdivisions || frac < 1e-30) {
      if (!ok) exhausted_ = true;
      for (std::size_t j = 0; j < count_; ++j) {
        res.values[j] += p.kronrod[j];
        res.error_estimates[j] += p.error[j];
      }
      return;
    }
    const double m = 0.5 * (a + b);
    const Panel left = eval(a, m);
    const Panel right = eval(m, b);
    refine(a, m, left, 0.5 * frac, res);
    refine(m, b, right, 0.5 * frac, res);
  }

  std::size_t count_;
  const VectorIntegrand& f_;
  Mapping map_;
  const QuadratureSpec& spec_;
  std::vector<double> buf_;
  std::vector<double> tol_;
  int panels_ = 0;
  bool exhausted_ = false;
};

bool use_trig(const QuadratureSpec& spec) {
  return spec.transform == Transform::trigonometric && !spec.q.is_classical();
}

double half_width(const QuadratureSpec& spec) {
  if (spec.q.is_classical()) return spec.line_half_width;
  return 2.0 / std::sqrt(1.0 - spec.q.value());
}

VectorQuadratureResult run_interval(std::size_t count, const VectorIntegrand& f, double a, double b,
                                    const QuadratureSpec& spec) {
  spec.validate();
  const double c = half_width(spec);
  a = std::max(a, -c);
  b = std::min(b, c);
  if (b <= a) {
    VectorQuadratureResult r;
    r.values.assign(count, 0.0);
    r.error_estimates.assign(count, 0.0);
    return r;
  }
  if (use_trig(spec)) {
    // theta decreases as x increases
    const double lo = std::acos(std::clamp(b / c, -1.0, 1.0));
    const double hi = std::acos(std::clamp(a / c, -1.0, 1.0));
    Integrator integ(count, f, Mapping{true, c}, spec);
    return integ.run(lo, hi);
  }
  Integrator integ(count, f, Mapping{false, c}, spec);
  return integ.run(a, b);
}

QuadratureResult scalar(const VectorQuadratureResult& v) {
  return QuadratureResult{v.values[0], v.error_estimates[0], v.panels};
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ParamOutOfRange("quadrature tolerances must be positive");
  if (max_subdivisions < 16) throw ParamOutOfRange("max_subdivisions must be at least 16");
  if (!(line_half_width > 0.0)) throw ParamOutOfRange("line_half_width must be positive");
}

double support_lo(const QuadratureSpec& spec) { return -half_width(spec); }
double support_hi(const QuadratureSpec& spec) { return half_width(spec); }

QuadratureResult integrate(const Integrand& f, const QuadratureSpec& spec) {
  const double c = half_width(spec);
  return integrate_interval(f, -c, c, spec);
}

QuadratureResult integrate_interval(const Integrand& f, double a, double b, const QuadratureSpec& spec) {
  VectorIntegrand vf = [&f](double x, std::span<double> out) { out[0] = f(x); };
  return scalar(run_interval(1, vf, a, b, spec));
}

VectorQuadratureResult integrate_many(std::size_t count, const VectorIntegrand& f, const QuadratureSpec& spec) {
  const double c = half_width(spec);
  return run_interval(count, f, -c, c, spec);
}

double cdf(const Integrand& density, double x, const QuadratureSpec& spec) {
  const double c = half_width(spec);
  if (x <= -c) return 0.0;
  return integrate_interval(density, -c, std::min(x, c), spec).value;
}

QuadratureResult double_integrate(const std::function<double(double, double)>& f, const QuadratureSpec& spec) {
  QuadratureSpec inner = spec;
  inner.abs_tol = 0.1 * spec.abs_tol;
  inner.rel_tol = 0.1 * spec.rel_tol;
  double inner_err = 0.0;
  const auto outer = integrate(
      [&](double x) {
        const auto r = integrate([&](double y) { return f(x, y); }, inner);
        inner_err = std::max(inner_err, r.error_estimate);
        return r.value;
      },
      spec);
  const double width = 2.0 * half_width(spec);
  return QuadratureResult{outer.value, outer.error_estimate + width * inner_err, outer.panels};
}

}  // namespace qnormal
