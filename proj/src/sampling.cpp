#include "qnormal/sampling.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <thread>

#include "qnormal/densities.hpp"
#include "qnormal/errors.hpp"

namespace qnormal {
namespace {

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

constexpr double kMargin = 1.05;

}  // namespace

void SamplerConfig::validate() const {
  if (grid_size < 256) throw ParamOutOfRange("grid_size must be >= 256");
  if (max_rejections < 1) throw ParamOutOfRange("max_rejections must be positive");
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

QNormalSampler::QNormalSampler(QParam q, const SamplerConfig& config)
    : q_(q), max_rejections_(config.max_rejections) {
  config.validate();
  if (q.is_classical()) return;
  require_product_q(q);
  const double qv = q.value();
  const double omq = 1.0 - qv;
  hi_ = 2.0 / std::sqrt(omq);
  lo_ = -hi_;
  // f_N = c0 sqrt(4-(1-q)x^2) prod_{k>=1} ((1+q^k)^2 - (1-q) q^k x^2)
  c0_ = std::sqrt(omq) * q_pochhammer(qv, q, infinity) / (2.0 * std::numbers::pi);
  const std::int64_t terms = product_terms(q, 8.0, {});
  double qk = qv;
  for (std::int64_t k = 1; k < terms; ++k) {
    a_.push_back((1.0 + qk) * (1.0 + qk));
    b_.push_back(omq * qk);
    qk *= qv;
  }
  double m = 0.0;
  for (int i = 0; i <= config.grid_size; ++i) m = std::max(m, density(lo_ + (hi_ - lo_) * i / config.grid_size));
  envelope_ = m * kMargin;
}

double QNormalSampler::density(double x) const {
  const double x2 = x * x;
  const double rad = 4.0 - (1.0 - q_.value()) * x2;
  if (rad <= 0.0) return 0.0;
  double p = c0_ * std::sqrt(rad);
  for (std::size_t k = 0; k < a_.size(); ++k) p *= a_[k] - b_[k] * x2;
  return p;
}

double QNormalSampler::draw(Rng& rng, double& dens) {
  if (q_.is_classical()) {
    dens = 0.0;
    return std::normal_distribution<double>(0.0, 1.0)(rng);
  }
  for (std::int64_t i = 0; i < max_rejections_; ++i) {
    ++proposals_;
    const double x = lo_ + (hi_ - lo_) * uniform01(rng);
    const double u = uniform01(rng);
    dens = density(x);
    assert(dens <= envelope_);
    if (u * envelope_ < dens) {
      ++accepted_;
      return x;
    }
  }
  throw TooManyRejections("q-Normal sampler exceeded max_rejections");
}

double QNormalSampler::operator()(Rng& rng) {
  double d = 0.0;
  return draw(rng, d);
}

FcnSampler::FcnSampler(double rho, QParam q, const SamplerConfig& config)
    : rho_(rho), q_(q), max_rejections_(config.max_rejections), base_(q, config) {
  if (!(std::fabs(rho) < 1.0)) throw ParamOutOfRange("|rho| must be < 1");
  if (q.is_classical()) return;
  c2_ = fcn_envelope_constant(rho, q);
  num_ = q_pochhammer(rho * rho, q, infinity);
  const double qv = q.value();
  const double omq = 1.0 - qv;
  const std::int64_t terms = product_terms(q, 32.0, {});
  double qk = 1.0;
  for (std::int64_t k = 0; k < terms; ++k) {
    const double r2q2k = rho * rho * qk * qk;
    A_.push_back((1.0 - r2q2k) * (1.0 - r2q2k));
    B_.push_back(omq * rho * qk * (1.0 + r2q2k));
    C_.push_back(omq * r2q2k);
    qk *= qv;
  }
}

double FcnSampler::ratio(double x, double y) const {
  const double s2 = x * x + y * y;
  const double xy = x * y;
  double den = 1.0;
  for (std::size_t k = 0; k < A_.size(); ++k) den *= A_[k] - B_[k] * xy + C_[k] * s2;
  return num_ / den;
}

double FcnSampler::draw(double y, Rng& rng) {
  if (q_.is_classical()) {
    const double z = std::normal_distribution<double>(0.0, 1.0)(rng);
    ++proposals_;
    ++accepted_;
    return rho_ * y + std::sqrt(1.0 - rho_ * rho_) * z;
  }
  for (std::int64_t i = 0; i < max_rejections_; ++i) {
    ++proposals_;
    const double x = base_(rng);
    const double u = uniform01(rng);
    const double r = ratio(x, y);
    if (r > c2_ * (1.0 + 1e-12)) ++violations_;
    assert(r <= c2_ * (1.0 + 1e-12));
    if (u * c2_ < r) {
      ++accepted_;
      return x;
    }
  }
  throw TooManyRejections("f_CN sampler exceeded max_rejections");
}

std::vector<double> sample_qnormal(QParam q, std::size_t n, const SamplerConfig& config) {
  QNormalSampler s(q, config);
  Rng rng = make_stream(config.seed, 0);
  std::vector<double> out(n);
  for (auto& v : out) v = s(rng);
  return out;
}

std::vector<double> sample_fcn(double y, double rho, QParam q, std::size_t n, const SamplerConfig& config) {
  CondParams check(y, rho, q);
  (void)check;
  FcnSampler s(rho, q, config);
  Rng rng = make_stream(config.seed, 0);
  std::vector<double> out(n);
  for (auto& v : out) v = s.draw(y, rng);
  return out;
}

std::vector<double> SampleBatch::column(int i) const {
  std::vector<double> c(rows);
  for (std::size_t r = 0; r < rows; ++r) c[r] = at(r, i);
  return c;
}

double SampleBatch::correlation(int i, int j) const {
  double mi = 0, mj = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    mi += at(r, i);
    mj += at(r, j);
  }
  mi /= rows;
  mj /= rows;
  double sij = 0, sii = 0, sjj = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double a = at(r, i) - mi;
    const double b = at(r, j) - mj;
    sij += a * b;
    sii += a * a;
    sjj += b * b;
  }
  return sij / std::sqrt(sii * sjj);
}

namespace {

struct Worker {
  QNormalSampler start;
  std::vector<FcnSampler> steps;
  std::int64_t start_proposals = 0, start_accepted = 0;
  std::int64_t mn_proposals = 0, mn_accepted = 0;
};

}  // namespace

SampleBatch sample_chain(const MVQNormalSpec& spec, std::size_t n_samples, const SamplerConfig& config) {
  spec.validate();
  config.validate();
  if (spec.experimental != ExperimentalFamily::none)
    throw ParamOutOfRange("sampling is not available for experimental families");
  const int d = spec.d;
  const QParam q = spec.q;

  // MN start: accept an f_N draw with probability phi(x,t)/max phi
  double phi_max = 1.0;
  if (spec.t && !q.is_classical()) {
    const Support sup = Support::of(q);
    phi_max = 0.0;
    for (int i = 0; i <= config.grid_size; ++i)
      phi_max = std::max(phi_max, phi_gen(sup.lo + sup.width() * i / config.grid_size, *spec.t, q));
    phi_max *= kMargin;
  }

  SampleBatch batch;
  batch.rows = n_samples;
  batch.d = d;
  batch.draws.assign(n_samples * d, 0.0);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nthreads = std::max<unsigned>(
      1, std::min<std::size_t>(config.threads ? config.threads : hw, std::max<std::size_t>(n_samples, 1)));

  auto make_worker = [&] {
    Worker w{QNormalSampler(q, config), {}};
    for (int i = 0; i + 1 < d; ++i) w.steps.emplace_back(spec.rho[i], q, config);
    return w;
  };
  std::vector<Worker> workers;
  workers.reserve(nthreads);
  for (unsigned i = 0; i < nthreads; ++i) workers.push_back(make_worker());

  auto run = [&](unsigned w_id, std::size_t begin, std::size_t end) {
    Worker& w = workers[w_id];
    std::vector<double> z(d);
    for (std::size_t row = begin; row < end; ++row) {
      Rng rng = make_stream(config.seed, row);
      if (spec.t) {
        if (q.is_classical()) {
          z[0] = *spec.t + std::normal_distribution<double>(0.0, 1.0)(rng);  // phi * f_N = N(t, 1)
          ++w.mn_proposals;
          ++w.mn_accepted;
        } else {
          std::int64_t tries = 0;
          while (true) {
            if (++tries > config.max_rejections) throw TooManyRejections("modified start exceeded max_rejections");
            ++w.mn_proposals;
            const double x = w.start(rng);
            if (uniform01(rng) * phi_max < phi_gen(x, *spec.t, q)) {
              ++w.mn_accepted;
              z[0] = x;
              break;
            }
          }
        }
      } else {
        z[0] = w.start(rng);
      }
      for (int i = 1; i < d; ++i) z[i] = w.steps[i - 1].draw(z[i - 1], rng);
      for (int i = 0; i < d; ++i) batch.draws[row * d + i] = spec.m[i] + std::sqrt(spec.sigma2[i]) * z[i];
    }
  };

  if (nthreads == 1) {
    run(0, 0, n_samples);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_samples + nthreads - 1) / nthreads;
    for (unsigned t = 0; t < nthreads; ++t) {
      const std::size_t b = std::min(n_samples, t * chunk);
      const std::size_t e = std::min(n_samples, b + chunk);
      pool.emplace_back(run, t, b, e);
    }
    for (auto& th : pool) th.join();
  }

  // telemetry
  StageStats s0{"start", 0, 0, workers[0].start.envelope()};
  for (const auto& w : workers) {
    s0.proposals += w.start.proposals();
    s0.accepted += w.start.accepted();
  }
  batch.stages.push_back(s0);
  if (spec.t) {
    StageStats mn{"modified_start", 0, 0, phi_max};
    for (const auto& w : workers) {
      mn.proposals += w.mn_proposals;
      mn.accepted += w.mn_accepted;
    }
    batch.stages.push_back(mn);
  }
  for (int i = 0; i + 1 < d; ++i) {
    StageStats st{"transition_" + std::to_string(i + 1), 0, 0, workers[0].steps[i].envelope()};
    for (const auto& w : workers) {
      st.proposals += w.steps[i].proposals();
      st.accepted += w.steps[i].accepted();
      batch.envelope_violations += w.steps[i].envelope_violations();
    }
    if (st.proposals > 0 && st.rate() < 1.0 / (10.0 * st.envelope))
      batch.warnings.push_back(st.name + ": acceptance rate " + std::to_string(st.rate()) + " below 1/(10 C2)");
    batch.stages.push_back(st);
  }
  if (batch.envelope_violations > 0)
    batch.warnings.push_back("f_CN exceeded the envelope " + std::to_string(batch.envelope_violations) + " times");

  batch.raw_moments.assign(d, {0.0, 0.0, 0.0, 0.0});
  for (std::size_t r = 0; r < n_samples; ++r)
    for (int i = 0; i < d; ++i) {
      const double x = batch.at(r, i);
      double p = 1.0;
      for (int k = 0; k < 4; ++k) {
        p *= x;
        batch.raw_moments[i][k] += p;
      }
    }
  if (n_samples > 0)
    for (auto& m : batch.raw_moments)
      for (auto& v : m) v /= static_cast<double>(n_samples);
  return batch;
}

void write_csv(std::ostream& os, const SampleBatch& batch) {
  os << "chain,step,value\n";
  char buf[64];
  for (std::size_t r = 0; r < batch.rows; ++r)
    for (int i = 0; i < batch.d; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", batch.at(r, i));
      os << r << ',' << (i + 1) << ',' << buf << '\n';
    }
}

nlohmann::json batch_summary(const SampleBatch& batch, const MVQNormalSpec& spec, const SamplerConfig& config) {
  nlohmann::json j;
  j["spec"] = spec;
  j["config"] = {{"seed", config.seed}, {"grid_size", config.grid_size}, {"max_rejections", config.max_rejections}};
  j["rows"] = batch.rows;
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : batch.stages)
    stages.push_back({{"name", s.name}, {"proposals", s.proposals}, {"accepted", s.accepted}, {"rate", s.rate()},
                      {"envelope", s.envelope}});
  j["stages"] = stages;
  j["raw_moments"] = batch.raw_moments;
  j["envelope_violations"] = batch.envelope_violations;
  j["warnings"] = batch.warnings;
  return j;
}

}  // namespace qnormal
