#pragma once

// Exact rejection samplers for the q-Normal law, f_CN transitions and whole
// chains X_1 -> ... -> X_d. Every chain row draws from its own engine seeded
// by (seed, row), so results do not depend on the thread count.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "qnormal/multivariate.hpp"
#include "qnormal/qseries.hpp"

namespace qnormal {

using Rng = std::mt19937_64;

struct SamplerConfig {
  std::uint64_t seed = 20240601;
  int grid_size = 2048;
  std::int64_t max_rejections = 10'000'000;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
};

Rng make_stream(std::uint64_t seed, std::uint64_t stream);

// f_N by rejection from the uniform law on S(q).
class QNormalSampler {
 public:
  QNormalSampler(QParam q, const SamplerConfig& config);

  double operator()(Rng& rng);
  // Same draw, also returning f_N at the draw (0 for q = 1).
  double draw(Rng& rng, double& density);
  // Product form of f_N with cached factors.
  double density(double x) const;

  double envelope() const { return envelope_; }
  std::int64_t proposals() const { return proposals_; }
  std::int64_t accepted() const { return accepted_; }

 private:
  QParam q_;
  std::int64_t max_rejections_;
  double lo_ = 0.0, hi_ = 0.0;
  double c0_ = 0.0;
  std::vector<double> a_, b_;  // factor k: a_k - b_k x^2
  double envelope_ = 1.0;      // sup f_N with margin
  std::int64_t proposals_ = 0, accepted_ = 0;
};

// f_CN(.|y, rho, q) with f_N proposals and the constant (rho^2)_inf/(|rho|)_inf^4.
class FcnSampler {
 public:
  FcnSampler(double rho, QParam q, const SamplerConfig& config);

  double draw(double y, Rng& rng);
  // f_CN(x|y) / f_N(x) from cached factors.
  double ratio(double x, double y) const;

  double envelope() const { return c2_; }
  std::int64_t proposals() const { return proposals_; }
  std::int64_t accepted() const { return accepted_; }
  std::int64_t envelope_violations() const { return violations_; }
  const QNormalSampler& base() const { return base_; }

 private:
  double rho_;
  QParam q_;
  std::int64_t max_rejections_;
  QNormalSampler base_;
  double c2_ = 1.0;
  double num_ = 1.0;  // (rho^2)_inf
  std::vector<double> A_, B_, C_;
  std::int64_t proposals_ = 0, accepted_ = 0, violations_ = 0;
};

std::vector<double> sample_qnormal(QParam q, std::size_t n, const SamplerConfig& config);
std::vector<double> sample_fcn(double y, double rho, QParam q, std::size_t n, const SamplerConfig& config);

struct StageStats {
  std::string name;
  std::int64_t proposals = 0;
  std::int64_t accepted = 0;
  double envelope = 1.0;
  double rate() const { return proposals ? static_cast<double>(accepted) / proposals : 0.0; }
};

struct SampleBatch {
  std::size_t rows = 0;
  int d = 0;
  std::vector<double> draws;  // row-major rows x d
  std::vector<StageStats> stages;
  std::vector<std::array<double, 4>> raw_moments;  // E X_i^p, p = 1..4
  std::int64_t envelope_violations = 0;
  std::vector<std::string> warnings;

  double at(std::size_t row, int i) const { return draws[row * d + i]; }
  std::vector<double> column(int i) const;
  double correlation(int i, int j) const;
};

SampleBatch sample_chain(const MVQNormalSpec& spec, std::size_t n_samples, const SamplerConfig& config);

// CSV "chain,step,value"; chain is the row, step the 1-based coordinate.
void write_csv(std::ostream& os, const SampleBatch& batch);
nlohmann::json batch_summary(const SampleBatch& batch, const MVQNormalSpec& spec, const SamplerConfig& config);

}  // namespace qnormal
