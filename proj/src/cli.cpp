#include "qnormal/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qnormal/densities.hpp"
#include "qnormal/errors.hpp"
#include "qnormal/expansions.hpp"
#include "qnormal/multivariate.hpp"
#include "qnormal/sampling.hpp"
#include "qnormal/verify.hpp"

namespace qnormal::cli {
namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Physical defaults; QNORM_CONFIG may point to a JSON file overriding any key.
struct Defaults {
  int points = 201;
  std::uint64_t seed = 20240601;
  std::size_t samples = 10000;
  int grid_size = 2048;
  double tail_tol = 1e-15;
  std::int64_t max_terms = 200000;
  double line_half_width = 5.0;  // plotting window for q = 1

  json to_json() const {
    return {{"points", points},       {"seed", seed},           {"samples", samples},
            {"grid_size", grid_size}, {"tail_tol", tail_tol},   {"max_terms", max_terms},
            {"line_half_width", line_half_width}};
  }
};

Defaults load_defaults() {
  Defaults d;
  const char* path = std::getenv("QNORM_CONFIG");
  if (!path || !*path) return d;
  std::ifstream in(path);
  if (!in) throw UsageError(std::string("cannot read QNORM_CONFIG file ") + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad QNORM_CONFIG file: ") + e.what());
  }
  for (const auto& [key, v] : j.items()) {
    if (key == "points") d.points = v.get<int>();
    else if (key == "seed") d.seed = v.get<std::uint64_t>();
    else if (key == "samples") d.samples = v.get<std::size_t>();
    else if (key == "grid_size") d.grid_size = v.get<int>();
    else if (key == "tail_tol") d.tail_tol = v.get<double>();
    else if (key == "max_terms") d.max_terms = v.get<std::int64_t>();
    else if (key == "line_half_width") d.line_half_width = v.get<double>();
    else throw UsageError("unknown QNORM_CONFIG key: " + key);
  }
  return d;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

json manifest(const std::string& sub, const json& params, const Defaults& d) {
  return {{"tool", "qnorm"},        {"version", kVersion},      {"subcommand", sub},
          {"parameters", params},   {"seed", params.value("seed", d.seed)},
          {"defaults", d.to_json()}, {"timestamp", timestamp()}};
}

std::string num(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

// Writes to --out when given (manifest beside it), otherwise to the stream.
void emit(const std::string& path, const std::string& body, const json& man, std::ostream& out) {
  if (path.empty()) {
    out << body;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
  f << body;
  std::ofstream m(path + ".manifest.json", std::ios::binary);
  m << man.dump(2) << '\n';
}

struct Common {
  double q = 0.0;
  std::vector<double> rho;
  std::optional<double> t;
  std::vector<double> m;
  std::vector<double> sigma2;
  int d = 0;
  std::optional<std::uint64_t> seed;
  std::optional<int> points;
  std::optional<double> tol;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--q", c.q, "deformation parameter q in (-1, 1]");
  app->add_option("--rho", c.rho, "correlation parameter (repeatable)");
  app->add_option("--t", c.t, "generating-function parameter t");
  app->add_option("--m", c.m, "means (repeatable)");
  app->add_option("--sigma2", c.sigma2, "variances (repeatable)");
  app->add_option("--d", c.d, "dimension");
  app->add_option("--seed", c.seed, "random seed");
  app->add_option("--points", c.points, "grid points / sample count");
  app->add_option("--tol", c.tol, "tolerance override");
  app->add_option("--out", c.out, "output file");
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

json common_params(const Common& c) {
  json p{{"q", c.q}, {"rho", c.rho}, {"format", c.format}};
  if (c.t) p["t"] = *c.t;
  if (!c.m.empty()) p["m"] = c.m;
  if (!c.sigma2.empty()) p["sigma2"] = c.sigma2;
  if (c.d) p["d"] = c.d;
  if (c.seed) p["seed"] = *c.seed;
  if (c.points) p["points"] = *c.points;
  if (c.tol) p["tol"] = *c.tol;
  return p;
}

std::string table(const std::vector<std::string>& cols, const std::vector<std::vector<double>>& rows,
                  const std::string& format, const json& man) {
  if (format == "json") {
    json j{{"manifest", man}, {"columns", cols}, {"rows", rows}};
    return j.dump(2) + "\n";
  }
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + cols[i];
  s += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + num(r[i]);
    s += '\n';
  }
  return s;
}

double need_rho(const Common& c, std::size_t i, const char* what) {
  if (c.rho.size() <= i) throw UsageError(std::string("--rho required: ") + what);
  return c.rho[i];
}

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1);
  return g;
}

int cmd_density(const Common& c, const std::string& family, double y, double z, const Defaults& d,
                std::ostream& out) {
  const QParam q(c.q);
  TruncationPolicy pol;
  pol.tail_tol = c.tol.value_or(d.tail_tol);
  pol.max_terms = d.max_terms;
  pol.validate();
  const int n = c.points.value_or(d.points);
  if (n < 1) throw UsageError("--points must be positive");
  const Support sup = Support::of(q);
  const double lo = sup.bounded() ? sup.lo : -d.line_half_width;
  const double hi = sup.bounded() ? sup.hi : d.line_half_width;
  json params = common_params(c);
  params["family"] = family;
  params["points"] = n;

  std::vector<std::vector<double>> rows;
  std::vector<std::string> cols{"x", "density"};
  if (family == "qn" || family == "mn") {
    const double m = c.m.empty() ? 0.0 : c.m[0];
    const double s2 = c.sigma2.empty() ? 1.0 : c.sigma2[0];
    if (family == "mn" && !c.t) throw UsageError("--t required for family mn");
    if (family == "mn" && (m != 0.0 || s2 != 1.0)) throw UsageError("family mn is standardized; drop --m/--sigma2");
    if (family == "mn" && !((1.0 - q.value()) * *c.t * *c.t < 1.0)) throw ParamOutOfRange("need (1-q) t^2 < 1");
    const double s = std::sqrt(s2);
    for (double u : grid(lo, hi, n)) {
      const double v = family == "qn" ? f_N(u, q, pol) / s : f_MN(u, *c.t, q, pol);
      rows.push_back({m + s * u, v});
    }
  } else if (family == "cn" || family == "mcn") {
    const CondParams cp(y, need_rho(c, 0, "family cn/mcn"), q);
    params["y"] = y;
    if (family == "mcn" && !c.t) throw UsageError("--t required for family mcn");
    for (double x : grid(lo, hi, n)) rows.push_back({x, family == "cn" ? f_CN(x, cp, pol) : f_MCN(x, *c.t, cp, pol)});
  } else if (family == "aw") {
    const double r1 = need_rho(c, 0, "family aw needs two values");
    const double r2 = need_rho(c, 1, "family aw needs two values");
    params["y"] = y;
    params["z"] = z;
    for (double x : grid(lo, hi, n)) rows.push_back({x, aw_conditional(x, y, z, r1, r2, q, pol)});
  } else if (family == "joint2d") {
    MVQNormalSpec spec = MVQNormalSpec::standard({need_rho(c, 0, "family joint2d")}, q);
    if (!c.m.empty()) spec.m = c.m;
    if (!c.sigma2.empty()) spec.sigma2 = c.sigma2;
    spec.validate();
    cols = {"x", "y", "density"};
    const double s1 = std::sqrt(spec.sigma2[0]), s2 = std::sqrt(spec.sigma2[1]);
    for (double u : grid(lo, hi, n))
      for (double v : grid(lo, hi, n)) {
        const double xs[2] = {spec.m[0] + s1 * u, spec.m[1] + s2 * v};
        rows.push_back({xs[0], xs[1], joint_density(xs, spec, pol)});
      }
  } else {
    throw UsageError("unknown family " + family + " (qn, cn, mn, mcn, aw, joint2d)");
  }
  const json man = manifest("density", params, d);
  emit(c.out, table(cols, rows, c.format, man), man, out);
  return kOk;
}

MVQNormalSpec spec_from(const Common& c, const std::string& spec_file) {
  if (!spec_file.empty()) {
    std::ifstream in(spec_file);
    if (!in) throw UsageError("cannot read spec file " + spec_file);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw UsageError(std::string("bad spec file: ") + e.what());
    }
    return j.get<MVQNormalSpec>();
  }
  MVQNormalSpec s;
  s.d = c.d ? c.d : static_cast<int>(c.rho.size()) + 1;
  s.rho = c.rho;
  s.m = c.m.empty() ? std::vector<double>(s.d, 0.0) : c.m;
  s.sigma2 = c.sigma2.empty() ? std::vector<double>(s.d, 1.0) : c.sigma2;
  s.q = QParam(c.q);
  s.t = c.t;
  s.validate();
  return s;
}

int cmd_sample(const Common& c, const std::string& spec_file, std::optional<std::size_t> n_opt, const Defaults& d,
               std::ostream& out) {
  const MVQNormalSpec spec = spec_from(c, spec_file);
  SamplerConfig cfg;
  cfg.seed = c.seed.value_or(d.seed);
  cfg.grid_size = d.grid_size;
  const std::size_t n = n_opt.value_or(c.points ? static_cast<std::size_t>(*c.points) : d.samples);
  const SampleBatch batch = sample_chain(spec, n, cfg);

  json params = common_params(c);
  params["spec"] = spec;
  params["samples"] = n;
  params["seed"] = cfg.seed;
  const json man = manifest("sample", params, d);

  // analytic vs empirical first two moments and correlations
  json summary = batch_summary(batch, spec, cfg);
  std::vector<double> emean(spec.d), evar(spec.d), amean(spec.d), avar(spec.d);
  for (int i = 0; i < spec.d; ++i) {
    const auto& rm = batch.raw_moments[i];
    emean[i] = rm[0];
    evar[i] = rm[1] - rm[0] * rm[0];
    double ti = spec.t.value_or(0.0);
    for (int k = 0; k < i; ++k) ti *= spec.rho[k];
    amean[i] = spec.m[i] + std::sqrt(spec.sigma2[i]) * ti;
    avar[i] = spec.sigma2[i];
  }
  json ecorr = json::array(), acorr = json::array();
  for (int i = 0; i < spec.d; ++i) {
    json er = json::array(), ar = json::array();
    for (int j = 0; j < spec.d; ++j) {
      er.push_back(i == j ? 1.0 : batch.correlation(i, j));
      double p = 1.0;
      for (int k = std::min(i, j); k < std::max(i, j); ++k) p *= spec.rho[k];
      ar.push_back(p);
    }
    ecorr.push_back(er);
    acorr.push_back(ar);
  }
  summary["empirical"] = {{"mean", emean}, {"variance", evar}, {"correlation", ecorr}};
  summary["analytic"] = {{"mean", amean}, {"variance", avar}, {"correlation", acorr}};
  summary["manifest"] = man;

  if (c.format == "json") {
    emit(c.out, summary.dump(2) + "\n", man, out);
    return kOk;
  }
  std::ostringstream csv;
  write_csv(csv, batch);
  emit(c.out, csv.str(), man, out);
  if (!c.out.empty()) {
    std::ofstream s(c.out + ".json", std::ios::binary);
    s << summary.dump(2) << '\n';
  }
  return kOk;
}

json probe_json(const ConjectureReport& r) {
  json e = json::array();
  for (const auto& x : r.entries) {
    json j{{"r", x.r}, {"s", x.s}, {"ratio", x.ratio}, {"spread", x.spread}, {"factorizes", x.factorizes}};
    if (x.has_printed) j["printed"] = x.printed;
    e.push_back(j);
  }
  return {{"n", r.n}, {"entries", e}, {"max_fit_residual", r.max_fit_residual}};
}

int cmd_coeffs(const Common& c, int n, bool probe, const Defaults& d, std::ostream& out) {
  const QParam q(c.q);
  const double rl = need_rho(c, 0, "coeffs needs rho_left and rho_right");
  const double rr = need_rho(c, 1, "coeffs needs rho_left and rho_right");
  json params = common_params(c);
  params["n"] = n;
  params["probe"] = probe;
  const json man = manifest("coeffs", params, d);
  json doc{{"manifest", man}};
  if (n > 4 && !probe) throw UsageError("--n must be in 1..4 (use --probe for n = 5, 6)");
  if (n <= 4) {
    const ACoeffTable ls = solve_A(n, rl, rr, q, ARoute::linear_system);
    const ACoeffTable io = solve_A(n, rl, rr, q, ARoute::interpolation_oracle);
    double diff = 0.0;
    for (const auto& [k, v] : ls.entries) diff = std::max(diff, std::fabs(v - io.at(k.first, k.second)));
    doc["linear_system"] = ls;
    doc["linear_system"]["condition"] = ls.condition;
    doc["interpolation_oracle"] = io;
    doc["interpolation_oracle"]["condition"] = io.condition;
    doc["max_discrepancy"] = diff;
  }
  if (probe) doc["conjecture_probe"] = probe_json(conjecture_probe(n, rl, rr, q));
  emit(c.out, doc.dump(2) + "\n", man, out);
  return kOk;
}

int cmd_verify(const Common& c, const std::vector<std::string>& only, bool q_given, const Defaults& d,
               std::ostream& out) {
  VerifyOptions o;
  if (c.rho.size() || c.t || c.d) throw UsageError("verify accepts --q, --tol and --only");
  if (c.tol) o.tol = *c.tol;
  o.only = only;
  for (const auto& name : only) {
    bool known = false;
    for (const auto& chk : check_registry()) known |= chk.name == name || std::to_string(chk.id) == name;
    if (!known) throw UsageError("unknown check " + name);
  }
  json params = common_params(c);
  params["only"] = only;
  if (q_given) o.q = QParam(c.q).value();
  const auto results = run_checks(o);
  bool failed = false;
  for (const auto& r : results) failed |= !r.passed && !r.skipped;
  const json man = manifest("verify", params, d);
  std::string body;
  if (c.format == "json") {
    body = json{{"manifest", man}, {"results", to_json(results)}, {"passed", !failed}}.dump(2) + "\n";
  } else {
    for (const auto& r : results) body += format_line(r) + "\n";
    body += failed ? "verification FAILED\n" : "verification passed\n";
  }
  emit(c.out, body, man, out);
  return failed ? kVerifyFailed : kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"qnorm: q-Normal densities, sampling, coefficients and verification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common dc, sc, cc, vc;
  std::string family = "qn";
  double y = 0.0, z = 0.0;
  auto* density = app.add_subcommand("density", "density values on a grid");
  add_common(density, dc);
  density->add_option("--family", family, "qn, cn, mn, mcn, aw or joint2d");
  density->add_option("--y", y, "conditioning value y");
  density->add_option("--z", z, "second conditioning value z (aw)");

  std::string spec_file;
  std::optional<std::size_t> n_samples;
  auto* sample = app.add_subcommand("sample", "draw chains X_1 -> ... -> X_d");
  add_common(sample, sc);
  sample->add_option("--spec", spec_file, "JSON spec file (d, m, sigma2, rho, q, t)");
  sample->add_option("--n", n_samples, "number of samples");

  int n = 1;
  bool probe = false;
  auto* coeffs = app.add_subcommand("coeffs", "regression coefficients A^{(n)}");
  add_common(coeffs, cc);
  coeffs->add_option("--n", n, "order n")->check(CLI::Range(1, 6));
  coeffs->add_flag("--probe", probe, "report A_{r,s}/A_{0,s} ratios over a rho grid");

  std::vector<std::string> only;
  auto* verify = app.add_subcommand("verify", "run the identity checks");
  add_common(verify, vc);
  verify->add_option("--only", only, "check name or number (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const Defaults d = load_defaults();
    if (*density) return cmd_density(dc, family, y, z, d, out);
    if (*sample) return cmd_sample(sc, spec_file, n_samples, d, out);
    if (*coeffs) return cmd_coeffs(cc, n, probe, d, out);
    if (*verify) return cmd_verify(vc, only, verify->count("--q") > 0, d, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParamOutOfRange& e) {
    err << "parameter error: " << e.what() << '\n';
    return kUsage;
  } catch (const SingularSystem& e) {
    err << "numerical error: " << e.what() << " (condition estimate " << e.condition() << ")\n";
    return kNumerical;
  } catch (const IllConditioned& e) {
    err << "numerical error: " << e.what() << " (condition estimate " << e.condition() << ")\n";
    return kNumerical;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const nlohmann::json::exception& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace qnormal::cli
