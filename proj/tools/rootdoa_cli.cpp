#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rootdoa/agcd.hpp"
#include "rootdoa/bench.hpp"
#include "rootdoa/cluster.hpp"
#include "rootdoa/estimators.hpp"
#include "rootdoa/io.hpp"
#include "rootdoa/model.hpp"
#include "rootdoa/subspace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rootdoa;

namespace {

constexpr int kDigits = 12;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

double r12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

json num_list(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(r12(x));
  return out;
}

json complex_list(const std::vector<Complex>& zs) {
  json out = json::array();
  for (Complex z : zs) out.push_back(format_complex(z, kDigits));
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse number '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw ConfigError("cannot parse number '" + item + "'");
    }
    out.push_back(value);
  }
  return out;
}

RootSource parse_roots(const std::string& name) {
  if (name == "all") return RootSource::all;
  if (name == "noise") return RootSource::noise;
  throw ConfigError("--roots must be 'all' or 'noise'");
}

CMatrix read_input(const std::string& path) {
  try {
    return load_snapshots(path);
  } catch (const ConfigError& e) {
    throw std::runtime_error(e.what());
  }
}

SubspaceDecomposition decompose(const CMatrix& x) { return hermitian_eig(sample_covariance(x)); }

void print(const json& j) { std::cout << j.dump() << '\n'; }

// simulate

struct SimulateArgs {
  std::string scenario_path;
  int n = 10;
  std::optional<std::string> doas;
  int t = 100;
  double snr = 10.0;
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string out;
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  auto* cmd = app.add_subcommand("simulate", "Simulate ULA snapshots and write them to a file");
  cmd->add_option("--scenario", a.scenario_path,
                  "Scenario JSON {n_sensors, doas_deg, snapshots, snr_db, seed}; replaces inline flags");
  cmd->add_option("--n", a.n, "Number of sensors (count)")->capture_default_str();
  cmd->add_option("--doas", a.doas, "Comma-separated directions of arrival (degrees, open interval -90..90)");
  cmd->add_option("--t", a.t, "Number of snapshots (count)")->capture_default_str();
  cmd->add_option("--snr", a.snr, "Per-source SNR (dB)")->capture_default_str();
  cmd->add_option("--seed", a.seed, "RNG seed (unsigned 64-bit integer)")->capture_default_str();
  cmd->add_option("--format", a.format, "Output format: csv or bin")->capture_default_str();
  cmd->add_option("--out", a.out, "Output snapshot file path")->required();
}

int run_simulate(const SimulateArgs& a) {
  Scenario sc;
  if (!a.scenario_path.empty()) {
    sc = load_scenario(a.scenario_path);
  } else {
    if (!a.doas) throw UsageError("simulate needs --scenario or --doas");
    sc = Scenario{a.n, parse_doubles(*a.doas), a.t, a.snr, a.seed};
  }
  if (a.format != "csv" && a.format != "bin") throw ConfigError("--format must be 'csv' or 'bin'");
  const SnapshotMatrix x = generate_snapshots(sc);
  std::ofstream os(a.out, a.format == "bin" ? std::ios::binary : std::ios::out);
  if (!os) throw std::runtime_error("cannot open output file " + a.out);
  if (a.format == "bin") {
    write_snapshots_binary(os, x.data);
  } else {
    write_snapshots_csv(os, x.data);
  }
  os.close();
  if (!os) throw std::runtime_error("failed writing " + a.out);
  print({{"out", a.out},
         {"format", a.format},
         {"scenario", scenario_to_json(sc)},
         {"rows", x.data.rows()},
         {"cols", x.data.cols()}});
  return 0;
}

// detect and locate share their flags

struct EstimateArgs {
  std::string in;
  std::string method;
  std::optional<double> delta;
  double snr = 10.0;
  std::optional<double> zeta;
  std::string roots = "all";
  std::optional<int> l;
  double tol = 1e-12;
  int max_iter = 50;
};

void add_estimate_flags(CLI::App* cmd, EstimateArgs& a, const std::string& methods) {
  cmd->add_option("--in", a.in, "Snapshot file (CSV or binary)")->required();
  cmd->add_option("--method", a.method, "Method: " + methods)->required();
  cmd->add_option("--delta", a.delta, "Root clustering radius (unit-circle distance); default follows --snr");
  cmd->add_option("--snr", a.snr, "Assumed SNR used to pick the default radius (dB)")->capture_default_str();
  cmd->add_option("--roots", a.roots, "Roots to cluster: all or noise")->capture_default_str();
  cmd->add_option("--tol", a.tol, "Gauss-Newton step tolerance (coefficient 2-norm)")->capture_default_str();
  cmd->add_option("--max-iter", a.max_iter, "Gauss-Newton iteration cap (count)")->capture_default_str();
}

EstimatorSettings settings_from(const EstimateArgs& a, int snapshots) {
  EstimatorSettings s;
  s.snapshots = snapshots;
  s.snr_db = a.snr;
  s.delta = a.delta;
  s.roots = parse_roots(a.roots);
  s.gcd.tol = a.tol;
  s.gcd.max_iter = a.max_iter;
  if (a.delta && !(*a.delta > 0.0)) throw ConfigError("--delta must be positive");
  if (!(a.tol > 0.0)) throw ConfigError("--tol must be positive");
  if (a.max_iter < 1) throw ConfigError("--max-iter must be >= 1");
  return s;
}

int run_detect(const EstimateArgs& a) {
  if (a.method != "aic" && a.method != "mdl" && a.method != "cluster" && a.method != "agcd") {
    throw ConfigError("unknown detect method '" + a.method + "'");
  }
  if (a.zeta && !(*a.zeta > 0.0)) throw ConfigError("--zeta must be positive");
  const double zeta = a.zeta.value_or(1e-2);
  const CMatrix x = read_input(a.in);
  const EstimatorSettings s = settings_from(a, static_cast<int>(x.cols()));
  const SubspaceDecomposition d = decompose(x);
  const int n = d.size();

  json details;
  json eig = json::array();
  for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) eig.push_back(r12(d.eigenvalues[i]));
  details["eigenvalues"] = eig;
  int l_hat = 0;
  if (a.method == "aic" || a.method == "mdl") {
    const Estimate e = run_method(parse_method(a.method), d, s);
    l_hat = e.l_hat;
    const OrderScores sc = order_scores({d.eigenvalues.data(), static_cast<std::size_t>(n)}, s.snapshots);
    details["scores"] = num_list(a.method == "aic" ? sc.aic : sc.mdl);
  } else if (a.method == "cluster") {
    const Estimate e = run_method(Method::cluster, d, s);
    l_hat = e.l_hat;
    details["delta"] = r12(s.delta ? *s.delta : default_delta(s.snr_db, n, s.schedule));
    details["doas_deg"] = num_list(e.doas_deg);
  } else {
    const ComplexPolynomial qi = eigenvector_polynomial(d.eigenvectors.col(n - 2));
    const ComplexPolynomial qj = eigenvector_polynomial(d.eigenvectors.col(n - 1));
    const GcdSolution sol = uvgcd(qi, qj, zeta, s.gcd);
    l_hat = std::max(sol.degree(), 0);
    details["zeta"] = r12(zeta);
    details["epsilon"] = r12(sol.epsilon);
    details["certificate_residual"] = r12(sol.certificate_residual);
    details["iterations"] = sol.iterations;
    details["roots"] = complex_list(sol.gcd_roots());
  }
  print({{"method", a.method}, {"l_hat", l_hat}, {"details", details}});
  return 0;
}

int run_locate(const EstimateArgs& a) {
  Method m;
  if (a.method == "rootmusic") {
    m = Method::rootmusic;
  } else if (a.method == "rootmusic_mdl") {
    m = Method::rootmusic_mdl;
  } else if (a.method == "cluster") {
    m = Method::cluster;
  } else if (a.method == "cluster+certify") {
    m = Method::cluster_certify;
  } else {
    throw ConfigError("unknown locate method '" + a.method + "'");
  }
  if (m == Method::rootmusic && (!a.l || *a.l < 1)) throw ConfigError("rootmusic needs --l >= 1");
  const CMatrix x = read_input(a.in);
  EstimatorSettings s = settings_from(a, static_cast<int>(x.cols()));
  if (a.l && *a.l >= static_cast<int>(x.rows())) throw ConfigError("--l must be below the sensor count");
  s.true_sources = a.l;
  const Estimate e = run_method(m, decompose(x), s);
  json out{{"method", a.method}, {"l_hat", e.l_hat}, {"doas_deg", num_list(e.doas_deg)}};
  if (m == Method::cluster_certify) {
    out["certificate_residual"] = e.certificate_residual ? json(r12(*e.certificate_residual)) : json(nullptr);
    if (e.epsilon) out["epsilon"] = r12(*e.epsilon);
    if (e.iterations) out["iterations"] = *e.iterations;
  }
  print(out);
  return 0;
}

// gcd

struct GcdArgs {
  std::string f;
  std::string g;
  double zeta = 1e-8;
  int max_iter = 50;
  double tol = 1e-12;
};

int run_gcd(const GcdArgs& a) {
  if (!(a.zeta > 0.0)) throw ConfigError("--zeta must be positive");
  if (!(a.tol > 0.0)) throw ConfigError("--tol must be positive");
  if (a.max_iter < 1) throw ConfigError("--max-iter must be >= 1");
  const ComplexPolynomial f(parse_complex_list(a.f));
  const ComplexPolynomial g(parse_complex_list(a.g));
  const GcdSolution sol = uvgcd(f, g, a.zeta, {a.tol, a.max_iter});
  std::vector<Complex> coeffs;
  for (int i = 0; i < static_cast<int>(sol.u.size()); ++i) coeffs.push_back(sol.u[i]);
  print({{"degree", std::max(sol.degree(), 0)},
         {"roots", complex_list(sol.gcd_roots())},
         {"epsilon", r12(sol.epsilon)},
         {"certificate_residual", r12(sol.certificate_residual)},
         {"iterations", sol.iterations},
         {"u", complex_list(coeffs)}});
  return 0;
}

// bench

struct BenchArgs {
  std::string config_path;
  int n = 10;
  std::string doas = "-10,20";
  int t = 100;
  double snr_start = -15.0;
  double snr_stop = 30.0;
  double snr_step = 3.0;
  int trials = 500;
  std::string methods = "mdl,cluster";
  std::uint64_t seed = 0;
  std::optional<double> delta;
  std::string roots = "all";
  unsigned workers = 0;
  std::string out;
};

int run_bench(const BenchArgs& a) {
  SweepConfig cfg;
  if (!a.config_path.empty()) {
    std::ifstream in(a.config_path);
    if (!in) throw ConfigError("cannot open sweep config " + a.config_path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad sweep config JSON: ") + e.what());
    }
    cfg = sweep_config_from_json(j);
  } else {
    cfg.num_sensors = a.n;
    cfg.doas_deg = parse_doubles(a.doas);
    cfg.snapshots = a.t;
    cfg.snr_start_db = a.snr_start;
    cfg.snr_stop_db = a.snr_stop;
    cfg.snr_step_db = a.snr_step;
    cfg.trials = a.trials;
    std::stringstream ss(a.methods);
    std::string name;
    while (std::getline(ss, name, ',')) cfg.methods.push_back(parse_method(name));
    cfg.master_seed = a.seed;
    cfg.delta = a.delta;
    cfg.roots = parse_roots(a.roots);
  }
  cfg.workers = a.workers;
  cfg.validate();

  const std::vector<MetricRow> rows = run_sweep(cfg);
  std::ofstream os(a.out);
  if (!os) throw std::runtime_error("cannot open output file " + a.out);
  write_metrics_csv(os, rows, cfg.num_sensors);
  fs::path sidecar(a.out);
  sidecar.replace_extension(".json");
  if (sidecar == fs::path(a.out)) sidecar += ".config.json";
  std::ofstream js(sidecar);
  if (!js) throw std::runtime_error("cannot open sidecar file " + sidecar.string());
  js << sweep_config_to_json(cfg).dump(2) << '\n';
  print({{"out", a.out}, {"sidecar", sidecar.string()}, {"rows", rows.size()}});
  return 0;
}

int fail(const std::string& kind, const std::string& detail, int code) {
  std::cerr << json{{"error", kind}, {"detail", detail}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Root-based direction-of-arrival estimation for uniform linear arrays"};
  app.require_subcommand(1);

  SimulateArgs sim;
  add_simulate(app, sim);

  EstimateArgs det;
  auto* detect = app.add_subcommand("detect", "Estimate the number of sources from a snapshot file");
  add_estimate_flags(detect, det, "aic, mdl, cluster or agcd");
  detect->add_option("--zeta", det.zeta, "agcd perturbation budget (coefficient 2-norm)")->default_str("0.01");

  EstimateArgs loc;
  auto* locate = app.add_subcommand("locate", "Estimate directions of arrival from a snapshot file");
  add_estimate_flags(locate, loc, "rootmusic, rootmusic_mdl, cluster or cluster+certify");
  locate->add_option("--l", loc.l, "Source count for rootmusic (count)");

  GcdArgs gcd;
  auto* gcd_cmd = app.add_subcommand("gcd", "Approximate GCD of two polynomials");
  gcd_cmd->add_option("--f", gcd.f, "Coefficients of f, ascending powers, comma-separated re+imj")->required();
  gcd_cmd->add_option("--g", gcd.g, "Coefficients of g, ascending powers, comma-separated re+imj")->required();
  gcd_cmd->add_option("--zeta", gcd.zeta, "Perturbation budget (coefficient 2-norm)")->capture_default_str();
  gcd_cmd->add_option("--max-iter", gcd.max_iter, "Gauss-Newton iteration cap (count)")->capture_default_str();
  gcd_cmd->add_option("--tol", gcd.tol, "Gauss-Newton step tolerance (coefficient 2-norm)")->capture_default_str();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Monte Carlo sweep over SNR; writes metrics CSV and a JSON sidecar");
  bench_cmd->add_option("--config", bench.config_path, "Sweep config JSON; replaces the grid and method flags");
  bench_cmd->add_option("--n", bench.n, "Number of sensors (count)")->capture_default_str();
  bench_cmd->add_option("--doas", bench.doas, "Comma-separated directions of arrival (degrees)")->capture_default_str();
  bench_cmd->add_option("--t", bench.t, "Snapshots per trial (count)")->capture_default_str();
  bench_cmd->add_option("--snr-start", bench.snr_start, "First SNR of the grid (dB)")->capture_default_str();
  bench_cmd->add_option("--snr-stop", bench.snr_stop, "Last SNR of the grid, inclusive (dB)")->capture_default_str();
  bench_cmd->add_option("--snr-step", bench.snr_step, "SNR grid step (dB)")->capture_default_str();
  bench_cmd->add_option("--trials", bench.trials, "Monte Carlo trials per SNR (count)")->capture_default_str();
  bench_cmd->add_option("--methods", bench.methods,
                        "Comma-separated: aic, mdl, cluster, rootmusic, rootmusic_mdl, cluster_certify")
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "Master seed (unsigned 64-bit integer)")->capture_default_str();
  bench_cmd->add_option("--delta", bench.delta, "Fixed clustering radius (unit-circle distance); default follows SNR");
  bench_cmd->add_option("--roots", bench.roots, "Roots to cluster: all or noise")->capture_default_str();
  bench_cmd->add_option("--workers", bench.workers, "Worker threads, 0 = hardware concurrency (count)")
      ->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "Metrics CSV path; the sidecar uses the .json extension")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage_error", e.what(), 2);
  }

  try {
    if (app.got_subcommand("simulate")) return run_simulate(sim);
    if (app.got_subcommand("detect")) return run_detect(det);
    if (app.got_subcommand("locate")) return run_locate(loc);
    if (app.got_subcommand("gcd")) return run_gcd(gcd);
    if (app.got_subcommand("bench")) return run_bench(bench);
    return fail("usage_error", "no subcommand given", 2);
  } catch (const UsageError& e) {
    return fail("usage_error", e.what(), 2);
  } catch (const ConfigError& e) {
    return fail("config_error", e.what(), 2);
  } catch (const DomainError& e) {
    return fail("domain_error", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("runtime_error", e.what(), 1);
  }
}
