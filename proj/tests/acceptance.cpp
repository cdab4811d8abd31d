// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rootdoa/agcd.hpp"
#include "rootdoa/bench.hpp"
#include "rootdoa/estimators.hpp"
#include "rootdoa/model.hpp"
#include "rootdoa/poly.hpp"
#include "rootdoa/rng.hpp"
#include "rootdoa/subspace.hpp"

using namespace rootdoa;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Complex electrical(double theta_deg) { return std::polar(1.0, kPi * std::sin(deg2rad(theta_deg))); }

Complex rand_c(std::mt19937_64& gen) {
  std::normal_distribution<double> nd(0.0, 1.0);
  return {nd(gen), nd(gen)};
}

Complex on_circle(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> ud(-kPi, kPi);
  return std::polar(1.0, ud(gen));
}

ComplexPolynomial rand_poly(std::mt19937_64& gen, int degree) {
  std::vector<Complex> c;
  for (int k = 0; k <= degree; ++k) c.push_back(rand_c(gen));
  return ComplexPolynomial(c);
}

std::vector<Complex> separated(std::mt19937_64& gen, int count, double sep) {
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::vector<Complex> out;
  while (static_cast<int>(out.size()) < count) {
    const Complex z = std::polar(std::sqrt(ud(gen)), 2.0 * kPi * ud(gen));
    bool ok = true;
    for (Complex w : out) ok = ok && std::abs(z - w) >= sep;
    if (ok) out.push_back(z);
  }
  return out;
}

double match_error(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return INFINITY;
  std::vector<std::size_t> p(a.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = i;
  double best = INFINITY;
  do {
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) worst = std::max(worst, std::abs(a[p[i]] - b[i]));
    best = std::min(best, worst);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

// Well-separated DOAs in (-60, 60) with at least 10 degrees between them.
std::vector<double> random_doas(std::mt19937_64& gen, int l) {
  std::uniform_real_distribution<double> ud(-60.0, 60.0);
  std::vector<double> out;
  while (static_cast<int>(out.size()) < l) {
    const double th = ud(gen);
    bool ok = true;
    for (double o : out) ok = ok && std::abs(o - th) >= 10.0;
    if (ok) out.push_back(th);
  }
  return out;
}

CMatrix random_orthonormal(std::mt19937_64& gen, int n, int cols) {
  CMatrix m(n, cols);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rand_c(gen);
  Eigen::HouseholderQR<CMatrix> qr(m);
  return qr.householderQ() * CMatrix::Identity(n, cols);
}

struct Instance {
  std::vector<double> doas;
  CMatrix q_n;
};

std::vector<Instance> ideal_instances() {
  std::mt19937_64 gen(20240601);
  std::vector<Instance> out;
  for (int i = 0; i < 100; ++i) {
    const int l = 1 + i % 3;
    Instance inst;
    inst.doas = random_doas(gen, l);
    const SubspaceDecomposition d = hermitian_eig(exact_covariance(inst.doas, 1.0, 0.1, 10));
    inst.q_n = noise_subspace(d, l);
    out.push_back(std::move(inst));
  }
  return out;
}

Outcome c1_ideal_structure() {
  const auto t0 = Clock::now();
  int ok = 0;
  for (const Instance& inst : ideal_instances()) {
    ComplexPolynomial g = eigenvector_polynomial(inst.q_n.col(0));
    for (Eigen::Index c = 1; c < inst.q_n.cols(); ++c) {
      g = euclid_gcd(g, eigenvector_polynomial(inst.q_n.col(c)), 1e-8);
    }
    std::vector<Complex> truth;
    for (double th : inst.doas) truth.push_back(electrical(th));
    if (g.degree() == static_cast<int>(truth.size()) && match_error(roots(g), truth) <= 1e-6) ++ok;
  }
  const double secs = seconds_since(t0);
  return {ok == 100 && secs < 5.0, fmt("%.0f/100 instances exact, %.2f s", ok, secs)};
}

Outcome c2_orthogonality() {
  double worst = 0.0;
  for (const Instance& inst : ideal_instances()) {
    const CMatrix a = steering_matrix(inst.doas, 10);
    worst = std::max(worst, (a.adjoint() * inst.q_n).norm());
  }
  return {worst <= 1e-8, fmt("max ||A^H Q_n||_F = %.3g", worst)};
}

Outcome c3_root_music_equivalence() {
  std::mt19937_64 gen(3);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int cols = 1 + i % 9;
    const CMatrix q = random_orthonormal(gen, 10, cols);
    for (int s = 0; s < 100; ++s) worst = std::max(worst, theorem1_gap(q, on_circle(gen)));
  }
  return {worst <= 1e-10, fmt("max gap = %.3g", worst)};
}

Outcome c4_appendix_identity() {
  std::mt19937_64 gen(4);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const ComplexPolynomial f = rand_poly(gen, 6);
    const ComplexPolynomial g = rand_poly(gen, 6);
    const Complex alpha = i % 2 ? on_circle(gen) : rand_c(gen);
    const NearestPerturbation p = nearest_perturbations(f, g, alpha);
    const std::vector<ComplexPolynomial> both{f, g};
    worst = std::max(worst, std::abs(p.lambda.squaredNorm() + p.mu.squaredNorm() - epsilon_min(both, alpha)));
  }
  return {worst <= 1e-10, fmt("max |identity gap| = %.3g", worst)};
}

Outcome c5_sylvester_gate() {
  std::mt19937_64 gen(5);
  int ok = 0, total = 0;
  for (int i = 0; i < 200; ++i, ++total) {
    const bool coprime = i % 4 == 3;
    const int du = coprime ? 0 : 1 + i % 3;
    const int dc = 2 + i % 2;
    const auto r = separated(gen, du + 2 * dc, 0.3);
    const std::vector<Complex> ur(r.begin(), r.begin() + du);
    const ComplexPolynomial u = from_roots(ur);
    const ComplexPolynomial f = u * from_roots(std::vector<Complex>(r.begin() + du, r.begin() + du + dc));
    const ComplexPolynomial g = u * from_roots(std::vector<Complex>(r.begin() + du + dc, r.end()));
    const GcdSolution s = uvgcd(f, g, 1e-6);
    if (s.degree() != du) continue;
    if (du > 0 && match_error(s.gcd_roots(), ur) > 1e-6) continue;
    ++ok;
  }
  return {ok == total, fmt("%.0f/%.0f instances recovered", ok, total)};
}

Outcome c6_gauss_newton_certificate() {
  std::mt19937_64 gen(6);
  double exact_res = 0.0, pert_eps = 0.0, pert_res = 0.0;
  int exact_steps = 0;
  for (int i = 0; i < 50; ++i) {
    const int du = 1 + i % 3;
    const auto r = separated(gen, du + 6, 0.3);
    const ComplexPolynomial u = from_roots(std::vector<Complex>(r.begin(), r.begin() + du));
    const ComplexPolynomial v = from_roots(std::vector<Complex>(r.begin() + du, r.begin() + du + 3));
    const ComplexPolynomial w = from_roots(std::vector<Complex>(r.begin() + du + 3, r.end()));
    const ComplexPolynomial f = u * v, g = u * w;
    const CVector rr = u.to_vector() / u.to_vector().squaredNorm();
    const GcdSolution exact = gauss_newton_refine({u.to_vector(), v.to_vector(), w.to_vector()}, f, g, rr, 1e-12, 50);
    exact_res = std::max(exact_res, exact.certificate_residual);
    exact_steps = std::max(exact_steps, exact.iterations);

    auto perturb = [&](const ComplexPolynomial& p) {
      CVector e(static_cast<Eigen::Index>(p.size()));
      for (Eigen::Index k = 0; k < e.size(); ++k) e[k] = rand_c(gen);
      return ComplexPolynomial::from_vector(p.to_vector() + 1e-4 * e / e.norm());
    };
    const GcdSolution noisy =
        gauss_newton_refine({u.to_vector(), v.to_vector(), w.to_vector()}, perturb(f), perturb(g), rr, 1e-12, 50);
    pert_eps = std::max(pert_eps, noisy.epsilon);
    pert_res = std::max(pert_res, noisy.certificate_residual);
  }
  // One iteration that computes a zero step is the fixed point.
  const bool pass = exact_steps <= 1 && exact_res <= 1e-14 && pert_eps <= 1e-3 && pert_res <= 1e-10;
  return {pass, fmt("exact: iterations %.0f residual %.3g; perturbed: eps %.3g residual %.3g", exact_steps,
                    exact_res, pert_eps, pert_res)};
}

SubspaceDecomposition draw(std::vector<double> doas, double snr, std::uint64_t seed) {
  const Scenario sc{10, std::move(doas), 100, snr, seed};
  return hermitian_eig(sample_covariance(generate_snapshots(sc)));
}

double median(std::vector<double> v) {
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

Outcome c7_convergence_speed() {
  std::vector<double> iters;
  EstimatorSettings s;
  s.snr_db = 20.0;
  for (int t = 0; t < 50; ++t) {
    const Estimate e = cluster_then_certify(draw({-10.0, 20.0}, 20.0, derive_seed(7, static_cast<std::uint64_t>(t))), s);
    if (e.iterations) iters.push_back(*e.iterations);
  }
  const double med = median(iters);
  return {!iters.empty() && med < 10.0, fmt("median iterations %.1f over %.0f certified trials", med, iters.size())};
}

SweepConfig sweep(std::vector<double> doas, double snr, int trials, std::vector<Method> methods, std::uint64_t seed) {
  SweepConfig cfg;
  cfg.num_sensors = 10;
  cfg.doas_deg = std::move(doas);
  cfg.snapshots = 100;
  cfg.snr_start_db = snr;
  cfg.snr_stop_db = snr;
  cfg.trials = trials;
  cfg.methods = std::move(methods);
  cfg.master_seed = seed;
  return cfg;
}

Outcome c8_wide_detection() {
  const auto t0 = Clock::now();
  const SweepConfig cfg = sweep({-10.0, 20.0}, 0.0, 500, {Method::cluster}, 8);
  const auto rows = run_sweep(cfg);
  const MetricRow& r = rows.front();
  int over = 0;
  for (std::size_t k = 3; k < r.histogram.size(); ++k) over += r.histogram[k];
  const double over_rate = static_cast<double>(over) / r.trials;
  const double secs = seconds_since(t0);
  const bool pass = r.p_correct >= 0.95 && over_rate <= 0.01 && secs < 120.0;
  return {pass, fmt("p_correct %.3f, overestimation %.3f, %.1f s", r.p_correct, over_rate, secs) +
                    " (l_hat 0..3: " + std::to_string(r.histogram[0]) + "," + std::to_string(r.histogram[1]) + "," +
                    std::to_string(r.histogram[2]) + "," + std::to_string(r.histogram[3]) + ")"};
}

Outcome c9_close_separation() {
  std::string detail;
  bool pass = true;
  for (double snr : {18.0, 24.0, 30.0}) {
    const auto rows = run_sweep(sweep({31.0, 32.0}, snr, 200, {Method::cluster}, 9));
    pass = pass && rows.front().p_correct >= 0.9;
    detail += fmt("cluster p_correct %.3f at %.0f dB; ", rows.front().p_correct, snr);
  }
  const auto mdl = run_sweep(sweep({31.0, 32.0}, 3.0, 200, {Method::mdl}, 9));
  pass = pass && mdl.front().p_correct <= 0.1;
  detail += fmt("MDL p_correct %.3f at 3 dB", mdl.front().p_correct);
  return {pass, detail};
}

Outcome c10_rmse() {
  const auto rows =
      run_sweep(sweep({-10.0, 20.0}, 10.0, 200, {Method::rootmusic, Method::cluster, Method::cluster_certify}, 10));
  const double rm = rows[0].rmse_deg, cl = rows[1].rmse_deg;

  // Per-trial RMSE on the trials where both cluster and certify found two sources.
  const SweepConfig cfg = sweep({-10.0, 20.0}, 10.0, 200, {Method::cluster, Method::cluster_certify}, 10);
  const auto recs = run_trials(cfg);
  std::vector<double> before, after;
  const std::vector<double> truth{-10.0, 20.0};
  auto err = [&](const std::vector<double>& e) { return rmse({e}, truth).rmse_deg; };
  for (int t = 0; t < cfg.trials; ++t) {
    const TrialRecord& a = recs[static_cast<std::size_t>(t)];
    const TrialRecord& b = recs[static_cast<std::size_t>(cfg.trials + t)];
    if (a.doas_deg.size() != 2 || b.doas_deg.size() != 2) continue;
    before.push_back(err(a.doas_deg));
    after.push_back(err(b.doas_deg));
  }
  const double mb = median(before), ma = median(after);
  const bool pass = rm < 0.5 && cl <= 2.0 * rm && ma <= 1.05 * mb;
  return {pass, fmt("root-MUSIC %.4f deg, cluster %.4f deg, median per-trial RMSE cluster %.4f -> certify %.4f", rm,
                    cl, mb, ma)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string capture(const std::string& args) {
  const std::string cmd = std::string("\"") + ROOTDOA_CLI + "\" " + args + " 2>&1";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return "<popen failed>";
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return out + "#exit=" + std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1);
}

Outcome c11_determinism() {
  const fs::path dir(ROOTDOA_TEST_TMP);
  fs::create_directories(dir);
  const std::string sim = "--n 10 --doas -10,20 --t 100 --snr 5 --seed 11";
  std::vector<std::string> runs[2];
  for (int rep = 0; rep < 2; ++rep) {
    const std::string tag = std::to_string(rep);
    const std::string csv = (dir / ("x" + tag + ".csv")).string();
    const std::string bin = (dir / ("x" + tag + ".bin")).string();
    const std::string metrics = (dir / ("m" + tag + ".csv")).string();
    auto& r = runs[rep];
    capture("simulate " + sim + " --out " + csv);
    capture("simulate " + sim + " --format bin --out " + bin);
    r.push_back(slurp(csv));
    r.push_back(slurp(bin));
    for (const char* m : {"aic", "mdl", "cluster", "agcd"}) {
      r.push_back(capture("detect --in " + csv + " --method " + m));
    }
    for (const char* m : {"rootmusic --l 2", "rootmusic_mdl", "cluster", "cluster+certify"}) {
      r.push_back(capture("locate --in " + bin + " --method " + m));
    }
    r.push_back(capture("gcd --f=1,-3,2 --g=-2,1,1"));
    capture("bench --n 10 --doas -10,20 --t 100 --snr-start 0 --snr-stop 6 --snr-step 3 --trials 20 "
            "--methods aic,mdl,cluster,rootmusic,cluster_certify --seed 11 --workers " + std::to_string(rep + 1) +
            " --out " + metrics);
    r.push_back(slurp(metrics));
  }
  int diffs = 0;
  for (std::size_t i = 0; i < runs[0].size(); ++i) diffs += runs[0][i] != runs[1][i];
  return {diffs == 0, fmt("%.0f of %.0f outputs differ between repeated runs", diffs, runs[0].size())};
}

Outcome c12_table_regime() {
  std::vector<double> ratios;
  for (int t = 0; t < 200; ++t) {
    const SubspaceDecomposition d = draw({31.0, 32.0}, 10.0, derive_seed(12, static_cast<std::uint64_t>(t)));
    ratios.push_back(d.eigenvalues[0] / d.eigenvalues[1]);
  }
  const double med = median(ratios);
  return {med > 50.0, fmt("median lambda1/lambda2 = %.1f", med)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 ideal-structure GCD", c1_ideal_structure},
      {"2 orthogonality", c2_orthogonality},
      {"3 root-MUSIC equivalence", c3_root_music_equivalence},
      {"4 perturbation identity", c4_appendix_identity},
      {"5 Sylvester gate", c5_sylvester_gate},
      {"6 Gauss-Newton certificate", c6_gauss_newton_certificate},
      {"7 convergence speed", c7_convergence_speed},
      {"8 wide-scenario detection", c8_wide_detection},
      {"9 close-scenario separation", c9_close_separation},
      {"10 RMSE sanity", c10_rmse},
      {"11 determinism", c11_determinism},
      {"12 eigenvalue ratio regime", c12_table_regime},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
