// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Runtime-limited criteria time themselves.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "spx/calibration.hpp"
#include "spx/cli.hpp"
#include "spx/diagnostics.hpp"
#include "spx/io.hpp"
#include "spx/patterns.hpp"
#include "spx/reconstruction.hpp"
#include "spx/recognisability.hpp"
#include "spx/sensing.hpp"
#include "spx/synthdata.hpp"

namespace fs = std::filesystem;
using namespace spx;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL",
              criterion, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::VectorXd random_scene_vector(long n, std::uint64_t seed) {
  Xoshiro256pp gen(seed);
  Eigen::VectorXd x(n);
  for (long i = 0; i < n; ++i) x[i] = gen.uniform();
  return x;
}

// ---- criterion 1 --------------------------------------------------------

void criterion_exact_recovery() {
  const auto start = Clock::now();
  const PatternLibrary lib = gen_hadamard(256, 16, 16);
  const SensingOperator op = select(lib, 256);
  ReconConfig cfg;
  cfg.method = ReconMethod::ridge;
  cfg.lambda = 1e-12;
  double worst = 0.0;
  for (int s = 0; s < 10; ++s) {
    const Eigen::VectorXd x = random_scene_vector(256, 9000 + s);
    const Eigen::VectorXd y = measure(op, make_scene(16, 16, x),
                                      NoiseModel::none(), 0);
    const ReconResult result = reconstruct_ridge(op, y, cfg);
    worst = std::max(worst, (result.x_hat.values - x).norm() / x.norm());
  }
  const double elapsed = seconds_since(start);
  report(1, "exact recovery at full Hadamard sampling",
         worst < 1e-8 && elapsed < 5.0,
         "max relative error " + format_double(worst) + ", " +
             format_double(elapsed) + " s");
}

// ---- criterion 2 --------------------------------------------------------

void criterion_gradient_checks() {
  bool pass = true;
  std::string detail;

  // Data-consistency gradient against central differences.
  double worst_data = 0.0;
  for (int point = 0; point < 20; ++point) {
    const PatternLibrary lib = gen_speckle(4, 4, 4, 300 + point);
    const SensingOperator op = select(lib, 4);
    Xoshiro256pp gen(500 + point);
    Eigen::VectorXd x(16), y(4);
    for (int i = 0; i < 16; ++i) x[i] = gen.uniform(-1.0, 1.0);
    for (int i = 0; i < 4; ++i) y[i] = gen.uniform(-2.0, 2.0);
    const auto objective = [&](const Eigen::VectorXd& v) {
      return 0.5 * (y - op.effective * v).squaredNorm();
    };
    const double h = 1e-6;
    Eigen::VectorXd fd(16);
    for (int i = 0; i < 16; ++i) {
      Eigen::VectorXd hi = x, lo = x;
      hi[i] += h;
      lo[i] -= h;
      fd[i] = (objective(hi) - objective(lo)) / (2 * h);
    }
    const double rel =
        (data_gradient(op, x, y) - fd).norm() / std::max(fd.norm(), 1e-300);
    worst_data = std::max(worst_data, rel);
  }
  pass = pass && worst_data < 1e-6;

  // Softmax cross-entropy gradient against central differences.
  double worst_softmax = 0.0;
  {
    Xoshiro256pp data_gen(12);
    const int samples = 30, dim = 6, k = 4;
    Eigen::MatrixXd features(samples, dim);
    std::vector<int> labels(samples);
    for (int s = 0; s < samples; ++s) {
      labels[s] = static_cast<int>(data_gen.uniform_int(k));
      for (int j = 0; j < dim; ++j) features(s, j) = data_gen.gaussian();
    }
    for (int c = 0; c < k; ++c) labels[c] = c;
    const LabeledMeasurementSet data = make_labeled_set(
        features, labels, k, Task::privacy, 0.1, Split::train);
    const double l2 = 1e-4, h = 1e-5;
    for (int point = 0; point < 20; ++point) {
      Xoshiro256pp gen(800 + point);
      Eigen::MatrixXd weights(k, dim);
      Eigen::VectorXd bias(k);
      for (int i = 0; i < weights.size(); ++i)
        weights(i / dim, i % dim) = 0.5 * gen.gaussian();
      for (int i = 0; i < k; ++i) bias[i] = 0.5 * gen.gaussian();
      const auto [grad_w, grad_b] = softmax_grad(weights, bias, data, l2);
      Eigen::MatrixXd fd_w(k, dim);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < dim; ++j) {
          Eigen::MatrixXd hi = weights, lo = weights;
          hi(i, j) += h;
          lo(i, j) -= h;
          fd_w(i, j) = (softmax_loss(hi, bias, data, l2) -
                        softmax_loss(lo, bias, data, l2)) /
                       (2 * h);
        }
      Eigen::VectorXd fd_b(k);
      for (int i = 0; i < k; ++i) {
        Eigen::VectorXd hi = bias, lo = bias;
        hi[i] += h;
        lo[i] -= h;
        fd_b[i] = (softmax_loss(weights, hi, data, l2) -
                   softmax_loss(weights, lo, data, l2)) /
                  (2 * h);
      }
      worst_softmax = std::max(worst_softmax,
                               (grad_w - fd_w).norm() / fd_w.norm());
      worst_softmax = std::max(worst_softmax,
                               (grad_b - fd_b).norm() / fd_b.norm());
    }
  }
  pass = pass && worst_softmax < 1e-6;
  report(2, "gradients match central finite differences", pass,
         "data " + format_double(worst_data) + ", softmax " +
             format_double(worst_softmax));
}

// ---- criterion 3 --------------------------------------------------------

void criterion_whitening() {
  const long m = 16;
  const NoiseModel noise = NoiseModel::ar1(1.0, 0.8);
  const WhiteningTransform transform = build_whitening(noise, m);
  const auto lower = transform.factor.triangularView<Eigen::Lower>();
  const int draws = 100000;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < draws; ++k) {
    Xoshiro256pp gen(column_seed(2024, k));
    const Eigen::VectorXd white = lower.solve(noise.sample(m, gen));
    cov.selfadjointView<Eigen::Lower>().rankUpdate(white);
  }
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= draws;
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(m, m);
  const double distance = (cov - identity).norm() / identity.norm();
  report(3, "whitened AR(1) noise has identity covariance", distance < 0.05,
         "relative Frobenius distance " + format_double(distance));
}

// ---- criteria 4-6 (one sweep campaign) -----------------------------------

struct SweepCampaign {
  std::vector<SafeInterval> intervals;
  AccuracyCurve first_priv;
  AccuracyCurve first_beh;
  double elapsed = 0.0;
};

SweepCampaign run_sweep_campaign() {
  SweepCampaign campaign;
  const auto start = Clock::now();
  const std::vector<long> rates{8, 16, 32, 64, 128, 256, 512};
  SynthSpec spec;  // defaults: 32x32, 20 identities, 4 behaviors, 50/class
  for (std::uint64_t master = 1; master <= 10; ++master) {
    SweepOptions options;
    options.trials = 10;
    options.seed = master;
    const AccuracyCurve beh = sweep(Task::behavior, rates, spec, options);
    const AccuracyCurve priv = sweep(Task::privacy, rates, spec, options);
    campaign.intervals.push_back(safe_interval(beh, priv, 0.7, 0.15));
    if (master == 1) {
      campaign.first_beh = beh;
      campaign.first_priv = priv;
    }
  }
  campaign.elapsed = seconds_since(start);
  return campaign;
}

void criterion_safe_interval(const SweepCampaign& campaign) {
  int nonempty = 0;
  for (const SafeInterval& interval : campaign.intervals)
    if (interval.interval.has_value() &&
        *interval.rho_beh_star < *interval.rho_priv_star)
      ++nonempty;
  const bool pass = nonempty >= 8 && campaign.elapsed < 600.0;
  report(4, "safe interval exists across master seeds", pass,
         std::to_string(nonempty) + "/10 nonempty, " +
             format_double(campaign.elapsed) + " s");
}

void criterion_identity_suppression(const SweepCampaign& campaign) {
  const CurvePoint& lowest = campaign.first_priv.points.front();
  const double chance = 1.0 / 20.0;
  const bool pass = lowest.m == 8 && lowest.mean_accuracy <= chance + 0.05;
  report(5, "identity stays near chance at the lowest rate", pass,
         "accuracy " + format_double(lowest.mean_accuracy) + " vs bound " +
             format_double(chance + 0.05));
}

double spearman_rank_correlation(const std::vector<double>& values) {
  // Values are indexed by an already strictly increasing rho grid; ranks of
  // ties are averaged.
  const std::size_t n = values.size();
  std::vector<double> ranks(n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double average_rank = 0.5 * (i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = average_rank;
    i = j + 1;
  }
  const double mean_rank = 0.5 * (n + 1);
  double cov = 0.0, var_x = 0.0, var_y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i + 1) - mean_rank;
    const double dy = ranks[i] - mean_rank;
    cov += dx * dy;
    var_x += dx * dx;
    var_y += dy * dy;
  }
  return cov / std::sqrt(var_x * var_y);
}

void criterion_monotone_trend(const SweepCampaign& campaign) {
  const auto& points = campaign.first_beh.points;
  const double gap =
      points.back().mean_accuracy - points.front().mean_accuracy;
  std::vector<double> accuracies;
  for (const auto& point : points) accuracies.push_back(point.mean_accuracy);
  const double spearman = spearman_rank_correlation(accuracies);
  report(6, "behavior accuracy rises with the sampling rate",
         gap >= 0.2 && spearman >= 0.8,
         "gap " + format_double(gap) + ", Spearman " +
             format_double(spearman));
}

// ---- criterion 7 --------------------------------------------------------

void criterion_kronecker() {
  const PatternLibrary lib = gen_speckle(2, 2, 2, 404);
  const SensingOperator op = select(lib, 2);
  Xoshiro256pp gen(405);
  Eigen::MatrixXd frames(4, 3);
  for (int i = 0; i < 4; ++i)
    for (int t = 0; t < 3; ++t) frames(i, t) = gen.uniform();
  Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(6, 12);
  for (int t = 0; t < 3; ++t) kron.block(t * 2, t * 4, 2, 4) = op.effective;
  Eigen::VectorXd vec_x(12);
  for (int t = 0; t < 3; ++t) vec_x.segment(t * 4, 4) = frames.col(t);
  const Eigen::VectorXd expected = kron * vec_x;
  const Eigen::VectorXd actual =
      kron_vec_apply(op, make_frame_batch(2, 2, frames));
  const double error = (actual - expected).norm();
  report(7, "kron_vec_apply equals the explicit Kronecker product",
         error <= 1e-12, "absolute error " + format_double(error));
}

// ---- criterion 8 --------------------------------------------------------

void criterion_tv_solver() {
  bool monotone = true;
  double worst_step = 0.0;
  for (int problem = 0; problem < 20; ++problem) {
    const PatternLibrary lib = gen_speckle(12, 4, 4, 600 + problem);
    const SensingOperator op = select(lib, 12);
    Xoshiro256pp gen(700 + problem);
    Eigen::VectorXd y(12);
    for (int i = 0; i < 12; ++i) y[i] = gen.uniform(-1.0, 1.0);
    ReconConfig cfg;
    cfg.method = ReconMethod::tv;
    cfg.lambda = problem % 2 == 0 ? 0.05 : 0.2;
    cfg.max_iters = 400;
    const ReconResult result = reconstruct_tv(op, y, cfg);
    for (std::size_t i = 1; i < result.objective_trace.size(); ++i) {
      const double step =
          result.objective_trace[i] - result.objective_trace[i - 1];
      worst_step = std::max(worst_step, step);
      if (step > 1e-10) monotone = false;
    }
  }

  // lambda = 0 against the independent least-squares route on a full-rank
  // square system.
  const PatternLibrary lib = gen_hadamard(16, 4, 4);
  const SensingOperator op = select(lib, 16);
  Xoshiro256pp gen(811);
  Eigen::VectorXd y(16);
  for (int i = 0; i < 16; ++i) y[i] = gen.uniform(-1.0, 1.0);
  y /= y.norm();
  ReconConfig tv_cfg;
  tv_cfg.method = ReconMethod::tv;
  tv_cfg.lambda = 0.0;
  tv_cfg.max_iters = 5000;
  tv_cfg.tol = 1e-12;
  const ReconResult tv = reconstruct_tv(op, y, tv_cfg);
  const Eigen::VectorXd ls = op.effective.colPivHouseholderQr().solve(y);
  const double f_ls = 0.5 * (op.effective * ls - y).squaredNorm();
  const double mismatch = std::abs(tv.final_objective - f_ls);

  report(8, "tv solver is monotone and reduces to least squares",
         monotone && mismatch <= 1e-6,
         "worst step " + format_double(worst_step) + ", lambda-0 gap " +
             format_double(mismatch));
}

// ---- criterion 9 --------------------------------------------------------

void criterion_spectral() {
  const PatternLibrary lib = gen_speckle(64, 8, 8, 902);
  bool frobenius_ok = true;
  double worst_rel = 0.0;
  std::vector<double> masses;
  for (const long m : {8L, 16L, 32L, 64L}) {
    const SensingOperator op = select(lib, m);
    const SpectrumReport report_m = spectrum(op);
    const double frob = op.effective.squaredNorm();
    const double rel = std::abs(report_m.spectral_mass - frob) / frob;
    worst_rel = std::max(worst_rel, rel);
    if (rel > 1e-10) frobenius_ok = false;
    masses.push_back(report_m.spectral_mass);
  }
  bool nested_ok = true;
  for (std::size_t i = 1; i < masses.size(); ++i)
    if (!(masses[i] >= masses[i - 1])) nested_ok = false;
  report(9, "spectral mass equals Frobenius energy and nests",
         frobenius_ok && nested_ok,
         "worst relative gap " + format_double(worst_rel));
}

// ---- criterion 10 -------------------------------------------------------

std::map<std::string, std::string> run_default_pipeline(const fs::path& dir,
                                                        bool& ok) {
  const auto path = [&](const std::string& name) {
    return (dir / name).string();
  };
  ok = true;
  const auto step = [&](const std::vector<std::string>& args) {
    if (cli::run(args) != 0) ok = false;
  };
  step({"gen-patterns", "--kind", "speckle", "--n", "512", "--h", "32",
        "--w", "32", "--seed", "7", "--out", path("lib.spmx"), "--select",
        "64", "--operator-out", path("op.spmx")});
  step({"synth", "--task", "behavior", "--identities", "4",
        "--samples-per-class", "10", "--seed", "7", "--out-dir",
        path("data")});
  step({"measure", "--lib", path("lib.spmx"), "--m", "64", "--scene",
        path("data/instance_00000.spmx"), "--noise-kind", "iid_gaussian",
        "--sigma", "0.5", "--seed", "7", "--out", path("y.spmx")});
  step({"reconstruct", "--operator", path("op.spmx"), "--measurement",
        path("y.spmx"), "--method", "ridge", "--lambda", "0.05", "--out",
        path("xhat.spmx")});
  step({"diagnose", "--lib", path("lib.spmx"), "--m-list", "8,64,512",
        "--probes", "200", "--seed", "7", "--out", path("diag.csv")});
  step({"sweep", "--task", "behavior", "--rates", "8,16,32,64,128,256,512",
        "--seed", "7", "--out", path("beh.csv")});
  step({"sweep", "--task", "privacy", "--rates", "8,16,32,64,128,256,512",
        "--seed", "7", "--out", path("priv.csv")});
  step({"safe-interval", "--beh", path("beh.csv"), "--priv", path("priv.csv"),
        "--alpha", "0.7", "--beta", "0.15", "--out", path("report.txt")});

  std::map<std::string, std::string> digests;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    digests[fs::relative(entry.path(), dir).string()] =
        digest_hex(read_file_bytes(entry.path()));
  }
  return digests;
}

void criterion_determinism() {
  const fs::path base = fs::temp_directory_path() / "spx_acceptance";
  fs::remove_all(base);
  bool ok_a = false, ok_b = false;
  const auto run_a = run_default_pipeline(base / "a", ok_a);
  const auto run_b = run_default_pipeline(base / "b", ok_b);
  bool identical = ok_a && ok_b && run_a.size() == run_b.size();
  std::string mismatch;
  if (identical) {
    for (const auto& [name, digest] : run_a) {
      const auto found = run_b.find(name);
      if (found == run_b.end() || found->second != digest) {
        identical = false;
        mismatch = name;
        break;
      }
    }
  }
  // The end-to-end run must also land inside a nonempty interval.
  bool interval_ok = false;
  if (ok_a) {
    const KeyValueList report_kv = keyvalue_read(base / "a" / "report.txt");
    interval_ok = keyvalue_get(report_kv, "interval") != "EMPTY";
  }
  fs::remove_all(base);
  report(10, "default pipeline is bitwise deterministic",
         identical && interval_ok,
         identical ? std::to_string(run_a.size()) + " files match, interval " +
                         std::string(interval_ok ? "nonempty" : "EMPTY")
                   : "first mismatch: " + mismatch);
}

}  // namespace

int main() {
  criterion_exact_recovery();
  criterion_gradient_checks();
  criterion_whitening();
  const SweepCampaign campaign = run_sweep_campaign();
  criterion_safe_interval(campaign);
  criterion_identity_suppression(campaign);
  criterion_monotone_trend(campaign);
  criterion_kronecker();
  criterion_tv_solver();
  criterion_spectral();
  criterion_determinism();
  if (failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures;
}
