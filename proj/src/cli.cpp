#include "spx/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "spx/calibration.hpp"
#include "spx/diagnostics.hpp"
#include "spx/errors.hpp"
#include "spx/io.hpp"
#include "spx/patterns.hpp"
#include "spx/reconstruction.hpp"
#include "spx/recognisability.hpp"
#include "spx/sensing.hpp"
#include "spx/synthdata.hpp"
#include "spx/version.hpp"

namespace fs = std::filesystem;

namespace spx::cli {

namespace {

// Staged outputs of one command invocation. Nothing touches the filesystem
// until finish(), which either writes everything or (--check) compares the
// staged bytes against the existing files.
class CommandRun {
 public:
  CommandRun(std::string command, bool check)
      : command_(std::move(command)), check_(check) {}

  void param(const std::string& name, const std::string& value) {
    params_.emplace_back("param." + name, value);
  }
  void param(const std::string& name, double value) {
    param(name, format_double(value));
  }
  void param(const std::string& name, long long value) {
    param(name, std::to_string(value));
  }
  void param(const std::string& name, std::uint64_t value) {
    param(name, std::to_string(value));
  }

  // Registers an input file and returns its bytes.
  std::string input(const std::string& name, const fs::path& path) {
    std::string bytes = read_file_bytes(path);
    inputs_.emplace_back(name, path);
    input_digests_.emplace_back(digest_hex(bytes));
    return bytes;
  }

  void output(const fs::path& path, std::string bytes) {
    outputs_.emplace_back(path, std::move(bytes));
  }

  // Builds one manifest per primary output (covering all staged outputs),
  // then writes or verifies. Paths are recorded relative to the manifest's
  // directory where possible, so reruns in different directories produce
  // identical manifests. Returns the process exit code.
  int finish(const std::vector<fs::path>& primaries) {
    for (const fs::path& primary : primaries) {
      const fs::path base = primary.parent_path();
      const auto portable = [&base](const fs::path& path) {
        const fs::path rel = path.lexically_relative(base);
        if (rel.empty() || *rel.begin() == "..") return path.string();
        return rel.string();
      };
      KeyValueList manifest;
      manifest.emplace_back("command", command_);
      manifest.emplace_back("version", kVersion);
      for (const auto& kv : params_) manifest.push_back(kv);
      for (std::size_t i = 0; i < inputs_.size(); ++i) {
        const auto& [name, path] = inputs_[i];
        manifest.emplace_back("input." + name + ".path", portable(path));
        manifest.emplace_back("input." + name + ".digest", input_digests_[i]);
      }
      for (std::size_t i = 0; i < outputs_.size(); ++i) {
        const auto& [path, bytes] = outputs_[i];
        const std::string prefix = "output." + std::to_string(i);
        manifest.emplace_back(prefix + ".path", portable(path));
        manifest.emplace_back(prefix + ".digest", digest_hex(bytes));
      }
      manifests_.emplace_back(fs::path(primary.string() + ".manifest"),
                              keyvalue_encode(manifest));
    }

    if (!check_) {
      for (const auto& [path, bytes] : outputs_) write_file_bytes(path, bytes);
      for (const auto& [path, bytes] : manifests_) write_file_bytes(path, bytes);
      return 0;
    }

    bool all_match = true;
    const auto compare = [&](const fs::path& path, const std::string& bytes) {
      if (!fs::exists(path)) {
        std::cerr << "check: missing " << path.string() << "\n";
        all_match = false;
        return;
      }
      if (read_file_bytes(path) != bytes) {
        std::cerr << "check: mismatch " << path.string() << "\n";
        all_match = false;
      }
    };
    for (const auto& [path, bytes] : outputs_) compare(path, bytes);
    for (const auto& [path, bytes] : manifests_) compare(path, bytes);
    if (all_match) std::cout << "check: all outputs match\n";
    return all_match ? 0 : 1;
  }

 private:
  std::string command_;
  bool check_;
  KeyValueList params_;
  std::vector<std::pair<std::string, fs::path>> inputs_;
  std::vector<std::string> input_digests_;
  std::vector<std::pair<fs::path, std::string>> outputs_;
  std::vector<std::pair<fs::path, std::string>> manifests_;
};

// ---- shared flag bundles ----------------------------------------------

struct NoiseFlags {
  std::string kind = "none";
  double sigma = 1.0;
  double phi = 0.0;
  std::string diag_file;

  void attach(CLI::App* app) {
    app->add_option("--noise-kind", kind,
                    "none|iid_gaussian|diagonal|ar1 (default none)");
    app->add_option("--sigma", sigma, "noise std for iid_gaussian/ar1");
    app->add_option("--phi", phi, "AR(1) correlation, |phi| < 1");
    app->add_option("--diag-file", diag_file,
                    "SPMX vector of per-row variances (kind=diagonal)");
  }

  NoiseModel build(CommandRun& run) const {
    const NoiseKind parsed = noise_kind_from_string(kind);
    switch (parsed) {
      case NoiseKind::none:
        return NoiseModel::none();
      case NoiseKind::iid_gaussian:
        return NoiseModel::iid_gaussian(sigma);
      case NoiseKind::ar1:
        return NoiseModel::ar1(sigma, phi);
      case NoiseKind::diagonal: {
        if (diag_file.empty())
          throw InvalidArgument("--diag-file required for diagonal noise");
        const Eigen::MatrixXd v = spmx_decode(run.input("diag", diag_file));
        if (v.cols() != 1)
          throw InvalidArgument("--diag-file must hold a column vector");
        return NoiseModel::diagonal(v.col(0));
      }
    }
    return NoiseModel::none();
  }

  void record(CommandRun& run) const {
    run.param("noise-kind", kind);
    run.param("sigma", sigma);
    run.param("phi", phi);
  }
};

struct SynthFlags {
  SynthSpec spec;
  NoiseFlags noise;

  SynthFlags() { noise.kind = "iid_gaussian"; noise.sigma = 2.0; }

  void attach(CLI::App* app) {
    app->add_option("--h", spec.height, "scene height (default 32)");
    app->add_option("--w", spec.width, "scene width (default 32)");
    app->add_option("--identities", spec.num_identities,
                    "identity count (default 20)");
    app->add_option("--behaviors", spec.num_behaviors,
                    "behavior count, 2..4 (default 4)");
    app->add_option("--samples-per-class", spec.samples_per_class,
                    "instances per class, >= 10 (default 50)");
    app->add_option("--t-frames", spec.t_frames,
                    "frames per behavior window (default 8)");
    noise.attach(app);
  }

  SynthSpec build(CommandRun& run, std::uint64_t master_seed) {
    spec.noise = noise.build(run);
    spec.master_seed = master_seed;
    run.param("h", static_cast<long long>(spec.height));
    run.param("w", static_cast<long long>(spec.width));
    run.param("identities", static_cast<long long>(spec.num_identities));
    run.param("behaviors", static_cast<long long>(spec.num_behaviors));
    run.param("samples-per-class",
              static_cast<long long>(spec.samples_per_class));
    run.param("t-frames", static_cast<long long>(spec.t_frames));
    noise.record(run);
    return spec;
  }
};

// ---- library / operator file handling ----------------------------------

KeyValueList library_meta(const PatternLibrary& lib) {
  return {
      {"type", "library"},
      {"kind", to_string(lib.kind)},
      {"h", std::to_string(lib.height)},
      {"w", std::to_string(lib.width)},
      {"n", std::to_string(lib.count)},
      {"seed", std::to_string(lib.seed)},
  };
}

PatternLibrary load_library(CommandRun& run, const std::string& path) {
  const Eigen::MatrixXd values = spmx_decode(run.input("lib", path));
  const KeyValueList meta =
      keyvalue_decode(run.input("lib-meta", path + ".meta"));
  return library_from_matrix(
      pattern_kind_from_string(keyvalue_get(meta, "kind")),
      static_cast<int>(parse_int(keyvalue_get(meta, "h"))),
      static_cast<int>(parse_int(keyvalue_get(meta, "w"))),
      parse_u64(keyvalue_get(meta, "seed")), values);
}

KeyValueList operator_meta(const SensingOperator& op) {
  return {
      {"type", "operator"},
      {"id", op.id()},
      {"h", std::to_string(op.height)},
      {"w", std::to_string(op.width)},
      {"m", std::to_string(op.m)},
      {"rho", format_double(op.rho)},
      {"whitened", op.whitened ? "1" : "0"},
  };
}

SensingOperator load_operator(CommandRun& run, const std::string& path) {
  const Eigen::MatrixXd effective = spmx_decode(run.input("operator", path));
  const KeyValueList meta =
      keyvalue_decode(run.input("operator-meta", path + ".meta"));
  const bool whitened = keyvalue_get(meta, "whitened") == "1";
  std::string id = keyvalue_get(meta, "id");
  // Strip the :m=...:whitened=... suffix; operator_from_matrix re-adds it.
  const auto cut = id.find(":m=");
  if (cut != std::string::npos) id = id.substr(0, cut);
  return operator_from_matrix(
      effective, static_cast<int>(parse_int(keyvalue_get(meta, "h"))),
      static_cast<int>(parse_int(keyvalue_get(meta, "w"))), whitened, id);
}

// ---- curve CSV ----------------------------------------------------------

std::string curve_csv(const AccuracyCurve& curve) {
  std::string out = "rho,M,mean_accuracy,std_error,trials\n";
  for (const auto& point : curve.points) {
    out += format_double(point.rho) + "," + std::to_string(point.m) + "," +
           format_double(point.mean_accuracy) + "," +
           format_double(point.std_error) + "," +
           std::to_string(point.trials) + "\n";
  }
  return out;
}

std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    fields.push_back(line.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return fields;
}

AccuracyCurve parse_curve_csv(const std::string& text, Task task) {
  AccuracyCurve curve;
  curve.task = task;
  curve.k = 2;  // class count is not stored in the CSV; unused downstream
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      line != "rho,M,mean_accuracy,std_error,trials")
    throw InvalidArgument("unexpected curve CSV header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_line(line, ',');
    if (fields.size() != 5)
      throw InvalidArgument("malformed curve CSV row: " + line);
    CurvePoint point;
    point.rho = parse_double(fields[0]);
    point.m = parse_int(fields[1]);
    point.mean_accuracy = parse_double(fields[2]);
    point.std_error = parse_double(fields[3]);
    point.trials = parse_int(fields[4]);
    curve.points.push_back(point);
  }
  if (curve.points.empty()) throw InvalidArgument("curve CSV has no rows");
  return curve;
}

std::vector<long> parse_rate_list(const std::string& text) {
  std::vector<long> rates;
  for (const auto& field : split_line(text, ','))
    rates.push_back(parse_int(field));
  return rates;
}

// ---- subcommand implementations ----------------------------------------

int cmd_gen_patterns(bool check, const std::string& kind, long n, int h, int w,
                     std::uint64_t seed, const std::string& out,
                     long select_m, const std::string& operator_out) {
  CommandRun run("gen-patterns", check);
  run.param("kind", kind);
  run.param("n", static_cast<long long>(n));
  run.param("h", static_cast<long long>(h));
  run.param("w", static_cast<long long>(w));
  run.param("seed", seed);

  const PatternKind parsed = pattern_kind_from_string(kind);
  const PatternLibrary lib = parsed == PatternKind::speckle
                                 ? gen_speckle(n, h, w, seed)
                                 : gen_hadamard(n, h, w);
  run.output(out, spmx_encode(lib.raw_matrix()));
  run.output(out + ".meta", keyvalue_encode(library_meta(lib)));

  std::vector<fs::path> primaries{out};
  if (select_m > 0) {
    if (operator_out.empty())
      throw CLI::ValidationError("gen-patterns",
                                 "--operator-out required with --select");
    run.param("select", static_cast<long long>(select_m));
    const SensingOperator op = select(lib, select_m);
    run.output(operator_out, spmx_encode(op.effective));
    run.output(operator_out + ".meta", keyvalue_encode(operator_meta(op)));
    primaries.emplace_back(operator_out);
  }
  return run.finish(primaries);
}

int cmd_synth(bool check, SynthFlags& flags, const std::string& task_name,
              std::uint64_t seed, const std::string& out_dir) {
  CommandRun run("synth", check);
  run.param("task", task_name);
  run.param("seed", seed);
  const Task task = task_from_string(task_name);
  const SynthSpec spec = flags.build(run, seed);

  const std::vector<SynthInstance> instances = synth_instances(spec, task);
  std::string labels = "instance,identity,behavior,split,seed\n";
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    char name[32];
    std::snprintf(name, sizeof name, "instance_%05zu.spmx", i);
    run.output(fs::path(out_dir) / name, spmx_encode(inst.frames.frames));
    const int identity = task == Task::privacy ? inst.class_label
                                               : inst.nuisance_label;
    const int behavior = task == Task::privacy ? inst.nuisance_label
                                               : inst.class_label;
    labels += std::to_string(i) + "," + std::to_string(identity) + "," +
              std::to_string(behavior) + "," + to_string(inst.split) + "," +
              std::to_string(inst.instance_seed) + "\n";
  }
  const fs::path labels_path = fs::path(out_dir) / "labels.csv";
  run.output(labels_path, labels);
  return run.finish({labels_path});
}

int cmd_measure(bool check, const std::string& lib_path, long m,
                const std::string& scene_path, NoiseFlags& noise_flags,
                std::uint64_t seed, const std::string& out,
                const std::string& operator_out) {
  CommandRun run("measure", check);
  run.param("m", static_cast<long long>(m));
  run.param("seed", seed);
  noise_flags.record(run);

  const PatternLibrary lib = load_library(run, lib_path);
  const SensingOperator op = select(lib, m);
  const NoiseModel noise = noise_flags.build(run);
  const Eigen::MatrixXd frames = spmx_decode(run.input("scene", scene_path));
  const FrameBatch batch = make_frame_batch(op.height, op.width, frames);
  const MeasurementBatch meas = measure_batch(op, batch, noise, seed);

  run.output(out, spmx_encode(meas.values));
  run.output(out + ".meta",
             keyvalue_encode({{"type", "measurement"},
                              {"operator", meas.operator_id},
                              {"noise", meas.noise.describe()},
                              {"seed", std::to_string(meas.seed)},
                              {"t", std::to_string(meas.t())},
                              {"calibrated", meas.calibrated ? "1" : "0"},
                              {"whitened", meas.whitened ? "1" : "0"}}));
  std::vector<fs::path> primaries{out};
  if (!operator_out.empty()) {
    run.output(operator_out, spmx_encode(op.effective));
    run.output(operator_out + ".meta", keyvalue_encode(operator_meta(op)));
    primaries.emplace_back(operator_out);
  }
  return run.finish(primaries);
}

int cmd_calibrate(bool check, const std::string& lib_path, long m,
                  std::uint64_t chain_seed, long n_dark, long n_ref,
                  NoiseFlags& noise_flags, std::uint64_t seed,
                  const std::string& profile_out, const std::string& profile_in,
                  const std::string& raw_in, const std::string& out) {
  const bool apply_mode = !raw_in.empty();
  CommandRun run("calibrate", check);
  if (apply_mode) {
    if (profile_in.empty() || out.empty())
      throw CLI::ValidationError("calibrate",
                                 "apply mode needs --profile, --in and --out");
    const KeyValueList profile_kv =
        keyvalue_decode(run.input("profile", profile_in));
    const fs::path base = fs::path(profile_in).parent_path();
    const Eigen::MatrixXd offsets = spmx_decode(run.input(
        "offsets", base / keyvalue_get(profile_kv, "offsets_file")));
    const Eigen::MatrixXd gains = spmx_decode(
        run.input("gains", base / keyvalue_get(profile_kv, "gains_file")));
    CalibrationProfile profile;
    profile.offsets_hat = offsets.col(0);
    profile.gains_hat = gains.col(0);
    profile.n_dark = parse_int(keyvalue_get(profile_kv, "n_dark"));
    profile.n_ref = parse_int(keyvalue_get(profile_kv, "n_ref"));

    MeasurementBatch raw;
    raw.values = spmx_decode(run.input("raw", raw_in));
    raw.calibrated = false;
    const MeasurementBatch calibrated = calibrate(raw, profile);
    run.output(out, spmx_encode(calibrated.values));
    run.output(out + ".meta",
               keyvalue_encode(
                   {{"type", "measurement"},
                    {"calibrated", "1"},
                    {"profile", fs::path(profile_in).filename().string()}}));
    return run.finish({out});
  }

  if (lib_path.empty() || m < 1 || profile_out.empty())
    throw CLI::ValidationError(
        "calibrate", "estimate mode needs --lib, --m and --out-profile");
  run.param("m", static_cast<long long>(m));
  run.param("chain-seed", chain_seed);
  run.param("n-dark", static_cast<long long>(n_dark));
  run.param("n-ref", static_cast<long long>(n_ref));
  run.param("seed", seed);
  noise_flags.record(run);

  const PatternLibrary lib = load_library(run, lib_path);
  const SensingOperator op = select(lib, m);
  const NoiseModel noise = noise_flags.build(run);

  // Ground-truth chain simulated from the chain seed: gains uniform in
  // [0.5, 2], offsets uniform in [-1, 1].
  Xoshiro256pp chain_gen(derive_seed(chain_seed, kTagChain));
  Eigen::VectorXd gains(op.m), offsets(op.m);
  for (long i = 0; i < op.m; ++i) gains[i] = chain_gen.uniform(0.5, 2.0);
  for (long i = 0; i < op.m; ++i) offsets[i] = chain_gen.uniform(-1.0, 1.0);
  const AcquisitionChain chain = make_chain(gains, offsets);

  const UniformRefCalibration calibration =
      estimate_profile_uniform_ref(op, chain, noise, n_dark, n_ref, seed);
  if (!calibration.excluded_rows.empty())
    std::cerr << "calibrate: " << calibration.excluded_rows.size()
              << " rows with zero uniform-reference response kept gain 1\n";

  const fs::path profile_path(profile_out);
  const std::string offsets_name = profile_path.filename().string() + ".offsets.spmx";
  const std::string gains_name = profile_path.filename().string() + ".gains.spmx";
  std::string excluded;
  for (std::size_t i = 0; i < calibration.excluded_rows.size(); ++i)
    excluded += (i ? "," : "") + std::to_string(calibration.excluded_rows[i]);
  run.output(profile_path,
             keyvalue_encode({{"type", "calibration_profile"},
                              {"m", std::to_string(op.m)},
                              {"n_dark", std::to_string(n_dark)},
                              {"n_ref", std::to_string(n_ref)},
                              {"offsets_file", offsets_name},
                              {"gains_file", gains_name},
                              {"excluded_rows", excluded}}));
  const fs::path dir = profile_path.parent_path();
  run.output(dir / offsets_name,
             spmx_encode(calibration.profile.offsets_hat));
  run.output(dir / gains_name, spmx_encode(calibration.profile.gains_hat));
  return run.finish({profile_path});
}

int cmd_reconstruct(bool check, bool strict, const std::string& operator_path,
                    const std::string& measurement_path,
                    const std::string& method, double lambda,
                    const std::string& regularizer, double tol, long max_iters,
                    const std::string& out) {
  CommandRun run("reconstruct", check);
  run.param("method", method);
  run.param("lambda", lambda);
  run.param("regularizer", regularizer);
  run.param("max-iters", static_cast<long long>(max_iters));

  const SensingOperator op = load_operator(run, operator_path);
  const Eigen::MatrixXd meas =
      spmx_decode(run.input("measurement", measurement_path));
  if (meas.rows() != op.m)
    throw InvalidArgument("measurement rows do not match operator");

  ReconConfig cfg;
  cfg.lambda = lambda;
  cfg.max_iters = max_iters;
  if (tol > 0.0) cfg.tol = tol;
  if (regularizer == "identity")
    cfg.regularizer = RidgeRegularizer::identity;
  else if (regularizer == "laplacian")
    cfg.regularizer = RidgeRegularizer::laplacian;
  else
    throw InvalidArgument("unknown regularizer: " + regularizer);
  run.param("tol", cfg.resolved_tol());

  ReconResult result;
  if (method == "ridge") {
    cfg.method = ReconMethod::ridge;
    result = reconstruct_ridge(op, meas.col(0), cfg);
  } else if (method == "tv") {
    cfg.method = ReconMethod::tv;
    result = reconstruct_tv(op, meas.col(0), cfg);
  } else {
    throw InvalidArgument("unknown method: " + method);
  }

  run.output(out, spmx_encode(result.x_hat.values));
  std::string trace = "iter,objective,residual\n";
  for (std::size_t i = 0; i < result.objective_trace.size(); ++i) {
    const double residual =
        i < result.residual_trace.size() ? result.residual_trace[i] : 0.0;
    trace += std::to_string(i) + "," +
             format_double(result.objective_trace[i]) + "," +
             format_double(residual) + "\n";
  }
  run.output(out + ".trace.csv", trace);
  const int code = run.finish({out});
  if (code != 0) return code;
  if (!result.converged) {
    std::cerr << "reconstruct: not converged after " << result.iterations
              << " iterations\n";
    if (strict) return 3;
  }
  return 0;
}

int cmd_diagnose(bool check, const std::string& lib_path,
                 const std::string& rates_text, double eps_rank,
                 long subspace_dim, long probes, std::uint64_t seed,
                 const std::string& out) {
  CommandRun run("diagnose", check);
  run.param("m-list", rates_text);
  run.param("eps-rank", eps_rank);
  run.param("subspace-dim", static_cast<long long>(subspace_dim));
  run.param("probes", static_cast<long long>(probes));
  run.param("seed", seed);

  const PatternLibrary lib = load_library(run, lib_path);
  const std::vector<long> rates = parse_rate_list(rates_text);
  const Eigen::MatrixXd basis =
      random_subspace_basis(lib.pixels(), subspace_dim, derive_seed(seed, 1));

  std::string csv =
      "M,rho,sigma_max,sigma_min,threshold_rank,entropy_rank,spectral_mass,"
      "c1,c2\n";
  for (const long m : rates) {
    const SensingOperator op = select(lib, m);
    const SpectrumReport report = spectrum(op, eps_rank);
    const IsometryReport iso = isometry_constants(op, basis, probes, seed);
    csv += std::to_string(m) + "," + format_double(op.rho) + "," +
           format_double(report.singular_values[0]) + "," +
           format_double(
               report.singular_values[report.singular_values.size() - 1]) +
           "," + std::to_string(report.threshold_rank) + "," +
           format_double(report.entropy_rank) + "," +
           format_double(report.spectral_mass) + "," +
           format_double(iso.c1_hat) + "," + format_double(iso.c2_hat) + "\n";
  }
  run.output(out, csv);
  return run.finish({out});
}

int cmd_sweep(bool check, SynthFlags& flags, const std::string& task_name,
              const std::string& rates_text, long trials, std::uint64_t seed,
              long epochs, double lr, double l2, int jobs, bool permute_labels,
              const std::string& out) {
  CommandRun run("sweep", check);
  run.param("task", task_name);
  run.param("rates", rates_text);
  run.param("trials", static_cast<long long>(trials));
  run.param("seed", seed);
  run.param("epochs", static_cast<long long>(epochs));
  run.param("lr", lr);
  run.param("l2", l2);
  run.param("permute-labels", static_cast<long long>(permute_labels ? 1 : 0));
  const SynthSpec spec = flags.build(run, seed);

  SweepOptions options;
  options.trials = trials;
  options.seed = seed;
  options.epochs = epochs;
  options.lr = lr;
  options.l2 = l2;
  options.jobs = jobs;
  options.permute_labels = permute_labels;

  const AccuracyCurve curve =
      sweep(task_from_string(task_name), parse_rate_list(rates_text), spec,
            options);
  run.output(out, curve_csv(curve));
  return run.finish({out});
}

int cmd_safe_interval(bool check, const std::string& beh_path,
                      const std::string& priv_path, double alpha, double beta,
                      const std::string& out) {
  CommandRun run("safe-interval", check);
  run.param("alpha", alpha);
  run.param("beta", beta);

  const AccuracyCurve beh =
      parse_curve_csv(run.input("beh", beh_path), Task::behavior);
  const AccuracyCurve priv =
      parse_curve_csv(run.input("priv", priv_path), Task::privacy);
  const SafeInterval result = safe_interval(beh, priv, alpha, beta);

  KeyValueList report;
  report.emplace_back("alpha_beh", format_double(alpha));
  report.emplace_back("beta_priv", format_double(beta));
  report.emplace_back("rho_beh_star", result.rho_beh_star
                                          ? format_double(*result.rho_beh_star)
                                          : "ABSENT");
  report.emplace_back("rho_priv_star",
                      result.rho_priv_star
                          ? format_double(*result.rho_priv_star)
                          : "ABSENT");
  report.emplace_back("interval",
                      result.interval
                          ? format_double(result.interval->first) + "," +
                                format_double(result.interval->second)
                          : "EMPTY");
  run.output(out, keyvalue_encode(report));
  const int code = run.finish({out});
  if (code == 0)
    std::cout << "interval="
              << (result.interval
                      ? format_double(result.interval->first) + "," +
                            format_double(result.interval->second)
                      : std::string("EMPTY"))
              << "\n";
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"single-pixel sensing simulation pipeline"};
  app.require_subcommand(1);
  bool check = false;
  bool strict = false;
  app.add_flag("--check", check,
               "recompute outputs and verify existing files bitwise");
  app.add_flag("--strict", strict, "exit 3 on numerical non-convergence");

  // Subcommands use --h for pattern height, so help is --help only.
  const auto add_command = [&app](const std::string& name,
                                  const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->set_help_flag("--help", "print help and exit");
    return sub;
  };

  // gen-patterns
  auto* gen = add_command("gen-patterns", "generate a pattern library");
  std::string gen_kind = "speckle", gen_out, gen_operator_out;
  long gen_n = 0, gen_select = 0;
  int gen_h = 0, gen_w = 0;
  std::uint64_t gen_seed = 0;
  gen->add_option("--kind", gen_kind, "speckle|hadamard")->required();
  gen->add_option("--n", gen_n, "pattern count")->required();
  gen->add_option("--h", gen_h, "pattern height")->required();
  gen->add_option("--w", gen_w, "pattern width")->required();
  gen->add_option("--seed", gen_seed, "generator seed (speckle)");
  gen->add_option("--out", gen_out, "output library SPMX")->required();
  gen->add_option("--select", gen_select,
                  "also select the leading M rows as an operator");
  gen->add_option("--operator-out", gen_operator_out,
                  "output operator SPMX (with --select)");

  // synth
  auto* synth = add_command("synth", "generate a labeled dataset");
  SynthFlags synth_flags;
  std::string synth_task, synth_dir;
  std::uint64_t synth_seed = 0;
  synth->add_option("--task", synth_task, "privacy|behavior")->required();
  synth->add_option("--seed", synth_seed, "master seed");
  synth->add_option("--out-dir", synth_dir, "output directory")->required();
  synth_flags.attach(synth);

  // measure
  auto* measure_cmd = add_command("measure", "simulate bucket readings");
  std::string measure_lib, measure_scene, measure_out, measure_operator_out;
  long measure_m = 0;
  std::uint64_t measure_seed = 0;
  NoiseFlags measure_noise;
  measure_cmd->add_option("--lib", measure_lib, "library SPMX")->required();
  measure_cmd->add_option("--m", measure_m, "measurements per frame")->required();
  measure_cmd->add_option("--scene", measure_scene, "scene/frame SPMX (N x T)")
      ->required();
  measure_cmd->add_option("--seed", measure_seed, "noise seed");
  measure_cmd->add_option("--out", measure_out, "output measurement SPMX")
      ->required();
  measure_cmd->add_option("--operator-out", measure_operator_out,
                          "also write the selected operator");
  measure_noise.attach(measure_cmd);

  // calibrate
  auto* cal = app.add_subcommand(
      "calibrate", "estimate an acquisition-chain profile or apply one");
  std::string cal_lib, cal_profile_out, cal_profile_in, cal_raw, cal_out;
  long cal_m = 0, cal_n_dark = 256, cal_n_ref = 256;
  std::uint64_t cal_chain_seed = 0, cal_seed = 0;
  NoiseFlags cal_noise;
  cal->add_option("--lib", cal_lib, "library SPMX (estimate mode)");
  cal->add_option("--m", cal_m, "measurements per frame (estimate mode)");
  cal->add_option("--chain-seed", cal_chain_seed,
                  "seed of the simulated ground-truth chain");
  cal->add_option("--n-dark", cal_n_dark, "dark frames (default 256)");
  cal->add_option("--n-ref", cal_n_ref, "reference frames (default 256)");
  cal->add_option("--seed", cal_seed, "noise seed");
  cal->add_option("--out-profile", cal_profile_out, "output profile path");
  cal->add_option("--profile", cal_profile_in, "profile to apply");
  cal->add_option("--in", cal_raw, "raw measurement SPMX to calibrate");
  cal->add_option("--out", cal_out, "calibrated measurement SPMX");
  cal_noise.attach(cal);

  // reconstruct
  auto* rec = add_command("reconstruct", "solve the inverse problem");
  std::string rec_operator, rec_meas, rec_method = "ridge",
              rec_regularizer = "laplacian", rec_out;
  double rec_lambda = 0.0, rec_tol = 0.0;
  long rec_max_iters = 2000;
  rec->add_option("--operator", rec_operator, "operator SPMX")->required();
  rec->add_option("--measurement", rec_meas, "measurement SPMX")->required();
  rec->add_option("--method", rec_method, "ridge|tv");
  rec->add_option("--lambda", rec_lambda, "regularization weight");
  rec->add_option("--regularizer", rec_regularizer,
                  "identity|laplacian (ridge)");
  rec->add_option("--tol", rec_tol, "override solver tolerance");
  rec->add_option("--max-iters", rec_max_iters, "iteration cap (default 2000)");
  rec->add_option("--out", rec_out, "output scene SPMX")->required();

  // diagnose
  auto* diag = add_command("diagnose", "operator spectrum and isometry");
  std::string diag_lib, diag_rates, diag_out;
  double diag_eps = 1e-10;
  long diag_dim = 4, diag_probes = 1000;
  std::uint64_t diag_seed = 0;
  diag->add_option("--lib", diag_lib, "library SPMX")->required();
  diag->add_option("--m-list", diag_rates, "comma-separated M values")
      ->required();
  diag->add_option("--eps-rank", diag_eps, "threshold-rank cutoff");
  diag->add_option("--subspace-dim", diag_dim, "probe subspace dimension");
  diag->add_option("--probes", diag_probes, "probe count (default 1000)");
  diag->add_option("--seed", diag_seed, "probe seed");
  diag->add_option("--out", diag_out, "output CSV")->required();

  // sweep
  auto* sweep_cmd = add_command("sweep", "accuracy over a rate grid");
  SynthFlags sweep_flags;
  std::string sweep_task, sweep_rates, sweep_out;
  long sweep_trials = 10, sweep_epochs = 500;
  double sweep_lr = 0.05, sweep_l2 = 1e-4;
  int sweep_jobs = 1;
  bool sweep_permute = false;
  std::uint64_t sweep_seed = 0;
  sweep_cmd->add_option("--task", sweep_task, "privacy|behavior")->required();
  sweep_cmd->add_option("--rates", sweep_rates, "comma-separated M grid")
      ->required();
  sweep_cmd->add_option("--trials", sweep_trials, "trials (default 10)");
  sweep_cmd->add_option("--seed", sweep_seed, "sweep master seed");
  sweep_cmd->add_option("--epochs", sweep_epochs, "training epochs");
  sweep_cmd->add_option("--lr", sweep_lr, "learning rate");
  sweep_cmd->add_option("--l2", sweep_l2, "l2 weight");
  sweep_cmd->add_option("--jobs", sweep_jobs, "parallel trial workers");
  sweep_cmd->add_flag("--permute-labels", sweep_permute,
                      "chance-level control: shuffle labels");
  sweep_cmd->add_option("--out", sweep_out, "output curve CSV")->required();
  sweep_flags.attach(sweep_cmd);

  // safe-interval
  auto* safe = add_command("safe-interval",
                                  "critical rates and safe interval");
  std::string safe_beh, safe_priv, safe_out;
  double safe_alpha = 0.0, safe_beta = 0.0;
  safe->add_option("--beh", safe_beh, "behavior curve CSV")->required();
  safe->add_option("--priv", safe_priv, "privacy curve CSV")->required();
  safe->add_option("--alpha", safe_alpha, "behavior threshold")->required();
  safe->add_option("--beta", safe_beta, "privacy threshold")->required();
  safe->add_option("--out", safe_out, "output report")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed())
      return cmd_gen_patterns(check, gen_kind, gen_n, gen_h, gen_w, gen_seed,
                              gen_out, gen_select, gen_operator_out);
    if (synth->parsed())
      return cmd_synth(check, synth_flags, synth_task, synth_seed, synth_dir);
    if (measure_cmd->parsed())
      return cmd_measure(check, measure_lib, measure_m, measure_scene,
                         measure_noise, measure_seed, measure_out,
                         measure_operator_out);
    if (cal->parsed())
      return cmd_calibrate(check, cal_lib, cal_m, cal_chain_seed, cal_n_dark,
                           cal_n_ref, cal_noise, cal_seed, cal_profile_out,
                           cal_profile_in, cal_raw, cal_out);
    if (rec->parsed())
      return cmd_reconstruct(check, strict, rec_operator, rec_meas, rec_method,
                             rec_lambda, rec_regularizer, rec_tol,
                             rec_max_iters, rec_out);
    if (diag->parsed())
      return cmd_diagnose(check, diag_lib, diag_rates, diag_eps, diag_dim,
                          diag_probes, diag_seed, diag_out);
    if (sweep_cmd->parsed())
      return cmd_sweep(check, sweep_flags, sweep_task, sweep_rates,
                       sweep_trials, sweep_seed, sweep_epochs, sweep_lr,
                       sweep_l2, sweep_jobs, sweep_permute, sweep_out);
    if (safe->parsed())
      return cmd_safe_interval(check, safe_beh, safe_priv, safe_alpha,
                               safe_beta, safe_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? argc - 1 : 0);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace spx::cli
