#include "spx/recognisability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "spx/errors.hpp"
#include "spx/patterns.hpp"

namespace spx {

Eigen::VectorXd temporal_features(const MeasurementBatch& batch) {
  const long m = batch.m();
  const long t = batch.t();
  if (m < 1 || t < 1) throw InvalidArgument("empty measurement batch");
  Eigen::VectorXd features(2 * m);
  features.head(m) = batch.values.rowwise().mean();
  if (t > 1) {
    features.tail(m) =
        (batch.values.rightCols(t - 1) - batch.values.leftCols(t - 1))
            .cwiseAbs()
            .rowwise()
            .mean();
  } else {
    features.tail(m).setZero();
  }
  return features;
}

namespace {

// Row-stabilized softmax of F W^T + 1 c^T.
Eigen::MatrixXd class_probabilities(const Eigen::MatrixXd& weights,
                                    const Eigen::VectorXd& bias,
                                    const Eigen::MatrixXd& features) {
  Eigen::MatrixXd logits = features * weights.transpose();
  logits.rowwise() += bias.transpose();
  const Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
  logits.colwise() -= row_max;
  Eigen::MatrixXd probs = logits.array().exp();
  const Eigen::VectorXd row_sum = probs.rowwise().sum();
  probs.array().colwise() /= row_sum.array();
  return probs;
}

void validate_model_data(const Eigen::MatrixXd& weights,
                         const Eigen::VectorXd& bias,
                         const LabeledMeasurementSet& data) {
  if (weights.rows() != data.k || bias.size() != data.k)
    throw InvalidArgument("model class count does not match data");
  if (weights.cols() != data.feature_dim())
    throw InvalidArgument("model feature dimension does not match data");
}

}  // namespace

double softmax_loss(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                    const LabeledMeasurementSet& data, double l2) {
  validate_model_data(weights, bias, data);
  const long samples = data.samples();
  if (samples < 1) throw InvalidDataset("loss needs at least one sample");
  const Eigen::MatrixXd probs =
      class_probabilities(weights, bias, data.features);
  double loss = 0.0;
  for (long s = 0; s < samples; ++s)
    loss -= std::log(std::max(probs(s, data.labels[s]), 1e-300));
  loss /= static_cast<double>(samples);
  loss += 0.5 * l2 * weights.squaredNorm();
  return loss;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> softmax_grad(
    const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
    const LabeledMeasurementSet& data, double l2) {
  validate_model_data(weights, bias, data);
  const long samples = data.samples();
  if (samples < 1) throw InvalidDataset("gradient needs at least one sample");
  Eigen::MatrixXd delta = class_probabilities(weights, bias, data.features);
  for (long s = 0; s < samples; ++s) delta(s, data.labels[s]) -= 1.0;
  delta /= static_cast<double>(samples);
  Eigen::MatrixXd grad_w = delta.transpose() * data.features;
  grad_w += l2 * weights;
  Eigen::VectorXd grad_b = delta.colwise().sum();
  return {std::move(grad_w), std::move(grad_b)};
}

LinearSoftmaxModel train_softmax(const LabeledMeasurementSet& data, long epochs,
                                 double lr, double l2, std::uint64_t seed) {
  (void)seed;  // zero init + full-batch descent; reserved for future use
  if (data.k < 2) throw InvalidDataset("training needs at least two classes");
  if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
  if (!(lr > 0.0)) throw InvalidArgument("learning rate must be > 0");
  if (l2 < 0.0) throw InvalidArgument("l2 must be >= 0");
  std::vector<long> class_counts(data.k, 0);
  for (const int label : data.labels) ++class_counts[label];
  for (int c = 0; c < data.k; ++c)
    if (class_counts[c] == 0)
      throw InvalidDataset("class " + std::to_string(c) +
                           " has no training samples");

  LinearSoftmaxModel model;
  model.weights = Eigen::MatrixXd::Zero(data.k, data.feature_dim());
  model.bias = Eigen::VectorXd::Zero(data.k);
  model.task = data.task;
  model.trained_rho = data.rho;

  const long samples = data.samples();
  const double inv_samples = 1.0 / static_cast<double>(samples);
  Eigen::MatrixXd logits(samples, data.k);
  for (long epoch = 0; epoch < epochs; ++epoch) {
    logits.noalias() = data.features * model.weights.transpose();
    logits.rowwise() += model.bias.transpose();
    const Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
    logits.colwise() -= row_max;
    logits = logits.array().exp();
    const Eigen::VectorXd row_sum = logits.rowwise().sum();
    logits.array().colwise() /= row_sum.array();
    for (long s = 0; s < samples; ++s) logits(s, data.labels[s]) -= 1.0;
    logits *= inv_samples;
    model.bias -= lr * logits.colwise().sum().transpose();
    // W <- (1 - lr*l2) W - lr * delta^T F
    if (l2 > 0.0) model.weights *= (1.0 - lr * l2);
    model.weights.noalias() -= lr * (logits.transpose() * data.features);
  }
  return model;
}

std::pair<int, Eigen::VectorXd> predict(const LinearSoftmaxModel& model,
                                        const Eigen::VectorXd& features) {
  if (features.size() != model.weights.cols())
    throw InvalidArgument("feature dimension does not match model");
  Eigen::VectorXd logits = model.weights * features + model.bias;
  logits.array() -= logits.maxCoeff();
  Eigen::VectorXd probs = logits.array().exp();
  probs /= probs.sum();
  int label = 0;
  for (int c = 1; c < probs.size(); ++c)
    if (probs[c] > probs[label]) label = c;
  return {label, std::move(probs)};
}

double evaluate_accuracy(const LinearSoftmaxModel& model,
                         const LabeledMeasurementSet& data) {
  validate_model_data(model.weights, model.bias, data);
  if (data.samples() < 1) throw InvalidDataset("empty evaluation set");
  Eigen::MatrixXd logits = data.features * model.weights.transpose();
  logits.rowwise() += model.bias.transpose();
  long correct = 0;
  for (long s = 0; s < data.samples(); ++s) {
    int label = 0;
    for (int c = 1; c < data.k; ++c)
      if (logits(s, c) > logits(s, label)) label = c;
    if (label == data.labels[s]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.samples());
}

void standardize_features(LabeledMeasurementSet& train,
                          LabeledMeasurementSet& val,
                          LabeledMeasurementSet& test) {
  if (train.samples() < 2)
    throw InvalidDataset("standardization needs >= 2 training samples");
  const Eigen::RowVectorXd mean = train.features.colwise().mean();
  Eigen::RowVectorXd stddev =
      ((train.features.rowwise() - mean).array().square().colwise().sum() /
       static_cast<double>(train.samples() - 1))
          .sqrt();
  stddev = stddev.cwiseMax(1e-12);  // constant features stay centered
  for (auto* set : {&train, &val, &test}) {
    set->features.rowwise() -= mean;
    set->features.array().rowwise() /= stddev.array();
  }
}

namespace {

void permute_all_labels(DatasetTriple& triple, std::uint64_t seed) {
  std::vector<int> all;
  for (const auto* set : {&triple.train, &triple.val, &triple.test})
    all.insert(all.end(), set->labels.begin(), set->labels.end());
  Xoshiro256pp gen(seed);
  for (std::size_t i = all.size(); i > 1; --i)
    std::swap(all[i - 1], all[gen.uniform_int(i)]);
  std::size_t cursor = 0;
  for (auto* set : {&triple.train, &triple.val, &triple.test})
    for (auto& label : set->labels) label = all[cursor++];
}

double kahan_mean(const std::vector<double>& values) {
  double sum = 0.0, compensation = 0.0;
  for (const double v : values) {
    const double y = v - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(values.size());
}

}  // namespace

AccuracyCurve sweep(Task task, const std::vector<long>& rates,
                    const SynthSpec& dataset_spec, const SweepOptions& options) {
  if (rates.empty()) throw InvalidArgument("rate grid is empty");
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (rates[i] < 1) throw InvalidArgument("rates must be >= 1");
    if (i > 0 && rates[i] <= rates[i - 1])
      throw InvalidArgument("rates must be strictly increasing");
  }
  if (options.trials < 1) throw InvalidArgument("trials must be >= 1");
  const long pixels =
      static_cast<long>(dataset_spec.height) * dataset_spec.width;
  const long library_size = rates.back();
  if (library_size > pixels)
    throw InvalidArgument("largest rate exceeds the library size (pixels)");

  // One fixed library across all rates and trials; prefix selection makes
  // the per-rate operators nested.
  const PatternLibrary library =
      gen_speckle(library_size, dataset_spec.height, dataset_spec.width,
                  derive_seed(options.seed, kTagLibrary));

  std::vector<std::vector<double>> accuracy(
      rates.size(), std::vector<double>(options.trials, 0.0));

  const auto run_trial = [&](long trial) {
    SynthSpec trial_spec = dataset_spec;
    trial_spec.master_seed =
        derive_seed(options.seed, kTagTrial + static_cast<std::uint64_t>(trial));
    const std::vector<SynthInstance> instances =
        synth_instances(trial_spec, task);
    for (std::size_t r = 0; r < rates.size(); ++r) {
      const SensingOperator op = select(library, rates[r]);
      DatasetTriple data = measure_dataset(trial_spec, instances, op, task);
      if (options.permute_labels)
        permute_all_labels(
            data, derive_seed(trial_spec.master_seed, kTagPermutation));
      if (options.standardize)
        standardize_features(data.train, data.val, data.test);
      const LinearSoftmaxModel model = train_softmax(
          data.train, options.epochs, options.lr, options.l2, /*seed=*/0);
      accuracy[r][trial] = evaluate_accuracy(model, data.test);
    }
  };

  const int jobs = std::max(1, options.jobs);
  if (jobs == 1 || options.trials == 1) {
    for (long trial = 0; trial < options.trials; ++trial) run_trial(trial);
  } else {
    std::atomic<long> next{0};
    std::vector<std::thread> workers;
    const int worker_count =
        static_cast<int>(std::min<long>(jobs, options.trials));
    workers.reserve(worker_count);
    for (int w = 0; w < worker_count; ++w)
      workers.emplace_back([&] {
        for (long trial = next.fetch_add(1); trial < options.trials;
             trial = next.fetch_add(1))
          run_trial(trial);
      });
    for (auto& worker : workers) worker.join();
  }

  AccuracyCurve curve;
  curve.task = task;
  curve.k = task == Task::privacy ? dataset_spec.num_identities
                                  : dataset_spec.num_behaviors;
  curve.points.reserve(rates.size());
  for (std::size_t r = 0; r < rates.size(); ++r) {
    CurvePoint point;
    point.m = rates[r];
    point.rho = sampling_rate(rates[r], pixels);
    point.trials = options.trials;
    point.mean_accuracy = kahan_mean(accuracy[r]);
    if (options.trials > 1) {
      double ss = 0.0;
      for (const double a : accuracy[r]) {
        const double d = a - point.mean_accuracy;
        ss += d * d;
      }
      point.std_error = std::sqrt(ss / static_cast<double>(options.trials - 1)) /
                        std::sqrt(static_cast<double>(options.trials));
    }
    curve.points.push_back(point);
  }
  return curve;
}

std::vector<double> privacy_advantage(const AccuracyCurve& curve) {
  if (curve.k < 2) throw InvalidArgument("advantage needs k >= 2");
  std::vector<double> advantage;
  advantage.reserve(curve.points.size());
  for (const auto& point : curve.points)
    advantage.push_back(point.mean_accuracy -
                        1.0 / static_cast<double>(curve.k));
  return advantage;
}

std::optional<double> critical_rate(const AccuracyCurve& curve,
                                    double threshold, CriticalMode mode) {
  if (curve.points.empty()) throw InvalidArgument("empty accuracy curve");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw InvalidArgument("threshold must lie in (0,1)");
  std::optional<double> result;
  if (mode == CriticalMode::priv_sup) {
    for (const auto& point : curve.points)
      if (point.mean_accuracy <= threshold) result = point.rho;
  } else {
    for (const auto& point : curve.points)
      if (point.mean_accuracy >= threshold) {
        result = point.rho;
        break;
      }
  }
  return result;
}

SafeInterval safe_interval(const AccuracyCurve& beh_curve,
                           const AccuracyCurve& priv_curve, double alpha,
                           double beta) {
  if (beh_curve.points.size() != priv_curve.points.size())
    throw InvalidArgument("curves sampled on different grids");
  for (std::size_t i = 0; i < beh_curve.points.size(); ++i)
    if (beh_curve.points[i].rho != priv_curve.points[i].rho)
      throw InvalidArgument("curves sampled on different grids");

  SafeInterval result;
  result.alpha_beh = alpha;
  result.beta_priv = beta;
  result.rho_beh_star = critical_rate(beh_curve, alpha, CriticalMode::beh_inf);
  result.rho_priv_star =
      critical_rate(priv_curve, beta, CriticalMode::priv_sup);
  if (result.rho_beh_star && result.rho_priv_star &&
      *result.rho_beh_star <= *result.rho_priv_star)
    result.interval = std::make_pair(*result.rho_beh_star,
                                     *result.rho_priv_star);
  return result;
}

}  // namespace spx
