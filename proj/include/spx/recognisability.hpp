#ifndef SPX_RECOGNISABILITY_HPP
#define SPX_RECOGNISABILITY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "spx/dataset.hpp"
#include "spx/sensing.hpp"
#include "spx/synthdata.hpp"

namespace spx {

// Temporal feature map f(Y) of a measurement window: per-row mean over the
// T frames concatenated with the per-row mean absolute first difference
// (zeros when T = 1). Dimension 2M.
Eigen::VectorXd temporal_features(const MeasurementBatch& batch);

// s = W f + c with a softmax posterior over classes.
struct LinearSoftmaxModel {
  Eigen::MatrixXd weights;  // k x feature_dim
  Eigen::VectorXd bias;     // k
  Task task = Task::privacy;
  double trained_rho = 0.0;
};

// Mean cross-entropy + (l2/2)||W||_F^2 and its exact gradient; the training
// loop and the finite-difference checks both go through here.
double softmax_loss(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                    const LabeledMeasurementSet& data, double l2);
std::pair<Eigen::MatrixXd, Eigen::VectorXd> softmax_grad(
    const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
    const LabeledMeasurementSet& data, double l2);

// Full-batch gradient descent from zero initialization for a fixed epoch
// count; deterministic for fixed inputs (`seed` is reserved).
LinearSoftmaxModel train_softmax(const LabeledMeasurementSet& data, long epochs,
                                 double lr, double l2, std::uint64_t seed);

// MAP decision: probabilities via max-subtracted softmax, label = argmax,
// exact ties broken toward the lowest class index.
std::pair<int, Eigen::VectorXd> predict(const LinearSoftmaxModel& model,
                                        const Eigen::VectorXd& features);

double evaluate_accuracy(const LinearSoftmaxModel& model,
                         const LabeledMeasurementSet& data);

struct CurvePoint {
  double rho = 0.0;
  long m = 0;
  double mean_accuracy = 0.0;
  double std_error = 0.0;
  long trials = 0;
};

struct AccuracyCurve {
  std::vector<CurvePoint> points;  // sorted by rho, strictly increasing
  Task task = Task::privacy;
  long k = 0;
};

struct SweepOptions {
  long trials = 10;
  std::uint64_t seed = 0;
  long epochs = 500;
  double lr = 0.05;
  double l2 = 1e-4;
  // Destroys the feature-label association (chance-level control sweeps).
  bool permute_labels = false;
  int jobs = 1;
  // Standardize features to zero mean / unit variance with train-split
  // statistics before training (energy-normalized measurement convention).
  bool standardize = true;
};

// In-place standardization of val/test with the train split's per-feature
// mean and standard deviation.
void standardize_features(LabeledMeasurementSet& train,
                          LabeledMeasurementSet& val,
                          LabeledMeasurementSet& test);

// Accuracy over a grid of nested rates. One speckle library (n = max rate,
// seeded from `seed`) is shared by every rate; per trial the scenes are
// generated once and re-measured per rate, so rate M' sees exactly the
// leading M' rows (and the same noise prefix) as rate M. A fresh model is
// trained per (rate, trial); the curve reports per-rate mean test accuracy
// and standard error over trials.
AccuracyCurve sweep(Task task, const std::vector<long>& rates,
                    const SynthSpec& dataset_spec, const SweepOptions& options);

inline AccuracyCurve sweep(Task task, const std::vector<long>& rates,
                           const SynthSpec& dataset_spec, long trials,
                           std::uint64_t seed) {
  SweepOptions options;
  options.trials = trials;
  options.seed = seed;
  return sweep(task, rates, dataset_spec, options);
}

// Pointwise mean_accuracy - 1/k.
std::vector<double> privacy_advantage(const AccuracyCurve& curve);

enum class CriticalMode { priv_sup, beh_inf };

// On the sampled grid: priv_sup = largest rho with accuracy <= threshold,
// beh_inf = smallest rho with accuracy >= threshold. Absent when no grid
// point qualifies.
std::optional<double> critical_rate(const AccuracyCurve& curve,
                                    double threshold, CriticalMode mode);

struct SafeInterval {
  std::optional<double> rho_beh_star;
  std::optional<double> rho_priv_star;
  std::optional<std::pair<double, double>> interval;
  double alpha_beh = 0.0;
  double beta_priv = 0.0;
};

// Nonempty iff both critical rates exist and rho_beh_star <= rho_priv_star.
// Both curves must be sampled on the identical rho grid.
SafeInterval safe_interval(const AccuracyCurve& beh_curve,
                           const AccuracyCurve& priv_curve, double alpha,
                           double beta);

}  // namespace spx

#endif
