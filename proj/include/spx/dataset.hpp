#ifndef SPX_DATASET_HPP
#define SPX_DATASET_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace spx {

enum class Task { privacy, behavior };
enum class Split { train, val, test };

std::string to_string(Task task);
Task task_from_string(const std::string& name);
std::string to_string(Split split);

// Measurement-domain features with class labels for one task and one
// sampling rate. Rows are samples.
struct LabeledMeasurementSet {
  Eigen::MatrixXd features;  // samples x feature_dim
  std::vector<int> labels;   // values in [0, k)
  int k = 0;
  Task task = Task::privacy;
  double rho = 0.0;
  Split split = Split::train;

  long samples() const { return features.rows(); }
  long feature_dim() const { return features.cols(); }
};

LabeledMeasurementSet make_labeled_set(Eigen::MatrixXd features,
                                       std::vector<int> labels, int k,
                                       Task task, double rho, Split split);

}  // namespace spx

#endif
