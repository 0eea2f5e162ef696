#include "spx/dataset.hpp"

#include "spx/errors.hpp"

namespace spx {

std::string to_string(Task task) {
  return task == Task::privacy ? "privacy" : "behavior";
}

Task task_from_string(const std::string& name) {
  if (name == "privacy") return Task::privacy;
  if (name == "behavior") return Task::behavior;
  throw InvalidArgument("unknown task: " + name);
}

std::string to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

LabeledMeasurementSet make_labeled_set(Eigen::MatrixXd features,
                                       std::vector<int> labels, int k,
                                       Task task, double rho, Split split) {
  if (k < 1) throw InvalidArgument("class count must be >= 1");
  if (static_cast<long>(labels.size()) != features.rows())
    throw InvalidArgument("label count does not match feature rows");
  for (const int label : labels)
    if (label < 0 || label >= k)
      throw InvalidArgument("label out of range [0, k)");
  LabeledMeasurementSet set;
  set.features = std::move(features);
  set.labels = std::move(labels);
  set.k = k;
  set.task = task;
  set.rho = rho;
  set.split = split;
  return set;
}

}  // namespace spx
