#ifndef SPX_SYNTHDATA_HPP
#define SPX_SYNTHDATA_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "spx/dataset.hpp"
#include "spx/sensing.hpp"

namespace spx {

// Desk-scale synthetic scenes: behavior is carried by a low-dimensional
// silhouette pose (at most 4 scalar pose parameters per class), identity by
// a high-frequency texture patch confined to the silhouette's head region.
struct SynthSpec {
  int height = 32;
  int width = 32;
  int num_identities = 20;
  int num_behaviors = 4;
  int samples_per_class = 50;
  int t_frames = 8;
  NoiseModel noise = NoiseModel::iid_gaussian(2.0);
  std::uint64_t master_seed = 0;
};

// Behavior vocabulary: one normal and three risk-related activity classes.
enum class BehaviorClass : int {
  standing = 0,   // static upright pose
  collapse = 1,   // body sinks toward the floor over the window
  fighting = 2,   // raised arms, oscillating
  leaning = 3,    // strongly tilted torso, slowly increasing
};

std::string to_string(BehaviorClass behavior);

// Scalar pose of one rendered frame. Every behavior class varies at most
// these four numbers, which pins the realized behavior dimension to <= 4.
struct PoseParams {
  double center_x = 0.5;   // fraction of width
  double body_height = 0.6;  // fraction of scene height
  double lean = 0.0;       // radians, positive tilts right
  double arm_raise = -1.25;  // radians above horizontal
};

inline constexpr int kPoseParamCount = 4;

// Per-identity texture patches (kTexturePatch x kTexturePatch values in
// [0,1]), generated from identity-specific seeds.
inline constexpr int kTexturePatch = 8;

struct IdentityBank {
  std::vector<Eigen::MatrixXd> textures;

  static IdentityBank build(const SynthSpec& spec);
};

// Pose distributions and trajectories per behavior class. Masks themselves
// are rendered on demand from PoseParams.
struct BehaviorBank {
  int num_behaviors = 4;

  // Pose of `behavior` at frame t of a T-frame window, for the instance
  // stream seeded by the caller. t = 0 matches gen_scene.
  static PoseParams pose_at(BehaviorClass behavior, int t, int t_frames,
                            Xoshiro256pp& pose_stream);
};

// Binary silhouette mask for one pose (1 = body).
std::vector<std::uint8_t> render_silhouette(int h, int w,
                                            const PoseParams& pose);

// Head region of a mask: mask pixels within the top 25% of the mask's
// bounding-box rows.
std::vector<std::uint8_t> head_region(const std::vector<std::uint8_t>& mask,
                                      int h, int w);

// Background + silhouette + identity texture in the head region, clipped to
// [0,1]. Identity changes pixels only inside the head region; pose and
// background depend on (behavior, instance_seed) alone.
Scene gen_scene(const SynthSpec& spec, int identity, int behavior,
                std::uint64_t instance_seed);

// T frames along the behavior's pose trajectory; frame 0 equals gen_scene.
FrameBatch gen_sequence(const SynthSpec& spec, int identity, int behavior,
                        std::uint64_t instance_seed);

// One generated instance prior to measurement.
struct SynthInstance {
  int class_label = 0;     // identity (privacy task) or behavior (behavior task)
  int nuisance_label = 0;  // the other label, drawn per instance
  std::uint64_t instance_seed = 0;
  Split split = Split::train;
  FrameBatch frames;
};

// All instances for one task, deterministic in the spec. Split is by
// instance index with val = test = samples_per_class/10 and the rest train.
std::vector<SynthInstance> synth_instances(const SynthSpec& spec, Task task);

struct DatasetTriple {
  LabeledMeasurementSet train;
  LabeledMeasurementSet val;
  LabeledMeasurementSet test;
};

// Measures prepared instances with `op`: privacy features are the single
// frame's measurement vector, behavior features the temporal feature map of
// the T-frame window.
DatasetTriple measure_dataset(const SynthSpec& spec,
                              const std::vector<SynthInstance>& instances,
                              const SensingOperator& op, Task task);

// synth_instances + measure_dataset in one call.
DatasetTriple build_dataset(const SynthSpec& spec, const SensingOperator& op,
                            Task task);

}  // namespace spx

#endif
