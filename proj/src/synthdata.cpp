#include "spx/synthdata.hpp"

#include <algorithm>
#include <cmath>

#include "spx/errors.hpp"
#include "spx/recognisability.hpp"

namespace spx {

namespace {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance_to_segment(const Point& p, const Point& a, const Point& b) {
  const double abx = b.x - a.x;
  const double aby = b.y - a.y;
  const double len2 = abx * abx + aby * aby;
  double t = 0.0;
  if (len2 > 0.0)
    t = std::clamp(((p.x - a.x) * abx + (p.y - a.y) * aby) / len2, 0.0, 1.0);
  const double dx = p.x - (a.x + t * abx);
  const double dy = p.y - (a.y + t * aby);
  return std::sqrt(dx * dx + dy * dy);
}

void validate_labels(const SynthSpec& spec, int identity, int behavior) {
  if (spec.num_identities < 2 || spec.num_behaviors < 2)
    throw InvalidArgument("spec needs at least 2 identities and 2 behaviors");
  if (spec.num_behaviors > 4)
    throw InvalidArgument("behavior vocabulary has 4 classes");
  if (identity < 0 || identity >= spec.num_identities)
    throw InvalidArgument("identity label out of range");
  if (behavior < 0 || behavior >= spec.num_behaviors)
    throw InvalidArgument("behavior label out of range");
}

Eigen::MatrixXd identity_texture(const SynthSpec& spec, int identity) {
  Xoshiro256pp gen(derive_seed(
      spec.master_seed, kTagIdentityTexture + static_cast<std::uint64_t>(identity)));
  Eigen::MatrixXd patch(kTexturePatch, kTexturePatch);
  for (int i = 0; i < kTexturePatch; ++i)
    for (int j = 0; j < kTexturePatch; ++j) patch(i, j) = gen.uniform();
  return patch;
}

}  // namespace

std::string to_string(BehaviorClass behavior) {
  switch (behavior) {
    case BehaviorClass::standing: return "standing";
    case BehaviorClass::collapse: return "collapse";
    case BehaviorClass::fighting: return "fighting";
    case BehaviorClass::leaning: return "leaning";
  }
  return "standing";
}

IdentityBank IdentityBank::build(const SynthSpec& spec) {
  IdentityBank bank;
  bank.textures.reserve(spec.num_identities);
  for (int id = 0; id < spec.num_identities; ++id)
    bank.textures.push_back(identity_texture(spec, id));
  return bank;
}

PoseParams BehaviorBank::pose_at(BehaviorClass behavior, int t, int t_frames,
                                 Xoshiro256pp& pose_stream) {
  PoseParams pose;
  pose.center_x = pose_stream.uniform(0.32, 0.68);
  const double phase =
      t_frames > 1 ? static_cast<double>(t) / (t_frames - 1) : 0.0;
  switch (behavior) {
    case BehaviorClass::standing: {
      pose.body_height = pose_stream.uniform(0.55, 0.70);
      pose.lean = pose_stream.uniform(-0.06, 0.06);
      pose.arm_raise = -1.25 + pose_stream.uniform(-0.08, 0.08);
      break;
    }
    case BehaviorClass::collapse: {
      const double start = pose_stream.uniform(0.42, 0.52);
      const double lean0 = pose_stream.uniform(-0.10, 0.10);
      const double fall_sign = pose_stream.bernoulli_bit() ? 1.0 : -1.0;
      pose.body_height = start + (0.18 - start) * phase;
      pose.lean = lean0 + fall_sign * 0.45 * phase;
      pose.arm_raise = -1.0;
      break;
    }
    case BehaviorClass::fighting: {
      pose.body_height = pose_stream.uniform(0.55, 0.68);
      pose.lean = pose_stream.uniform(-0.08, 0.08);
      const double swing_phase = pose_stream.uniform(0.0, 2.0 * M_PI);
      pose.arm_raise =
          0.55 + 0.35 * std::sin(swing_phase + 2.0 * M_PI * phase);
      break;
    }
    case BehaviorClass::leaning: {
      pose.body_height = pose_stream.uniform(0.55, 0.70);
      const double side = pose_stream.bernoulli_bit() ? 1.0 : -1.0;
      const double tilt0 = pose_stream.uniform(0.30, 0.38);
      pose.lean = side * (tilt0 + (0.55 - tilt0) * phase);
      pose.arm_raise = -1.25;
      break;
    }
  }
  return pose;
}

std::vector<std::uint8_t> render_silhouette(int h, int w,
                                            const PoseParams& pose) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(h) * w, 0);
  const double body_h = pose.body_height * h;
  const Point feet{pose.center_x * w, h - 1.5};
  const double ux = std::sin(pose.lean);
  const double uy = -std::cos(pose.lean);
  const auto along = [&](double fraction) {
    return Point{feet.x + fraction * body_h * ux,
                 feet.y + fraction * body_h * uy};
  };
  const Point hip = along(0.30);
  const Point shoulder = along(0.72);
  const Point head = along(0.86);
  const double head_r = std::max(0.11 * body_h, 1.2);
  const double torso_r = std::max(0.13 * body_h, 1.0);
  const double limb_r = std::max(0.05 * body_h, 0.7);
  const Point foot_l{feet.x - 0.10 * body_h, feet.y};
  const Point foot_r{feet.x + 0.10 * body_h, feet.y};
  const double arm_len = 0.34 * body_h;
  const double ca = std::cos(pose.arm_raise);
  const double sa = std::sin(pose.arm_raise);
  const Point hand_l{shoulder.x - arm_len * ca, shoulder.y - arm_len * sa};
  const Point hand_r{shoulder.x + arm_len * ca, shoulder.y - arm_len * sa};

  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      const Point p{j + 0.5, i + 0.5};
      const bool body =
          distance_to_segment(p, hip, shoulder) <= torso_r ||
          std::hypot(p.x - head.x, p.y - head.y) <= head_r ||
          distance_to_segment(p, hip, foot_l) <= limb_r ||
          distance_to_segment(p, hip, foot_r) <= limb_r ||
          distance_to_segment(p, shoulder, hand_l) <= limb_r ||
          distance_to_segment(p, shoulder, hand_r) <= limb_r;
      if (body) mask[static_cast<std::size_t>(i) * w + j] = 1;
    }
  return mask;
}

std::vector<std::uint8_t> head_region(const std::vector<std::uint8_t>& mask,
                                      int h, int w) {
  int row_min = h, row_max = -1;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j)
      if (mask[static_cast<std::size_t>(i) * w + j]) {
        row_min = std::min(row_min, i);
        row_max = std::max(row_max, i);
      }
  std::vector<std::uint8_t> region(mask.size(), 0);
  if (row_max < row_min) return region;  // empty mask
  const int span = row_max - row_min + 1;
  const int head_rows = (span + 3) / 4;  // top 25%, rounded up
  for (int i = row_min; i < row_min + head_rows; ++i)
    for (int j = 0; j < w; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * w + j;
      region[k] = mask[k];
    }
  return region;
}

namespace {

// Renders one frame given the pose; identity affects head-region pixels only.
Scene render_frame(const SynthSpec& spec, const Eigen::MatrixXd& texture,
                   const PoseParams& pose, std::uint64_t instance_seed) {
  const int h = spec.height;
  const int w = spec.width;
  Xoshiro256pp bg_stream(derive_seed(instance_seed, kTagBackground));
  const double base = bg_stream.uniform(0.08, 0.22);
  const double grad_x = bg_stream.uniform(-0.06, 0.06);
  const double grad_y = bg_stream.uniform(-0.06, 0.06);
  const double body_value = bg_stream.uniform(0.78, 0.92);

  const std::vector<std::uint8_t> mask = render_silhouette(h, w, pose);
  const std::vector<std::uint8_t> head = head_region(mask, h, w);

  // Texture anchor: top-left of the head region's bounding box.
  int head_row0 = h, head_col0 = w;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j)
      if (head[static_cast<std::size_t>(i) * w + j]) {
        head_row0 = std::min(head_row0, i);
        head_col0 = std::min(head_col0, j);
      }

  Eigen::VectorXd values(static_cast<long>(h) * w);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * w + j;
      double v = base + grad_x * (w > 1 ? static_cast<double>(j) / (w - 1) : 0.0) +
                 grad_y * (h > 1 ? static_cast<double>(i) / (h - 1) : 0.0);
      if (mask[k]) v = body_value;
      if (head[k]) {
        const int ti = (i - head_row0) % kTexturePatch;
        const int tj = (j - head_col0) % kTexturePatch;
        v = 0.25 + 0.55 * texture(ti, tj);
      }
      values[static_cast<long>(k)] = std::clamp(v, 0.0, 1.0);
    }
  return make_scene(h, w, std::move(values));
}

}  // namespace

Scene gen_scene(const SynthSpec& spec, int identity, int behavior,
                std::uint64_t instance_seed) {
  validate_labels(spec, identity, behavior);
  Xoshiro256pp pose_stream(derive_seed(instance_seed, kTagPose));
  const PoseParams pose = BehaviorBank::pose_at(
      static_cast<BehaviorClass>(behavior), 0, spec.t_frames, pose_stream);
  return render_frame(spec, identity_texture(spec, identity), pose,
                      instance_seed);
}

FrameBatch gen_sequence(const SynthSpec& spec, int identity, int behavior,
                        std::uint64_t instance_seed) {
  validate_labels(spec, identity, behavior);
  if (spec.t_frames < 1) throw InvalidArgument("t_frames must be >= 1");
  const Eigen::MatrixXd texture = identity_texture(spec, identity);
  Eigen::MatrixXd frames(static_cast<long>(spec.height) * spec.width,
                         spec.t_frames);
  for (int t = 0; t < spec.t_frames; ++t) {
    // Fresh stream per frame: every frame draws the same base pose numbers,
    // so the trajectory is a pure function of (base pose, t).
    Xoshiro256pp pose_stream(derive_seed(instance_seed, kTagPose));
    const PoseParams pose = BehaviorBank::pose_at(
        static_cast<BehaviorClass>(behavior), t, spec.t_frames, pose_stream);
    frames.col(t) =
        render_frame(spec, texture, pose, instance_seed).values;
  }
  return make_frame_batch(spec.height, spec.width, std::move(frames));
}

std::vector<SynthInstance> synth_instances(const SynthSpec& spec, Task task) {
  if (spec.samples_per_class < 10)
    throw SplitTooSmall("samples_per_class must be >= 10 for an 8:1:1 split");
  if (spec.num_identities < 2 || spec.num_behaviors < 2)
    throw InvalidArgument("spec needs at least 2 identities and 2 behaviors");
  const int classes =
      task == Task::privacy ? spec.num_identities : spec.num_behaviors;
  const int nuisance_count =
      task == Task::privacy ? spec.num_behaviors : spec.num_identities;
  const int spc = spec.samples_per_class;
  const int n_val = spc / 10;
  const int n_test = spc / 10;
  const int n_train = spc - n_val - n_test;

  std::vector<SynthInstance> instances;
  instances.reserve(static_cast<std::size_t>(classes) * spc);
  for (int label = 0; label < classes; ++label)
    for (int s = 0; s < spc; ++s) {
      SynthInstance inst;
      inst.class_label = label;
      const std::uint64_t index =
          static_cast<std::uint64_t>(label) * spc + s;
      inst.instance_seed = derive_seed(spec.master_seed, kTagInstanceBase + index);
      Xoshiro256pp nuisance_stream(derive_seed(inst.instance_seed, kTagNuisance));
      inst.nuisance_label = static_cast<int>(
          nuisance_stream.uniform_int(static_cast<std::uint64_t>(nuisance_count)));
      inst.split = s < n_train            ? Split::train
                   : s < n_train + n_val  ? Split::val
                                          : Split::test;
      const int identity =
          task == Task::privacy ? label : inst.nuisance_label;
      const int behavior =
          task == Task::privacy ? inst.nuisance_label : label;
      if (task == Task::privacy) {
        // Single-frame scene; store as a one-column batch.
        const Scene scene = gen_scene(spec, identity, behavior, inst.instance_seed);
        inst.frames = make_frame_batch(spec.height, spec.width, scene.values);
      } else {
        inst.frames = gen_sequence(spec, identity, behavior, inst.instance_seed);
      }
      instances.push_back(std::move(inst));
    }
  return instances;
}

DatasetTriple measure_dataset(const SynthSpec& spec,
                              const std::vector<SynthInstance>& instances,
                              const SensingOperator& op, Task task) {
  if (instances.empty()) throw InvalidArgument("no instances to measure");
  const int classes =
      task == Task::privacy ? spec.num_identities : spec.num_behaviors;
  const long feature_dim = task == Task::privacy ? op.m : 2 * op.m;

  std::vector<Eigen::MatrixXd> features(3);
  std::vector<std::vector<int>> labels(3);
  std::vector<long> counts(3, 0);
  for (const auto& inst : instances) ++counts[static_cast<int>(inst.split)];
  for (int s = 0; s < 3; ++s) features[s].resize(counts[s], feature_dim);

  // One product over the concatenated frames; column t of an instance's
  // block matches measure_batch on that instance (same kernel, same
  // per-column noise seeding).
  long total_cols = 0;
  for (const auto& inst : instances) total_cols += inst.frames.t();
  Eigen::MatrixXd stacked(op.pixels(), total_cols);
  long col = 0;
  for (const auto& inst : instances) {
    if (inst.frames.height != op.height || inst.frames.width != op.width)
      throw InvalidArgument("instance dimensions do not match operator");
    stacked.middleCols(col, inst.frames.t()) = inst.frames.frames;
    col += inst.frames.t();
  }
  Eigen::MatrixXd measured = op.effective * stacked;
  if (spec.noise.kind != NoiseKind::none) {
    col = 0;
    for (const auto& inst : instances) {
      const std::uint64_t noise_seed = derive_seed(inst.instance_seed, kTagNoise);
      for (long t = 0; t < inst.frames.t(); ++t) {
        Xoshiro256pp gen(column_seed(noise_seed, static_cast<std::uint64_t>(t)));
        measured.col(col + t) += spec.noise.sample(op.m, gen);
      }
      col += inst.frames.t();
    }
  }

  std::vector<long> cursor(3, 0);
  col = 0;
  MeasurementBatch window;
  window.noise = spec.noise;
  for (const auto& inst : instances) {
    const int s = static_cast<int>(inst.split);
    if (task == Task::privacy) {
      features[s].row(cursor[s]) = measured.col(col).transpose();
    } else {
      window.values = measured.middleCols(col, inst.frames.t());
      features[s].row(cursor[s]) = temporal_features(window).transpose();
    }
    labels[s].push_back(inst.class_label);
    ++cursor[s];
    col += inst.frames.t();
  }

  DatasetTriple triple;
  triple.train = make_labeled_set(std::move(features[0]), std::move(labels[0]),
                                  classes, task, op.rho, Split::train);
  triple.val = make_labeled_set(std::move(features[1]), std::move(labels[1]),
                                classes, task, op.rho, Split::val);
  triple.test = make_labeled_set(std::move(features[2]), std::move(labels[2]),
                                 classes, task, op.rho, Split::test);
  return triple;
}

DatasetTriple build_dataset(const SynthSpec& spec, const SensingOperator& op,
                            Task task) {
  return measure_dataset(spec, synth_instances(spec, task), op, task);
}

}  // namespace spx
