#ifndef SPX_SENSING_HPP
#define SPX_SENSING_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "spx/patterns.hpp"
#include "spx/rng.hpp"

namespace spx {

// A scene vectorized row-major on an H x W grid. All entries must be finite;
// synthetic scenes additionally live in [0,1], but measurement accepts any
// finite values (linear combinations of scenes are themselves measurable).
struct Scene {
  int height = 0;
  int width = 0;
  Eigen::VectorXd values;  // length height*width

  long pixels() const { return static_cast<long>(height) * width; }
};

Scene make_scene(int h, int w, Eigen::VectorXd values);

// T scene vectors sharing one grid, stored as columns of an N x T matrix.
struct FrameBatch {
  int height = 0;
  int width = 0;
  Eigen::MatrixXd frames;     // pixels x T
  double frame_period = 0.0;  // seconds, metadata only

  long pixels() const { return static_cast<long>(height) * width; }
  long t() const { return frames.cols(); }
};

FrameBatch make_frame_batch(int h, int w, Eigen::MatrixXd frames,
                            double frame_period = 0.0);

enum class NoiseKind { none, iid_gaussian, diagonal, ar1 };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

// Additive noise on the effective measurement vector. Draws are consumed
// strictly in row order, so the length-M' prefix of a draw equals the draw
// for a nested operator with M' rows under the same seed.
struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  double sigma = 0.0;        // std for iid_gaussian and ar1
  Eigen::VectorXd diag;      // per-row variances for kind=diagonal
  double phi_corr = 0.0;     // AR(1) correlation, |phi| < 1

  static NoiseModel none();
  static NoiseModel iid_gaussian(double sigma);
  static NoiseModel diagonal(Eigen::VectorXd variances);
  static NoiseModel ar1(double sigma, double phi_corr);

  // Sigma for an M-row measurement. Throws InvalidNoiseModel when the model
  // has no symmetric positive definite covariance (kind=none, sigma=0, ...).
  Eigen::MatrixXd covariance(long m) const;

  // One noise vector. AR(1) is generated by the stationary recursion
  // e_0 = sigma z_0, e_i = phi e_{i-1} + sigma sqrt(1-phi^2) z_i, which has
  // covariance sigma^2 phi^|i-j| exactly.
  Eigen::VectorXd sample(long m, Xoshiro256pp& gen) const;

  std::string describe() const;
};

// Bucket readings for a frame window: column t holds the M measurements of
// frame t. `calibrated` is true while values are in ideal effective units
// (direct simulation output, or raw readings passed through calibrate()).
struct MeasurementBatch {
  Eigen::MatrixXd values;  // m x t
  std::string operator_id;
  NoiseModel noise;
  std::uint64_t seed = 0;
  bool calibrated = true;
  bool whitened = false;

  long m() const { return values.rows(); }
  long t() const { return values.cols(); }
};

// Per-row affine distortion of the acquisition chain: raw = g .* y + o.
struct AcquisitionChain {
  Eigen::VectorXd gains;    // strictly positive
  Eigen::VectorXd offsets;
};

AcquisitionChain make_chain(Eigen::VectorXd gains, Eigen::VectorXd offsets);

// y = Phi_M x + eps with eps drawn from the noise model under `seed`.
Eigen::VectorXd measure(const SensingOperator& op, const Scene& scene,
                        const NoiseModel& noise, std::uint64_t seed);

// Column t equals measure(op, frame t) with an independent noise column
// seeded by column_seed(seed, t); column 0 reproduces measure() exactly.
MeasurementBatch measure_batch(const SensingOperator& op,
                               const FrameBatch& batch,
                               const NoiseModel& noise, std::uint64_t seed);

// vec(Phi_M X) under column-stacking vec, i.e. (I_T (x) Phi_M) vec(X)
// without materializing the Kronecker product.
Eigen::VectorXd kron_vec_apply(const SensingOperator& op,
                               const FrameBatch& batch);

// Elementwise g_i * y_i + o_i.
Eigen::VectorXd apply_chain(const Eigen::VectorXd& y,
                            const AcquisitionChain& chain);

}  // namespace spx

#endif
