#ifndef SPX_CALIBRATION_HPP
#define SPX_CALIBRATION_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "spx/sensing.hpp"

namespace spx {

// Estimated acquisition chain: raw = gains_hat .* y + offsets_hat per row.
struct CalibrationProfile {
  Eigen::VectorXd offsets_hat;
  Eigen::VectorXd gains_hat;  // strictly positive
  long n_dark = 0;
  long n_ref = 0;
};

// Lower-triangular factor of the noise covariance, Sigma = L L^T. Whitening
// is applied by triangular solves against L rather than an explicit
// inverse square root.
struct WhiteningTransform {
  Eigen::MatrixXd factor;  // m x m, strictly positive diagonal
  NoiseModel source_noise;
};

// Per-row mean of dark readings (scene = 0, so the mean estimates o).
Eigen::VectorXd estimate_offset(const MeasurementBatch& dark);

// g_i = mean over frames of (raw_i - o_i) / ref_ideal_i. Every entry of
// ref_ideal must be nonzero.
Eigen::VectorXd estimate_gain(const MeasurementBatch& refmeas,
                              const Eigen::VectorXd& ref_ideal,
                              const Eigen::VectorXd& offsets);

// Inverse affine map (raw - o) / g per row; marks the result calibrated.
MeasurementBatch calibrate(const MeasurementBatch& raw,
                           const CalibrationProfile& profile);

WhiteningTransform build_whitening(const NoiseModel& noise, long m);

// Applies L^{-1} to the measurement columns and to the operator rows,
// yielding the equivalent unit-covariance model. Requires calibrated input
// and an SPD noise covariance.
std::pair<MeasurementBatch, SensingOperator> whiten(
    const MeasurementBatch& meas, const SensingOperator& op,
    const NoiseModel& noise);

// Simulated calibration against a uniform all-ones reference scene,
// ref_ideal = Phi_M * 1. Rows whose ideal response is exactly zero cannot
// constrain a gain; they are excluded, reported, and left at gain 1.
struct UniformRefCalibration {
  CalibrationProfile profile;
  std::vector<long> excluded_rows;
};

UniformRefCalibration estimate_profile_uniform_ref(
    const SensingOperator& op, const AcquisitionChain& true_chain,
    const NoiseModel& noise, long n_dark, long n_ref, std::uint64_t seed);

// Simulates raw readings for a frame batch: raw = chain(Phi x + eps).
MeasurementBatch measure_raw(const SensingOperator& op, const FrameBatch& batch,
                             const AcquisitionChain& chain,
                             const NoiseModel& noise, std::uint64_t seed);

}  // namespace spx

#endif
