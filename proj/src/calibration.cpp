#include "spx/calibration.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "spx/errors.hpp"

namespace spx {

Eigen::VectorXd estimate_offset(const MeasurementBatch& dark) {
  if (dark.t() < 1) throw InvalidArgument("offset estimation needs T >= 1");
  return dark.values.rowwise().mean();
}

Eigen::VectorXd estimate_gain(const MeasurementBatch& refmeas,
                              const Eigen::VectorXd& ref_ideal,
                              const Eigen::VectorXd& offsets) {
  if (refmeas.t() < 1) throw InvalidArgument("gain estimation needs T >= 1");
  if (ref_ideal.size() != refmeas.m() || offsets.size() != refmeas.m())
    throw InvalidArgument("reference/offset length does not match batch");
  if ((ref_ideal.array() == 0.0).any())
    throw DegenerateReference("reference ideal response has zero entries");
  return ((refmeas.values.colwise() - offsets).rowwise().mean().array() /
          ref_ideal.array())
      .matrix();
}

MeasurementBatch calibrate(const MeasurementBatch& raw,
                           const CalibrationProfile& profile) {
  if (profile.gains_hat.size() != raw.m() ||
      profile.offsets_hat.size() != raw.m())
    throw InvalidArgument("profile length does not match batch");
  if (!(profile.gains_hat.array() > 0.0).all())
    throw ContractViolation("calibration gains must be strictly positive");
  MeasurementBatch out = raw;
  out.values = ((raw.values.colwise() - profile.offsets_hat).array().colwise() /
                profile.gains_hat.array())
                   .matrix();
  out.calibrated = true;
  return out;
}

WhiteningTransform build_whitening(const NoiseModel& noise, long m) {
  const Eigen::MatrixXd cov = noise.covariance(m);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw InvalidNoiseModel("noise covariance is not positive definite");
  return WhiteningTransform{llt.matrixL(), noise};
}

std::pair<MeasurementBatch, SensingOperator> whiten(
    const MeasurementBatch& meas, const SensingOperator& op,
    const NoiseModel& noise) {
  if (meas.m() != op.m)
    throw InvalidArgument("measurement row count does not match operator");
  if (!meas.calibrated)
    throw ContractViolation("whitening requires calibrated measurements");
  const WhiteningTransform transform = build_whitening(noise, op.m);
  const auto lower = transform.factor.triangularView<Eigen::Lower>();

  MeasurementBatch wmeas = meas;
  wmeas.values = lower.solve(meas.values);
  wmeas.whitened = true;

  SensingOperator wop = op;
  wop.effective = lower.solve(op.effective);
  wop.whitened = true;
  wmeas.operator_id = wop.id();
  return {std::move(wmeas), std::move(wop)};
}

MeasurementBatch measure_raw(const SensingOperator& op, const FrameBatch& batch,
                             const AcquisitionChain& chain,
                             const NoiseModel& noise, std::uint64_t seed) {
  if (chain.gains.size() != op.m)
    throw InvalidArgument("chain length does not match operator");
  MeasurementBatch out = measure_batch(op, batch, noise, seed);
  out.values = ((out.values.array().colwise() * chain.gains.array()).colwise() +
                chain.offsets.array())
                   .matrix();
  out.calibrated = false;
  return out;
}

UniformRefCalibration estimate_profile_uniform_ref(
    const SensingOperator& op, const AcquisitionChain& true_chain,
    const NoiseModel& noise, long n_dark, long n_ref, std::uint64_t seed) {
  if (n_dark < 1 || n_ref < 1)
    throw InvalidArgument("need at least one dark and one reference frame");
  const long n = op.pixels();

  const FrameBatch dark_frames =
      make_frame_batch(op.height, op.width, Eigen::MatrixXd::Zero(n, n_dark));
  const FrameBatch ref_frames =
      make_frame_batch(op.height, op.width, Eigen::MatrixXd::Ones(n, n_ref));

  const MeasurementBatch dark =
      measure_raw(op, dark_frames, true_chain, noise, derive_seed(seed, 1));
  const MeasurementBatch ref =
      measure_raw(op, ref_frames, true_chain, noise, derive_seed(seed, 2));

  UniformRefCalibration result;
  result.profile.offsets_hat = estimate_offset(dark);
  result.profile.n_dark = n_dark;
  result.profile.n_ref = n_ref;

  // Zero-mean effective rows give Phi*1 = 0 for balanced patterns; such rows
  // carry no gain information under a uniform reference.
  const Eigen::VectorXd ref_ideal = op.effective.rowwise().sum();
  const Eigen::VectorXd ref_mean =
      (ref.values.colwise() - result.profile.offsets_hat).rowwise().mean();
  result.profile.gains_hat = Eigen::VectorXd::Ones(op.m);
  for (long i = 0; i < op.m; ++i) {
    if (ref_ideal[i] == 0.0)
      result.excluded_rows.push_back(i);
    else
      result.profile.gains_hat[i] = ref_mean[i] / ref_ideal[i];
  }
  if (!(result.profile.gains_hat.array() > 0.0).all())
    throw DegenerateReference(
        "estimated gains not strictly positive; increase reference frames");
  return result;
}

}  // namespace spx
