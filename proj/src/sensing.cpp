#include "spx/sensing.hpp"

#include <cmath>

#include "spx/errors.hpp"

namespace spx {

Scene make_scene(int h, int w, Eigen::VectorXd values) {
  if (h < 1 || w < 1) throw InvalidArgument("scene dimensions must be >= 1");
  if (values.size() != static_cast<long>(h) * w)
    throw InvalidArgument("scene vector length does not match h*w");
  if (!values.allFinite()) throw InvalidArgument("scene values must be finite");
  return Scene{h, w, std::move(values)};
}

FrameBatch make_frame_batch(int h, int w, Eigen::MatrixXd frames,
                            double frame_period) {
  if (h < 1 || w < 1) throw InvalidArgument("frame dimensions must be >= 1");
  if (frames.rows() != static_cast<long>(h) * w)
    throw InvalidArgument("frame matrix row count does not match h*w");
  if (frames.cols() < 1) throw InvalidArgument("frame batch needs T >= 1");
  if (!frames.allFinite()) throw InvalidArgument("frame values must be finite");
  return FrameBatch{h, w, std::move(frames), frame_period};
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::iid_gaussian: return "iid_gaussian";
    case NoiseKind::diagonal: return "diagonal";
    case NoiseKind::ar1: return "ar1";
  }
  return "none";
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "none") return NoiseKind::none;
  if (name == "iid_gaussian") return NoiseKind::iid_gaussian;
  if (name == "diagonal") return NoiseKind::diagonal;
  if (name == "ar1") return NoiseKind::ar1;
  throw InvalidArgument("unknown noise kind: " + name);
}

NoiseModel NoiseModel::none() { return NoiseModel{}; }

NoiseModel NoiseModel::iid_gaussian(double sigma) {
  if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be >= 0");
  NoiseModel model;
  model.kind = NoiseKind::iid_gaussian;
  model.sigma = sigma;
  return model;
}

NoiseModel NoiseModel::diagonal(Eigen::VectorXd variances) {
  if (variances.size() < 1) throw InvalidArgument("empty variance vector");
  if (!(variances.array() >= 0.0).all())
    throw InvalidArgument("variances must be >= 0");
  NoiseModel model;
  model.kind = NoiseKind::diagonal;
  model.diag = std::move(variances);
  return model;
}

NoiseModel NoiseModel::ar1(double sigma, double phi_corr) {
  if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be >= 0");
  if (!(std::abs(phi_corr) < 1.0))
    throw InvalidNoiseModel("AR(1) correlation must satisfy |phi| < 1");
  NoiseModel model;
  model.kind = NoiseKind::ar1;
  model.sigma = sigma;
  model.phi_corr = phi_corr;
  return model;
}

Eigen::MatrixXd NoiseModel::covariance(long m) const {
  if (m < 1) throw InvalidArgument("covariance needs m >= 1");
  switch (kind) {
    case NoiseKind::none:
      throw InvalidNoiseModel("noise kind 'none' has no SPD covariance");
    case NoiseKind::iid_gaussian: {
      if (sigma <= 0.0)
        throw InvalidNoiseModel("iid covariance needs sigma > 0");
      return sigma * sigma * Eigen::MatrixXd::Identity(m, m);
    }
    case NoiseKind::diagonal: {
      if (diag.size() != m)
        throw InvalidArgument("diagonal noise sized for m=" +
                              std::to_string(diag.size()) + ", operator has m=" +
                              std::to_string(m));
      if (!(diag.array() > 0.0).all())
        throw InvalidNoiseModel("diagonal covariance needs all variances > 0");
      return diag.asDiagonal();
    }
    case NoiseKind::ar1: {
      if (sigma <= 0.0)
        throw InvalidNoiseModel("AR(1) covariance needs sigma > 0");
      if (!(std::abs(phi_corr) < 1.0))
        throw InvalidNoiseModel("AR(1) correlation must satisfy |phi| < 1");
      Eigen::MatrixXd cov(m, m);
      for (long i = 0; i < m; ++i)
        for (long j = 0; j < m; ++j)
          cov(i, j) = sigma * sigma * std::pow(phi_corr, std::abs(i - j));
      return cov;
    }
  }
  throw InvalidNoiseModel("unknown noise kind");
}

Eigen::VectorXd NoiseModel::sample(long m, Xoshiro256pp& gen) const {
  Eigen::VectorXd eps = Eigen::VectorXd::Zero(m);
  switch (kind) {
    case NoiseKind::none:
      break;
    case NoiseKind::iid_gaussian:
      for (long i = 0; i < m; ++i) eps[i] = sigma * gen.gaussian();
      break;
    case NoiseKind::diagonal: {
      if (diag.size() != m)
        throw InvalidArgument("diagonal noise sized for m=" +
                              std::to_string(diag.size()) + ", operator has m=" +
                              std::to_string(m));
      for (long i = 0; i < m; ++i)
        eps[i] = std::sqrt(diag[i]) * gen.gaussian();
      break;
    }
    case NoiseKind::ar1: {
      if (!(std::abs(phi_corr) < 1.0))
        throw InvalidNoiseModel("AR(1) correlation must satisfy |phi| < 1");
      const double innovation = sigma * std::sqrt(1.0 - phi_corr * phi_corr);
      for (long i = 0; i < m; ++i)
        eps[i] = (i == 0) ? sigma * gen.gaussian()
                          : phi_corr * eps[i - 1] + innovation * gen.gaussian();
      break;
    }
  }
  return eps;
}

std::string NoiseModel::describe() const {
  switch (kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::iid_gaussian:
      return "iid_gaussian(sigma=" + std::to_string(sigma) + ")";
    case NoiseKind::diagonal:
      return "diagonal(m=" + std::to_string(diag.size()) + ")";
    case NoiseKind::ar1:
      return "ar1(sigma=" + std::to_string(sigma) +
             ",phi=" + std::to_string(phi_corr) + ")";
  }
  return "none";
}

AcquisitionChain make_chain(Eigen::VectorXd gains, Eigen::VectorXd offsets) {
  if (gains.size() != offsets.size())
    throw InvalidArgument("gain and offset lengths differ");
  if (gains.size() < 1) throw InvalidArgument("empty acquisition chain");
  if (!(gains.array() > 0.0).all())
    throw InvalidArgument("gains must be strictly positive");
  return AcquisitionChain{std::move(gains), std::move(offsets)};
}

Eigen::VectorXd measure(const SensingOperator& op, const Scene& scene,
                        const NoiseModel& noise, std::uint64_t seed) {
  if (scene.height != op.height || scene.width != op.width)
    throw InvalidArgument("scene dimensions do not match operator");
  // Single-column matrix product, so a one-frame batch reproduces this
  // bitwise (matrix*vector would take a different kernel).
  Eigen::Map<const Eigen::MatrixXd> frame(scene.values.data(),
                                          scene.values.size(), 1);
  Eigen::VectorXd y = op.effective * frame;
  if (noise.kind != NoiseKind::none) {
    Xoshiro256pp gen(seed);
    y += noise.sample(op.m, gen);
  }
  return y;
}

MeasurementBatch measure_batch(const SensingOperator& op,
                               const FrameBatch& batch,
                               const NoiseModel& noise, std::uint64_t seed) {
  if (batch.height != op.height || batch.width != op.width)
    throw InvalidArgument("frame dimensions do not match operator");
  MeasurementBatch out;
  out.values.noalias() = op.effective * batch.frames;
  if (noise.kind != NoiseKind::none) {
    for (long t = 0; t < batch.t(); ++t) {
      Xoshiro256pp gen(column_seed(seed, static_cast<std::uint64_t>(t)));
      out.values.col(t) += noise.sample(op.m, gen);
    }
  }
  out.operator_id = op.id();
  out.noise = noise;
  out.seed = seed;
  out.calibrated = true;
  out.whitened = op.whitened;
  return out;
}

Eigen::VectorXd kron_vec_apply(const SensingOperator& op,
                               const FrameBatch& batch) {
  if (batch.height != op.height || batch.width != op.width)
    throw InvalidArgument("frame dimensions do not match operator");
  const Eigen::MatrixXd product = op.effective * batch.frames;
  return Eigen::Map<const Eigen::VectorXd>(product.data(), product.size());
}

Eigen::VectorXd apply_chain(const Eigen::VectorXd& y,
                            const AcquisitionChain& chain) {
  if (y.size() != chain.gains.size())
    throw InvalidArgument("measurement length does not match chain");
  return (chain.gains.array() * y.array() + chain.offsets.array()).matrix();
}

}  // namespace spx
