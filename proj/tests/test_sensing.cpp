#include <doctest.h>

#include <cmath>

#include "spx/errors.hpp"
#include "spx/patterns.hpp"
#include "spx/sensing.hpp"

using namespace spx;

namespace {

SensingOperator two_row_operator() {
  Eigen::MatrixXd eff(2, 4);
  eff << 1, 1, -1, -1, -1, -1, 1, 1;
  return operator_from_matrix(eff, 2, 2, false);
}

}  // namespace

TEST_SUITE_BEGIN("sensing");

TEST_CASE("measure computes the stated inner products") {
  const SensingOperator op = two_row_operator();
  Eigen::VectorXd x(4);
  x << 1, 2, 3, 4;
  const Eigen::VectorXd y =
      measure(op, make_scene(2, 2, x), NoiseModel::none(), 0);
  CHECK(y[0] == -4.0);
  CHECK(y[1] == 4.0);
}

TEST_CASE("measuring a dark scene gives zeros") {
  const PatternLibrary lib = gen_speckle(8, 4, 4, 3);
  const SensingOperator op = select(lib, 8);
  const Eigen::VectorXd y = measure(
      op, make_scene(4, 4, Eigen::VectorXd::Zero(16)), NoiseModel::none(), 0);
  CHECK((y.array() == 0.0).all());
}

TEST_CASE("measure rejects mismatched dimensions") {
  const SensingOperator op = two_row_operator();
  CHECK_THROWS_AS(
      measure(op, make_scene(3, 3, Eigen::VectorXd::Zero(9)),
              NoiseModel::none(), 0),
      InvalidArgument);
}

TEST_CASE("iid noise has the configured standard deviation") {
  // Sample-statistics oracle: 10^4 repeated measurements of one fixed scene.
  const PatternLibrary lib = gen_speckle(4, 2, 2, 5);
  const SensingOperator op = select(lib, 4);
  const Scene scene = make_scene(2, 2, Eigen::VectorXd::Constant(4, 0.25));
  const NoiseModel noise = NoiseModel::iid_gaussian(0.1);
  const int repeats = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int k = 0; k < repeats; ++k) {
    const double y0 = measure(op, scene, noise, 1000 + k)[0];
    sum += y0;
    sum_sq += y0 * y0;
  }
  const double mean = sum / repeats;
  const double stddev = std::sqrt(sum_sq / repeats - mean * mean);
  CHECK(std::abs(stddev - 0.1) / 0.1 < 0.03);
}

TEST_CASE("measurement is linear in the scene") {
  const PatternLibrary lib = gen_speckle(12, 4, 4, 9);
  const SensingOperator op = select(lib, 12);
  Xoshiro256pp gen(4);
  Eigen::VectorXd x1(16), x2(16);
  for (int i = 0; i < 16; ++i) x1[i] = gen.uniform();
  for (int i = 0; i < 16; ++i) x2[i] = gen.uniform();
  const double a = 2.25, b = -0.75;
  const Eigen::VectorXd lhs = measure(
      op, make_scene(4, 4, a * x1 + b * x2), NoiseModel::none(), 0);
  const Eigen::VectorXd rhs =
      a * measure(op, make_scene(4, 4, x1), NoiseModel::none(), 0) +
      b * measure(op, make_scene(4, 4, x2), NoiseModel::none(), 0);
  CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
}

TEST_CASE("single-frame batch equals measure bitwise") {
  const PatternLibrary lib = gen_speckle(6, 3, 3, 10);
  const SensingOperator op = select(lib, 6);
  Xoshiro256pp gen(77);
  Eigen::MatrixXd frame(9, 1);
  for (int i = 0; i < 9; ++i) frame(i, 0) = gen.uniform();
  const NoiseModel noise = NoiseModel::ar1(0.3, 0.5);
  const MeasurementBatch batch =
      measure_batch(op, make_frame_batch(3, 3, frame), noise, 42);
  const Eigen::VectorXd single =
      measure(op, make_scene(3, 3, frame.col(0)), noise, 42);
  CHECK(batch.values.col(0) == single);
  CHECK(batch.calibrated);
  CHECK(batch.seed == 42);
}

TEST_CASE("every batch column equals the single measurement with its column seed") {
  const PatternLibrary lib = gen_speckle(5, 4, 2, 21);
  const SensingOperator op = select(lib, 5);
  Xoshiro256pp gen(3);
  Eigen::MatrixXd frames(8, 4);
  for (int i = 0; i < frames.size(); ++i) frames(i / 4, i % 4) = gen.uniform();
  const NoiseModel noise = NoiseModel::iid_gaussian(0.2);
  const MeasurementBatch batch =
      measure_batch(op, make_frame_batch(4, 2, frames), noise, 5);
  for (int t = 0; t < 4; ++t) {
    const Eigen::VectorXd single = measure(
        op, make_scene(4, 2, frames.col(t)), noise, column_seed(5, t));
    CHECK(batch.values.col(t) == single);
  }
}

TEST_CASE("identical frames give identical noiseless columns") {
  const PatternLibrary lib = gen_speckle(4, 2, 2, 6);
  const SensingOperator op = select(lib, 4);
  Eigen::MatrixXd frames(4, 2);
  frames.col(0) << 0.2, 0.4, 0.6, 0.8;
  frames.col(1) = frames.col(0);
  const MeasurementBatch batch =
      measure_batch(op, make_frame_batch(2, 2, frames), NoiseModel::none(), 0);
  CHECK(batch.values.col(0) == batch.values.col(1));
}

TEST_CASE("batch measurement equals the dense product oracle") {
  const PatternLibrary lib = gen_hadamard(64, 8, 8);
  const SensingOperator op = select(lib, 64);
  Xoshiro256pp gen(8);
  Eigen::MatrixXd frames(64, 5);
  for (int i = 0; i < frames.rows(); ++i)
    for (int j = 0; j < frames.cols(); ++j) frames(i, j) = gen.uniform();
  const MeasurementBatch batch =
      measure_batch(op, make_frame_batch(8, 8, frames), NoiseModel::none(), 0);
  // Triple-loop oracle.
  for (int i = 0; i < 64; ++i)
    for (int t = 0; t < 5; ++t) {
      double dot = 0.0;
      for (int k = 0; k < 64; ++k) dot += op.effective(i, k) * frames(k, t);
      CHECK(batch.values(i, t) == doctest::Approx(dot).epsilon(1e-12));
    }
}

TEST_CASE("noise is deterministic in the seed and independent across columns") {
  const PatternLibrary lib = gen_speckle(4, 2, 2, 2);
  const SensingOperator op = select(lib, 4);
  Eigen::MatrixXd frames = Eigen::MatrixXd::Constant(4, 3, 0.5);
  const NoiseModel noise = NoiseModel::iid_gaussian(1.0);
  const MeasurementBatch a =
      measure_batch(op, make_frame_batch(2, 2, frames), noise, 123);
  const MeasurementBatch b =
      measure_batch(op, make_frame_batch(2, 2, frames), noise, 123);
  CHECK(a.values == b.values);

  // Column independence at 10^4 samples: adjacent column seeds, correlation
  // below 0.05.
  const int samples = 10000;
  Xoshiro256pp g0(column_seed(123, 0));
  Xoshiro256pp g1(column_seed(123, 1));
  const Eigen::VectorXd col0 = noise.sample(samples, g0);
  const Eigen::VectorXd col1 = noise.sample(samples, g1);
  const Eigen::VectorXd d0 = col0.array() - col0.mean();
  const Eigen::VectorXd d1 = col1.array() - col1.mean();
  const double r = d0.dot(d1) / (d0.norm() * d1.norm());
  CHECK(std::abs(r) < 0.05);
}

TEST_CASE("ar1 noise sampling matches its covariance model") {
  const NoiseModel noise = NoiseModel::ar1(1.5, 0.7);
  const long m = 3;
  const Eigen::MatrixXd cov = noise.covariance(m);
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < m; ++j)
      CHECK(cov(i, j) ==
            doctest::Approx(2.25 * std::pow(0.7, std::abs(i - j))));
  // Empirical covariance oracle over many draws.
  const int samples = 200000;
  Eigen::MatrixXd cov_hat = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < samples; ++k) {
    Xoshiro256pp gen(column_seed(9, k));
    const Eigen::VectorXd eps = noise.sample(m, gen);
    cov_hat += eps * eps.transpose();
  }
  cov_hat /= samples;
  CHECK((cov_hat - cov).norm() / cov.norm() < 0.05);
}

TEST_CASE("noise draws are prefix-consistent across nested lengths") {
  for (const NoiseModel& noise :
       {NoiseModel::iid_gaussian(0.5), NoiseModel::ar1(1.0, 0.6)}) {
    Xoshiro256pp g1(31), g2(31);
    const Eigen::VectorXd short_draw = noise.sample(8, g1);
    const Eigen::VectorXd long_draw = noise.sample(32, g2);
    CHECK(long_draw.head(8) == short_draw);
  }
}

TEST_CASE("noise model validation") {
  CHECK_THROWS_AS(NoiseModel::iid_gaussian(-1.0), InvalidArgument);
  CHECK_THROWS_AS(NoiseModel::ar1(1.0, 1.0), InvalidNoiseModel);
  CHECK_THROWS_AS(NoiseModel::none().covariance(4), InvalidNoiseModel);
  CHECK_THROWS_AS(NoiseModel::iid_gaussian(0.0).covariance(4),
                  InvalidNoiseModel);
  Eigen::VectorXd vars(2);
  vars << 1.0, 0.0;
  CHECK_THROWS_AS(NoiseModel::diagonal(vars).covariance(2), InvalidNoiseModel);
  CHECK_THROWS_AS(NoiseModel::diagonal(vars).covariance(3), InvalidArgument);
}

TEST_CASE("kron_vec_apply on a single frame equals the plain measurement") {
  const PatternLibrary lib = gen_speckle(3, 2, 3, 14);
  const SensingOperator op = select(lib, 3);
  Eigen::MatrixXd frame(6, 1);
  frame << 0.1, 0.9, 0.4, 0.3, 0.8, 0.2;
  const Eigen::VectorXd vec = kron_vec_apply(op, make_frame_batch(2, 3, frame));
  const Eigen::VectorXd y =
      measure(op, make_scene(2, 3, frame.col(0)), NoiseModel::none(), 0);
  CHECK(vec == y);
}

TEST_CASE("kron_vec_apply reshapes to the noiseless batch exactly") {
  const PatternLibrary lib = gen_speckle(7, 3, 3, 15);
  const SensingOperator op = select(lib, 7);
  Xoshiro256pp gen(2);
  Eigen::MatrixXd frames(9, 4);
  for (int i = 0; i < 9; ++i)
    for (int t = 0; t < 4; ++t) frames(i, t) = gen.uniform();
  const FrameBatch batch = make_frame_batch(3, 3, frames);
  const Eigen::VectorXd vec = kron_vec_apply(op, batch);
  const MeasurementBatch meas =
      measure_batch(op, batch, NoiseModel::none(), 0);
  for (int t = 0; t < 4; ++t)
    CHECK(vec.segment(t * 7, 7) == meas.values.col(t));
}

TEST_CASE("kron_vec_apply equals the explicit Kronecker operator") {
  // M=2, N=4, T=3 against the materialized 6x12 Kronecker matrix.
  const PatternLibrary lib = gen_speckle(2, 2, 2, 33);
  const SensingOperator op = select(lib, 2);
  Xoshiro256pp gen(6);
  Eigen::MatrixXd frames(4, 3);
  for (int i = 0; i < 4; ++i)
    for (int t = 0; t < 3; ++t) frames(i, t) = gen.uniform();
  const FrameBatch batch = make_frame_batch(2, 2, frames);

  Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(6, 12);
  for (int t = 0; t < 3; ++t)
    kron.block(t * 2, t * 4, 2, 4) = op.effective;
  Eigen::VectorXd vec_x(12);
  for (int t = 0; t < 3; ++t) vec_x.segment(t * 4, 4) = frames.col(t);

  const Eigen::VectorXd expected = kron * vec_x;
  const Eigen::VectorXd actual = kron_vec_apply(op, batch);
  CHECK((actual - expected).norm() <= 1e-12 * expected.norm());
}

TEST_CASE("apply_chain is the stated affine map") {
  Eigen::VectorXd gains(2), offsets(2), y(2);
  gains << 2, 2;
  offsets << 1, -1;
  y << 3, 4;
  const Eigen::VectorXd raw = apply_chain(y, make_chain(gains, offsets));
  CHECK(raw[0] == 7.0);
  CHECK(raw[1] == 7.0);

  const AcquisitionChain identity =
      make_chain(Eigen::VectorXd::Ones(2), Eigen::VectorXd::Zero(2));
  CHECK(apply_chain(y, identity) == y);

  CHECK_THROWS_AS(apply_chain(Eigen::VectorXd::Zero(3),
                              make_chain(gains, offsets)),
                  InvalidArgument);
  CHECK_THROWS_AS(make_chain(Eigen::VectorXd::Zero(2), offsets),
                  InvalidArgument);
}

TEST_SUITE_END();
