#include "spx/diagnostics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "spx/errors.hpp"
#include "spx/rng.hpp"

namespace spx {

Eigen::MatrixXd gram(const SensingOperator& op, GramSide side,
                     long cols_guard) {
  if (side == GramSide::cols && op.pixels() > cols_guard)
    throw ResourceLimit("cols Gram would be " + std::to_string(op.pixels()) +
                        "^2; raise the guard to materialize it");
  Eigen::MatrixXd product;
  if (side == GramSide::rows)
    product.noalias() = op.effective * op.effective.transpose();
  else
    product.noalias() = op.effective.transpose() * op.effective;
  return 0.5 * (product + product.transpose());
}

SpectrumReport spectrum(const SensingOperator& op, double eps_rank) {
  if (!(eps_rank > 0.0 && eps_rank < 1.0))
    throw InvalidArgument("eps_rank must lie in (0,1)");
  const long n = op.pixels();
  const GramSide side = op.m <= n ? GramSide::rows : GramSide::cols;
  const Eigen::MatrixXd g =
      gram(op, side, std::numeric_limits<long>::max());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g);
  if (solver.info() != Eigen::Success)
    throw Error("eigendecomposition of the Gram matrix failed");

  const long count = g.rows();  // = min(M, N)
  SpectrumReport report;
  report.singular_values.resize(count);
  for (long i = 0; i < count; ++i) {
    // Eigenvalues come back ascending; clamp tiny negatives from roundoff.
    const double ev = std::max(solver.eigenvalues()[count - 1 - i], 0.0);
    report.singular_values[i] = std::sqrt(ev);
  }

  const double top = report.singular_values[0];
  report.spectral_mass = report.singular_values.squaredNorm();
  if (top > 0.0) {
    report.threshold_rank =
        (report.singular_values.array() >= eps_rank * top).count();
    double entropy = 0.0;
    for (long i = 0; i < count; ++i) {
      const double share =
          report.singular_values[i] * report.singular_values[i] /
          report.spectral_mass;
      if (share > 0.0) entropy -= share * std::log(share);
    }
    report.entropy_rank = std::exp(entropy);
  } else {
    report.threshold_rank = 0;
    report.entropy_rank = 1.0;
  }
  return report;
}

Eigen::MatrixXd random_subspace_basis(long n, long d, std::uint64_t seed) {
  if (n < 1 || d < 1 || d > n)
    throw InvalidArgument("subspace basis needs 1 <= d <= n");
  Xoshiro256pp gen(seed);
  Eigen::MatrixXd basis(n, d);
  for (long j = 0; j < d; ++j)
    for (long i = 0; i < n; ++i) basis(i, j) = gen.gaussian();
  return basis;
}

IsometryReport isometry_constants(const SensingOperator& op,
                                  const Eigen::MatrixXd& basis,
                                  long num_probes, std::uint64_t seed) {
  const long n = op.pixels();
  const long d = basis.cols();
  if (basis.rows() != n) throw InvalidArgument("basis row count must equal N");
  if (d < 1 || d > n) throw InvalidArgument("need 1 <= d <= N basis columns");
  if (num_probes < 1) throw InvalidArgument("need at least one probe");

  // Modified Gram-Schmidt with one re-orthogonalization pass.
  Eigen::MatrixXd ortho = basis;
  for (long j = 0; j < d; ++j) {
    const double original = ortho.col(j).norm();
    for (int pass = 0; pass < 2; ++pass)
      for (long i = 0; i < j; ++i)
        ortho.col(j) -= ortho.col(i).dot(ortho.col(j)) * ortho.col(i);
    const double remaining = ortho.col(j).norm();
    if (!(remaining > 1e-10 * std::max(original, 1.0)))
      throw DegenerateSubspace("basis is numerically rank-deficient");
    ortho.col(j) /= remaining;
  }

  // Row scale: unit-energy rows (squared norm N) and a 1/sqrt(M) aggregate.
  Eigen::VectorXd row_scale(op.m);
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double sqrt_m = std::sqrt(static_cast<double>(op.m));
  for (long i = 0; i < op.m; ++i) {
    const double norm = op.effective.row(i).norm();
    if (norm == 0.0)
      throw InvalidArgument("operator has a zero row; cannot normalize");
    row_scale[i] = sqrt_n / (norm * sqrt_m);
  }

  IsometryReport report;
  report.subspace_dim = d;
  report.num_probes = num_probes;
  report.seed = seed;
  report.c1_hat = std::numeric_limits<double>::infinity();
  report.c2_hat = 0.0;

  // Probe subspace images; per-probe seeds keep the batch order-free.
  const Eigen::MatrixXd mapped = op.effective * ortho;  // m x d
  for (long probe = 0; probe < num_probes; ++probe) {
    Xoshiro256pp gen(column_seed(seed, static_cast<std::uint64_t>(probe)));
    Eigen::VectorXd coeffs(d);
    for (long i = 0; i < d; ++i) coeffs[i] = gen.gaussian();
    const double norm = coeffs.norm();
    if (norm == 0.0) continue;
    coeffs /= norm;
    const double energy =
        (row_scale.array() * (mapped * coeffs).array()).matrix().squaredNorm();
    report.c1_hat = std::min(report.c1_hat, energy);
    report.c2_hat = std::max(report.c2_hat, energy);
  }
  return report;
}

}  // namespace spx
