#ifndef SPX_DIAGNOSTICS_HPP
#define SPX_DIAGNOSTICS_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "spx/patterns.hpp"

namespace spx {

enum class GramSide { rows, cols };

// Phi Phi^T (rows, M x M) or Phi^T Phi (cols, N x N), numerically
// symmetrized. The cols side is guarded against materializing huge N x N
// matrices; raise cols_guard to override.
Eigen::MatrixXd gram(const SensingOperator& op, GramSide side,
                     long cols_guard = 4096);

struct SpectrumReport {
  Eigen::VectorXd singular_values;  // nonincreasing, min(M,N) entries
  long threshold_rank = 0;          // #{ sigma_i >= eps_rank * sigma_1 }
  double entropy_rank = 1.0;        // exp of Shannon entropy of sigma^2 shares
  double spectral_mass = 0.0;       // sum of sigma_i^2
};

// Singular values via eigendecomposition of the smaller Gram matrix.
SpectrumReport spectrum(const SensingOperator& op, double eps_rank = 1e-10);

// Empirical isometry constants of the row-normalized operator on a subspace:
// extremes of ||Phi_hat z||^2 over random unit probes z in span(basis).
// Phi_hat scales every row to squared norm N and the whole matrix by
// 1/sqrt(M), so an orthogonal-row operator at M = N gives exactly 1.
struct IsometryReport {
  double c1_hat = 0.0;
  double c2_hat = 0.0;
  long subspace_dim = 0;
  long num_probes = 0;
  std::uint64_t seed = 0;
};

IsometryReport isometry_constants(const SensingOperator& op,
                                  const Eigen::MatrixXd& basis,
                                  long num_probes, std::uint64_t seed);

// Gaussian random N x d matrix from the named generator; callers typically
// feed it to isometry_constants, which orthonormalizes internally.
Eigen::MatrixXd random_subspace_basis(long n, long d, std::uint64_t seed);

}  // namespace spx

#endif
