#ifndef SPX_RECONSTRUCTION_HPP
#define SPX_RECONSTRUCTION_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <vector>

#include "spx/sensing.hpp"

namespace spx {

enum class ReconMethod { ridge, tv };
enum class RidgeRegularizer { identity, laplacian };

struct ReconConfig {
  ReconMethod method = ReconMethod::ridge;
  double lambda = 0.0;
  RidgeRegularizer regularizer = RidgeRegularizer::laplacian;
  long max_iters = 2000;
  // Relative residual (ridge) / relative objective change (tv). Defaults to
  // 1e-8 for ridge and 1e-6 for tv when unset.
  std::optional<double> tol;

  double resolved_tol() const {
    return tol ? *tol : (method == ReconMethod::ridge ? 1e-8 : 1e-6);
  }
};

// Forward-difference gradient, vertical differences stacked on horizontal,
// replicate boundary (boundary rows are identically zero). Shape 2N x N;
// every row has at most two nonzeros (+1, -1) and D * constant = 0.
struct GradientOperator {
  int height = 0;
  int width = 0;
  Eigen::SparseMatrix<double> representation;  // 2N x N
};

GradientOperator build_gradient_operator(int h, int w);

// 5-point Laplacian stencil with replicate boundary; L * constant = 0.
Eigen::SparseMatrix<double> build_laplacian(int h, int w);

// Phi^T (Phi x - y).
Eigen::VectorXd data_gradient(const SensingOperator& op,
                              const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y);

struct ReconResult {
  Scene x_hat;
  long iterations = 0;
  double final_objective = 0.0;
  std::vector<double> objective_trace;  // objective after each iteration
  std::vector<double> residual_trace;   // solver residual per iteration
  bool converged = false;
};

// Solves (Phi^T Phi + lambda L^T L) x = Phi^T y by conjugate gradient with
// the operator applied as chained products; the N x N normal matrix is never
// formed. lambda = 0 requires M >= N.
ReconResult reconstruct_ridge(const SensingOperator& op,
                              const Eigen::VectorXd& y,
                              const ReconConfig& cfg);

// Minimizes 0.5*||y - Phi x||^2 + lambda*||D x||_1 by monotone proximal
// gradient. The step is 1/L with L the largest eigenvalue of Phi^T Phi from
// power iteration (50 iterations, 1e-6 tolerance, inflated by 1.01); the
// prox of the composite l1 term runs 20 dual-ascent iterations on the
// gradient domain, warm-started across outer iterations.
ReconResult reconstruct_tv(const SensingOperator& op, const Eigen::VectorXd& y,
                           const ReconConfig& cfg);

// Largest eigenvalue estimate of Phi^T Phi (power iteration as above).
double lipschitz_estimate(const SensingOperator& op);

}  // namespace spx

#endif
