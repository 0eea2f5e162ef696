#include "spx/reconstruction.hpp"

#include <cmath>

#include "spx/errors.hpp"
#include "spx/rng.hpp"

namespace spx {

namespace {

long pixel_index(int row, int col, int width) {
  return static_cast<long>(row) * width + col;
}

}  // namespace

GradientOperator build_gradient_operator(int h, int w) {
  if (h < 1 || w < 1) throw InvalidArgument("image dimensions must be >= 1");
  const long n = static_cast<long>(h) * w;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * n);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      const long k = pixel_index(i, j, w);
      if (i + 1 < h) {  // vertical block, rows 0..N-1
        triplets.emplace_back(k, k, -1.0);
        triplets.emplace_back(k, pixel_index(i + 1, j, w), 1.0);
      }
      if (j + 1 < w) {  // horizontal block, rows N..2N-1
        triplets.emplace_back(n + k, k, -1.0);
        triplets.emplace_back(n + k, pixel_index(i, j + 1, w), 1.0);
      }
    }
  GradientOperator grad;
  grad.height = h;
  grad.width = w;
  grad.representation.resize(2 * n, n);
  grad.representation.setFromTriplets(triplets.begin(), triplets.end());
  return grad;
}

Eigen::SparseMatrix<double> build_laplacian(int h, int w) {
  if (h < 1 || w < 1) throw InvalidArgument("image dimensions must be >= 1");
  const long n = static_cast<long>(h) * w;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(5 * n);
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      const long k = pixel_index(i, j, w);
      int neighbors = 0;
      const auto add = [&](int ni, int nj) {
        if (ni >= 0 && ni < h && nj >= 0 && nj < w) {
          triplets.emplace_back(k, pixel_index(ni, nj, w), -1.0);
          ++neighbors;
        }
      };
      add(i - 1, j);
      add(i + 1, j);
      add(i, j - 1);
      add(i, j + 1);
      triplets.emplace_back(k, k, static_cast<double>(neighbors));
    }
  Eigen::SparseMatrix<double> lap(n, n);
  lap.setFromTriplets(triplets.begin(), triplets.end());
  return lap;
}

Eigen::VectorXd data_gradient(const SensingOperator& op,
                              const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y) {
  if (x.size() != op.pixels() || y.size() != op.m)
    throw InvalidArgument("dimension mismatch in data gradient");
  return op.effective.transpose() * (op.effective * x - y);
}

ReconResult reconstruct_ridge(const SensingOperator& op,
                              const Eigen::VectorXd& y,
                              const ReconConfig& cfg) {
  if (cfg.method != ReconMethod::ridge)
    throw InvalidArgument("config method is not ridge");
  if (y.size() != op.m) throw InvalidArgument("measurement length mismatch");
  if (cfg.lambda < 0.0) throw InvalidArgument("lambda must be >= 0");
  if (cfg.max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  const long n = op.pixels();
  if (cfg.lambda == 0.0 && op.m < n)
    throw SingularSystem(
        "lambda = 0 on an underdetermined system has no unique solution");

  const bool use_reg = cfg.lambda > 0.0;
  Eigen::SparseMatrix<double> reg;
  if (use_reg && cfg.regularizer == RidgeRegularizer::laplacian)
    reg = build_laplacian(op.height, op.width);

  // A v = Phi^T(Phi v) + lambda L^T(L v), applied without forming A.
  const auto apply_normal = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    Eigen::VectorXd av = op.effective.transpose() * (op.effective * v);
    if (use_reg) {
      if (cfg.regularizer == RidgeRegularizer::identity)
        av += cfg.lambda * v;
      else
        av += cfg.lambda * (reg.transpose() * (reg * v));
    }
    return av;
  };

  const auto objective = [&](const Eigen::VectorXd& v) {
    double obj = 0.5 * (op.effective * v - y).squaredNorm();
    if (use_reg) {
      if (cfg.regularizer == RidgeRegularizer::identity)
        obj += 0.5 * cfg.lambda * v.squaredNorm();
      else
        obj += 0.5 * cfg.lambda * (reg * v).squaredNorm();
    }
    return obj;
  };

  const double tol = cfg.resolved_tol();
  const Eigen::VectorXd b = op.effective.transpose() * y;
  const double b_norm = b.norm();

  ReconResult result;
  result.x_hat = Scene{op.height, op.width, Eigen::VectorXd::Zero(n)};
  if (b_norm == 0.0) {
    result.converged = true;
    result.final_objective = objective(result.x_hat.values);
    return result;
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = b;
  Eigen::VectorXd p = r;
  double rs = r.squaredNorm();

  for (long it = 0; it < cfg.max_iters; ++it) {
    const Eigen::VectorXd ap = apply_normal(p);
    const double p_ap = p.dot(ap);
    if (!(p_ap > 0.0)) break;  // lost positive definiteness numerically
    const double alpha = rs / p_ap;
    x += alpha * p;
    r -= alpha * ap;
    const double rs_next = r.squaredNorm();
    result.iterations = it + 1;
    result.objective_trace.push_back(objective(x));
    result.residual_trace.push_back(std::sqrt(rs_next) / b_norm);
    if (std::sqrt(rs_next) <= tol * b_norm) {
      result.converged = true;
      rs = rs_next;
      break;
    }
    p = r + (rs_next / rs) * p;
    rs = rs_next;
  }

  result.x_hat.values = std::move(x);
  result.final_objective = result.objective_trace.empty()
                               ? objective(result.x_hat.values)
                               : result.objective_trace.back();
  return result;
}

double lipschitz_estimate(const SensingOperator& op) {
  const long n = op.pixels();
  Xoshiro256pp gen(0x5eed5eedULL);
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v[i] = gen.gaussian();
  v.normalize();
  double eigenvalue = 0.0;
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXd av = op.effective.transpose() * (op.effective * v);
    const double next = v.dot(av);
    const double norm = av.norm();
    if (norm == 0.0) return 0.0;
    v = av / norm;
    if (it > 0 && std::abs(next - eigenvalue) <= 1e-6 * std::abs(next)) {
      eigenvalue = next;
      break;
    }
    eigenvalue = next;
  }
  return eigenvalue;
}

ReconResult reconstruct_tv(const SensingOperator& op, const Eigen::VectorXd& y,
                           const ReconConfig& cfg) {
  if (cfg.method != ReconMethod::tv)
    throw InvalidArgument("config method is not tv");
  if (y.size() != op.m) throw InvalidArgument("measurement length mismatch");
  if (cfg.lambda < 0.0) throw InvalidArgument("lambda must be >= 0");
  if (cfg.max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  const long n = op.pixels();
  const double tol = cfg.resolved_tol();

  const GradientOperator grad = build_gradient_operator(op.height, op.width);
  const Eigen::SparseMatrix<double>& diff = grad.representation;

  const double lipschitz = 1.01 * lipschitz_estimate(op);
  if (lipschitz <= 0.0) {
    // Zero operator: the objective reduces to lambda*||Dx||_1, minimized at 0.
    ReconResult result;
    result.x_hat = Scene{op.height, op.width, Eigen::VectorXd::Zero(n)};
    result.converged = true;
    result.final_objective = 0.5 * y.squaredNorm();
    result.objective_trace.push_back(result.final_objective);
    return result;
  }
  const double step = 1.0 / lipschitz;
  const double prox_weight = step * cfg.lambda;

  const double y_norm = std::max(y.norm(), 1.0);
  double data_residual = y.norm() / y_norm;
  const auto objective = [&](const Eigen::VectorXd& v) {
    const double fit = (op.effective * v - y).norm();
    data_residual = fit / y_norm;
    return 0.5 * fit * fit + cfg.lambda * (diff * v).lpNorm<1>();
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  // Dual variable of the prox subproblem, kept across outer iterations so
  // repeated prox calls keep refining the same dual point.
  Eigen::VectorXd dual = Eigen::VectorXd::Zero(2 * n);
  // ||D^T D|| <= 8 for the 2-D forward-difference stencil.
  const double dual_step = 1.0 / 8.0;

  double objective_prev = objective(x);
  double residual_prev = data_residual;
  ReconResult result;
  result.objective_trace.push_back(objective_prev);
  result.residual_trace.push_back(residual_prev);

  for (long it = 0; it < cfg.max_iters; ++it) {
    const Eigen::VectorXd descent =
        x - step * (op.effective.transpose() * (op.effective * x - y));
    Eigen::VectorXd candidate;
    if (cfg.lambda > 0.0) {
      // prox_{w||D.||_1}(v): ascend the dual of
      //   min_x 0.5||x - v||^2 + w||Dx||_1,  p in [-w, w]^{2N},
      // 20 fixed iterations, then x = v - D^T p.
      for (int inner = 0; inner < 20; ++inner) {
        dual += dual_step * (diff * (descent - diff.transpose() * dual));
        dual = dual.cwiseMax(-prox_weight).cwiseMin(prox_weight);
      }
      candidate = descent - diff.transpose() * dual;
    } else {
      candidate = descent;
    }

    const double objective_next = objective(candidate);
    const double residual_next = data_residual;
    result.iterations = it + 1;
    if (objective_next <= objective_prev) {
      x = std::move(candidate);
      result.objective_trace.push_back(objective_next);
      result.residual_trace.push_back(residual_next);
      residual_prev = residual_next;
    } else {
      // Inexact prox produced an ascent step; keep the current iterate. The
      // relative-change test below then terminates.
      result.objective_trace.push_back(objective_prev);
      result.residual_trace.push_back(residual_prev);
    }
    const double accepted = result.objective_trace.back();
    const double change = std::abs(objective_prev - accepted);
    if (change <= tol * std::max(std::abs(objective_prev), 1.0)) {
      result.converged = true;
      objective_prev = accepted;
      break;
    }
    objective_prev = accepted;
  }

  result.x_hat = Scene{op.height, op.width, std::move(x)};
  result.final_objective = objective_prev;
  return result;
}

}  // namespace spx
