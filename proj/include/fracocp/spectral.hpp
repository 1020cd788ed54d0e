#pragma once

#include <memory>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "fracocp/grid.hpp"

namespace fracocp {

/// Dense 3-point (1D) / 5-point (2D, Kronecker sum) Dirichlet Laplacian on the interior nodes.
Eigen::MatrixXd assemble_laplacian(const Grid& grid);

/**
 * Eigenpairs of the discrete Dirichlet Laplacian, ascending, with eigenvectors
 * orthonormal in the weighted inner product (Phi^T W Phi = I). Each column has
 * its first non-negligible entry positive.
 */
class EigenBasis {
 public:
  EigenBasis(GridPtr grid, Eigen::VectorXd lambda, Eigen::MatrixXd phi);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Eigen::VectorXd& lambda() const { return lambda_; }
  const Eigen::MatrixXd& phi() const { return phi_; }
  Eigen::Index size() const { return lambda_.size(); }

  /// Mode n as a field (0-based).
  Field mode(Eigen::Index n) const;
  /// Generalized Fourier coefficients <f, phi_n> = Phi^T W f.
  Eigen::VectorXd coefficients(const Field& f) const;
  /// sum_n c_n phi_n
  Field synthesize(const Eigen::VectorXd& c) const;

 private:
  GridPtr grid_;
  Eigen::VectorXd lambda_;
  Eigen::MatrixXd phi_;
};

/// Full dense symmetric eigendecomposition of `laplacian` (assembled on `grid`).
/// Throws SolverError if the eigen-solver does not converge.
EigenBasis eigendecompose(GridPtr grid, const Eigen::MatrixXd& laplacian);

/// Eigenbasis of the grid's Laplacian. 1D: dense decomposition of the stencil
/// matrix. 2D: tensor products of the per-axis 1D bases (exact for the Kronecker
/// sum), sorted by eigenvalue with ties broken by (k1, k2).
EigenBasis build_eigenbasis(GridPtr grid);

class ShiftedSystem;

/// Spectral fractional power (-Delta_D)^s realized on an EigenBasis, s in (0, 1].
class FractionalOperator {
 public:
  FractionalOperator(std::shared_ptr<const EigenBasis> basis, double s);

  double s() const { return s_; }
  const EigenBasis& basis() const { return *basis_; }
  const std::shared_ptr<const EigenBasis>& basis_ptr() const { return basis_; }
  const Grid& grid() const { return basis_->grid(); }
  const GridPtr& grid_ptr() const { return basis_->grid_ptr(); }
  /// lambda_n^s
  const Eigen::VectorXd& lambda_s() const { return lambda_s_; }

  /// sum_n lambda_n^t <f, phi_n> phi_n, t in [-1, 1].
  Field apply_power(const Field& f, double t) const;
  Field apply(const Field& f) const;

  /// Solves (-Delta_D)^s phi + b phi = f for b >= 0 nodewise.
  Field solve_shifted(const Field& b, const Field& f) const;
  Field solve_shifted(double c, const Field& f) const;

  /// Factorization of (-Delta_D)^s + diag(b) reusable across right-hand sides.
  ShiftedSystem factorize_shifted(const Field& b) const;

 private:
  std::shared_ptr<const EigenBasis> basis_;
  double s_;
  Eigen::VectorXd lambda_s_;
};

std::shared_ptr<const FractionalOperator> make_fractional_operator(GridPtr grid, double s);

/**
 * (-Delta_D)^s + diag(b) in spectral coordinates. Constant b is diagonal there
 * (lambda_n^s + c); otherwise Lambda^s + Phi^T W diag(b) Phi is Cholesky-factored.
 */
class ShiftedSystem {
 public:
  Field solve(const Field& f) const;
  const Field& shift() const { return b_; }

 private:
  friend class FractionalOperator;
  ShiftedSystem(std::shared_ptr<const EigenBasis> basis, Eigen::VectorXd lambda_s, Field b);

  std::shared_ptr<const EigenBasis> basis_;
  Eigen::VectorXd lambda_s_;
  Field b_;
  std::optional<double> constant_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

}  // namespace fracocp
