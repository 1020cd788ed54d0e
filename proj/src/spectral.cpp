#include "fracocp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fracocp/errors.hpp"

namespace fracocp {

namespace {

Eigen::MatrixXd laplacian_1d(int n, double h) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  const double d = 2.0 / (h * h);
  const double o = -1.0 / (h * h);
  for (int i = 0; i < n; ++i) {
    a(i, i) = d;
    if (i > 0) a(i, i - 1) = a(i - 1, i) = o;
  }
  return a;
}

void fix_signs(Eigen::MatrixXd& phi) {
  for (Eigen::Index j = 0; j < phi.cols(); ++j) {
    auto col = phi.col(j);
    const double cutoff = 1e-8 * col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col[i]) > cutoff) {
        if (col[i] < 0) col *= -1.0;
        break;
      }
    }
  }
}

}  // namespace

Eigen::MatrixXd assemble_laplacian(const Grid& grid) {
  const Eigen::MatrixXd a1 = laplacian_1d(grid.n(0), grid.h(0));
  if (grid.dim() == 1) return a1;
  const int n1 = grid.n(0);
  const int n2 = grid.n(1);
  const Eigen::MatrixXd a2 = laplacian_1d(n2, grid.h(1));
  // A = I2 (x) A1 + A2 (x) I1 with x1 varying fastest.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n1 * n2, n1 * n2);
  for (int j = 0; j < n2; ++j) {
    a.block(j * n1, j * n1, n1, n1) += a1;
    for (int k = 0; k < n2; ++k) {
      if (a2(j, k) != 0.0) a.block(j * n1, k * n1, n1, n1).diagonal().array() += a2(j, k);
    }
  }
  return a;
}

EigenBasis::EigenBasis(GridPtr grid, Eigen::VectorXd lambda, Eigen::MatrixXd phi)
    : grid_(std::move(grid)), lambda_(std::move(lambda)), phi_(std::move(phi)) {
  const auto m = static_cast<Eigen::Index>(grid_->size());
  if (lambda_.size() != m || phi_.rows() != m || phi_.cols() != m) {
    throw std::invalid_argument("eigenbasis: shape does not match the grid");
  }
  if (!(lambda_[0] > 0.0)) throw std::invalid_argument("eigenbasis: lambda_1 must be positive");
  for (Eigen::Index i = 1; i < m; ++i) {
    if (lambda_[i] < lambda_[i - 1]) throw std::invalid_argument("eigenbasis: eigenvalues must be nondecreasing");
  }
}

Field EigenBasis::mode(Eigen::Index n) const { return Field(grid_, phi_.col(n)); }

Eigen::VectorXd EigenBasis::coefficients(const Field& f) const {
  require_grid(f, *grid_);
  return grid_->weight() * (phi_.transpose() * f.values());
}

Field EigenBasis::synthesize(const Eigen::VectorXd& c) const { return Field(grid_, phi_ * c); }

EigenBasis eigendecompose(GridPtr grid, const Eigen::MatrixXd& laplacian) {
  const auto m = static_cast<Eigen::Index>(grid->size());
  if (laplacian.rows() != m || laplacian.cols() != m) {
    throw GridMismatch("eigendecompose: matrix is " + std::to_string(laplacian.rows()) + "x" +
                       std::to_string(laplacian.cols()) + " for a grid of " + std::to_string(m) + " nodes");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(laplacian);
  if (es.info() != Eigen::Success) throw SolverError("symmetric eigen-solver failed to converge");
  Eigen::MatrixXd phi = es.eigenvectors() / std::sqrt(grid->weight());
  fix_signs(phi);
  return EigenBasis(std::move(grid), es.eigenvalues(), std::move(phi));
}

EigenBasis build_eigenbasis(GridPtr grid) {
  if (grid->dim() == 1) return eigendecompose(grid, assemble_laplacian(*grid));

  const auto g1 = build_grid_1d(grid->extent(0), grid->n(0));
  const auto g2 = build_grid_1d(grid->extent(1), grid->n(1));
  const EigenBasis b1 = eigendecompose(g1, assemble_laplacian(*g1));
  const EigenBasis b2 = eigendecompose(g2, assemble_laplacian(*g2));
  const int n1 = grid->n(0);
  const int n2 = grid->n(1);

  std::vector<std::tuple<double, int, int>> order;
  order.reserve(static_cast<std::size_t>(n1 * n2));
  for (int k = 0; k < n1; ++k) {
    for (int l = 0; l < n2; ++l) order.emplace_back(b1.lambda()[k] + b2.lambda()[l], k, l);
  }
  std::sort(order.begin(), order.end());

  const Eigen::Index m = n1 * n2;
  Eigen::VectorXd lambda(m);
  Eigen::MatrixXd phi(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto [lam, k, l] = order[static_cast<std::size_t>(j)];
    lambda[j] = lam;
    for (int i2 = 0; i2 < n2; ++i2) {
      phi.col(j).segment(i2 * n1, n1) = b1.phi().col(k) * b2.phi()(i2, l);
    }
  }
  return EigenBasis(std::move(grid), std::move(lambda), std::move(phi));
}

FractionalOperator::FractionalOperator(std::shared_ptr<const EigenBasis> basis, double s)
    : basis_(std::move(basis)), s_(s) {
  if (!basis_) throw std::invalid_argument("fractional operator: null basis");
  if (!(s > 0.0 && s <= 1.0)) {
    throw std::invalid_argument("fractional order s must lie in (0, 1], got " + std::to_string(s));
  }
  lambda_s_ = basis_->lambda().array().pow(s_);
}

Field FractionalOperator::apply_power(const Field& f, double t) const {
  if (!(t >= -1.0 && t <= 1.0)) throw std::invalid_argument("apply_power: exponent must lie in [-1, 1]");
  Eigen::VectorXd c = basis_->coefficients(f);
  if (t == s_) {
    c.array() *= lambda_s_.array();
  } else if (t != 0.0) {
    c.array() *= basis_->lambda().array().pow(t);
  }
  return basis_->synthesize(c);
}

Field FractionalOperator::apply(const Field& f) const { return apply_power(f, s_); }

Field FractionalOperator::solve_shifted(const Field& b, const Field& f) const {
  return factorize_shifted(b).solve(f);
}

Field FractionalOperator::solve_shifted(double c, const Field& f) const {
  if (!(c >= 0.0)) throw AssumptionViolation("solve_shifted: shift must be nonnegative");
  Eigen::VectorXd coef = basis_->coefficients(f);
  coef.array() /= lambda_s_.array() + c;
  return basis_->synthesize(coef);
}

ShiftedSystem FractionalOperator::factorize_shifted(const Field& b) const {
  require_grid(b, grid());
  return ShiftedSystem(basis_, lambda_s_, b);
}

ShiftedSystem::ShiftedSystem(std::shared_ptr<const EigenBasis> basis, Eigen::VectorXd lambda_s, Field b)
    : basis_(std::move(basis)), lambda_s_(std::move(lambda_s)), b_(std::move(b)) {
  const auto& bv = b_.values();
  const double lo = bv.minCoeff();
  if (lo < 0.0) {
    Eigen::Index at = 0;
    bv.minCoeff(&at);
    throw AssumptionViolation("shifted solve: b must be nonnegative, b = " + std::to_string(lo) + " at node " +
                              std::to_string(at));
  }
  if (lo == bv.maxCoeff()) {
    constant_ = lo;
    return;
  }
  const auto& phi = basis_->phi();
  const double w = basis_->grid().weight();
  Eigen::MatrixXd s = phi.transpose() * ((w * bv).asDiagonal() * phi);
  s.diagonal() += lambda_s_;
  llt_.compute(s);
  if (llt_.info() != Eigen::Success) throw SolverError("shifted solve: Cholesky factorization failed");
}

Field ShiftedSystem::solve(const Field& f) const {
  Eigen::VectorXd c = basis_->coefficients(f);
  if (constant_) {
    c.array() /= lambda_s_.array() + *constant_;
  } else {
    c = llt_.solve(c);
  }
  return basis_->synthesize(c);
}

std::shared_ptr<const FractionalOperator> make_fractional_operator(GridPtr grid, double s) {
  auto basis = std::make_shared<const EigenBasis>(build_eigenbasis(std::move(grid)));
  return std::make_shared<const FractionalOperator>(std::move(basis), s);
}

}  // namespace fracocp
