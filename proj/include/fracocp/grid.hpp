#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace fracocp {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/**
 * Uniform tensor grid of interior nodes on an interval or rectangle.
 *
 * Boundary nodes are excluded (homogeneous Dirichlet data is identically zero
 * and never stored). Node index i = i1 + n1 * i2, x1 varies fastest. Every
 * node carries the same quadrature weight prod_i h_i.
 */
class Grid {
 public:
  Grid(std::vector<Interval> extent, std::vector<int> n);

  int dim() const { return static_cast<int>(extent_.size()); }
  const Interval& extent(int axis) const { return extent_.at(axis); }
  int n(int axis) const { return n_.at(axis); }
  double h(int axis) const { return h_.at(axis); }

  std::size_t size() const { return size_; }
  double weight() const { return weight_; }
  /// Lebesgue measure of the box.
  double measure() const;

  double coord(std::size_t node, int axis) const;
  std::array<double, 2> node(std::size_t index) const;
  std::size_t index(int i1, int i2 = 0) const { return static_cast<std::size_t>(i1 + n_[0] * i2); }

  bool operator==(const Grid& other) const {
    return extent_ == other.extent_ && n_ == other.n_;
  }

 private:
  std::vector<Interval> extent_;
  std::vector<int> n_;
  std::vector<double> h_;
  std::size_t size_ = 0;
  double weight_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Validating factory: dim in {1,2}, n_i >= 2, lo < hi on every axis.
GridPtr build_grid(int dim, std::span<const Interval> extent, std::span<const int> n);
GridPtr build_grid_1d(Interval extent, int n);
GridPtr build_grid_2d(Interval x1, Interval x2, int n1, int n2);

/// Real-valued samples at the interior nodes of a grid. Immutable, all entries finite.
class Field {
 public:
  Field(GridPtr grid, Eigen::VectorXd values);

  static Field zeros(GridPtr grid);
  static Field constant(GridPtr grid, double value);

  template <class Fn>
  static Field from_function(GridPtr grid, Fn&& fn) {
    Eigen::VectorXd v(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) {
      v[static_cast<Eigen::Index>(i)] = fn(grid->node(i));
    }
    return Field(std::move(grid), std::move(v));
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

  /// Same grid, new values.
  Field with_values(Eigen::VectorXd values) const { return Field(grid_, std::move(values)); }

  template <class Fn>
  Field map(Fn&& fn) const {
    Eigen::VectorXd v(values_.size());
    for (Eigen::Index i = 0; i < values_.size(); ++i) v[i] = fn(values_[i]);
    return with_values(std::move(v));
  }

  Field operator-() const { return with_values(-values_); }
  friend Field operator+(const Field& a, const Field& b);
  friend Field operator-(const Field& a, const Field& b);
  friend Field operator*(double s, const Field& a) { return a.with_values(s * a.values_); }
  /// Nodewise product.
  friend Field hadamard(const Field& a, const Field& b);

 private:
  GridPtr grid_;
  Eigen::VectorXd values_;
};

bool same_grid(const Field& a, const Field& b);
/// Throws GridMismatch.
void require_same_grid(const Field& a, const Field& b);
void require_grid(const Field& f, const Grid& grid);

/// weight * sum f_i g_i
double inner(const Field& f, const Field& g);

enum class Norm { L1, L2, Linf };
double norm(const Field& f, Norm p);

/// Piecewise (bi)linear interpolation of `f` onto `target`, with zero boundary values.
/// Both grids must cover the same box.
Field interpolate(const Field& f, GridPtr target);

}  // namespace fracocp
