#include "fracocp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fracocp/errors.hpp"

namespace fracocp {

Grid::Grid(std::vector<Interval> extent, std::vector<int> n) : extent_(std::move(extent)), n_(std::move(n)) {
  if (extent_.size() != 1 && extent_.size() != 2) {
    throw std::invalid_argument("grid dimension must be 1 or 2, got " + std::to_string(extent_.size()));
  }
  if (n_.size() != extent_.size()) {
    throw std::invalid_argument("grid: extent and node counts disagree in dimension");
  }
  size_ = 1;
  weight_ = 1.0;
  for (std::size_t a = 0; a < extent_.size(); ++a) {
    const auto& e = extent_[a];
    if (!std::isfinite(e.lo) || !std::isfinite(e.hi) || !(e.lo < e.hi)) {
      throw std::invalid_argument("grid: extent on axis " + std::to_string(a + 1) + " must satisfy lo < hi");
    }
    if (n_[a] < 2) {
      throw std::invalid_argument("grid: need at least 2 interior nodes per axis, got " + std::to_string(n_[a]));
    }
    const double h = e.length() / (n_[a] + 1);
    h_.push_back(h);
    size_ *= static_cast<std::size_t>(n_[a]);
    weight_ *= h;
  }
}

double Grid::measure() const {
  double m = 1.0;
  for (const auto& e : extent_) m *= e.length();
  return m;
}

double Grid::coord(std::size_t node, int axis) const {
  const std::size_t n1 = static_cast<std::size_t>(n_[0]);
  const std::size_t k = axis == 0 ? node % n1 : node / n1;
  return extent_[axis].lo + static_cast<double>(k + 1) * h_[axis];
}

std::array<double, 2> Grid::node(std::size_t index) const {
  std::array<double, 2> x{coord(index, 0), 0.0};
  if (dim() == 2) x[1] = coord(index, 1);
  return x;
}

GridPtr build_grid(int dim, std::span<const Interval> extent, std::span<const int> n) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("grid dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (extent.size() != static_cast<std::size_t>(dim) || n.size() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("grid: extent/n must have one entry per axis");
  }
  return std::make_shared<const Grid>(std::vector<Interval>(extent.begin(), extent.end()),
                                      std::vector<int>(n.begin(), n.end()));
}

GridPtr build_grid_1d(Interval extent, int n) {
  return std::make_shared<const Grid>(std::vector<Interval>{extent}, std::vector<int>{n});
}

GridPtr build_grid_2d(Interval x1, Interval x2, int n1, int n2) {
  return std::make_shared<const Grid>(std::vector<Interval>{x1, x2}, std::vector<int>{n1, n2});
}

Field::Field(GridPtr grid, Eigen::VectorXd values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("field: null grid");
  if (static_cast<std::size_t>(values_.size()) != grid_->size()) {
    throw GridMismatch("field: " + std::to_string(values_.size()) + " values for a grid of " +
                       std::to_string(grid_->size()) + " nodes");
  }
  if (!values_.allFinite()) {
    Eigen::Index bad = 0;
    while (bad < values_.size() && std::isfinite(values_[bad])) ++bad;
    throw std::domain_error("field: non-finite value at node " + std::to_string(bad));
  }
}

Field Field::zeros(GridPtr grid) {
  const auto m = static_cast<Eigen::Index>(grid->size());
  return Field(std::move(grid), Eigen::VectorXd::Zero(m));
}

Field Field::constant(GridPtr grid, double value) {
  const auto m = static_cast<Eigen::Index>(grid->size());
  return Field(std::move(grid), Eigen::VectorXd::Constant(m, value));
}

Field operator+(const Field& a, const Field& b) {
  require_same_grid(a, b);
  return a.with_values(a.values_ + b.values_);
}

Field operator-(const Field& a, const Field& b) {
  require_same_grid(a, b);
  return a.with_values(a.values_ - b.values_);
}

Field hadamard(const Field& a, const Field& b) {
  require_same_grid(a, b);
  return a.with_values(a.values_.cwiseProduct(b.values_));
}

bool same_grid(const Field& a, const Field& b) {
  return a.grid_ptr() == b.grid_ptr() || a.grid() == b.grid();
}

void require_same_grid(const Field& a, const Field& b) {
  if (!same_grid(a, b)) throw GridMismatch("fields are defined on different grids");
}

void require_grid(const Field& f, const Grid& grid) {
  if (&f.grid() != &grid && !(f.grid() == grid)) throw GridMismatch("field is not defined on the expected grid");
}

double inner(const Field& f, const Field& g) {
  require_same_grid(f, g);
  return f.grid().weight() * f.values().dot(g.values());
}

double norm(const Field& f, Norm p) {
  switch (p) {
    case Norm::L1:
      return f.grid().weight() * f.values().cwiseAbs().sum();
    case Norm::L2:
      return std::sqrt(f.grid().weight() * f.values().squaredNorm());
    case Norm::Linf:
      return f.values().cwiseAbs().maxCoeff();
  }
  return 0.0;
}

namespace {

// Linear interpolation weights of coordinate x on an axis with n interior nodes
// plus zero-valued boundary nodes at lo and hi.
struct AxisStencil {
  int left;  // -1 means the left boundary
  double t;
};

AxisStencil locate(const Interval& e, int n, double x) {
  const double h = e.length() / (n + 1);
  double s = (x - e.lo) / h;  // 0 at lo, n+1 at hi
  s = std::clamp(s, 0.0, static_cast<double>(n + 1));
  int k = static_cast<int>(std::floor(s));
  if (k > n) k = n;
  return {k - 1, s - k};
}

}  // namespace

Field interpolate(const Field& f, GridPtr target) {
  const Grid& src = f.grid();
  if (src.dim() != target->dim()) throw GridMismatch("interpolate: dimension mismatch");
  for (int a = 0; a < src.dim(); ++a) {
    if (!(src.extent(a) == target->extent(a))) throw GridMismatch("interpolate: grids cover different boxes");
  }
  const auto& v = f.values();
  auto at = [&](int i1, int i2) -> double {
    if (i1 < 0 || i1 >= src.n(0)) return 0.0;
    if (src.dim() == 2 && (i2 < 0 || i2 >= src.n(1))) return 0.0;
    return v[static_cast<Eigen::Index>(src.index(i1, src.dim() == 2 ? i2 : 0))];
  };
  Eigen::VectorXd out(target->size());
  for (std::size_t i = 0; i < target->size(); ++i) {
    const auto x = target->node(i);
    const auto s1 = locate(src.extent(0), src.n(0), x[0]);
    if (src.dim() == 1) {
      out[static_cast<Eigen::Index>(i)] = (1.0 - s1.t) * at(s1.left, 0) + s1.t * at(s1.left + 1, 0);
    } else {
      const auto s2 = locate(src.extent(1), src.n(1), x[1]);
      out[static_cast<Eigen::Index>(i)] =
          (1.0 - s1.t) * (1.0 - s2.t) * at(s1.left, s2.left) + s1.t * (1.0 - s2.t) * at(s1.left + 1, s2.left) +
          (1.0 - s1.t) * s2.t * at(s1.left, s2.left + 1) + s1.t * s2.t * at(s1.left + 1, s2.left + 1);
    }
  }
  return Field(std::move(target), std::move(out));
}

}  // namespace fracocp
