#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "fracocp/grid.hpp"

namespace fracocp {

/// CSV layout: header `x1[,x2],value`, then one row per node in grid order.
/// Values are written with 17 significant digits so reading back is exact.
void write_field_csv(std::ostream& os, const Field& f);
void write_field_csv(const std::filesystem::path& path, const Field& f);

/// Reads a field written by write_field_csv. Node count and coordinates must
/// match `grid` (coordinates to 1e-9 relative to the box size).
Field read_field_csv(std::istream& is, GridPtr grid);
Field read_field_csv(const std::filesystem::path& path, GridPtr grid);

/// Diagnostic dump `index,lambda` (1-based index).
void write_eigenvalues_csv(std::ostream& os, const Eigen::VectorXd& lambda);

/// Shortest round-trip formatting used by every CSV writer in the project.
std::string format_double(double x);

}  // namespace fracocp
