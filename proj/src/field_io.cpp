#include "fracocp/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "fracocp/errors.hpp"

namespace fracocp {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_field_csv(std::ostream& os, const Field& f) {
  const Grid& g = f.grid();
  os << (g.dim() == 1 ? "x1,value\n" : "x1,x2,value\n");
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.node(i);
    os << format_double(x[0]) << ',';
    if (g.dim() == 2) os << format_double(x[1]) << ',';
    os << format_double(f[i]) << '\n';
  }
}

void write_field_csv(const std::filesystem::path& path, const Field& f) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_field_csv(os, f);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_number(const std::string& s, std::size_t row) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    while (used < s.size() && (s[used] == ' ' || s[used] == '\r')) ++used;
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("field csv: row " + std::to_string(row) + ": not a number: '" + s + "'");
  }
}

}  // namespace

Field read_field_csv(std::istream& is, GridPtr grid) {
  const int dim = grid->dim();
  std::string line;
  if (!std::getline(is, line)) throw Error("field csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string expected = dim == 1 ? "x1,value" : "x1,x2,value";
  if (line != expected) {
    throw GridMismatch("field csv: header '" + line + "' does not match a " + std::to_string(dim) +
                       "D grid (expected '" + expected + "')");
  }
  Eigen::VectorXd values(grid->size());
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() != static_cast<std::size_t>(dim + 1)) {
      throw Error("field csv: row " + std::to_string(row + 1) + " has " + std::to_string(cells.size()) +
                  " columns, expected " + std::to_string(dim + 1));
    }
    if (row >= grid->size()) throw GridMismatch("field csv: more rows than grid nodes");
    const auto x = grid->node(row);
    for (int a = 0; a < dim; ++a) {
      const double c = parse_number(cells[static_cast<std::size_t>(a)], row + 1);
      if (std::abs(c - x[static_cast<std::size_t>(a)]) > 1e-9 * grid->extent(a).length()) {
        throw GridMismatch("field csv: row " + std::to_string(row + 1) + " coordinate does not match grid node");
      }
    }
    values[static_cast<Eigen::Index>(row)] = parse_number(cells.back(), row + 1);
    ++row;
  }
  if (row != grid->size()) {
    throw GridMismatch("field csv: " + std::to_string(row) + " rows for a grid of " + std::to_string(grid->size()) +
                       " nodes");
  }
  return Field(std::move(grid), std::move(values));
}

Field read_field_csv(const std::filesystem::path& path, GridPtr grid) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  return read_field_csv(is, std::move(grid));
}

void write_eigenvalues_csv(std::ostream& os, const Eigen::VectorXd& lambda) {
  os << "index,lambda\n";
  for (Eigen::Index i = 0; i < lambda.size(); ++i) os << (i + 1) << ',' << format_double(lambda[i]) << '\n';
}

}  // namespace fracocp
