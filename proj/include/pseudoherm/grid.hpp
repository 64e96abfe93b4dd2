#pragma once

#include <cstddef>
#include <vector>

#include "pseudoherm/linalg.hpp"

namespace pseudoherm {

/// Uniform interior mesh on [-L, L]. The endpoints carry the Dirichlet data
/// and are not part of the grid: x_j = -L + (j + 1) h, h = 2L / (N + 1).
struct Grid {
  double L = 0.0;
  int N = 0;
  double h = 0.0;
  std::vector<double> points;

  std::size_t size() const { return static_cast<std::size_t>(N); }
  /// Index of the mirror point -x_j.
  int mirror(int j) const { return N - 1 - j; }

  bool same_as(const Grid& other) const { return L == other.L && N == other.N; }
};

Grid make_grid(double L, int N);

/// Dense finite-difference matrix for d/dx (order 1) or d^2/dx^2 (order 2)
/// with homogeneous Dirichlet data. Interior rows use centered stencils of
/// the requested accuracy (2 or 4); rows whose centered stencil would reach
/// past the boundary node switch to a shifted stencil of the same accuracy
/// that still uses the boundary value.
ComplexMatrix diff_matrix(const Grid& g, int order, int accuracy = 2);

/// Finite-difference weights for the derivative of the given order at z on
/// arbitrary nodes (Fornberg's recursion).
std::vector<double> fd_weights(double z, const std::vector<double>& nodes,
                               int order);

/// Cumulative trapezoid approximation of int_0^{x_j} f(y) dy from real
/// samples of f; f0 is f(0), needed when 0 is not a grid point (even N).
std::vector<double> antiderivative_from_zero(const Grid& g,
                                             const std::vector<double>& f,
                                             double f0);

}  // namespace pseudoherm
