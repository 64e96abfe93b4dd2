#include "pseudoherm/grid.hpp"

#include <cmath>
#include <string>

#include "pseudoherm/error.hpp"

namespace pseudoherm {

Grid make_grid(double L, int N) {
  if (!(L > 0.0) || !std::isfinite(L))
    throw InvalidParameter("grid half-width L must be positive, got " +
                           std::to_string(L));
  if (N < 3)
    throw InvalidParameter("grid needs at least 3 interior points, got " +
                           std::to_string(N));
  Grid g;
  g.L = L;
  g.N = N;
  g.h = 2.0 * L / (N + 1);
  g.points.resize(g.size());
  // Fill symmetrically so x_j == -x_{N-1-j} holds bit for bit.
  for (int j = 0; j < N; ++j) {
    const int k = N - 1 - j;
    if (k < j) break;
    const double x = -L + (j + 1) * g.h;
    g.points[j] = x;
    g.points[k] = -x;
  }
  if (N % 2 == 1) g.points[(N - 1) / 2] = 0.0;
  return g;
}

std::vector<double> fd_weights(double z, const std::vector<double>& x,
                               int order) {
  const int n = static_cast<int>(x.size()) - 1;
  const int m = order;
  // c[i][k]: weight of node i for derivative k
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = c[i][m];
  return w;
}

ComplexMatrix diff_matrix(const Grid& g, int order, int accuracy) {
  if (order != 1 && order != 2)
    throw InvalidParameter("derivative order must be 1 or 2");
  if (accuracy != 2 && accuracy != 4)
    throw InvalidParameter("stencil accuracy must be 2 or 4");

  const int N = g.N;
  const int half = accuracy / 2;
  // Nodes are indexed -1..N; -1 and N are the Dirichlet boundary nodes.
  const int shifted_points = order + accuracy;
  ComplexMatrix D = ComplexMatrix::Zero(N, N);

  for (int row = 0; row < N; ++row) {
    int first = row - half;
    int count = 2 * half + 1;
    if (first < -1) {
      first = -1;
      count = shifted_points;
    } else if (row + half > N) {
      count = shifted_points;
      first = N - count + 1;
    }
    // Integer offsets keep the stencil weights exactly symmetric.
    std::vector<double> offsets(count);
    for (int k = 0; k < count; ++k) offsets[k] = first + k - row;
    const std::vector<double> w = fd_weights(0.0, offsets, order);
    const double scale = order == 1 ? 1.0 / g.h : 1.0 / (g.h * g.h);
    for (int k = 0; k < count; ++k) {
      const int col = first + k;
      if (col < 0 || col >= N) continue;  // boundary value is zero
      D(row, col) = w[k] * scale;
    }
  }
  return D;
}

std::vector<double> antiderivative_from_zero(const Grid& g,
                                             const std::vector<double>& f,
                                             double f0) {
  const int N = g.N;
  if (static_cast<int>(f.size()) != N)
    throw DimensionMismatch("antiderivative samples do not match grid");
  std::vector<double> F(f.size(), 0.0);
  const double h = g.h;
  int left, right;
  if (N % 2 == 1) {
    left = right = (N - 1) / 2;
    F[left] = 0.0;
  } else {
    left = N / 2 - 1;
    right = N / 2;
    F[right] = 0.25 * h * (f0 + f[right]);
    F[left] = -0.25 * h * (f0 + f[left]);
  }
  for (int j = right; j + 1 < N; ++j) F[j + 1] = F[j] + 0.5 * h * (f[j] + f[j + 1]);
  for (int j = left; j - 1 >= 0; --j) F[j - 1] = F[j] - 0.5 * h * (f[j] + f[j - 1]);
  return F;
}

}  // namespace pseudoherm
