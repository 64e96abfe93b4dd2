#include "pseudoherm/inner.hpp"

#include <cmath>
#include <string>

#include "pseudoherm/error.hpp"

namespace pseudoherm {

WaveFunction::WaveFunction(Grid g, ComplexVector v)
    : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.N)
    throw DimensionMismatch("wave function has " + std::to_string(values.size()) +
                            " samples on a grid of " + std::to_string(grid.N));
}

std::vector<double> unit_weight(const Grid& g) {
  return std::vector<double>(g.size(), 1.0);
}

ComplexVector pt_reflect(const ComplexVector& u) {
  return u.reverse().conjugate();
}

namespace {

void check(const Grid& g, const WaveFunction& u) {
  if (!g.same_as(u.grid) || u.values.size() != g.N)
    throw DimensionMismatch("wave function lives on a different grid");
}

}  // namespace

cplx weighted_inner(const Grid& g, const std::vector<double>& w,
                    const WaveFunction& u1, const WaveFunction& u2) {
  check(g, u1);
  check(g, u2);
  if (static_cast<int>(w.size()) != g.N)
    throw DimensionMismatch("weight samples do not match grid");
  cplx sum{};
  for (int j = 0; j < g.N; ++j)
    sum += w[j] * std::conj(u2.values[g.mirror(j)]) * u1.values[j];
  return g.h * sum;
}

WaveFunction normalize_pseudo(const Grid& g, const std::vector<double>& w,
                              const WaveFunction& u) {
  const cplx raw = weighted_inner(g, w, u, u);
  if (std::abs(raw) < 1e-12)
    throw ZeroPseudoNorm("state is self-orthogonal: |pseudo-norm| = " +
                         std::to_string(std::abs(raw)));
  return WaveFunction(u.grid, u.values / std::sqrt(std::abs(raw)));
}

double GramResult::max_off_diagonal() const {
  double m = 0.0;
  for (Eigen::Index i = 0; i < G.rows(); ++i)
    for (Eigen::Index j = 0; j < G.cols(); ++j)
      if (i != j) m = std::max(m, std::abs(G(i, j)));
  return m;
}

GramResult gram(const Grid& g, const std::vector<double>& w,
                const std::vector<WaveFunction>& vectors) {
  GramResult out;
  const auto n = static_cast<Eigen::Index>(vectors.size());
  for (const auto& v : vectors) out.normalized.push_back(normalize_pseudo(g, w, v));
  out.G.resize(n, n);
  for (Eigen::Index m = 0; m < n; ++m)
    for (Eigen::Index k = 0; k < n; ++k)
      out.G(m, k) = weighted_inner(g, w, out.normalized[k], out.normalized[m]);
  for (Eigen::Index k = 0; k < n; ++k) {
    cplx d = out.G(k, k);
    if (std::abs(d.imag()) <= 1e-8 * std::abs(d)) {
      d = d.real() >= 0.0 ? 1.0 : -1.0;
      out.G(k, k) = d;
    }
    out.pseudo_norms.push_back(d);
  }
  return out;
}

cplx operator_inner(const Grid& g, const ComplexMatrix& eta,
                    const WaveFunction& u1, const WaveFunction& u2) {
  check(g, u1);
  check(g, u2);
  if (eta.rows() != g.N || eta.cols() != g.N)
    throw DimensionMismatch("eta does not match grid");
  const ComplexVector eu = eta * u1.values;
  return g.h * (pt_reflect(u2.values).transpose() * eu)(0);
}

}  // namespace pseudoherm
