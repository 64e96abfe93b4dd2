#pragma once

// PT and eta inner products
//   <u2, u1>_w = int w(x) u2*(-x) u1(x) dx
// by trapezoid quadrature on the symmetric grid (the Dirichlet endpoints
// contribute nothing).

#include <vector>

#include "pseudoherm/grid.hpp"
#include "pseudoherm/linalg.hpp"

namespace pseudoherm {

struct WaveFunction {
  Grid grid;
  ComplexVector values;

  WaveFunction() = default;
  WaveFunction(Grid g, ComplexVector v);
};

/// Weight of the PT inner product.
std::vector<double> unit_weight(const Grid& g);

cplx weighted_inner(const Grid& g, const std::vector<double>& w,
                    const WaveFunction& u1, const WaveFunction& u2);

struct GramResult {
  /// G(m, n) = weighted_inner(v_n, v_m) after normalization.
  ComplexMatrix G;
  /// Inputs rescaled so |G(n, n)| = 1.
  std::vector<WaveFunction> normalized;
  /// G(n, n): +1 or -1 when the raw pseudo-norm is real to 1e-8, else the
  /// unit-modulus phase.
  std::vector<cplx> pseudo_norms;

  /// max |G(m, n)| over m != n.
  double max_off_diagonal() const;
};

/// Throws ZeroPseudoNorm when a raw |G(n, n)| falls below 1e-12.
GramResult gram(const Grid& g, const std::vector<double>& w,
                const std::vector<WaveFunction>& vectors);

/// Rescales u so that |<u, u>_w| = 1.
WaveFunction normalize_pseudo(const Grid& g, const std::vector<double>& w,
                              const WaveFunction& u);

/// Experimental operator form: int u2*(-x) (eta u1)(x) dx for a matrix eta.
cplx operator_inner(const Grid& g, const ComplexMatrix& eta,
                    const WaveFunction& u1, const WaveFunction& u2);

/// (P conj(u))_j = conj(u_{N-1-j}), the samples of u*(-x).
ComplexVector pt_reflect(const ComplexVector& u);

}  // namespace pseudoherm
