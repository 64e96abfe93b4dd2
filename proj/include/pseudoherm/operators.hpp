#pragma once

// Discretized Hamiltonians H = p^2 + V and H_beta = [p + i beta nu]^2 + V,
// the metric operators eta that intertwine them with their adjoints, and
// the residual checks for the intertwining relation eta H = H^dagger eta.

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "pseudoherm/expr.hpp"
#include "pseudoherm/grid.hpp"
#include "pseudoherm/linalg.hpp"

namespace pseudoherm {

// ---------------------------------------------------------------------------
// Potentials

/// -V1 sech^2 x - i V2 sech x tanh x with
/// V1 = [B^2 (2A+1)^2 + 3] / 4 and V2 = -B (2A+1).
struct ScarfII {
  double A = 0.0;
  double B = 1.0;
};

/// -d^2 sech^2 x + k + i d sech x tanh x, generated by g = d sech x.
struct FirstOrderFamily {
  double d = 1.0;
  double k = 0.0;
};

/// The B = 1 member: -(A^2+A+1) sech^2 x + i (2A+1) sech x tanh x.
struct SpecialB1 {
  double A = 0.0;
};

/// Scarf II in raw coefficients: -V1 sech^2 x - i V2 sech x tanh x.
struct ScarfV {
  double V1 = 1.0;
  double V2 = 0.0;
};

struct CustomPotential {
  Expr V;
};

using PotentialSpec =
    std::variant<ScarfII, FirstOrderFamily, SpecialB1, ScarfV, CustomPotential>;

struct ScarfCoefficients {
  double V1;
  double V2;
};

/// (V1, V2) of the A, B parameterization. Throws ConstraintViolation unless
/// A + 1/2 > 0, B > 0 and A - B + 1/2 is not an integer.
ScarfCoefficients scarf2_coefficients(double A, double B);

/// Checks the parameter constraints of a spec.
void validate(const PotentialSpec& spec);

/// Closed form of the potential.
Expr potential_expr(const PotentialSpec& spec);

std::vector<cplx> sample_potential(const Grid& g, const PotentialSpec& spec);

/// True when V(-x) = V(x)* on the grid.
bool is_pt_symmetric(const Grid& g, const PotentialSpec& spec,
                     double tol = 1e-12);

// ---------------------------------------------------------------------------
// Hamiltonians

/// Gauge field of H_beta. nu must be real and odd.
struct GaugeSpec {
  double beta = 0.0;
  Expr nu;
};

enum class GaugeScheme {
  /// H_beta = S H S^{-1}, S = diag(exp(beta * int_0^x nu)). Keeps the
  /// discrete relation eta H_beta = H_beta^T eta exact.
  Similarity,
  /// -D2 + 2 beta diag(nu) D1 + diag(beta nu' - beta^2 nu^2 + V).
  Expanded,
};

struct HamiltonianOptions {
  int accuracy = 2;
  GaugeScheme scheme = GaugeScheme::Similarity;
};

/// Throws OddFunctionViolation when nu is not odd (or not real) on the grid
/// and on a fixed set of off-grid samples.
void validate(const Grid& g, const GaugeSpec& gauge);

/// int_0^{x_j} nu(y) dy by cumulative trapezoid sums.
std::vector<double> gauge_exponent(const Grid& g, const Expr& nu);

ComplexMatrix build_hamiltonian(const Grid& g, const PotentialSpec& V,
                                const std::optional<GaugeSpec>& gauge = {},
                                const HamiltonianOptions& opts = {});

// ---------------------------------------------------------------------------
// Metric operators

struct EtaIdentity {};
struct EtaParity {};
/// exp(-2 beta int_0^x nu).
struct EtaMultiplicative {
  double beta = 0.0;
  Expr nu;
};
/// d/dx + i g(x).
struct EtaFirstOrder {
  Expr g;
};
/// d^2/dx^2 - 2i a d/dx + b with b = -V + i a' - 2a^2 - delta.
struct EtaSecondOrder {
  Expr a;
  double gamma = 0.0;
  double delta = 0.25;
  PotentialSpec V;
};

using EtaSpec = std::variant<EtaIdentity, EtaParity, EtaMultiplicative,
                             EtaFirstOrder, EtaSecondOrder>;

/// Samples of exp(-2 beta int_0^x nu).
std::vector<double> eta_weight(const Grid& g, double beta, const Expr& nu);

ComplexMatrix parity_matrix(int N);

ComplexMatrix build_eta(const Grid& g, const EtaSpec& spec, int accuracy = 2);

// ---------------------------------------------------------------------------
// Identity checks

/// Gaussian bumps exp(-(x-c)^2 / 2 sigma^2), sigma = L/10, centers
/// {-L/2, -L/4, 0, L/4, L/2}.
std::vector<ComplexVector> default_probes(const Grid& g);

struct ResidualReport {
  /// max over probes of ||r|| / (||eta H||_F ||w|| / sqrt(N)).
  double residual = 0.0;
  std::vector<double> per_probe;
  /// max over probes of the RMS of r; tracks the truncation error directly.
  double rms_defect = 0.0;
};

/// Probe residual of eta H - H^dagger eta. Rows within `margin` of either
/// boundary are excluded from r.
ResidualReport intertwining_residual(const ComplexMatrix& eta,
                                     const ComplexMatrix& H,
                                     const std::vector<ComplexVector>& probes,
                                     int margin = 4);

/// (eta + eta^dagger, eta - eta^dagger).
std::pair<ComplexMatrix, ComplexMatrix> eta_plus_minus(const ComplexMatrix& eta);

/// (V, partner) for the imaginary superpotential W = i g:
/// V = -g^2 + k - i g', partner = V* = -g^2 + k + i g'.
std::pair<PotentialSpec, PotentialSpec> susy_pair(const Expr& g, double k);

struct FactorizationReport {
  /// Probe residual of eta + O~^dagger O~, normalized like the intertwining
  /// residual with ||eta||_F in place of ||eta H||_F.
  double operator_residual = 0.0;
  double rms_defect = 0.0;
  /// max_j |r^2 - r' - (a''/2a - (a'/2a)^2 + gamma/4a^2)|.
  double riccati_defect = 0.0;
};

/// Checks eta = -O~^dagger O~ with O~ = d/dx + r - i a.
FactorizationReport verify_factorization(const Grid& g, const Expr& a,
                                         double gamma, const Expr& r,
                                         const ComplexMatrix& eta,
                                         int accuracy = 2);

/// ||B - B^dagger||_F / ||B||_F for the block B of m that excludes `margin`
/// rows and columns at each end.
double hermiticity_defect(const ComplexMatrix& m, int margin = 0);
/// Same for m + m^dagger.
double anti_hermiticity_defect(const ComplexMatrix& m, int margin = 0);

}  // namespace pseudoherm
