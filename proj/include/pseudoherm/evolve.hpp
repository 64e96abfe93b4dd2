#pragma once

// Time evolution i d(psi)/dt = H psi and the generalized continuity equation
//   d/dt P + d/dx J = 0,
//   P = eta psi2*(-x,t) psi1(x,t),
//   J = (eta/i) [psi2*(-x,t) d(psi1)/dx - psi1 d(psi2*(-x,t))/dx].

#include <optional>
#include <vector>

#include "pseudoherm/inner.hpp"
#include "pseudoherm/linalg.hpp"
#include "pseudoherm/linsolve.hpp"

namespace pseudoherm {

/// Crank-Nicolson propagator (I + i dt/2 H)^{-1} (I - i dt/2 H) for a fixed
/// step. A negative dt propagates the time-reversed equation -i d/dt = H.
class CrankNicolson {
public:
  CrankNicolson(const ComplexMatrix& H, double dt);

  ComplexVector step(const ComplexVector& psi) const;
  double dt() const { return dt_; }

private:
  double dt_;
  BandedOperator H_;
  LuSolver implicit_;
};

/// One Crank-Nicolson step. Throws SingularSystem if I + i dt/2 H is
/// singular.
WaveFunction step_cn(const ComplexMatrix& H, const WaveFunction& psi, double dt);

struct ContinuityFields {
  ComplexVector P;
  ComplexVector J;
  /// dP/dt + dJ/dx; zero within the excluded margin.
  ComplexVector defect;
  /// max |defect| over points at least 3 from either boundary.
  double max_defect = 0.0;
};

/// Fields at one instant, with the time derivatives supplied (e.g. -i H psi).
ContinuityFields continuity_fields(const Grid& g, const std::vector<double>& w,
                                   const WaveFunction& psi1,
                                   const WaveFunction& psi2,
                                   const ComplexVector& dpsi1_dt,
                                   const ComplexVector& dpsi2_dt);

struct EvolutionTrace {
  std::vector<double> times;
  /// Q(t) = int eta psi2*(-x,t) psi1(x,t) dx.
  std::vector<cplx> Q;
  /// Entry 0 uses the instantaneous derivatives -i H psi; entry k >= 1 the
  /// time-centered form on [t_{k-1}, t_k].
  std::vector<double> continuity_residual;
  WaveFunction final_psi1;
  WaveFunction final_psi2;

  /// max_k |Q(t_k) - Q(0)| / |Q(0)|.
  double max_drift() const;
  double max_residual() const;
};

/// Evolves psi1 forward under H and psi2 through phi = psi2*(-x,t), which
/// obeys -i d(phi)/dt = H phi when H is PT-symmetric.
/// Throws NonFiniteState carrying the last finite step index.
EvolutionTrace run(const ComplexMatrix& H, const Grid& g,
                   const std::vector<double>& eta_weight,
                   const WaveFunction& psi1_0, const WaveFunction& psi2_0,
                   double T, double dt);

/// Centered first difference with zero Dirichlet data.
ComplexVector centered_difference(const ComplexVector& u, double h);

}  // namespace pseudoherm
