#include "pseudoherm/evolve.hpp"

#include <cmath>
#include <string>

#include "pseudoherm/error.hpp"

namespace pseudoherm {

namespace {

constexpr int kDefectMargin = 3;
const cplx I{0.0, 1.0};

ComplexMatrix implicit_matrix(const ComplexMatrix& H, double dt) {
  if (H.rows() != H.cols())
    throw DimensionMismatch("Hamiltonian must be square");
  ComplexMatrix A = (I * (0.5 * dt)) * H;
  A.diagonal().array() += 1.0;
  return A;
}

double interior_max(const ComplexVector& v) {
  double m = 0.0;
  for (Eigen::Index j = kDefectMargin; j < v.size() - kDefectMargin; ++j)
    m = std::max(m, std::abs(v[j]));
  return m;
}

bool all_finite(const ComplexVector& v) {
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (!std::isfinite(v[j].real()) || !std::isfinite(v[j].imag())) return false;
  return true;
}

ComplexVector weighted(const std::vector<double>& w, const ComplexVector& v) {
  ComplexVector out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) out[j] = w[j] * v[j];
  return out;
}

// P = w phi psi1 and J = (w/i)(phi psi1' - psi1 phi') with phi = psi2*(-x).
void density_and_current(const std::vector<double>& w, const ComplexVector& phi,
                         const ComplexVector& psi1, double h, ComplexVector& P,
                         ComplexVector& J) {
  P = weighted(w, phi.cwiseProduct(psi1));
  const ComplexVector dpsi1 = centered_difference(psi1, h);
  const ComplexVector dphi = centered_difference(phi, h);
  J = weighted(w, phi.cwiseProduct(dpsi1) - psi1.cwiseProduct(dphi)) / I;
}

}  // namespace

ComplexVector centered_difference(const ComplexVector& u, double h) {
  const Eigen::Index n = u.size();
  ComplexVector d(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx left = j > 0 ? u[j - 1] : cplx{};
    const cplx right = j + 1 < n ? u[j + 1] : cplx{};
    d[j] = (right - left) / (2.0 * h);
  }
  return d;
}

CrankNicolson::CrankNicolson(const ComplexMatrix& H, double dt)
    : dt_(dt), H_(H), implicit_(implicit_matrix(H, dt)) {
  if (dt == 0.0 || !std::isfinite(dt))
    throw InvalidParameter("time step must be nonzero and finite");
}

ComplexVector CrankNicolson::step(const ComplexVector& psi) const {
  ComplexVector rhs = psi - (I * (0.5 * dt_)) * H_.apply(psi);
  // LAPACKE rejects non-finite input; hand the overflow back to the caller.
  if (!all_finite(rhs)) return rhs;
  return implicit_.solve(rhs);
}

WaveFunction step_cn(const ComplexMatrix& H, const WaveFunction& psi, double dt) {
  if (!(dt > 0.0)) throw InvalidParameter("time step must be positive");
  if (H.rows() != psi.values.size())
    throw DimensionMismatch("Hamiltonian does not match the wave function grid");
  return WaveFunction(psi.grid, CrankNicolson(H, dt).step(psi.values));
}

ContinuityFields continuity_fields(const Grid& g, const std::vector<double>& w,
                                   const WaveFunction& psi1,
                                   const WaveFunction& psi2,
                                   const ComplexVector& dpsi1_dt,
                                   const ComplexVector& dpsi2_dt) {
  if (!psi1.grid.same_as(g) || !psi2.grid.same_as(g) ||
      static_cast<int>(w.size()) != g.N || dpsi1_dt.size() != g.N ||
      dpsi2_dt.size() != g.N)
    throw DimensionMismatch("continuity fields need inputs on one grid");
  ContinuityFields f;
  const ComplexVector phi = pt_reflect(psi2.values);
  const ComplexVector dphi_dt = pt_reflect(dpsi2_dt);
  density_and_current(w, phi, psi1.values, g.h, f.P, f.J);
  const ComplexVector dP_dt =
      weighted(w, dphi_dt.cwiseProduct(psi1.values) + phi.cwiseProduct(dpsi1_dt));
  f.defect = dP_dt + centered_difference(f.J, g.h);
  for (int j = 0; j < g.N; ++j)
    if (j < kDefectMargin || j >= g.N - kDefectMargin) f.defect[j] = 0.0;
  f.max_defect = interior_max(f.defect);
  return f;
}

double EvolutionTrace::max_drift() const {
  if (Q.empty()) return 0.0;
  const double q0 = std::abs(Q.front());
  double m = 0.0;
  for (const cplx& q : Q) m = std::max(m, std::abs(q - Q.front()));
  return q0 > 0.0 ? m / q0 : m;
}

double EvolutionTrace::max_residual() const {
  double m = 0.0;
  for (double r : continuity_residual) m = std::max(m, r);
  return m;
}

EvolutionTrace run(const ComplexMatrix& H, const Grid& g,
                   const std::vector<double>& eta_weight,
                   const WaveFunction& psi1_0, const WaveFunction& psi2_0,
                   double T, double dt) {
  if (!(dt > 0.0) || !(T > 0.0))
    throw InvalidParameter("evolution needs T > 0 and dt > 0");
  if (H.rows() != g.N || H.cols() != g.N)
    throw DimensionMismatch("Hamiltonian does not match grid");
  if (static_cast<int>(eta_weight.size()) != g.N)
    throw DimensionMismatch("eta weight does not match grid");
  if (!psi1_0.grid.same_as(g) || !psi2_0.grid.same_as(g))
    throw DimensionMismatch("initial states live on a different grid");

  const long steps = std::lround(T / dt);
  if (steps < 1) throw InvalidParameter("T / dt must be at least one step");

  const CrankNicolson forward(H, dt);
  const CrankNicolson backward(H, -dt);
  const BandedOperator Hop(H);

  ComplexVector psi1 = psi1_0.values;
  ComplexVector phi = pt_reflect(psi2_0.values);

  EvolutionTrace trace;
  trace.times.reserve(steps + 1);
  trace.Q.reserve(steps + 1);
  trace.continuity_residual.reserve(steps + 1);

  ComplexVector P, J;
  density_and_current(eta_weight, phi, psi1, g.h, P, J);
  trace.times.push_back(0.0);
  trace.Q.push_back(g.h * P.sum());
  {
    const ComplexVector dpsi1 = -I * Hop.apply(psi1);
    const ComplexVector dpsi2 = -I * Hop.apply(psi2_0.values);
    trace.continuity_residual.push_back(
        continuity_fields(g, eta_weight, psi1_0, psi2_0, dpsi1, dpsi2)
            .max_defect);
  }

  ComplexVector P_next, J_next;
  for (long k = 1; k <= steps; ++k) {
    psi1 = forward.step(psi1);
    phi = backward.step(phi);
    if (!all_finite(psi1) || !all_finite(phi))
      throw NonFiniteState("non-finite state after step " + std::to_string(k),
                           static_cast<std::size_t>(k - 1));
    density_and_current(eta_weight, phi, psi1, g.h, P_next, J_next);
    const ComplexVector defect =
        (P_next - P) / dt + centered_difference(0.5 * (J + J_next), g.h);
    trace.times.push_back(static_cast<double>(k) * dt);
    trace.Q.push_back(g.h * P_next.sum());
    trace.continuity_residual.push_back(interior_max(defect));
    P.swap(P_next);
    J.swap(J_next);
  }
  trace.final_psi1 = WaveFunction(g, psi1);
  trace.final_psi2 = WaveFunction(g, pt_reflect(phi));
  return trace;
}

}  // namespace pseudoherm
