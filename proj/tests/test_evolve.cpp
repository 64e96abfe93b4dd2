#include <doctest.h>

#include <cmath>

#include "pseudoherm/error.hpp"
#include "pseudoherm/evolve.hpp"
#include "pseudoherm/operators.hpp"
#include "pseudoherm/spectrum.hpp"

using namespace pseudoherm;

namespace {

WaveFunction gaussian(const Grid& g, double x0, double sigma, double k0) {
  ComplexVector v(g.N);
  for (int j = 0; j < g.N; ++j) {
    const double d = g.points[j] - x0;
    v[j] = std::exp(-d * d / (2 * sigma * sigma)) * std::polar(1.0, k0 * g.points[j]);
  }
  return WaveFunction(g, v);
}

ComplexMatrix diag_matrix(std::initializer_list<cplx> e) {
  ComplexMatrix m = ComplexMatrix::Zero(e.size(), e.size());
  int k = 0;
  for (const cplx& z : e) m(k, k) = z, ++k;
  return m;
}

}  // namespace

TEST_CASE("Crank-Nicolson is unitary for Hermitian H") {
  const Grid g = make_grid(10.0, 300);
  const ComplexMatrix H = build_hamiltonian(g, CustomPotential{parse("-2*sech(x)^2")});
  WaveFunction psi = gaussian(g, -1.0, 1.0, 2.0);
  const double n0 = psi.values.norm();
  for (int s = 0; s < 20; ++s) {
    const double before = psi.values.norm();
    psi = step_cn(H, psi, 1e-2);
    CHECK(std::abs(psi.values.norm() - before) <= 1e-12 * n0);
  }
}

TEST_CASE("diagonal H gives the Cayley phase") {
  const Grid g = make_grid(1.0, 3);
  const ComplexMatrix H = diag_matrix({2.0, -1.0, 0.5});
  const double dt = 0.01;
  const WaveFunction e0(g, ComplexVector::Unit(3, 0));
  const cplx got = step_cn(H, e0, dt).values[0];
  const cplx expected = (1.0 - cplx{0, 1} * dt * 2.0 / 2.0) / (1.0 + cplx{0, 1} * dt * 2.0 / 2.0);
  CHECK(std::abs(got - expected) < 1e-15);
  CHECK(std::abs(got - std::exp(cplx{0, -2.0 * dt})) < 1e-5);
}

TEST_CASE("phase error is second order in dt") {
  const Grid g = make_grid(1.0, 3);
  const ComplexMatrix H = diag_matrix({2.0, 2.0, 2.0});
  auto error = [&](double dt) {
    WaveFunction psi(g, ComplexVector::Ones(3));
    const CrankNicolson cn(H, dt);
    const long steps = std::lround(1.0 / dt);
    for (long s = 0; s < steps; ++s) psi.values = cn.step(psi.values);
    return std::abs(psi.values[0] - std::exp(cplx{0, -2.0}));
  };
  CHECK(error(0.01) / error(0.005) == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("step errors") {
  const Grid g = make_grid(1.0, 3);
  const WaveFunction psi(g, ComplexVector::Ones(3));
  CHECK_THROWS_AS(step_cn(diag_matrix({1, 1, 1}), psi, 0.0), InvalidParameter);
  CHECK_THROWS_AS(step_cn(diag_matrix({1, 1}), psi, 0.1), DimensionMismatch);
  // I + i dt/2 H vanishes for H = 2i/dt.
  const double dt = 0.5;
  CHECK_THROWS_AS(step_cn(diag_matrix({cplx{0, 2 / dt}, 1, 1}), psi, dt), SingularSystem);
}

TEST_CASE("runaway growth aborts with the last finite step") {
  const Grid g = make_grid(1.0, 3);
  const double dt = 1e-3;
  // Growth factor per step (1 + a)/(1 - a) with a = 0.999999.
  const ComplexMatrix H = diag_matrix({cplx{0, 2 * 0.999999 / dt}, 1, 1});
  const WaveFunction psi(g, ComplexVector::Ones(3));
  try {
    run(H, g, unit_weight(g), psi, psi, 1.0, dt);
    FAIL("expected NonFiniteState");
  } catch (const NonFiniteState& e) {
    CHECK(e.last_valid_step() > 10);
    CHECK(e.last_valid_step() < 100);
    CHECK(e.category() == Error::Category::Numerical);
  }
}

TEST_CASE("Hermitian baseline conserves Q") {
  const Grid g = make_grid(16.0, 400);
  const ComplexMatrix H = build_hamiltonian(g, CustomPotential{parse("-2*sech(x)^2")});
  const WaveFunction psi = gaussian(g, 0.0, 1.0, 0.0);
  const auto tr = run(H, g, unit_weight(g), psi, psi, 5.0, 1e-3);
  CHECK(tr.times.size() == 5001);
  CHECK(tr.Q.size() == tr.times.size());
  CHECK(tr.continuity_residual.size() == tr.times.size());
  CHECK(tr.times.back() == doctest::Approx(5.0));
  CHECK(tr.max_drift() <= 1e-8);
  for (const cplx& q : tr.Q) CHECK(std::abs(q.imag()) <= 1e-10);
}

TEST_CASE("PT-symmetric ground state keeps Q under the PT product") {
  const Grid g = make_grid(16.0, 400);
  const ComplexMatrix H = build_hamiltonian(g, SpecialB1{2.0});
  const WaveFunction u(g, eigenpair_near(H, -4.0).vector);
  const auto tr = run(H, g, unit_weight(g), u, u, 5.0, 1e-3);
  CHECK(tr.max_drift() <= 1e-6);
}

TEST_CASE("gauged evolution conserves Q only with the eta weight") {
  const Grid g = make_grid(16.0, 400);
  const GaugeSpec gauge{0.5, parse("tanh(x)")};
  const ComplexMatrix Hb = build_hamiltonian(g, SpecialB1{2.0}, gauge);
  const auto w = eta_weight(g, 0.5, gauge.nu);
  const WaveFunction u0 = normalize_pseudo(g, w, WaveFunction(g, eigenpair_near(Hb, -4.0).vector));
  const WaveFunction u1 = normalize_pseudo(g, w, WaveFunction(g, eigenpair_near(Hb, -1.0).vector));
  const WaveFunction mix(g, u0.values + 0.5 * u1.values);

  const auto good = run(Hb, g, w, mix, mix, 2.0, 1e-3);
  CHECK(good.max_drift() <= 1e-10);
  const auto bad = run(Hb, g, unit_weight(g), mix, mix, 2.0, 1e-3);
  CHECK(bad.max_drift() >= 1e-2);

  // Distinct levels stay orthogonal: |Q(t)| = |Q(0)| ~ 0.
  const auto orth = run(Hb, g, w, u0, u1, 2.0, 1e-3);
  for (const cplx& q : orth.Q) CHECK(std::abs(q) <= 1e-6);
}

TEST_CASE("stationary real state carries no current") {
  const Grid g = make_grid(16.0, 400);
  const ComplexMatrix H = build_hamiltonian(g, CustomPotential{parse("-6*sech(x)^2")});
  const auto p = eigenpair_near(H, -4.0);
  // Real, even ground state.
  ComplexVector v = p.vector / p.vector[g.N / 2];
  v = v.real().cast<cplx>();
  const WaveFunction u(g, v);
  const ComplexVector dt = -cplx{0, 1} * (H * v);
  const auto f = continuity_fields(g, unit_weight(g), u, u, dt, dt);
  CHECK(f.J.cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(f.max_defect <= 1e-8);
  CHECK_THROWS_AS(continuity_fields(make_grid(16.0, 200), unit_weight(g), u, u, dt, dt),
                  DimensionMismatch);
}

TEST_CASE("continuity defect of a moving packet is second order") {
  auto defect = [](int N, double dt) {
    const Grid g = make_grid(16.0, N);
    const ComplexMatrix H = build_hamiltonian(g, CustomPotential{parse("0")});
    const WaveFunction psi = gaussian(g, -2.0, 1.0, 1.5);
    const auto tr = run(H, g, unit_weight(g), psi, psi, 0.5, dt);
    return tr.max_residual();
  };
  const double coarse = defect(399, 4e-3), fine = defect(799, 2e-3);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));
}
