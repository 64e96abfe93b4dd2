#include <doctest.h>

#include <cmath>

#include "pseudoherm/error.hpp"
#include "pseudoherm/operators.hpp"
#include "pseudoherm/spectrum.hpp"

using namespace pseudoherm;

namespace {

ComplexVector smooth_probe(const Grid& g) {
  ComplexVector v(g.N);
  for (int j = 0; j < g.N; ++j) {
    const double x = g.points[j];
    v[j] = std::exp(-x * x / 4.0) * cplx{1.0, 0.3 * x};
  }
  return v;
}

}  // namespace

TEST_CASE("Scarf II coefficients and constraints") {
  const auto c = scarf2_coefficients(2.0, 1.0);
  CHECK(c.V1 == doctest::Approx(7.0));
  CHECK(c.V2 == doctest::Approx(-5.0));
  const auto c2 = scarf2_coefficients(0.0, 2.0);
  CHECK(c2.V1 == doctest::Approx(1.75));
  CHECK(c2.V2 == doctest::Approx(-2.0));
  CHECK_THROWS_AS(scarf2_coefficients(1.0, 0.5), ConstraintViolation);
  CHECK_THROWS_AS(scarf2_coefficients(-0.5, 1.0), ConstraintViolation);
  CHECK_THROWS_AS(scarf2_coefficients(1.0, 0.0), ConstraintViolation);
}

TEST_CASE("named potentials sample their closed forms") {
  const Grid g = make_grid(6.0, 41);
  const auto a = sample_potential(g, ScarfII{2.0, 1.0});
  const auto b = sample_potential(g, SpecialB1{2.0});
  const auto c = sample_potential(g, ScarfV{7.0, -5.0});
  for (int j = 0; j < g.N; ++j) {
    const double s = 1.0 / std::cosh(g.points[j]), t = std::tanh(g.points[j]);
    const cplx expected{-7.0 * s * s, 5.0 * s * t};
    CHECK(std::abs(a[j] - expected) < 1e-13);
    CHECK(std::abs(b[j] - expected) < 1e-13);
    CHECK(std::abs(c[j] - expected) < 1e-13);
  }
  CHECK(is_pt_symmetric(g, ScarfII{2.0, 1.0}));
  CHECK(is_pt_symmetric(g, FirstOrderFamily{2.0, 0.3}));
  CHECK_FALSE(is_pt_symmetric(g, CustomPotential{parse("x")}));
  CHECK_THROWS_AS(sample_potential(g, ScarfV{-1.0, 0.0}), ConstraintViolation);
}

TEST_CASE("ungauged Hamiltonian is -D2 + V and Hermitian for real V") {
  const Grid g = make_grid(5.0, 60);
  const ComplexMatrix H = build_hamiltonian(g, CustomPotential{parse("-2*sech(x)^2")});
  CHECK(hermiticity_defect(H) < 1e-15);
  CHECK(H(10, 10).real() ==
        doctest::Approx(2.0 / (g.h * g.h) - 2.0 / std::pow(std::cosh(g.points[10]), 2)));
  CHECK(H(10, 11).real() == doctest::Approx(-1.0 / (g.h * g.h)));
  // PT symmetry of the matrix: P conj(H) P = H.
  const ComplexMatrix Hs = build_hamiltonian(g, ScarfII{2.0, 1.0});
  const ComplexMatrix P = parity_matrix(g.N);
  CHECK((P * Hs.conjugate() * P - Hs).norm() < 1e-12);
}

TEST_CASE("gauge field must be real and odd") {
  const Grid g = make_grid(4.0, 31);
  CHECK_THROWS_AS(validate(g, GaugeSpec{0.5, parse("x^2")}), OddFunctionViolation);
  CHECK_THROWS_AS(validate(g, GaugeSpec{0.5, parse("i*x")}), OddFunctionViolation);
  CHECK_NOTHROW(validate(g, GaugeSpec{0.5, parse("tanh(x)")}));
  CHECK_THROWS_AS(build_hamiltonian(g, SpecialB1{2.0}, GaugeSpec{0.5, parse("cosh(x)")}),
                  OddFunctionViolation);
}

TEST_CASE("gauged Hamiltonian is similar to the ungauged one") {
  const Grid g = make_grid(8.0, 161);
  const GaugeSpec gauge{0.5, parse("tanh(x)")};
  const ComplexMatrix H = build_hamiltonian(g, SpecialB1{2.0});
  const ComplexMatrix Hb = build_hamiltonian(g, SpecialB1{2.0}, gauge);

  // H_beta (s u) = s (H u) with s = exp(beta int_0^x nu).
  const auto lam = gauge_exponent(g, gauge.nu);
  ComplexVector s(g.N);
  for (int j = 0; j < g.N; ++j) s[j] = std::exp(0.5 * lam[j]);
  const ComplexVector u = smooth_probe(g);
  const ComplexVector lhs = Hb * s.cwiseProduct(u);
  const ComplexVector rhs = s.cwiseProduct(H * u);
  CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());

  // Same spectrum.
  const auto e0 = eig(H).eigenvalues;
  const auto e1 = eig(Hb).eigenvalues;
  for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(e0[k] - e1[k]) < 1e-8);

  // Weighted symmetry eta H_beta = H_beta^T eta with eta = s^-2.
  const auto w = eta_weight(g, 0.5, gauge.nu);
  ComplexMatrix W = ComplexMatrix::Zero(g.N, g.N);
  for (int j = 0; j < g.N; ++j) W(j, j) = w[j];
  CHECK((W * Hb - Hb.transpose() * W).norm() <= 1e-12 * (W * Hb).norm());
}

TEST_CASE("expanded gauge form agrees with the similarity form to second order") {
  const GaugeSpec gauge{0.5, parse("tanh(x)")};
  auto gap = [&](int N) {
    const Grid g = make_grid(8.0, N);
    HamiltonianOptions expanded;
    expanded.scheme = GaugeScheme::Expanded;
    const ComplexMatrix a = build_hamiltonian(g, SpecialB1{2.0}, gauge);
    const ComplexMatrix b = build_hamiltonian(g, SpecialB1{2.0}, gauge, expanded);
    const ComplexVector u = smooth_probe(g);
    const ComplexVector d = ((a - b) * u).segment(4, N - 8);
    return d.cwiseAbs().maxCoeff();
  };
  const double ratio = gap(199) / gap(399);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("eta weight is exp(-2 beta int nu)") {
  const Grid g = make_grid(6.0, 121);
  const auto w = eta_weight(g, 0.5, parse("tanh(x)"));
  for (int j = 0; j < g.N; j += 10)
    CHECK(w[j] == doctest::Approx(1.0 / std::cosh(g.points[j])).epsilon(1e-3));
  CHECK(w[60] == 1.0);
}

TEST_CASE("parity intertwines PT-symmetric Hamiltonians") {
  const Grid g = make_grid(16.0, 400);
  const ComplexMatrix H = build_hamiltonian(g, ScarfII{2.0, 1.0});
  const ComplexMatrix P = build_eta(g, EtaParity{});
  // P H = H^dagger P holds exactly because H is complex symmetric.
  const auto rep = intertwining_residual(P, H, default_probes(g));
  CHECK(rep.per_probe.size() == 5);
  CHECK(rep.residual < 1e-12);
  // Identity does not intertwine a non-Hermitian H.
  const auto id = intertwining_residual(build_eta(g, EtaIdentity{}), H, default_probes(g));
  CHECK(id.residual > 1e-6);
}

TEST_CASE("first-order eta residual shrinks with the grid") {
  auto rms = [](int N) {
    const Grid g = make_grid(16.0, N);
    const ComplexMatrix H = build_hamiltonian(g, FirstOrderFamily{2.0, 0.0});
    const ComplexMatrix eta = build_eta(g, EtaFirstOrder{parse("2*sech(x)")});
    return intertwining_residual(eta, H, default_probes(g)).rms_defect;
  };
  const double r1 = rms(399), r2 = rms(799);
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("imaginary superpotential pair matches the first-order family") {
  const Grid g = make_grid(5.0, 51);
  const auto [V, partner] = susy_pair(parse("2.5*sech(x)"), 0.7);
  const auto a = sample_potential(g, V);
  const auto b = sample_potential(g, FirstOrderFamily{2.5, 0.7});
  const auto c = sample_potential(g, partner);
  for (int j = 0; j < g.N; ++j) {
    CHECK(std::abs(a[j] - b[j]) < 1e-12);
    CHECK(std::abs(c[j] - std::conj(b[j])) < 1e-12);
  }
  CHECK_THROWS_AS(susy_pair(parse("i*sech(x)"), 0.0), InvalidParameter);
}

TEST_CASE("second-order eta factorization") {
  const Grid g = make_grid(16.0, 801);
  const Expr a = parse("-2.5*sech(x)");
  const ComplexMatrix eta = build_eta(g, EtaSecondOrder{a, 0.0, 0.25, ScarfII{2.0, 1.0}});
  const auto rep = verify_factorization(g, a, 0.0, parse("tanh(x)/2"), eta);
  CHECK(rep.riccati_defect < 1e-12);
  CHECK(rep.operator_residual < 1e-6);
  // A wrong r fails the Riccati equation.
  const auto bad = verify_factorization(g, a, 0.0, parse("tanh(x)"), eta);
  CHECK(bad.riccati_defect > 0.1);
  // a vanishing where gamma != 0 is a pole.
  CHECK_THROWS_AS(verify_factorization(g, parse("x"), 1.0, parse("0"), eta), PoleError);
}

TEST_CASE("eta plus and minus parts") {
  const Grid g = make_grid(3.0, 30);
  const ComplexMatrix eta = build_eta(g, EtaFirstOrder{parse("2*sech(x)")}) + parity_matrix(g.N);
  const auto [plus, minus] = eta_plus_minus(eta);
  CHECK((plus + minus - 2.0 * eta).norm() < 1e-12);
  CHECK(hermiticity_defect(plus) < 1e-15);
  CHECK(anti_hermiticity_defect(minus) < 1e-15);
  // The first-order operator alone is anti-Hermitian.
  CHECK(anti_hermiticity_defect(build_eta(g, EtaFirstOrder{parse("2*sech(x)")})) < 1e-15);
  CHECK(hermiticity_defect(parity_matrix(g.N)) == 0.0);
}

TEST_CASE("mismatched sizes are rejected") {
  CHECK_THROWS_AS(intertwining_residual(ComplexMatrix::Identity(3, 3),
                                        ComplexMatrix::Identity(4, 4), {}),
                  DimensionMismatch);
}
