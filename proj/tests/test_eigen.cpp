#include <doctest.h>

#include <cmath>
#include <random>

#include "pseudoherm/error.hpp"
#include "pseudoherm/linsolve.hpp"
#include "pseudoherm/operators.hpp"
#include "pseudoherm/spectrum.hpp"

using namespace pseudoherm;

namespace {

ComplexMatrix random_matrix(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx{z(rng), z(rng)};
  return m;
}

}  // namespace

TEST_CASE("eigenvalues are sorted and their sum is the trace") {
  const ComplexMatrix m = random_matrix(60, 7);
  const auto rep = eig(m, true);
  cplx sum{};
  for (const cplx& z : rep.eigenvalues) sum += z;
  CHECK(std::abs(sum - m.trace()) <= 1e-8 * std::abs(m.trace()) + 1e-10);
  for (std::size_t k = 1; k < rep.eigenvalues.size(); ++k)
    CHECK(rep.eigenvalues[k - 1].real() <= rep.eigenvalues[k].real());
  CHECK(rep.max_backward_error < 1e-13);

  const Grid g = make_grid(16.0, 300);
  const ComplexMatrix H = build_hamiltonian(g, ScarfII{2.0, 1.0});
  cplx hs{};
  for (const cplx& z : eig(H).eigenvalues) hs += z;
  CHECK(std::abs(hs - H.trace()) <= 1e-8 * std::abs(H.trace()));
}

TEST_CASE("classification of real, paired and unpaired eigenvalues") {
  const std::vector<cplx> z{{-1.0, 0.0}, {2.0, 0.5}, {2.0, -0.5}, {3.0, 1.0}, {0.5, 1e-9}};
  const auto c = classify_spectrum(z, 1e-6);
  CHECK(c.tags[0] == SpectralTag::Real);
  CHECK(c.tags[1] == SpectralTag::PairMember);
  CHECK(c.partner[1] == 2);
  CHECK(c.partner[2] == 1);
  CHECK(c.tags[3] == SpectralTag::Unpaired);
  CHECK(c.tags[4] == SpectralTag::Real);
  CHECK(c.count(SpectralTag::PairMember) == 2);
  CHECK(std::string(to_string(SpectralTag::Unpaired)) == "unpaired");
  CHECK_THROWS_AS(classify_spectrum(z, 0.0), InvalidParameter);
}

TEST_CASE("PT-symmetric 2x2 model: real below, paired above the threshold") {
  // [[a + i b, c], [c, a - i b]] has eigenvalues a +- sqrt(c^2 - b^2).
  auto model = [](double b) {
    ComplexMatrix m(2, 2);
    m << cplx{1.0, b}, 1.0, 1.0, cplx{1.0, -b};
    return eig(m);
  };
  const auto below = model(0.5);
  CHECK(below.classification.count(SpectralTag::Real) == 2);
  CHECK(below.eigenvalues[1].real() == doctest::Approx(1.0 + std::sqrt(0.75)));
  const auto above = model(2.0);
  CHECK(above.classification.count(SpectralTag::PairMember) == 2);
  CHECK(std::abs(above.eigenvalues[0].imag()) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("PT-symmetric Hamiltonian spectrum is closed under conjugation") {
  const Grid g = make_grid(16.0, 200);
  const auto rep = eig(build_hamiltonian(g, ScarfV{2.0, 3.0}));
  CHECK(rep.classification.count(SpectralTag::Unpaired) == 0);
  CHECK(rep.classification.count(SpectralTag::PairMember) >= 2);
}

TEST_CASE("shift-invert finds the eigenpair nearest the shift") {
  const Grid g = make_grid(16.0, 400);
  const ComplexMatrix H = build_hamiltonian(g, ScarfII{2.0, 1.0});
  const auto all = eig(H).eigenvalues;
  const auto p = eigenpair_near(H, cplx{-0.9, 0.0});
  CHECK(std::abs(p.value - all[1]) < 1e-9);
  CHECK((H * p.vector - p.value * p.vector).norm() < 1e-8 * H.norm());
  CHECK(p.vector.norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(eigenpair_near(ComplexMatrix::Identity(3, 4), 0.0), DimensionMismatch);
}

TEST_CASE("particle in a box") {
  const Grid g = make_grid(8.0, 400);
  const auto rep = eig(build_hamiltonian(g, CustomPotential{parse("0")}));
  const double exact = std::pow(M_PI / 16.0, 2);
  CHECK(rep.eigenvalues[0].real() == doctest::Approx(exact).epsilon(1e-4));
  CHECK(rep.classification.count(SpectralTag::Real) == g.N);
}

TEST_CASE("bound states survive grid refinement") {
  const Grid g = make_grid(16.0, 400), fine = make_grid(16.0, 800);
  const auto coarse = eig(build_hamiltonian(g, ScarfII{2.0, 1.0}));
  const auto b = bound_states(coarse, build_hamiltonian(fine, ScarfII{2.0, 1.0}), 1e-2);
  REQUIRE(b.bound.size() == 3);
  CHECK(b.real_count() == 3);
  CHECK(b.pair_count() == 0);
  CHECK(b.bound[0].real() == doctest::Approx(-4.0).epsilon(1e-2));
  CHECK(b.bound[2].real() == doctest::Approx(-0.25).epsilon(1e-2));
  CHECK(b.max_abs_imag < 1e-8);
}

TEST_CASE("banded LU agrees with a dense solve") {
  const Grid g = make_grid(4.0, 200);
  ComplexMatrix A = build_hamiltonian(g, ScarfII{2.0, 1.0}, {}, {4, GaugeScheme::Similarity});
  A.diagonal().array() += cplx{0.0, 3.0};
  const LuSolver lu(A);
  CHECK(lu.banded());
  const ComplexVector b = random_matrix(200, 3).col(0);
  const ComplexVector x = lu.solve(b);
  CHECK((A * x - b).norm() < 1e-10 * b.norm());
  CHECK((BandedOperator(A).apply(x) - A * x).norm() < 1e-12 * (A * x).norm());

  const ComplexMatrix dense = random_matrix(20, 11);
  const LuSolver lu2(dense);
  CHECK_FALSE(lu2.banded());
  CHECK((dense * lu2.solve(b.head(20)) - b.head(20)).norm() < 1e-10);
  CHECK_THROWS_AS(LuSolver(ComplexMatrix::Zero(5, 5)), SingularSystem);
}
