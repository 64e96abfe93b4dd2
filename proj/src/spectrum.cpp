#include "pseudoherm/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <tuple>

#include "lapack.hpp"
#include "pseudoherm/error.hpp"
#include "pseudoherm/linsolve.hpp"

namespace pseudoherm {

const char* to_string(SpectralTag tag) {
  switch (tag) {
    case SpectralTag::Real: return "real";
    case SpectralTag::PairMember: return "pair-member";
    case SpectralTag::Unpaired: return "unpaired";
  }
  return "?";
}

int Classification::count(SpectralTag tag) const {
  return static_cast<int>(std::count(tags.begin(), tags.end(), tag));
}

Classification classify_spectrum(std::span<const cplx> eigs, double tol) {
  if (!(tol > 0.0)) throw InvalidParameter("classification tolerance must be positive");
  const int n = static_cast<int>(eigs.size());
  Classification c;
  c.tol = tol;
  c.tags.assign(n, SpectralTag::Unpaired);
  c.partner.assign(n, -1);

  std::vector<int> complex_idx;
  for (int i = 0; i < n; ++i) {
    if (std::abs(eigs[i].imag()) <= tol * (1.0 + std::abs(eigs[i])))
      c.tags[i] = SpectralTag::Real;
    else
      complex_idx.push_back(i);
  }

  std::vector<std::tuple<double, int, int>> matches;
  for (std::size_t a = 0; a < complex_idx.size(); ++a) {
    for (std::size_t b = a + 1; b < complex_idx.size(); ++b) {
      const int i = complex_idx[a], j = complex_idx[b];
      const double d = std::abs(eigs[i] - std::conj(eigs[j]));
      const double scale =
          1.0 + std::max(std::abs(eigs[i]), std::abs(eigs[j]));
      if (d <= tol * scale) matches.emplace_back(d, i, j);
    }
  }
  std::sort(matches.begin(), matches.end());
  for (const auto& [d, i, j] : matches) {
    if (c.partner[i] >= 0 || c.partner[j] >= 0) continue;
    c.partner[i] = j;
    c.partner[j] = i;
    c.tags[i] = c.tags[j] = SpectralTag::PairMember;
  }
  return c;
}

namespace {

bool spectral_order(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

SpectrumReport eig(const ComplexMatrix& m, bool want_vectors, double tol) {
  if (m.rows() != m.cols()) throw DimensionMismatch("eig needs a square matrix");
  const int n = static_cast<int>(m.rows());
  SpectrumReport rep;
  rep.tol_used = tol;
  if (n == 0) return rep;

  ComplexMatrix a = m;
  std::vector<cplx> w(n);
  ComplexMatrix vr;
  if (want_vectors) vr.resize(n, n);
  cplx dummy;
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n, a.data(), n, w.data(),
      &dummy, 1, want_vectors ? vr.data() : &dummy, want_vectors ? n : 1);
  if (info > 0) {
    std::vector<std::size_t> unconverged(static_cast<std::size_t>(info));
    std::iota(unconverged.begin(), unconverged.end(), std::size_t{0});
    throw ConvergenceError("QR iteration failed to converge for " +
                               std::to_string(info) + " eigenvalues",
                           std::move(unconverged));
  }
  if (info < 0) throw InvalidParameter("zgeev rejected its input");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return spectral_order(w[i], w[j]); });
  rep.eigenvalues.resize(n);
  for (int k = 0; k < n; ++k) rep.eigenvalues[k] = w[order[k]];

  if (want_vectors) {
    ComplexMatrix sorted(n, n);
    for (int k = 0; k < n; ++k) sorted.col(k) = vr.col(order[k]);
    const double mnorm = m.norm();
    for (int k = 0; k < n; ++k) {
      const ComplexVector v = sorted.col(k);
      const double r = (m * v - rep.eigenvalues[k] * v).norm();
      rep.max_backward_error =
          std::max(rep.max_backward_error, r / (mnorm * v.norm()));
    }
    rep.vectors = std::move(sorted);
  }
  rep.classification = classify_spectrum(rep.eigenvalues, tol);
  return rep;
}

Eigenpair eigenpair_near(const ComplexMatrix& m, cplx shift, int block_size,
                         int max_iterations) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("eigenpair_near needs a square matrix");
  const int n = static_cast<int>(m.rows());
  const int k = std::min(block_size, n);

  std::optional<LuSolver> lu;
  cplx sigma = shift;
  for (int attempt = 0; attempt < 4 && !lu; ++attempt) {
    try {
      ComplexMatrix shifted = m;
      shifted.diagonal().array() -= sigma;
      lu.emplace(shifted);
    } catch (const SingularSystem&) {
      // shift landed on an eigenvalue
      sigma += 1e-10 * (1.0 + std::abs(sigma));
    }
  }
  if (!lu) throw SingularSystem("shifted matrix stayed singular");

  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  ComplexMatrix X(n, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = cplx{normal(rng), normal(rng)};

  const BandedOperator op(m);
  const double mnorm = m.norm();
  Eigenpair best;
  cplx previous = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iterations; ++it) {
    lu->solve_in_place(X);
    Eigen::HouseholderQR<ComplexMatrix> qr(X);
    X = qr.householderQ() * ComplexMatrix::Identity(n, k);

    ComplexMatrix MX(n, k);
    for (int j = 0; j < k; ++j) MX.col(j) = op.apply(X.col(j));
    const ComplexMatrix small = X.adjoint() * MX;
    Eigen::ComplexEigenSolver<ComplexMatrix> ritz(small);
    int pick = 0;
    for (int j = 1; j < k; ++j)
      if (std::abs(ritz.eigenvalues()[j] - shift) <
          std::abs(ritz.eigenvalues()[pick] - shift))
        pick = j;
    const cplx theta = ritz.eigenvalues()[pick];
    ComplexVector v = X * ritz.eigenvectors().col(pick);
    v.normalize();

    best.value = theta;
    best.vector = v;
    best.iterations = it;
    // Near a coalescence the Ritz value only settles to about sqrt(eps).
    const double scale = 1.0 + std::abs(theta);
    if (std::abs(theta - previous) <= 1e-10 * scale) {
      const double resid = (op.apply(v) - theta * v).norm();
      if (resid <= 1e-8 * mnorm) return best;
    }
    previous = theta;
  }
  throw ConvergenceError("shift-invert iteration did not converge near shift",
                         {0});
}

BoundStateReport bound_states(const SpectrumReport& coarse,
                              const ComplexMatrix& fine, double move_tol,
                              double tol) {
  BoundStateReport rep;
  rep.move_tol = move_tol;
  for (const cplx& lam : coarse.eigenvalues) {
    if (!(lam.real() < 0.0)) continue;
    BoundCandidate c;
    c.coarse = lam;
    c.fine = eigenpair_near(fine, lam).value;
    c.converged = std::abs(c.fine - c.coarse) < move_tol;
    rep.candidates.push_back(c);
    if (c.converged) rep.bound.push_back(lam);
  }
  std::sort(rep.bound.begin(), rep.bound.end(), spectral_order);
  rep.classification = classify_spectrum(rep.bound, tol);
  for (const cplx& lam : rep.bound)
    rep.max_abs_imag = std::max(rep.max_abs_imag, std::abs(lam.imag()));
  return rep;
}

}  // namespace pseudoherm
