#pragma once

// Dense non-Hermitian eigenproblems and the real / conjugate-pair structure
// of pseudo-Hermitian spectra.

#include <optional>
#include <span>
#include <vector>

#include "pseudoherm/linalg.hpp"

namespace pseudoherm {

enum class SpectralTag { Real, PairMember, Unpaired };

const char* to_string(SpectralTag tag);

struct Classification {
  std::vector<SpectralTag> tags;
  /// Index of the conjugate partner for pair members, -1 otherwise.
  std::vector<int> partner;
  double tol = 0.0;

  int count(SpectralTag tag) const;
};

/// Eigenvalues with |Im| <= tol (1 + |lambda|) are real. The rest are matched
/// to conjugates greedily, closest match |lambda_i - conj(lambda_j)| first,
/// within the same relative tolerance; leftovers are unpaired.
Classification classify_spectrum(std::span<const cplx> eigenvalues,
                                 double tol = 1e-6);

struct SpectrumReport {
  /// Sorted by real part, then imaginary part.
  std::vector<cplx> eigenvalues;
  /// Unit 2-norm eigenvectors as columns, aligned with eigenvalues.
  std::optional<ComplexMatrix> vectors;
  Classification classification;
  double tol_used = 0.0;
  /// max ||M v - lambda v|| / (||M||_F ||v||); zero when no vectors.
  double max_backward_error = 0.0;
};

/// All eigenvalues of a square matrix (LAPACK zgeev). Throws
/// ConvergenceError listing the unconverged indices.
SpectrumReport eig(const ComplexMatrix& m, bool want_vectors = false,
                   double tol = 1e-6);

struct Eigenpair {
  cplx value;
  ComplexVector vector;
  int iterations = 0;
};

/// Eigenpair of m closest to `shift`, by shift-invert subspace iteration
/// with Rayleigh-Ritz extraction. Cheap for banded m.
Eigenpair eigenpair_near(const ComplexMatrix& m, cplx shift,
                         int block_size = 3, int max_iterations = 200);

/// A candidate bound state: an eigenvalue with negative real part followed
/// from the coarse grid to the refined one.
struct BoundCandidate {
  cplx coarse;
  cplx fine;
  bool converged = false;
};

struct BoundStateReport {
  std::vector<BoundCandidate> candidates;
  /// Coarse-grid values of converged candidates, sorted.
  std::vector<cplx> bound;
  Classification classification;
  double max_abs_imag = 0.0;
  double move_tol = 0.0;

  int real_count() const { return classification.count(SpectralTag::Real); }
  /// Number of conjugate pairs (not members).
  int pair_count() const {
    return classification.count(SpectralTag::PairMember) / 2;
  }
  int unpaired_count() const {
    return classification.count(SpectralTag::Unpaired);
  }
};

/// Keeps eigenvalues of `coarse` with Re < 0 whose nearest eigenvalue of the
/// matrix on the doubled grid lies within move_tol.
BoundStateReport bound_states(const SpectrumReport& coarse,
                              const ComplexMatrix& fine, double move_tol = 1e-3,
                              double tol = 1e-6);

}  // namespace pseudoherm
