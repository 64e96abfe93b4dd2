#pragma once

#include <vector>

#include "pseudoherm/linalg.hpp"

namespace pseudoherm {

/// Lower and upper bandwidth of the nonzero pattern of m.
struct Bandwidth {
  int lower = 0;
  int upper = 0;
};

Bandwidth bandwidth(const ComplexMatrix& m);

/// Matrix-vector product that skips the zero bands of a banded matrix.
class BandedOperator {
public:
  explicit BandedOperator(const ComplexMatrix& a);

  ComplexVector apply(const ComplexVector& x) const;
  int size() const { return n_; }

private:
  int n_ = 0;
  Bandwidth bw_;
  ComplexMatrix dense_;
};

/// LU factorization of a square complex matrix. Matrices whose bandwidth is
/// small relative to their size are factored in LAPACK band storage; others
/// are factored densely. Throws SingularSystem when a pivot is exactly zero.
class LuSolver {
public:
  explicit LuSolver(const ComplexMatrix& a);

  ComplexVector solve(const ComplexVector& b) const;
  /// Solves in place for every column of b.
  void solve_in_place(ComplexMatrix& b) const;

  int size() const { return n_; }
  bool banded() const { return banded_; }

private:
  int n_ = 0;
  bool banded_ = false;
  Bandwidth bw_;
  std::vector<cplx> factors_;
  std::vector<int> pivots_;
  int ldab_ = 0;
};

}  // namespace pseudoherm
