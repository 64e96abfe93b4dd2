#include "pseudoherm/linsolve.hpp"

#include "lapack.hpp"

#include <string>

#include "pseudoherm/error.hpp"

namespace pseudoherm {

Bandwidth bandwidth(const ComplexMatrix& m) {
  Bandwidth bw;
  const Eigen::Index n = m.rows();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (m(i, j) == cplx{}) continue;
      if (i > j) bw.lower = std::max<int>(bw.lower, static_cast<int>(i - j));
      if (j > i) bw.upper = std::max<int>(bw.upper, static_cast<int>(j - i));
    }
  }
  return bw;
}

BandedOperator::BandedOperator(const ComplexMatrix& a)
    : n_(static_cast<int>(a.rows())), bw_(bandwidth(a)), dense_(a) {
  if (a.rows() != a.cols())
    throw DimensionMismatch("banded operator needs a square matrix");
}

ComplexVector BandedOperator::apply(const ComplexVector& x) const {
  if (x.size() != n_) throw DimensionMismatch("vector size mismatch");
  ComplexVector y(n_);
  for (int i = 0; i < n_; ++i) {
    const int lo = std::max(0, i - bw_.lower), hi = std::min(n_ - 1, i + bw_.upper);
    cplx sum{};
    for (int j = lo; j <= hi; ++j) sum += dense_(i, j) * x[j];
    y[i] = sum;
  }
  return y;
}

LuSolver::LuSolver(const ComplexMatrix& a) : n_(static_cast<int>(a.rows())) {
  if (a.rows() != a.cols())
    throw DimensionMismatch("LU factorization needs a square matrix");
  bw_ = bandwidth(a);
  banded_ = 4 * (bw_.lower + bw_.upper + 1) < n_;
  pivots_.assign(n_, 0);
  lapack_int info = 0;
  if (banded_) {
    const int kl = bw_.lower, ku = bw_.upper;
    ldab_ = 2 * kl + ku + 1;
    factors_.assign(static_cast<std::size_t>(ldab_) * n_, cplx{});
    // Column-major band storage: AB(kl + ku + i - j, j) = A(i, j).
    for (int j = 0; j < n_; ++j) {
      const int lo = std::max(0, j - ku), hi = std::min(n_ - 1, j + kl);
      for (int i = lo; i <= hi; ++i)
        factors_[static_cast<std::size_t>(j) * ldab_ + (kl + ku + i - j)] = a(i, j);
    }
    info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n_, n_, kl, ku,
                          factors_.data(),
                          ldab_, pivots_.data());
  } else {
    factors_.assign(a.data(), a.data() + a.size());
    info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n_, n_,
                          factors_.data(),
                          n_, pivots_.data());
  }
  if (info > 0)
    throw SingularSystem("matrix is singular: zero pivot at index " +
                         std::to_string(info - 1));
  if (info < 0) throw SingularSystem("LAPACK factorization rejected its input");
}

void LuSolver::solve_in_place(ComplexMatrix& b) const {
  if (b.rows() != n_) throw DimensionMismatch("right-hand side size mismatch");
  const auto nrhs = static_cast<lapack_int>(b.cols());
  auto* rhs = b.data();
  const auto* lu = factors_.data();
  lapack_int info;
  if (banded_)
    info = LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n_, bw_.lower, bw_.upper, nrhs,
                          lu, ldab_, pivots_.data(), rhs, n_);
  else
    info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n_, nrhs, lu, n_,
                          pivots_.data(), rhs, n_);
  if (info != 0) throw SingularSystem("LAPACK triangular solve failed");
}

ComplexVector LuSolver::solve(const ComplexVector& b) const {
  ComplexMatrix x = b;
  solve_in_place(x);
  return x.col(0);
}

}  // namespace pseudoherm
