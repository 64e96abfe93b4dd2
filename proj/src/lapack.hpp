#pragma once

// Private: LAPACKE with std::complex as its complex types.
#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

static_assert(sizeof(lapack_int) == sizeof(int), "expects 32-bit LAPACK ints");
