#pragma once

// Closed-form bound-state energies of the PT-symmetric Scarf II family
//   V = -V1 sech^2 x - i V2 sech x tanh x
// used as reference data for the numerical spectra.

#include <string>
#include <vector>

#include "pseudoherm/operators.hpp"

namespace pseudoherm {

/// ScarfII{A, B} after checking A + 1/2 > 0, B > 0 and that A - B + 1/2 is
/// not an integer.
PotentialSpec scarf2_potential(double A, double B);

struct LevelSet {
  std::string family;
  /// Echoed inputs. For first-order sets, d is stored in A and k in B.
  double A = 0.0;
  double B = 0.0;
  /// -(A + 1/2); only meaningful for the Scarf II parameterization.
  double lambda = 0.0;
  std::vector<double> series1;
  std::vector<double> series2;
  bool reality_ok = true;
  /// True when the formula goes beyond the B = 1 case with a published
  /// level list and was checked against the eigensolver instead.
  bool derived = false;
  /// A level occurs in both series.
  bool degenerate = false;

  /// series1 and series2 merged, ascending, duplicates kept.
  std::vector<double> all() const;
};

/// For t = B(2A+1): series1 = {-(t/2 - 1/2 - n)^2 : t/2 - 1/2 - n > 0},
/// series2 = {-1/4}. B = 1 reduces series1 to {-(A - n)^2 : A - n > 0}.
LevelSet scarf2_levels(double A, double B);

/// E_n = k - (d - n - 1/2)^2 for d - n - 1/2 > 0. Throws ConstraintViolation
/// for d <= 1/2, where no level is normalizable.
LevelSet first_order_levels(double d, double k);

/// Levels of the raw form via p, q = sqrt(V1 + 1/4 +- |V2|):
/// E = -((p + q)/2 - 1/2 - n)^2 and -((p - q)/2 - 1/2 - n)^2 while the
/// bracket stays positive. Empty series2 and reality_ok = false past the
/// bound, where the levels turn complex.
LevelSet scarf_v_levels(double V1, double V2);

struct RealityCheck {
  bool ok = false;
  /// V1 + 1/4 - |V2|; nonnegative iff ok.
  double margin = 0.0;
};

/// |V2| <= V1 + 1/4. Throws InvalidParameter unless V1 > 0.
RealityCheck reality_condition(double V1, double V2);

/// V1 + 1/4 - |V2| for the (A, B) coefficients, which equals
/// (B(2A+1) - 2)^2 / 4 and is never negative.
double reality_margin(double A, double B);

}  // namespace pseudoherm
