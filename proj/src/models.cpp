#include "pseudoherm/models.hpp"

#include <algorithm>
#include <cmath>

#include "pseudoherm/error.hpp"

namespace pseudoherm {

namespace {

// -(top - n)^2 for n = 0, 1, ... while top - n > 0.
std::vector<double> ladder(double top) {
  std::vector<double> out;
  for (int n = 0; top - n > 1e-12; ++n) out.push_back(-(top - n) * (top - n));
  return out;
}

bool shares_level(const std::vector<double>& a, const std::vector<double>& b) {
  for (double x : a)
    for (double y : b)
      if (std::abs(x - y) <= 1e-12 * (1.0 + std::abs(x))) return true;
  return false;
}

}  // namespace

std::vector<double> LevelSet::all() const {
  std::vector<double> out = series1;
  out.insert(out.end(), series2.begin(), series2.end());
  std::sort(out.begin(), out.end());
  return out;
}

PotentialSpec scarf2_potential(double A, double B) {
  scarf2_coefficients(A, B);
  return ScarfII{A, B};
}

LevelSet scarf2_levels(double A, double B) {
  scarf2_coefficients(A, B);
  LevelSet s;
  s.family = "scarf2";
  s.A = A;
  s.B = B;
  s.lambda = -(A + 0.5);
  const double t = B * (2.0 * A + 1.0);
  s.series1 = ladder(t / 2.0 - 0.5);
  s.series2 = {-0.25};
  s.derived = B != 1.0;
  s.degenerate = shares_level(s.series1, s.series2);
  return s;
}

LevelSet first_order_levels(double d, double k) {
  if (!(d > 0.5))
    throw ConstraintViolation("first-order family needs d > 1/2 for bound states");
  if (!std::isfinite(k)) throw InvalidParameter("k must be finite");
  LevelSet s;
  s.family = "first-order";
  s.A = d;
  s.B = k;
  s.lambda = -d;
  for (double e : ladder(d - 0.5)) s.series1.push_back(k + e);
  s.derived = true;
  return s;
}

LevelSet scarf_v_levels(double V1, double V2) {
  const RealityCheck rc = reality_condition(V1, V2);
  LevelSet s;
  s.family = "scarf-v";
  s.A = V1;
  s.B = V2;
  s.reality_ok = rc.ok;
  s.derived = true;
  const double p = std::sqrt(V1 + 0.25 + std::abs(V2));
  if (rc.ok) {
    const double q = std::sqrt(rc.margin);
    s.series1 = ladder((p + q) / 2.0 - 0.5);
    s.series2 = ladder((p - q) / 2.0 - 0.5);
    s.degenerate = shares_level(s.series1, s.series2);
  }
  return s;
}

RealityCheck reality_condition(double V1, double V2) {
  if (!(V1 > 0.0) || !std::isfinite(V1) || !std::isfinite(V2))
    throw InvalidParameter("reality condition needs finite V1 > 0");
  RealityCheck r;
  r.margin = V1 + 0.25 - std::abs(V2);
  r.ok = r.margin >= 0.0;
  return r;
}

double reality_margin(double A, double B) {
  const ScarfCoefficients c = scarf2_coefficients(A, B);
  return c.V1 + 0.25 - std::abs(c.V2);
}

}  // namespace pseudoherm
