#include "pseudoherm/operators.hpp"

#include <cmath>
#include <functional>
#include <string>

#include <Eigen/SparseCore>

#include "pseudoherm/error.hpp"

namespace pseudoherm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Expr num(double v) { return Expr::constant(v); }
Expr x_var() { return Expr::variable(); }
Expr sech_x() { return num(1.0) / Expr::apply(Func::Cosh, x_var()); }
Expr tanh_x() { return Expr::apply(Func::Tanh, x_var()); }

Expr scarf_expr(double V1, double V2) {
  // -V1 sech^2 - i V2 sech tanh
  return num(-V1) * Expr::pow(sech_x(), 2) +
         Expr::constant(cplx{0.0, -V2}) * sech_x() * tanh_x();
}

ComplexMatrix diag(const std::vector<cplx>& v) {
  ComplexMatrix m = ComplexMatrix::Zero(v.size(), v.size());
  for (std::size_t j = 0; j < v.size(); ++j) m(j, j) = v[j];
  return m;
}

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

// Fixed off-grid sample set used by the parity and reality gates.
std::vector<double> check_points(const Grid& g) {
  std::vector<double> pts = g.points;
  for (int k = 1; k <= 37; ++k) pts.push_back(g.L * std::sin(0.731 * k));
  return pts;
}

}  // namespace

// ---------------------------------------------------------------------------

ScarfCoefficients scarf2_coefficients(double A, double B) {
  if (!(A + 0.5 > 0.0))
    throw ConstraintViolation("Scarf II requires A + 1/2 > 0");
  if (!(B > 0.0)) throw ConstraintViolation("Scarf II requires B > 0");
  if (is_integer(A - B + 0.5))
    throw ConstraintViolation("Scarf II requires A - B + 1/2 not an integer");
  const double t = B * (2.0 * A + 1.0);
  return {0.25 * (t * t + 3.0), -t};
}

void validate(const PotentialSpec& spec) {
  std::visit(overloaded{
                 [](const ScarfII& s) { (void)scarf2_coefficients(s.A, s.B); },
                 [](const SpecialB1& s) {
                   if (!(s.A + 0.5 > 0.0))
                     throw ConstraintViolation("requires A + 1/2 > 0");
                 },
                 [](const ScarfV& s) {
                   if (!(s.V1 > 0.0))
                     throw ConstraintViolation("Scarf II requires V1 > 0");
                 },
                 [](const auto&) {},
             },
             spec);
}

Expr potential_expr(const PotentialSpec& spec) {
  return std::visit(
      overloaded{
          [](const ScarfII& s) {
            const auto c = scarf2_coefficients(s.A, s.B);
            return scarf_expr(c.V1, c.V2);
          },
          [](const FirstOrderFamily& f) {
            return scarf_expr(f.d * f.d, -f.d) + num(f.k);
          },
          [](const SpecialB1& s) {
            return num(-(s.A * s.A + s.A + 1.0)) * Expr::pow(sech_x(), 2) +
                   Expr::constant(cplx{0.0, 2.0 * s.A + 1.0}) * sech_x() *
                       tanh_x();
          },
          [](const ScarfV& s) { return scarf_expr(s.V1, s.V2); },
          [](const CustomPotential& c) { return c.V; },
      },
      spec);
}

std::vector<cplx> sample_potential(const Grid& g, const PotentialSpec& spec) {
  validate(spec);
  return sample(potential_expr(spec), g.points);
}

bool is_pt_symmetric(const Grid& g, const PotentialSpec& spec, double tol) {
  const auto V = sample_potential(g, spec);
  for (int j = 0; j < g.N; ++j) {
    const cplx mirrored = V[g.mirror(j)];
    if (std::abs(mirrored - std::conj(V[j])) > tol * (1.0 + std::abs(V[j])))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

void validate(const Grid& g, const GaugeSpec& gauge) {
  const auto pts = check_points(g);
  if (!is_real_valued(gauge.nu, pts))
    throw OddFunctionViolation("gauge field nu must be real-valued");
  if (!is_odd(gauge.nu, pts, 1e-10))
    throw OddFunctionViolation("gauge field nu must be odd: nu(-x) = -nu(x)");
}

std::vector<double> gauge_exponent(const Grid& g, const Expr& nu) {
  std::vector<double> f(g.size());
  for (int j = 0; j < g.N; ++j) f[j] = eval(nu, g.points[j]).real();
  return antiderivative_from_zero(g, f, eval(nu, 0.0).real());
}

ComplexMatrix build_hamiltonian(const Grid& g, const PotentialSpec& V,
                                const std::optional<GaugeSpec>& gauge,
                                const HamiltonianOptions& opts) {
  const auto v = sample_potential(g, V);
  ComplexMatrix H = -diff_matrix(g, 2, opts.accuracy);
  if (!gauge || gauge->beta == 0.0) {
    H += diag(v);
    return H;
  }
  validate(g, *gauge);
  const double beta = gauge->beta;

  if (opts.scheme == GaugeScheme::Similarity) {
    H += diag(v);
    const auto lambda = gauge_exponent(g, gauge->nu);
    for (int i = 0; i < g.N; ++i)
      for (int j = 0; j < g.N; ++j)
        if (H(i, j) != cplx{})
          H(i, j) *= std::exp(beta * (lambda[i] - lambda[j]));
    return H;
  }

  const Expr dnu = derive(gauge->nu);
  const ComplexMatrix D1 = diff_matrix(g, 1, opts.accuracy);
  for (int i = 0; i < g.N; ++i) {
    const double x = g.points[i];
    const double nu = eval(gauge->nu, x).real();
    const double nup = eval(dnu, x).real();
    H.row(i) += 2.0 * beta * nu * D1.row(i);
    H(i, i) += beta * nup - beta * beta * nu * nu + v[i];
  }
  return H;
}

// ---------------------------------------------------------------------------

std::vector<double> eta_weight(const Grid& g, double beta, const Expr& nu) {
  const auto lambda = gauge_exponent(g, nu);
  std::vector<double> w(lambda.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::exp(-2.0 * beta * lambda[j]);
  return w;
}

ComplexMatrix parity_matrix(int N) {
  ComplexMatrix P = ComplexMatrix::Zero(N, N);
  for (int j = 0; j < N; ++j) P(j, N - 1 - j) = 1.0;
  return P;
}

ComplexMatrix build_eta(const Grid& g, const EtaSpec& spec, int accuracy) {
  const int N = g.N;
  return std::visit(
      overloaded{
          [&](const EtaIdentity&) -> ComplexMatrix {
            return ComplexMatrix::Identity(N, N);
          },
          [&](const EtaParity&) -> ComplexMatrix { return parity_matrix(N); },
          [&](const EtaMultiplicative& m) -> ComplexMatrix {
            const auto w = eta_weight(g, m.beta, m.nu);
            return diag(std::vector<cplx>(w.begin(), w.end()));
          },
          [&](const EtaFirstOrder& f) -> ComplexMatrix {
            ComplexMatrix eta = diff_matrix(g, 1, accuracy);
            const auto gv = sample(f.g, g.points);
            for (int j = 0; j < N; ++j) eta(j, j) += cplx{0.0, 1.0} * gv[j];
            return eta;
          },
          [&](const EtaSecondOrder& s) -> ComplexMatrix {
            const auto v = sample_potential(g, s.V);
            const Expr da = derive(s.a);
            const ComplexMatrix D1 = diff_matrix(g, 1, accuracy);
            ComplexMatrix eta = diff_matrix(g, 2, accuracy);
            const cplx I{0.0, 1.0};
            for (int j = 0; j < N; ++j) {
              const double x = g.points[j];
              const cplx a = eval(s.a, x);
              const cplx b = -v[j] + I * eval(da, x) - 2.0 * a * a - s.delta;
              eta.row(j) -= 2.0 * I * a * D1.row(j);
              eta(j, j) += b;
            }
            return eta;
          },
      },
      spec);
}

// ---------------------------------------------------------------------------

std::vector<ComplexVector> default_probes(const Grid& g) {
  const double sigma = g.L / 10.0;
  std::vector<ComplexVector> probes;
  for (double c : {-0.5, -0.25, 0.0, 0.25, 0.5}) {
    ComplexVector w(g.N);
    for (int j = 0; j < g.N; ++j) {
      const double d = g.points[j] - c * g.L;
      w[j] = std::exp(-d * d / (2.0 * sigma * sigma));
    }
    probes.push_back(std::move(w));
  }
  return probes;
}

namespace {

void check_square(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw DimensionMismatch("operators must be square and of equal size");
}

ResidualReport probe_residual(double scale,
                              const std::vector<ComplexVector>& probes,
                              int margin,
                              const std::function<ComplexVector(const ComplexVector&)>& apply) {
  ResidualReport rep;
  if (probes.empty()) return rep;
  const Eigen::Index N = probes.front().size();
  const Eigen::Index len = std::max<Eigen::Index>(0, N - 2 * margin);
  for (const auto& w : probes) {
    if (w.size() != N) throw DimensionMismatch("probe length does not match operator");
    const ComplexVector r = apply(w).segment(margin, len);
    const double denom = scale * w.norm() / std::sqrt(static_cast<double>(N));
    const double res = denom > 0.0 ? r.norm() / denom : r.norm();
    rep.per_probe.push_back(res);
    rep.residual = std::max(rep.residual, res);
    rep.rms_defect =
        std::max(rep.rms_defect, r.norm() / std::sqrt(static_cast<double>(N)));
  }
  return rep;
}

}  // namespace

ResidualReport intertwining_residual(const ComplexMatrix& eta,
                                     const ComplexMatrix& H,
                                     const std::vector<ComplexVector>& probes,
                                     int margin) {
  check_square(eta, H);
  for (const auto& w : probes)
    if (w.size() != H.rows()) throw DimensionMismatch("probe length does not match operator");
  // Every operator here is banded or anti-diagonal; sparse products keep
  // N = 3200 cheap.
  using Sparse = Eigen::SparseMatrix<cplx>;
  const Sparse e = eta.sparseView(), h = H.sparseView();
  const Sparse etaH = e * h;
  const Sparse Hd = h.adjoint();
  return probe_residual(etaH.norm(), probes, margin,
                        [&](const ComplexVector& w) -> ComplexVector {
                          return etaH * w - Hd * (e * w);
                        });
}

std::pair<ComplexMatrix, ComplexMatrix> eta_plus_minus(const ComplexMatrix& eta) {
  if (eta.rows() != eta.cols())
    throw DimensionMismatch("eta must be square");
  const ComplexMatrix ad = eta.adjoint();
  return {eta + ad, eta - ad};
}

std::pair<PotentialSpec, PotentialSpec> susy_pair(const Expr& g, double k) {
  std::vector<double> pts;
  for (int j = -20; j <= 20; ++j) pts.push_back(0.37 * j);
  if (!is_real_valued(g, pts))
    throw InvalidParameter("superpotential generator g must be real-valued");
  const Expr dg = derive(g);
  const Expr base = -Expr::pow(g, 2) + num(k);
  const Expr im_dg = Expr::constant(cplx{0.0, 1.0}) * dg;
  return {CustomPotential{base - im_dg}, CustomPotential{base + im_dg}};
}

FactorizationReport verify_factorization(const Grid& g, const Expr& a,
                                         double gamma, const Expr& r,
                                         const ComplexMatrix& eta,
                                         int accuracy) {
  if (eta.rows() != g.N || eta.cols() != g.N)
    throw DimensionMismatch("eta does not match grid");
  const Expr da = derive(a), dda = derive(da), dr = derive(r);

  FactorizationReport rep;
  for (double x : g.points) {
    const cplx av = eval(a, x);
    if (av == cplx{}) {
      if (gamma != 0.0)
        throw PoleError("a(x) vanishes at x = " + std::to_string(x) +
                        " while gamma != 0");
      continue;
    }
    const cplx q = eval(da, x) / (2.0 * av);
    const cplx rhs = eval(dda, x) / (2.0 * av) - q * q + gamma / (4.0 * av * av);
    const cplx rv = eval(r, x);
    const double defect = std::abs(rv * rv - eval(dr, x) - rhs);
    rep.riccati_defect = std::max(rep.riccati_defect, defect);
  }

  ComplexMatrix O = diff_matrix(g, 1, accuracy);
  const cplx I{0.0, 1.0};
  for (int j = 0; j < g.N; ++j) {
    const double x = g.points[j];
    O(j, j) += eval(r, x) - I * eval(a, x);
  }
  const ComplexMatrix Od = O.adjoint();
  const auto res = probe_residual(eta.norm(), default_probes(g), 4,
                                  [&](const ComplexVector& w) -> ComplexVector {
                                    return eta * w + Od * (O * w);
                                  });
  rep.operator_residual = res.residual;
  rep.rms_defect = res.rms_defect;
  return rep;
}

namespace {

double symmetry_defect(const ComplexMatrix& m, int margin, double sign) {
  const Eigen::Index n = m.rows() - 2 * margin;
  if (n <= 0) return 0.0;
  const ComplexMatrix block = m.block(margin, margin, n, n);
  const double scale = block.norm();
  if (scale == 0.0) return 0.0;
  return (block - sign * block.adjoint()).norm() / scale;
}

}  // namespace

double hermiticity_defect(const ComplexMatrix& m, int margin) {
  return symmetry_defect(m, margin, 1.0);
}

double anti_hermiticity_defect(const ComplexMatrix& m, int margin) {
  return symmetry_defect(m, margin, -1.0);
}

}  // namespace pseudoherm
