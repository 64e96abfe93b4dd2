#include "pseudoherm/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "pseudoherm/error.hpp"
#include "pseudoherm/evolve.hpp"
#include "pseudoherm/inner.hpp"
#include "pseudoherm/spectrum.hpp"

extern "C" void openblas_set_num_threads(int);

namespace pseudoherm::cli {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json cjson(cplx z) { return Json::array({z.real(), z.imag()}); }

Json cjson(const std::vector<cplx>& zs) {
  Json out = Json::array();
  for (const cplx& z : zs) out.push_back(cjson(z));
  return out;
}

void require_finite(std::initializer_list<std::pair<const char*, double>> vals) {
  for (const auto& [name, v] : vals)
    if (!std::isfinite(v))
      throw InvalidParameter(std::string("--") + name + " must be finite");
}

void check_common(const RunConfig& cfg) {
  require_finite({{"L", cfg.L}, {"tol", cfg.tol}, {"A", cfg.A}, {"B", cfg.B},
                  {"d", cfg.d}, {"k", cfg.k}, {"V1", cfg.V1}, {"V2", cfg.V2},
                  {"beta", cfg.beta}, {"gamma", cfg.gamma}, {"delta", cfg.delta},
                  {"move-tol", cfg.move_tol}});
  if (cfg.accuracy != 2 && cfg.accuracy != 4)
    throw InvalidParameter("--accuracy must be 2 or 4");
  if (!(cfg.tol > 0.0)) throw InvalidParameter("--tol must be positive");
  if (!(cfg.move_tol > 0.0)) throw InvalidParameter("--move-tol must be positive");
}

Grid grid_from(const RunConfig& cfg) { return make_grid(cfg.L, cfg.N); }

Json grid_json(const Grid& g, int accuracy) {
  return Json{{"L", g.L}, {"N", g.N}, {"h", g.h}, {"accuracy", accuracy}};
}

std::optional<GaugeSpec> gauge_from(const RunConfig& cfg) {
  if (cfg.beta == 0.0) return std::nullopt;
  return GaugeSpec{cfg.beta, parse(cfg.nu)};
}

GaugeScheme scheme_from(const RunConfig& cfg) {
  if (cfg.scheme == "similarity") return GaugeScheme::Similarity;
  if (cfg.scheme == "expanded") return GaugeScheme::Expanded;
  throw InvalidParameter("--scheme must be similarity or expanded");
}

Json gauge_json(const RunConfig& cfg) {
  if (cfg.beta == 0.0) return nullptr;
  return Json{{"beta", cfg.beta}, {"nu", print(parse(cfg.nu))},
              {"scheme", cfg.scheme}};
}

ComplexMatrix hamiltonian(const RunConfig& cfg, const Grid& g,
                          const PotentialSpec& spec) {
  HamiltonianOptions opts;
  opts.accuracy = cfg.accuracy;
  opts.scheme = scheme_from(cfg);
  return build_hamiltonian(g, spec, gauge_from(cfg), opts);
}

Json potential_json(const RunConfig& cfg, const PotentialSpec& spec) {
  Json j{{"family", cfg.V.empty() ? cfg.family : std::string("expression")}};
  if (!cfg.V.empty()) {
    j["V"] = cfg.V;
  } else if (cfg.family == "scarf2") {
    j["A"] = cfg.A;
    j["B"] = cfg.B;
    const auto c = scarf2_coefficients(cfg.A, cfg.B);
    j["V1"] = c.V1;
    j["V2"] = c.V2;
  } else if (cfg.family == "special-b1") {
    j["A"] = cfg.A;
  } else if (cfg.family == "first-order") {
    j["d"] = cfg.d;
    j["k"] = cfg.k;
  } else if (cfg.family == "scarf-v") {
    j["V1"] = cfg.V1;
    j["V2"] = cfg.V2;
  }
  j["expression"] = print(potential_expr(spec));
  return j;
}

Json levels_json(const LevelSet& s) {
  Json j{{"family", s.family}};
  if (s.family == "first-order") {
    j["d"] = s.A;
    j["k"] = s.B;
  } else if (s.family == "scarf-v") {
    j["V1"] = s.A;
    j["V2"] = s.B;
  } else {
    j["A"] = s.A;
    j["B"] = s.B;
    j["lambda"] = s.lambda;
  }
  j["series1"] = s.series1;
  j["series2"] = s.series2;
  j["reality_ok"] = s.reality_ok;
  j["derived"] = s.derived;
  j["degenerate"] = s.degenerate;
  return j;
}

Json bound_json(const BoundStateReport& b, int refined_N) {
  Json cands = Json::array();
  for (const auto& c : b.candidates)
    cands.push_back(Json{{"coarse", cjson(c.coarse)},
                         {"fine", cjson(c.fine)},
                         {"converged", c.converged}});
  return Json{{"refined_N", refined_N},
              {"move_tol", b.move_tol},
              {"candidates", cands},
              {"bound", cjson(b.bound)},
              {"max_abs_imag", b.max_abs_imag},
              {"real_count", b.real_count()},
              {"pair_count", b.pair_count()},
              {"unpaired_count", b.unpaired_count()}};
}

// Bound states either followed to the 2N grid or, without refinement, every
// eigenvalue with negative real part.
BoundStateReport bound_from(const RunConfig& cfg, const PotentialSpec& spec,
                            const SpectrumReport& coarse) {
  if (cfg.refine) {
    const Grid fine = make_grid(cfg.L, 2 * cfg.N);
    return bound_states(coarse, hamiltonian(cfg, fine, spec), cfg.move_tol,
                        cfg.tol);
  }
  BoundStateReport b;
  for (const cplx& z : coarse.eigenvalues)
    if (z.real() < 0.0) {
      b.candidates.push_back({z, z, true});
      b.bound.push_back(z);
      b.max_abs_imag = std::max(b.max_abs_imag, std::abs(z.imag()));
    }
  b.classification = classify_spectrum(b.bound, cfg.tol);
  return b;
}

EtaSecondOrder second_order_from(const RunConfig& cfg, const PotentialSpec& spec) {
  Expr a;
  if (!cfg.a.empty()) {
    a = parse(cfg.a);
  } else if (cfg.V.empty() &&
             (cfg.family == "scarf2" || cfg.family == "special-b1")) {
    const double B = cfg.family == "scarf2" ? cfg.B : 1.0;
    a = parse(fmt(-0.5 * B * (2.0 * cfg.A + 1.0)) + "*sech(x)");
  } else {
    throw InvalidParameter("second-order eta needs --a for this potential");
  }
  return EtaSecondOrder{a, cfg.gamma, cfg.delta, spec};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidParameter("bad number '" + s + "' in " + what);
  }
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

// Initial state from "eig:n[*c],m[*c],..." (eta-normalized eigenvectors,
// indexed by ascending real part) or "gauss:x0,sigma[,k0]".
class StateBuilder {
public:
  StateBuilder(const Grid& g, const ComplexMatrix& H, std::vector<double> w)
      : g_(g), H_(H), w_(std::move(w)) {}

  WaveFunction build(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
      throw InvalidParameter("state '" + text + "' needs an eig: or gauss: prefix");
    const std::string kind = text.substr(0, colon);
    const auto items = split(text.substr(colon + 1), ',');
    if (kind == "gauss") return gaussian(items, text);
    if (kind != "eig") throw InvalidParameter("unknown state kind '" + kind + "'");
    if (items.empty()) throw InvalidParameter("state '" + text + "' lists no indices");
    ComplexVector sum = ComplexVector::Zero(g_.N);
    for (const auto& raw : items) {
      const auto parts = split(trim(raw), '*');
      if (parts.empty() || parts.size() > 2)
        throw InvalidParameter("bad eigenvector term '" + raw + "'");
      const double idx = parse_number(trim(parts[0]), text);
      const double coef = parts.size() == 2 ? parse_number(trim(parts[1]), text) : 1.0;
      if (idx < 0 || idx != std::floor(idx))
        throw InvalidParameter("eigenvector index must be a nonnegative integer");
      sum += coef * eigenvector(static_cast<int>(idx)).values;
    }
    return WaveFunction(g_, sum);
  }

private:
  WaveFunction gaussian(const std::vector<std::string>& items,
                        const std::string& text) {
    if (items.size() < 2 || items.size() > 3)
      throw InvalidParameter("gauss: expects x0,sigma[,k0]");
    const double x0 = parse_number(trim(items[0]), text);
    const double sigma = parse_number(trim(items[1]), text);
    const double k0 = items.size() == 3 ? parse_number(trim(items[2]), text) : 0.0;
    if (!(sigma > 0.0)) throw InvalidParameter("gaussian width must be positive");
    ComplexVector v(g_.N);
    for (int j = 0; j < g_.N; ++j) {
      const double d = g_.points[j] - x0;
      v[j] = std::exp(-d * d / (2.0 * sigma * sigma)) *
             std::polar(1.0, k0 * g_.points[j]);
    }
    v /= std::sqrt(g_.h) * v.norm();
    return WaveFunction(g_, v);
  }

  WaveFunction eigenvector(int n) {
    if (!values_) values_ = eig(H_, false).eigenvalues;
    if (n >= static_cast<int>(values_->size()))
      throw InvalidParameter("eigenvector index out of range");
    const Eigenpair p = eigenpair_near(H_, (*values_)[n]);
    return normalize_pseudo(g_, w_, WaveFunction(g_, p.vector));
  }

  const Grid& g_;
  const ComplexMatrix& H_;
  std::vector<double> w_;
  std::optional<std::vector<cplx>> values_;
};

void set_param(RunConfig& cfg, const std::string& name, double v) {
  if (name == "A") cfg.A = v;
  else if (name == "B") cfg.B = v;
  else if (name == "d") cfg.d = v;
  else if (name == "k") cfg.k = v;
  else if (name == "V1") cfg.V1 = v;
  else if (name == "V2") cfg.V2 = v;
  else if (name == "beta") cfg.beta = v;
  else throw InvalidParameter("unknown sweep parameter '" + name + "'");
}

bool family_has_param(const RunConfig& cfg, const std::string& name) {
  if (name == "beta") return true;
  if (!cfg.V.empty()) return false;
  if (cfg.family == "scarf2") return name == "A" || name == "B";
  if (cfg.family == "special-b1") return name == "A";
  if (cfg.family == "first-order") return name == "d" || name == "k";
  if (cfg.family == "scarf-v") return name == "V1" || name == "V2";
  return false;
}

struct SweepRow {
  double value = 0.0;
  double max_abs_imag = 0.0;
  int real_count = 0, pair_count = 0, unpaired_count = 0, bound_count = 0;
  std::string error;
  std::exception_ptr failure;
};

SweepRow sweep_row(RunConfig cfg, double value) {
  SweepRow row;
  row.value = value;
  try {
    set_param(cfg, cfg.param, value);
    const PotentialSpec spec = potential_from(cfg);
    const Grid g = grid_from(cfg);
    const SpectrumReport rep = eig(hamiltonian(cfg, g, spec), false, cfg.tol);
    const BoundStateReport b = bound_from(cfg, spec, rep);
    row.max_abs_imag = b.max_abs_imag;
    row.real_count = b.real_count();
    row.pair_count = b.pair_count();
    row.unpaired_count = b.unpaired_count();
    row.bound_count = static_cast<int>(b.bound.size());
  } catch (const Error& e) {
    row.error = e.what();
    row.failure = std::current_exception();
  }
  return row;
}

int exit_code(const Error& e) {
  switch (e.category()) {
    case Error::Category::Config: return 2;
    case Error::Category::Solver: return 3;
    case Error::Category::Numerical: return 4;
  }
  return 3;
}

Json error_context(const Error& e, const std::string& subcommand) {
  Json ctx{{"subcommand", subcommand}};
  if (const auto* p = dynamic_cast<const ParseError*>(&e)) ctx["position"] = p->position();
  if (const auto* d = dynamic_cast<const DomainError*>(&e)) ctx["subterm"] = d->subterm();
  if (const auto* c = dynamic_cast<const ConvergenceError*>(&e)) ctx["unconverged"] = c->unconverged();
  if (const auto* n = dynamic_cast<const NonFiniteState*>(&e)) ctx["last_valid_step"] = n->last_valid_step();
  return ctx;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidParameter("cannot open '" + path + "' for writing");
  f << text;
}

}  // namespace

PotentialSpec potential_from(const RunConfig& cfg) {
  PotentialSpec spec;
  if (!cfg.V.empty()) spec = CustomPotential{parse(cfg.V)};
  else if (cfg.family == "scarf2") spec = ScarfII{cfg.A, cfg.B};
  else if (cfg.family == "special-b1") spec = SpecialB1{cfg.A};
  else if (cfg.family == "first-order") {
    if (!(cfg.d > 0.5))
      throw ConstraintViolation("first-order family needs d > 1/2 for bound states");
    spec = FirstOrderFamily{cfg.d, cfg.k};
  } else if (cfg.family == "scarf-v") spec = ScarfV{cfg.V1, cfg.V2};
  else throw InvalidParameter("unknown family '" + cfg.family + "'");
  validate(spec);
  return spec;
}

std::optional<LevelSet> levels_from(const RunConfig& cfg) {
  if (!cfg.V.empty()) return std::nullopt;
  if (cfg.family == "scarf2") return scarf2_levels(cfg.A, cfg.B);
  if (cfg.family == "special-b1") return scarf2_levels(cfg.A, 1.0);
  if (cfg.family == "first-order") return first_order_levels(cfg.d, cfg.k);
  if (cfg.family == "scarf-v") return scarf_v_levels(cfg.V1, cfg.V2);
  throw InvalidParameter("unknown family '" + cfg.family + "'");
}

std::vector<double> sweep_values(const RunConfig& cfg) {
  require_finite({{"start", cfg.start}, {"stop", cfg.stop}, {"step", cfg.step}});
  if (!family_has_param(cfg, cfg.param))
    throw InvalidParameter("sweep parameter '" + cfg.param +
                           "' is not a parameter of the selected potential");
  if (!(cfg.step > 0.0) || cfg.stop < cfg.start)
    throw InvalidParameter("empty sweep range");
  const long count =
      static_cast<long>(std::floor((cfg.stop - cfg.start) / cfg.step + 1e-9)) + 1;
  std::vector<double> vals;
  for (long i = 0; i < count; ++i)
    vals.push_back(cfg.start + static_cast<double>(i) * cfg.step);
  return vals;
}

Json cmd_spectrum(const RunConfig& cfg) {
  check_common(cfg);
  const std::optional<LevelSet> levels = levels_from(cfg);
  const PotentialSpec spec = potential_from(cfg);
  const Grid g = grid_from(cfg);
  const SpectrumReport rep = eig(hamiltonian(cfg, g, spec), false, cfg.tol);

  Json j{{"subcommand", "spectrum"},
         {"grid", grid_json(g, cfg.accuracy)},
         {"potential", potential_json(cfg, spec)},
         {"gauge", gauge_json(cfg)},
         {"pt_symmetric", is_pt_symmetric(g, spec)},
         {"tol", cfg.tol},
         {"eigenvalues", cjson(rep.eigenvalues)},
         {"classification",
          {{"real", rep.classification.count(SpectralTag::Real)},
           {"pair_members", rep.classification.count(SpectralTag::PairMember)},
           {"unpaired", rep.classification.count(SpectralTag::Unpaired)}}}};

  const BoundStateReport b = bound_from(cfg, spec, rep);
  j["bound_states"] = bound_json(b, cfg.refine ? 2 * cfg.N : cfg.N);

  if (levels) {
    Json lj = levels_json(*levels);
    Json devs = Json::array();
    double worst = 0.0;
    for (double e : levels->all()) {
      Json dj{{"level", e}};
      if (b.bound.empty()) {
        dj["nearest"] = nullptr;
        dj["abs_deviation"] = nullptr;
      } else {
        const auto it = std::min_element(
            b.bound.begin(), b.bound.end(), [&](cplx u, cplx v) {
              return std::abs(u - e) < std::abs(v - e);
            });
        const double dev = std::abs(*it - e);
        worst = std::max(worst, dev);
        dj["nearest"] = cjson(*it);
        dj["abs_deviation"] = dev;
      }
      devs.push_back(dj);
    }
    lj["deviations"] = devs;
    lj["max_abs_deviation"] = b.bound.empty() && !devs.empty() ? Json(nullptr) : Json(worst);
    lj["count_matches"] =
        static_cast<std::size_t>(b.bound.size()) == levels->all().size();
    j["levels"] = lj;
  }
  return j;
}

Json cmd_verify_eta(const RunConfig& cfg) {
  check_common(cfg);
  const PotentialSpec spec = potential_from(cfg);
  const Grid g = grid_from(cfg);
  const ComplexMatrix H = hamiltonian(cfg, g, spec);

  ComplexMatrix eta = ComplexMatrix::Zero(g.N, g.N);
  std::optional<EtaSecondOrder> second;
  Json terms = Json::array();
  for (const auto& raw : split(cfg.eta, '+')) {
    const std::string term = trim(raw);
    EtaSpec es;
    Json tj{{"kind", term}};
    if (term == "identity") es = EtaIdentity{};
    else if (term == "parity") es = EtaParity{};
    else if (term == "multiplicative") {
      if (cfg.beta == 0.0) throw InvalidParameter("multiplicative eta needs --beta");
      es = EtaMultiplicative{cfg.beta, parse(cfg.nu)};
      tj["beta"] = cfg.beta;
      tj["nu"] = print(parse(cfg.nu));
    } else if (term == "first-order") {
      es = EtaFirstOrder{parse(cfg.g)};
      tj["g"] = print(parse(cfg.g));
    } else if (term == "second-order") {
      second = second_order_from(cfg, spec);
      es = *second;
      tj["a"] = print(second->a);
      tj["gamma"] = cfg.gamma;
      tj["delta"] = cfg.delta;
    } else {
      throw InvalidParameter("unknown eta term '" + term + "'");
    }
    eta += build_eta(g, es, cfg.accuracy);
    terms.push_back(tj);
  }
  if (terms.empty()) throw InvalidParameter("--eta names no terms");

  const auto probes = default_probes(g);
  const ResidualReport res = intertwining_residual(eta, H, probes);
  const auto [plus, minus] = eta_plus_minus(eta);
  const ResidualReport rp = intertwining_residual(plus, H, probes);
  const ResidualReport rm = intertwining_residual(minus, H, probes);

  auto report = [](const ResidualReport& r) {
    return Json{{"residual", r.residual},
                {"per_probe", r.per_probe},
                {"rms_defect", r.rms_defect}};
  };
  Json j{{"subcommand", "verify-eta"},
         {"grid", grid_json(g, cfg.accuracy)},
         {"potential", potential_json(cfg, spec)},
         {"gauge", gauge_json(cfg)},
         {"eta", terms},
         {"intertwining", report(res)},
         {"hermiticity_defect", hermiticity_defect(eta, 4)},
         {"anti_hermiticity_defect", anti_hermiticity_defect(eta, 4)},
         {"eta_plus", report(rp)},
         {"eta_minus", report(rm)}};

  if (!cfg.r.empty()) {
    if (!second) throw InvalidParameter("--r needs a second-order eta term");
    const ComplexMatrix eta2 = build_eta(g, *second, cfg.accuracy);
    const FactorizationReport f =
        verify_factorization(g, second->a, cfg.gamma, parse(cfg.r), eta2, cfg.accuracy);
    j["factorization"] = Json{{"r", print(parse(cfg.r))},
                              {"operator_residual", f.operator_residual},
                              {"rms_defect", f.rms_defect},
                              {"riccati_defect", f.riccati_defect}};
  }
  return j;
}

std::string cmd_sweep(const RunConfig& cfg) {
  check_common(cfg);
  const std::vector<double> values = sweep_values(cfg);
  std::vector<SweepRow> rows(values.size());

  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(values.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++)
      rows[i] = sweep_row(cfg, values[i]);
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const bool any_ok = std::any_of(rows.begin(), rows.end(),
                                  [](const SweepRow& r) { return !r.failure; });
  if (!any_ok) std::rethrow_exception(rows.front().failure);

  std::string csv = "value,max_abs_imag,real_count,pair_count,unpaired_count,bound_count,error\n";
  for (const auto& r : rows) {
    csv += fmt(r.value) + ",";
    if (r.failure) {
      csv += ",,,,," + csv_quote(r.error) + "\n";
      continue;
    }
    csv += fmt(r.max_abs_imag) + "," + std::to_string(r.real_count) + "," +
           std::to_string(r.pair_count) + "," + std::to_string(r.unpaired_count) +
           "," + std::to_string(r.bound_count) + ",\n";
  }
  return csv;
}

Json cmd_evolve(const RunConfig& cfg, std::string& trace_csv) {
  check_common(cfg);
  require_finite({{"T", cfg.T}, {"dt", cfg.dt}});
  if (cfg.weight != "eta" && cfg.weight != "one")
    throw InvalidParameter("--weight must be eta or one");
  const PotentialSpec spec = potential_from(cfg);
  const Grid g = grid_from(cfg);
  const ComplexMatrix H = hamiltonian(cfg, g, spec);

  const std::vector<double> w_eta =
      cfg.beta == 0.0 ? unit_weight(g) : eta_weight(g, cfg.beta, parse(cfg.nu));
  const std::vector<double> w = cfg.weight == "eta" ? w_eta : unit_weight(g);

  StateBuilder states(g, H, w_eta);
  const WaveFunction psi1 = states.build(cfg.psi1);
  const WaveFunction psi2 = cfg.psi2.empty() ? psi1 : states.build(cfg.psi2);

  const EvolutionTrace tr = run(H, g, w, psi1, psi2, cfg.T, cfg.dt);

  Json flags = Json::array();
  if (cfg.weight == "one" && cfg.beta != 0.0) flags.push_back("mismatched-metric");
  Json j{{"subcommand", "evolve"},
         {"grid", grid_json(g, cfg.accuracy)},
         {"potential", potential_json(cfg, spec)},
         {"gauge", gauge_json(cfg)},
         {"weight", cfg.weight},
         {"psi1", cfg.psi1},
         {"psi2", cfg.psi2.empty() ? cfg.psi1 : cfg.psi2},
         {"T", cfg.T},
         {"dt", cfg.dt},
         {"steps", tr.times.size() - 1},
         {"Q0", cjson(tr.Q.front())},
         {"Q_final", cjson(tr.Q.back())},
         {"max_drift", tr.max_drift()},
         {"max_continuity_defect", tr.max_residual()},
         {"flags", flags}};

  trace_csv = "t,re_Q,im_Q,defect\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    trace_csv += fmt(tr.times[i]) + "," + fmt(tr.Q[i].real()) + "," +
                 fmt(tr.Q[i].imag()) + "," + fmt(tr.continuity_residual[i]) + "\n";
  return j;
}

Json cmd_levels(const RunConfig& cfg) {
  check_common(cfg);
  const std::optional<LevelSet> levels = levels_from(cfg);
  if (!levels) throw InvalidParameter("levels need a named --family, not --V");
  Json j{{"subcommand", "levels"}, {"levels", levels_json(*levels)}};
  if (cfg.family == "scarf2" || cfg.family == "special-b1") {
    const double B = cfg.family == "scarf2" ? cfg.B : 1.0;
    const auto c = scarf2_coefficients(cfg.A, B);
    const RealityCheck rc = reality_condition(c.V1, c.V2);
    j["coefficients"] = Json{{"V1", c.V1}, {"V2", c.V2}};
    j["reality"] = Json{{"ok", rc.ok},
                        {"margin", rc.margin},
                        {"square_identity", reality_margin(cfg.A, B)}};
  } else if (cfg.family == "scarf-v") {
    const RealityCheck rc = reality_condition(cfg.V1, cfg.V2);
    j["reality"] = Json{{"ok", rc.ok}, {"margin", rc.margin}};
  }
  return j;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  openblas_set_num_threads(1);
  RunConfig cfg;
  CLI::App app{"Pseudo-Hermitian Hamiltonians on a finite-difference grid"};
  app.require_subcommand(1);

  auto add_grid = [&](CLI::App* s) {
    s->add_option("--L", cfg.L, "half-width of the box [-L, L]");
    s->add_option("--N", cfg.N, "interior grid points");
    s->add_option("--accuracy", cfg.accuracy, "finite-difference accuracy (2 or 4)");
    s->add_option("--tol", cfg.tol, "relative tolerance for real / paired eigenvalues");
    s->add_option("--out", cfg.out, "also write the report to this file");
  };
  auto add_potential = [&](CLI::App* s) {
    s->add_option("--family", cfg.family, "scarf2 | special-b1 | first-order | scarf-v");
    s->add_option("--A", cfg.A);
    s->add_option("--B", cfg.B);
    s->add_option("--d", cfg.d);
    s->add_option("--k", cfg.k);
    s->add_option("--V1", cfg.V1);
    s->add_option("--V2", cfg.V2);
    s->add_option("--V", cfg.V, "potential as an expression in x (overrides --family)");
    s->add_option("--beta", cfg.beta, "gauge strength");
    s->add_option("--nu", cfg.nu, "odd real gauge field");
    s->add_option("--scheme", cfg.scheme, "similarity | expanded");
  };
  auto add_bound = [&](CLI::App* s) {
    s->add_flag("!--no-refine", cfg.refine, "skip the 2N grid comparison");
    s->add_option("--move-tol", cfg.move_tol, "max eigenvalue shift on the 2N grid");
  };

  CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues and bound states");
  add_grid(spectrum);
  add_potential(spectrum);
  add_bound(spectrum);

  CLI::App* verify = app.add_subcommand("verify-eta", "check eta H = H^dagger eta");
  add_grid(verify);
  add_potential(verify);
  verify->add_option("--eta", cfg.eta, "'+'-separated terms: identity parity multiplicative first-order second-order");
  verify->add_option("--g", cfg.g, "g(x) of the first-order eta");
  verify->add_option("--a", cfg.a, "a(x) of the second-order eta");
  verify->add_option("--gamma", cfg.gamma);
  verify->add_option("--delta", cfg.delta);
  verify->add_option("--r", cfg.r, "r(x) for the factorization check");

  CLI::App* sweep = app.add_subcommand("sweep", "bound-state reality over a parameter range");
  add_grid(sweep);
  add_potential(sweep);
  add_bound(sweep);
  sweep->add_option("--param", cfg.param, "parameter to vary");
  sweep->add_option("--start", cfg.start);
  sweep->add_option("--stop", cfg.stop);
  sweep->add_option("--step", cfg.step);
  sweep->add_option("--jobs", cfg.jobs, "worker threads");

  CLI::App* evolve = app.add_subcommand("evolve", "time evolution and the conservation law");
  add_grid(evolve);
  add_potential(evolve);
  evolve->add_option("--T", cfg.T);
  evolve->add_option("--dt", cfg.dt);
  evolve->add_option("--psi1", cfg.psi1, "eig:n[*c],... or gauss:x0,sigma[,k0]");
  evolve->add_option("--psi2", cfg.psi2, "defaults to --psi1");
  evolve->add_option("--weight", cfg.weight, "eta | one");
  evolve->add_option("--trace", cfg.trace, "write the time series CSV here");

  CLI::App* levels = app.add_subcommand("levels", "closed-form bound-state energies");
  add_grid(levels);
  add_potential(levels);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << Json{{"code", 2}, {"message", e.what()}, {"context", {{"stage", "arguments"}}}}.dump()
        << "\n";
    return 2;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();

  try {
    std::string text;
    if (cfg.subcommand == "sweep") {
      text = cmd_sweep(cfg);
    } else {
      Json report;
      if (cfg.subcommand == "spectrum") report = cmd_spectrum(cfg);
      else if (cfg.subcommand == "verify-eta") report = cmd_verify_eta(cfg);
      else if (cfg.subcommand == "levels") report = cmd_levels(cfg);
      else {
        std::string csv;
        report = cmd_evolve(cfg, csv);
        if (!cfg.trace.empty()) write_file(cfg.trace, csv);
      }
      text = report.dump(2) + "\n";
    }
    out << text;
    if (!cfg.out.empty()) write_file(cfg.out, text);
    return 0;
  } catch (const Error& e) {
    err << Json{{"code", exit_code(e)}, {"message", e.what()},
                {"context", error_context(e, cfg.subcommand)}}.dump()
        << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    err << Json{{"code", 3}, {"message", e.what()},
                {"context", {{"subcommand", cfg.subcommand}}}}.dump()
        << "\n";
    return 3;
  }
}

}  // namespace pseudoherm::cli
