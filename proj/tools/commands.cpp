#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "qmlab/analysis.hpp"
#include "qmlab/error.hpp"
#include "qmlab/quantization.hpp"
#include "qmlab/quasimodes.hpp"
#include "qmlab/reduction.hpp"
#include "qmlab/symbol_text.hpp"

namespace qmlab::cli {

namespace {

std::string pass_text(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string p_text(double p) { return std::isinf(p) ? "inf" : format_number(p); }

PhasePoint base_point(const RunConfig& c) { return make_phase_point(c.x, c.xi); }

int run_delta(const RunConfig& c, std::ostream& data) {
  data << format_number(delta_exponent(c.n, c.p, c.r)) << '\n';
  return kOk;
}

int run_admissibility(const RunConfig& c, std::ostream& data, std::ostream& verdicts) {
  const AdmissibilityReport rep = check_admissibility(c.symbols, base_point(c), c.tols);
  data << "gradient norms:";
  for (double g : rep.gradient_norms) data << ' ' << format_number(g);
  data << "\nnormal min singular value: " << format_number(rep.normal_min_singular_value) << '\n';
  data << "sign convention: " << rep.sign_convention << '\n';
  data << "second fundamental form:";
  for (double v : rep.second_fundamental_form) data << ' ' << format_number(v);
  data << '\n';
  static const char* names[3] = {"smooth level sets", "independent normals",
                                 "definite second fundamental form"};
  for (int i = 0; i < 3; ++i) {
    verdicts << "condition " << i + 1 << " (" << names[i] << "): " << to_string(rep.passes[i])
             << '\n';
  }
  return rep.all_pass() ? kOk : kCheckFailed;
}

int run_reduce(const RunConfig& c, std::ostream& data, std::ostream& verdicts) {
  ReduceOptions o;
  o.coordinate_change = c.coordinate_change;
  o.project_base = c.project_base;
  o.tols = c.tols;
  o.graph.half_width = c.box;
  const ReductionTrace trace = reduce_all(c.symbols, base_point(c), o);
  write_trace_report(data, trace);
  verdicts << "initial certificate: " << pass_text(trace.initial_certificate.passes) << '\n';
  for (std::size_t s = 0; s < trace.stages.size(); ++s) {
    verdicts << "stage " << s + 1 << " certificate: "
             << pass_text(trace.stages[s].certificate.passes) << '\n';
  }
  for (const auto& w : trace.warnings) verdicts << "WARN " << w << '\n';
  return trace.success ? kOk : kCheckFailed;
}

int run_defect(const RunConfig& c, std::ostream& data, std::ostream& verdicts) {
  QuasimodeSpec spec = c.quasimode;
  const int N = c.grid_points.value_or(grid_points_for(spec.lambda, 8.0));
  const TorusGrid grid(spec.n, N);
  const Quasimode q = build_quasimode(grid, spec);
  const bool x_free = std::none_of(c.symbols.begin(), c.symbols.end(),
                                   [](const Symbol& s) { return s.depends_on_x(); });
  DefectOptions o;
  if (c.route == "frequency") {
    o.operator_route = false;
  } else if (c.route == "auto") {
    o.operator_route = !x_free;
  }
  const DefectReport rep = defect_report(c.symbols, q, c.kmax, o);

  for (std::size_t j = 0; j < c.symbols.size(); ++j) data << 'k' << j + 1 << ',';
  data << "defect,exact,window_sup,normalized\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& e : rep.entries) {
    for (int v : e.k) data << v << ',';
    data << opt(e.defect) << ',' << opt(e.exact) << ',' << opt(e.window_sup) << ','
         << format_number(e.normalized(rep.h)) << '\n';
  }

  verdicts << "grid N=" << N << " h=" << format_number(q.h);
  if (q.window) verdicts << " window points=" << q.window->size();
  verdicts << '\n';
  if (c.check == "strong") {
    const double wh = spec.W * q.h;
    const double base = 2 * wh + wh * wh;
    bool ok = true;
    double worst = 0.0;
    for (const auto& e : rep.entries) {
      int total = 0;
      for (int v : e.k) total += v;
      if (total == 0) continue;
      const double bound = std::pow(base, total);
      for (const auto& v : {e.defect, e.exact, e.window_sup}) {
        if (!v) continue;
        worst = std::max(worst, *v / bound);
        ok = ok && *v <= bound * (1 + 1e-12);
      }
    }
    verdicts << "strong quasimode bound: " << pass_text(ok)
             << " worst ratio=" << format_number(worst) << '\n';
    return ok ? kOk : kCheckFailed;
  }
  return kOk;
}

Symbol random_pair_symbol(int n, int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> axis(0, n - 1);
  std::uniform_int_distribution<int> deg(0, degree);
  Symbol s(n);
  for (int t = 0; t < 4; ++t) {
    MultiIndex bx(static_cast<std::size_t>(n), 0), ba(static_cast<std::size_t>(n), 0);
    const int ex = deg(rng), ea = deg(rng);
    for (int i = 0; i < ex; ++i) ++bx[static_cast<std::size_t>(axis(rng))];
    for (int i = 0; i < ea; ++i) ++ba[static_cast<std::size_t>(axis(rng))];
    s.add_term(coef(rng), bx, ba);
  }
  return s;
}

int run_compose(const RunConfig& c, std::uint64_t seed, std::ostream& data,
                std::ostream& verdicts) {
  std::vector<std::pair<Symbol, Symbol>> pairs;
  if (c.symbols.size() == 2) {
    pairs.emplace_back(c.symbols[0], c.symbols[1]);
  } else {
    std::mt19937_64 rng(seed);
    for (int i = 0; i < c.random_pairs; ++i) {
      Symbol p = random_pair_symbol(c.n, c.degree, rng);
      Symbol q = random_pair_symbol(c.n, c.degree, rng);
      pairs.emplace_back(std::move(p), std::move(q));
    }
  }

  data << "pair,h,N,composition_error,commutator_defect\n";
  double worst_comp = 0.0;
  double worst_slope = -kInfinity;
  int fitted = 0;
  std::vector<std::string> notes;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [p, q] = pairs[i];
    const CompositionExpansion e = moyal_compose(p, q, 64);
    std::vector<std::pair<double, double>> pts;
    double largest = 0.0;
    for (double h : c.h_list) {
      const TorusGrid grid = wave_packet_grid(c.n, c.xi0, h);
      const GridFunction u = make_wave_packet(grid, c.xi0, h, c.sigma);
      const GridFunction lhs = apply_operator(p, apply_operator(q, u, h), h);
      const GridFunction rhs = apply_expansion(e, u, h);
      const double comp = (lhs - rhs).l2_norm() / u.l2_norm();
      const double comm = commutator_defect(p, q, u, h);
      worst_comp = std::max(worst_comp, comp);
      largest = std::max(largest, comm);
      if (comm > 0.0) pts.emplace_back(std::log(1.0 / h), std::log(comm));
      data << i + 1 << ',' << format_number(h) << ',' << grid.points_per_axis() << ','
           << format_number(comp) << ',' << format_number(comm) << '\n';
    }
    std::string note = "# pair " + std::to_string(i + 1) + ": p = " + format_symbol(p) +
                       "; q = " + format_symbol(q);
    if (largest > 1e-12 && pts.size() == c.h_list.size() && pts.size() >= 2) {
      const double slope = fit_exponent(pts).slope;
      worst_slope = std::max(worst_slope, slope);
      ++fitted;
      note += "; slope = " + format_number(slope);
    } else {
      note += "; commuting";
    }
    notes.push_back(note);
  }
  for (const auto& n : notes) data << n << '\n';

  const bool comp_ok = worst_comp <= c.composition_tol;
  const bool slope_ok = fitted == 0 || worst_slope <= c.max_slope;
  verdicts << "composition: " << pass_text(comp_ok) << " max error=" << format_number(worst_comp)
           << " tol=" << format_number(c.composition_tol) << '\n';
  verdicts << "commutator scaling: " << pass_text(slope_ok) << " pairs fitted=" << fitted;
  if (fitted > 0) verdicts << " worst slope=" << format_number(worst_slope);
  verdicts << " limit=" << format_number(c.max_slope) << '\n';
  return comp_ok && slope_ok ? kOk : kCheckFailed;
}

int run_sweep_command(const RunConfig& c, int threads, std::ostream& data,
                      std::ostream& verdicts) {
  SweepOptions o;
  o.grid = c.grid;
  o.upper_tolerance = c.upper_tolerance;
  o.saturation_tolerance = c.saturation_tolerance;
  o.threads = threads;
  const SweepReport rep = run_sweep(c.quasimode, c.symbols, c.p_list, c.lambdas, o);
  write_sweep_csv(data, rep);
  for (const auto& r : rep.results) {
    verdicts << "p=" << p_text(r.p) << " slope=" << format_number(r.fit.slope)
             << " delta=" << format_number(r.expected);
    if (r.two_sided) verdicts << " prediction=" << format_number(*r.family_prediction);
    verdicts << " margin=" << format_number(r.margin) << ' ' << pass_text(r.passes()) << '\n';
  }
  return rep.passes() ? kOk : kCheckFailed;
}

int code_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_argument: return kUsage;
    case ErrorKind::precondition: return kPrecondition;
    case ErrorKind::check_failed: return kCheckFailed;
  }
  return kCheckFailed;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int dispatch(const RunConfig& cfg, const CommandOptions& opts, std::ostream& data,
             std::ostream& verdicts) {
  require(opts.threads >= 1, ErrorKind::invalid_argument, "--threads must be >= 1");
  const std::uint64_t seed = opts.seed.value_or(cfg.seed);
  if (cfg.command == "delta") return run_delta(cfg, data);
  if (cfg.command == "admissibility") return run_admissibility(cfg, data, verdicts);
  if (cfg.command == "reduce") return run_reduce(cfg, data, verdicts);
  if (cfg.command == "defect") return run_defect(cfg, data, verdicts);
  if (cfg.command == "compose-check") return run_compose(cfg, seed, data, verdicts);
  if (cfg.command == "sweep") return run_sweep_command(cfg, opts.threads, data, verdicts);
  fail(ErrorKind::invalid_argument, "unknown command '" + cfg.command + "'");
}

int run_cli_command(const std::string& command, const std::string& config_path,
                    const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream in(config_path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::invalid_argument,
            "cannot read config file '" + config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const RunConfig cfg = parse_config(buf.str(), command);

    if (!opts.output) return dispatch(cfg, opts, out, out);
    // Data goes to the file only once the run has succeeded as a whole.
    std::ostringstream data;
    const int code = dispatch(cfg, opts, data, out);
    std::ofstream file(*opts.output, std::ios::binary);
    require(static_cast<bool>(file), ErrorKind::invalid_argument,
            "cannot write output file '" + *opts.output + "'");
    file << data.str();
    return code;
  } catch (const Error& e) {
    const int code = code_of(e.kind());
    err << "ERROR " << code << ": " << one_line(e.what()) << '\n';
    return code;
  } catch (const std::exception& e) {
    err << "ERROR " << kCheckFailed << ": " << one_line(e.what()) << '\n';
    return kCheckFailed;
  }
}

}  // namespace qmlab::cli
