#include "qmlab/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

#include <json.hpp>

#include "qmlab/error.hpp"
#include "qmlab/symbol_text.hpp"

namespace qmlab {

double lp_norm(const GridFunction& u, double p) {
  require(p >= 1.0, ErrorKind::invalid_argument, "lp_norm: p must be >= 1");
  double m = 0.0;
  for (const Complex& z : u.values()) m = std::max(m, std::abs(z));
  if (std::isinf(p) || m == 0.0) return m;
  // Scaled by the maximum so large p cannot overflow.
  double s = 0.0;
  for (const Complex& z : u.values()) s += std::pow(std::abs(z) / m, p);
  return m * std::pow(s * u.grid().cell_volume(), 1.0 / p);
}

double critical_p(int n, int r) {
  require(n >= 2 && r >= 1, ErrorKind::invalid_argument, "critical_p: need n >= 2, r >= 1");
  require(r < n, ErrorKind::invalid_argument, "critical_p: needs r < n");
  return 2.0 * (n - r + 2) / (n - r);
}

double delta_exponent(const ExponentQuery& q) {
  require(q.n >= 2, ErrorKind::invalid_argument, "delta: n must be >= 2");
  require(q.r >= 1 && q.r <= q.n, ErrorKind::invalid_argument, "delta: r must satisfy 1 <= r <= n");
  require(q.p >= 2.0, ErrorKind::invalid_argument, "delta: p must be >= 2");
  if (q.r == q.n) return 0.0;
  const double m = q.n - q.r;
  if (std::isinf(q.p)) return m / 2.0;
  if (q.p >= critical_p(q.n, q.r)) return m / 2.0 - (m + 1.0) / q.p;
  return m / 4.0 - m / (2.0 * q.p);
}

double sogge_delta(int n, double p) {
  require(n >= 2, ErrorKind::invalid_argument, "sogge delta: n must be >= 2");
  require(p >= 2.0, ErrorKind::invalid_argument, "sogge delta: p must be >= 2");
  const double d = n;
  if (std::isinf(p)) return (d - 1.0) / 2.0;
  if (p >= 2.0 * (d + 1.0) / (d - 1.0)) return (d - 1.0) / 2.0 - d / p;
  return (d - 1.0) / 4.0 - (d - 1.0) / (2.0 * p);
}

LinearFit fit_exponent(std::span<const std::pair<double, double>> points) {
  require(points.size() >= 2, ErrorKind::invalid_argument, "fit: need at least two points");
  const double m = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  require(sxx > 1e-300 * std::max(1.0, mx * mx), ErrorKind::invalid_argument,
          "fit: abscissae are degenerate");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (const auto& [x, y] : points) {
    const double e = y - (f.intercept + f.slope * x);
    ss += e * e;
  }
  f.rms = std::sqrt(ss / m);
  return f;
}

// ---------------------------------------------------------------------------

std::optional<double> family_exponent(const QuasimodeSpec& spec, double p) {
  QuasimodeKind kind = spec.kind;
  int d = spec.n;
  if (kind == QuasimodeKind::tensor_joint) {
    kind = spec.inner;
    d = spec.n - spec.r + 1;
  }
  const double dd = d;
  switch (kind) {
    case QuasimodeKind::plane_wave:
      return 0.0;
    case QuasimodeKind::cluster: {
      if (std::isinf(p)) return (dd - 1.0) / 2.0;
      if (d < 2 || p < 2.0 * (dd + 1.0) / (dd - 1.0)) return std::nullopt;
      return (dd - 1.0) / 2.0 - dd / p;
    }
    case QuasimodeKind::knapp:
      if (std::isinf(p)) return (dd - 1.0) / 4.0;
      return (dd - 1.0) / 4.0 - (dd - 1.0) / (2.0 * p);
    default:
      return std::nullopt;
  }
}

bool SweepReport::passes() const {
  return std::all_of(results.begin(), results.end(), [](const SweepResult& r) { return r.passes(); });
}

namespace {

struct LambdaSample {
  double l2 = 0.0;
  std::vector<double> lp;
  std::vector<double> defects;
};

LambdaSample sample_lambda(const QuasimodeSpec& tmpl, const std::vector<Symbol>& syms,
                           const std::vector<double>& p_list, double lambda,
                           const GridPolicy& policy) {
  QuasimodeSpec spec = tmpl;
  spec.lambda = lambda;
  const int N = grid_points_for(lambda, policy.factor);
  require(N <= policy.max_points, ErrorKind::precondition,
          "grid of " + std::to_string(N) + " points per axis exceeds the limit " +
              std::to_string(policy.max_points));
  const TorusGrid grid(spec.n, N);
  const Quasimode q = build_quasimode(grid, spec);

  LambdaSample s;
  s.l2 = q.u.l2_norm();
  for (double p : p_list) s.lp.push_back(lp_norm(q.u, p));
  if (!syms.empty()) {
    const bool x_free = std::none_of(syms.begin(), syms.end(),
                                     [](const Symbol& sym) { return sym.depends_on_x(); });
    DefectOptions dopt;
    dopt.operator_route = !x_free;
    const DefectReport rep = defect_report(syms, q, 1, dopt);
    for (std::size_t j = 0; j < syms.size(); ++j) {
      MultiIndex k(syms.size(), 0);
      k[j] = 1;
      s.defects.push_back(rep.at(k).value());
    }
  }
  return s;
}

}  // namespace

SweepReport run_sweep(const QuasimodeSpec& tmpl, const std::vector<Symbol>& syms,
                      const std::vector<double>& p_list, const std::vector<double>& lambdas,
                      const SweepOptions& opts) {
  require(lambdas.size() >= 4, ErrorKind::invalid_argument, "sweep: need at least 4 lambda values");
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    require(lambdas[i] > lambdas[i - 1], ErrorKind::invalid_argument,
            "sweep: lambda list must be strictly increasing");
  }
  require(!p_list.empty(), ErrorKind::invalid_argument, "sweep: empty p list");
  for (double p : p_list) {
    require(p >= 2.0, ErrorKind::invalid_argument, "sweep: every p must be >= 2");
  }
  for (const auto& s : syms) {
    require(s.dimension() == tmpl.n, ErrorKind::invalid_argument,
            "sweep: symbol dimension does not match n");
  }
  require(opts.threads >= 1, ErrorKind::invalid_argument, "sweep: threads must be >= 1");
  const int r = syms.empty() ? tmpl.r : static_cast<int>(syms.size());

  // Rows are independent; results land by index so the output is
  // deterministic for any thread count.
  std::vector<LambdaSample> samples(lambdas.size());
  std::vector<std::exception_ptr> errors(lambdas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < lambdas.size(); i = next++) {
      try {
        samples[i] = sample_lambda(tmpl, syms, p_list, lambdas[i], opts.grid);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int nthreads = std::min<int>(opts.threads, static_cast<int>(lambdas.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), "sweep at lambda=" + format_number(lambdas[i]) + ": " + e.what());
    }
  }

  SweepReport report;
  report.spec = tmpl;
  if (!syms.empty()) {
    report.defects.assign(syms.size(), {});
    for (const auto& s : samples) {
      for (std::size_t j = 0; j < syms.size(); ++j) report.defects[j].push_back(s.defects[j]);
    }
  }

  const double sat_tol = opts.saturation_tolerance.value_or(
      (tmpl.kind == QuasimodeKind::knapp ||
       (tmpl.kind == QuasimodeKind::tensor_joint && tmpl.inner == QuasimodeKind::knapp))
          ? 0.1
          : 0.15);

  for (std::size_t pi = 0; pi < p_list.size(); ++pi) {
    SweepResult res;
    res.n = tmpl.n;
    res.r = r;
    res.p = p_list[pi];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      SweepRow row;
      row.lambda = lambdas[i];
      row.h = 1.0 / lambdas[i];
      row.lp_norm = samples[i].lp[pi];
      row.l2_norm = samples[i].l2;
      row.ratio = row.lp_norm / row.l2_norm;
      pts.emplace_back(std::log(row.lambda), std::log(row.ratio));
      res.rows.push_back(row);
    }
    res.fit = fit_exponent(pts);
    res.expected = delta_exponent(tmpl.n, res.p, r);
    res.upper_tolerance = opts.upper_tolerance;
    res.saturation_tolerance = sat_tol;
    res.family_prediction = family_exponent(tmpl, res.p);
    res.margin = res.expected + res.upper_tolerance - res.fit.slope;
    res.upper_pass = res.margin >= 0.0;
    res.two_sided = std::isinf(res.p) && res.family_prediction.has_value();
    if (res.two_sided) {
      const double m = sat_tol - std::abs(res.fit.slope - *res.family_prediction);
      res.saturation_pass = m >= 0.0;
      res.margin = std::min(res.margin, m);
    }
    report.results.push_back(std::move(res));
  }
  return report;
}

namespace {

std::string p_text(double p) { return std::isinf(p) ? "inf" : format_number(p); }

}  // namespace

void write_sweep_csv(std::ostream& os, const SweepReport& report) {
  os << "lambda,h,p,lp_norm,l2_norm,ratio,log_lambda,log_ratio\n";
  for (const auto& res : report.results) {
    for (const auto& row : res.rows) {
      os << format_number(row.lambda) << ',' << format_number(row.h) << ',' << p_text(res.p) << ','
         << format_number(row.lp_norm) << ',' << format_number(row.l2_norm) << ','
         << format_number(row.ratio) << ',' << format_number(std::log(row.lambda)) << ','
         << format_number(std::log(row.ratio)) << '\n';
    }
  }
  for (const auto& res : report.results) {
    nlohmann::ordered_json j;
    j["family"] = to_string(report.spec.kind);
    j["n"] = res.n;
    j["r"] = res.r;
    j["p"] = p_text(res.p);
    j["slope"] = res.fit.slope;
    j["intercept"] = res.fit.intercept;
    j["rms"] = res.fit.rms;
    j["expected_delta"] = res.expected;
    j["family_prediction"] = res.family_prediction ? nlohmann::ordered_json(*res.family_prediction)
                                                   : nlohmann::ordered_json(nullptr);
    j["two_sided"] = res.two_sided;
    j["upper_tolerance"] = res.upper_tolerance;
    j["saturation_tolerance"] = res.saturation_tolerance;
    j["margin"] = res.margin;
    j["pass"] = res.passes();
    os << "# " << j.dump() << '\n';
  }
  if (!report.defects.empty()) {
    nlohmann::ordered_json j;
    j["first_order_defects"] = report.defects;
    os << "# " << j.dump() << '\n';
  }
}

}  // namespace qmlab
