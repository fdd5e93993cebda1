#include "slipconvect/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "slipconvect/errors.hpp"

namespace slipconvect {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Sweep plans

ExtendedReal LsPolicy::ls_for(double ra) const {
  if (kind == Kind::fixed) return value;
  return ExtendedReal::finite(c_s * std::pow(ra, alpha));
}

std::string LsPolicy::describe() const {
  if (kind == Kind::fixed) return "fixed:" + format_real(value);
  return "power:" + format_real(c_s) + ":" + format_real(alpha);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ParseError("plan: bad number for '" + key + "': '" + t + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(parse_double(key, item));
  return out;
}

ExtendedReal parse_extended(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "inf" || t == "Infinite" || t == "infinite") return ExtendedReal::infinite();
  const double x = parse_double(key, t);
  if (!(x > 0.0)) throw ValidationError("invariant violated: " + key + " > 0");
  return ExtendedReal::finite(x);
}

}  // namespace

SweepPlan parse_sweep_plan(const std::string& text, const fs::path& base_dir) {
  SweepPlan plan;
  bool have_template = false, have_ra = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("plan line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "ra_values") {
      plan.ra_values = parse_list(key, val);
      have_ra = true;
    } else if (key == "ls_policy") {
      const auto parts = split(val, ':');
      if (parts.size() == 2 && parts[0] == "fixed") {
        plan.ls_policy.kind = LsPolicy::Kind::fixed;
        plan.ls_policy.value = parse_extended(key, parts[1]);
      } else if (parts.size() == 3 && parts[0] == "power") {
        plan.ls_policy.kind = LsPolicy::Kind::power;
        plan.ls_policy.c_s = parse_double(key, parts[1]);
        plan.ls_policy.alpha = parse_double(key, parts[2]);
      } else {
        throw ParseError("plan: ls_policy must be fixed:<value|inf> or power:<c_s>:<alpha>");
      }
    } else if (key == "template") {
      plan.base = load_config(base_dir / val);
      have_template = true;
    } else if (key == "workers") {
      plan.workers = static_cast<int>(parse_double(key, val));
    } else if (key == "out_dir") {
      plan.out_dir = base_dir / val;
    } else if (key == "b") {
      plan.b = parse_double(key, val);
    } else if (key == "u0_w1r") {
      plan.u0_w1r = parse_double(key, val);
    } else if (key == "n1" || key == "n2") {
      std::vector<int> v;
      for (double x : parse_list(key, val)) v.push_back(static_cast<int>(x));
      (key == "n1" ? plan.n1 : plan.n2) = v;
    } else if (key == "t_end") {
      plan.t_end = parse_list(key, val);
    } else if (key == "t_transient") {
      plan.t_transient = parse_list(key, val);
    } else if (key == "dt_max") {
      plan.dt_max = parse_list(key, val);
    } else {
      throw ParseError("plan: unknown key '" + key + "'");
    }
  }
  if (!have_ra) throw ParseError("plan: missing ra_values");
  if (!have_template) throw ParseError("plan: missing template");
  if (plan.ra_values.size() < 3) throw ValidationError("invariant violated: at least 3 ra_values");
  for (std::size_t i = 0; i < plan.ra_values.size(); ++i) {
    if (!(plan.ra_values[i] > 0.0)) throw ValidationError("invariant violated: ra_values > 0");
    if (i && !(plan.ra_values[i] > plan.ra_values[i - 1]))
      throw ValidationError("invariant violated: ra_values strictly increasing");
  }
  if (plan.ls_policy.kind == LsPolicy::Kind::power &&
      !(plan.ls_policy.alpha >= 0.0 && plan.ls_policy.c_s > 0.0))
    throw ValidationError("invariant violated: power policy needs c_s > 0 and alpha >= 0");
  if (plan.workers < 1) throw ValidationError("invariant violated: workers >= 1");
  if (!(plan.b > 0.0 && plan.b < 1.0)) throw ValidationError("invariant violated: 0 < b < 1");
  const auto check_len = [&](std::size_t n, const char* name) {
    if (n != 0 && n != plan.ra_values.size())
      throw ValidationError(std::string("invariant violated: ") + name + " has one entry per ra value");
  };
  check_len(plan.n1.size(), "n1");
  check_len(plan.n2.size(), "n2");
  check_len(plan.t_end.size(), "t_end");
  check_len(plan.t_transient.size(), "t_transient");
  check_len(plan.dt_max.size(), "dt_max");
  return plan;
}

SweepPlan load_sweep_plan(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open plan " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_sweep_plan(ss.str(), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

// ---------------------------------------------------------------------------
// Fit

FitResult fit_power_law(std::span<const double> ra, std::span<const double> nu) {
  if (ra.size() != nu.size()) throw std::invalid_argument("fit_power_law: length mismatch");
  if (ra.size() < 2) throw std::invalid_argument("fit_power_law: need at least two points");
  const std::size_t n = ra.size();
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(ra[i] > 0.0) || !(nu[i] > 0.0)) throw std::invalid_argument("fit_power_law: data must be positive");
    sx += std::log(ra[i]);
    sy += std::log(nu[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(ra[i]) - mx, dy = std::log(nu[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_power_law: ra values must differ");
  FitResult f;
  f.beta = sxy / sxx;
  f.prefactor = std::exp(my - f.beta * mx);
  f.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  f.n_points = static_cast<int>(n);
  return f;
}

// ---------------------------------------------------------------------------
// Certification

RunningAverages averages_from_samples(std::span<const DiagnosticsRecord> samples, double t_transient) {
  RunningAverages avg;
  double last = t_transient;
  for (const auto& r : samples) {
    if (r.time < t_transient) continue;
    const double w = r.time - last;
    if (w > 0.0) avg.add(r, w);
    last = std::max(last, r.time);
  }
  return avg;
}

namespace {

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace

CertificationOutcome certify_samples(const RunConfig& cfg, std::span<const DiagnosticsRecord> samples,
                                     const DiagnosticsRecord& averages, const CertifyOptions& opts) {
  const PhysicalParams& params = cfg.physical;
  const Grid grid(cfg.grid, params.gamma);
  std::vector<DiagnosticsRecord> data(samples.begin(), samples.end());
  data.push_back(averages);
  const std::vector<double> deltas = aligned_deltas(grid);

  CertificationOutcome out;
  nlohmann::json hashed = nlohmann::json::array();
  for (const auto& d : data) hashed.push_back(to_json(d));
  out.data_hash = fnv1a_hex(hashed.dump());
  out.regime = regime_check(params);

  if (params.pr.is_infinite()) {
    const Calibration first = calibrate_constants(data, grid, params, deltas, {}, opts.u0_w1r);
    const double c_lap = first.c_lap;
    const double eps = c_lap > 0.0 ? 1.0 / (std::sqrt(c_lap) * params.ra) : 1.0 / params.ra;
    const double eps_grid[] = {eps};
    out.calibration = calibrate_constants(data, grid, params, deltas, eps_grid, opts.u0_w1r);
    const double c0 = opts.c0.value_or(out.calibration.c0_b);
    out.report = certify_infinite_pr(averages, params, grid, opts.b, c0, c_lap);
    out.delta_formula = out.report.delta_formula;
    out.delta_clamped = out.report.delta_clamped;
  } else {
    const Calibration first = calibrate_constants(data, grid, params, deltas, {}, opts.u0_w1r);
    double c2 = opts.c2.value_or(first.c2);
    if (!(c2 > 0.0)) c2 = 1.0;  // degenerate data: no pressure information
    const ParameterChoice trial = choose_parameters(params, opts.b, 0.0, c2, opts.u0_w1r, grid, false);
    const double eps_grid[] = {trial.bp.a};
    out.calibration = calibrate_constants(data, grid, params, deltas, eps_grid, opts.u0_w1r);
    out.calibration.c2 = c2;
    const double c0 = opts.c0.value_or(out.calibration.c0_a);
    const ParameterChoice pc = choose_parameters(params, opts.b, c0, c2, opts.u0_w1r, grid, false);
    out.delta_clamped = pc.delta_clamped;
    out.delta_formula = pc.delta_formula;
    out.report = certify(averages, pc.bp, pc.profile, params, pc.nu_bound_asymptotic);
  }
  out.dc = dc_bound_check(averages, out.report.bp.delta, params);
  return out;
}

nlohmann::json to_json(const CertificationOutcome& c) {
  nlohmann::json j = to_json(c.report);
  j["calibration"] = to_json(c.calibration);
  j["calibration"]["data_hash"] = c.data_hash;
  j["dc_bound"] = to_json(c.dc);
  j["regime"] = {{"five_twelfths", c.regime.five_twelfths},
                 {"lhs", std::isfinite(c.regime.lhs) ? nlohmann::json(c.regime.lhs) : nlohmann::json("inf")},
                 {"rhs", c.regime.rhs}};
  j["delta_clamped"] = c.delta_clamped;
  j["delta_formula"] = std::isfinite(c.delta_formula) ? nlohmann::json(c.delta_formula) : nlohmann::json("inf");
  return j;
}

// ---------------------------------------------------------------------------
// Sweeps

namespace {

RunConfig row_config(const SweepPlan& plan, std::size_t i) {
  RunConfig cfg = plan.base;
  cfg.physical.ra = plan.ra_values[i];
  cfg.physical.ls = plan.ls_policy.ls_for(plan.ra_values[i]);
  if (!plan.n1.empty()) cfg.grid.n1 = plan.n1[i];
  if (!plan.n2.empty()) cfg.grid.n2 = plan.n2[i];
  if (!plan.t_end.empty()) cfg.time.t_end = plan.t_end[i];
  if (!plan.t_transient.empty()) cfg.time.t_transient = plan.t_transient[i];
  if (!plan.dt_max.empty()) cfg.time.dt_max = plan.dt_max[i];
  std::ostringstream name;
  name << "row" << i << "_ra" << format_real(cfg.physical.ra);
  cfg.output.out_dir = (plan.out_dir / name.str()).string();
  return cfg;
}

void fill_running_betas(SweepResult& res) {
  std::vector<double> ra, nu;
  for (auto& row : res.rows) {
    if (row.ok && row.steady && row.nu >= 1.05) {
      ra.push_back(row.ra);
      nu.push_back(row.nu);
    }
    row.beta_running = ra.size() >= 2 ? fit_power_law(ra, nu).beta : std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

SweepResult run_sweep(const SweepPlan& plan, std::ostream* log) {
  const std::size_t n = plan.ra_values.size();
  SweepResult res;
  res.rows.resize(n);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      SweepRow& row = res.rows[i];
      const RunConfig cfg = row_config(plan, i);
      row.ra = cfg.physical.ra;
      row.ls = cfg.physical.ls;
      const RegimeReport regime = regime_check(cfg.physical);
      row.regime_ok = regime.five_twelfths;
      if (plan.ls_policy.kind == LsPolicy::Kind::power) row.exponent = exponent(plan.ls_policy.alpha);
      try {
        validate(cfg);
        const RunResult rr = run(cfg);
        row.seconds = rr.wall_seconds;
        row.steady = rr.steady;
        row.nu = rr.averages.window() > 0.0 ? rr.averages.mean().nu_flux : rr.records.back().nu_flux;
        const DiagnosticsRecord avg = rr.averages.window() > 0.0 ? rr.averages.mean() : rr.records.back();
        const std::span<const DiagnosticsRecord> samples =
            rr.samples.empty() ? std::span<const DiagnosticsRecord>(rr.records) : rr.samples;
        CertifyOptions copts;
        copts.b = plan.b;
        copts.u0_w1r = plan.u0_w1r;
        const CertificationOutcome cert = certify_samples(cfg, samples, avg, copts);
        row.nu_bound_implied = cert.report.nu_bound_implied;
        row.nu_bound_asymptotic = cert.report.nu_bound_asymptotic;
        row.below_implied = cert.report.below_implied;
        row.certified = cert.report.certified;
        row.certificate = to_json(cert);
        row.certificate["summary"] = summary_json(cfg, rr);
        std::ofstream(fs::path(cfg.output.out_dir) / "certificate.json") << to_json(cert).dump(2) << '\n';
        row.ok = true;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
      if (log) {
        std::lock_guard lock(log_mutex);
        *log << "ra=" << format_real(row.ra) << " ls=" << format_real(row.ls)
             << (row.ok ? " nu=" + format_real(row.nu) : " FAILED: " + row.error) << '\n';
      }
    }
  };

  const int workers = std::clamp<int>(plan.workers, 1, static_cast<int>(n));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  fill_running_betas(res);
  std::vector<double> ra, nu, ra_all, nu_all;
  for (const auto& row : res.rows) {
    if (!row.ok || !row.steady) continue;
    ra_all.push_back(row.ra);
    nu_all.push_back(row.nu);
    if (row.nu >= 1.05) {
      ra.push_back(row.ra);
      nu.push_back(row.nu);
    }
  }
  if (ra.size() >= 2) {
    res.fit = fit_power_law(ra, nu);
  } else if (ra_all.size() >= 2) {
    res.fit = fit_power_law(ra_all, nu_all);
    res.fit_fallback = true;
  }
  return res;
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "ra,ls,nu,nu_bound_implied,nu_bound_asymptotic,steady_flag,beta_running\n";
  os << std::setprecision(12);
  for (const auto& row : r.rows) {
    os << format_real(row.ra) << ',' << format_real(row.ls) << ',';
    if (row.ok)
      os << row.nu << ',' << row.nu_bound_implied << ',' << row.nu_bound_asymptotic;
    else
      os << "nan,nan,nan";
    os << ',' << (row.steady ? 1 : 0) << ',';
    if (std::isfinite(row.beta_running))
      os << row.beta_running;
    else
      os << "nan";
    os << '\n';
  }
  return os.str();
}

nlohmann::json to_json(const SweepResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json j = {{"ra", row.ra},
                        {"ls", format_real(row.ls)},
                        {"ok", row.ok},
                        {"error", row.error},
                        {"nu", row.nu},
                        {"nu_bound_implied", row.nu_bound_implied},
                        {"nu_bound_asymptotic", row.nu_bound_asymptotic},
                        {"steady", row.steady},
                        {"regime_ok", row.regime_ok},
                        {"below_implied", row.below_implied},
                        {"certified", row.certified},
                        {"seconds", row.seconds}};
    if (row.exponent) j["exponent"] = *row.exponent;
    rows.push_back(std::move(j));
  }
  nlohmann::json j = {{"rows", rows}, {"fit_fallback", r.fit_fallback}};
  if (r.fit)
    j["fit"] = {{"beta", r.fit->beta},
                {"prefactor", r.fit->prefactor},
                {"r_squared", r.fit->r_squared},
                {"n_points", r.fit->n_points}};
  return j;
}

// ---------------------------------------------------------------------------
// Single runs and certification of run directories

int run_single(const fs::path& config, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(config);
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  }
  try {
    const RunResult r = run(cfg);
    const auto& last = r.records.back();
    out << std::setprecision(10) << "nu_flux " << last.nu_flux << "\nnu_grad " << last.nu_grad
        << "\nnu_wall " << last.nu_wall << "\nenergy_residual " << last.energy_residual
        << "\nenstrophy_residual " << last.enstrophy_residual << '\n';
    if (r.balances)
      out << "avg_nu " << r.balances->nu << "\navg_energy_residual " << r.balances->energy_residual
          << "\navg_enstrophy_residual " << r.balances->enstrophy_residual << "\nnu_spread "
          << r.balances->nu_spread << '\n';
    return exit_ok;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return exit_solver;
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  }
}

nlohmann::json certify_run_dir(const fs::path& dir, const CertifyOptions& opts) {
  const RunConfig cfg = load_config(dir / "config.txt");
  std::ifstream f(dir / "samples.json");
  if (!f) throw ParseError("missing " + (dir / "samples.json").string());
  const nlohmann::json js = nlohmann::json::parse(f);
  std::vector<DiagnosticsRecord> samples;
  for (const auto& j : js) samples.push_back(record_from_json(j));
  if (samples.empty()) throw ValidationError("run directory has no post-transient samples");
  const RunningAverages avg = averages_from_samples(samples, cfg.time.t_transient);
  const DiagnosticsRecord mean = avg.window() > 0.0 ? avg.mean() : samples.back();
  nlohmann::json out = to_json(certify_samples(cfg, samples, mean, opts));
  out["averages_window"] = avg.window();
  return out;
}

// ---------------------------------------------------------------------------
// Check suites

namespace {

struct Suite {
  std::string name;
  bool pass = false;
  nlohmann::json detail;
};

double order(double coarse, double fine) {
  return (coarse > 0.0 && fine > 0.0) ? std::log2(coarse / fine) : std::numeric_limits<double>::infinity();
}

/// f = exp(x) cos(3x) for mode k, with Robin walls and sigma > 0.
double helmholtz_error(int n2) {
  const Grid g(8, n2, 2.0);
  const int k = 1;
  const double kk = g.wavenumber(k) * g.wavenumber(k);
  const double sigma = 3.0;
  const auto f = [](double x) { return std::exp(x) * std::cos(3 * x); };
  const auto fp = [](double x) { return std::exp(x) * (std::cos(3 * x) - 3 * std::sin(3 * x)); };
  const auto fpp = [](double x) { return std::exp(x) * (-8 * std::cos(3 * x) - 6 * std::sin(3 * x)); };
  const double r = 0.7;
  WallTrace g0(g.modes()), g1(g.modes());
  g0[k] = fp(0) - r * f(0);
  g1[k] = fp(1) + r * f(1);
  const BoundaryConditions bc{WallCondition::robin_condition(r, g0), WallCondition::robin_condition(-r, g1)};
  std::vector<Complex> col(g.points());
  for (int j = 0; j < g.points(); ++j) col[j] = fpp(g.x2(j)) - (kk + sigma) * f(g.x2(j));
  helmholtz_solve_mode(g, k, sigma, bc, col);
  double err = 0.0;
  for (int j = 0; j < g.points(); ++j) err = std::max(err, std::abs(col[j] - f(g.x2(j))));
  return err;
}

Suite helmholtz_suite() {
  Suite s{"helmholtz_manufactured", false, {}};
  const double e1 = helmholtz_error(32), e2 = helmholtz_error(64);
  s.detail = {{"error_32", e1}, {"error_64", e2}, {"order", order(e1, e2)}};
  s.pass = order(e1, e2) > 1.8;
  return s;
}

Suite pressure_suite(const RunConfig& base) {
  Suite s{"pressure_conduction", false, {}};
  const Grid g(base.grid, base.physical.gamma);
  const SimState st = init_state(base.physical, g, {});
  Transform tr(g);
  const PressureSolution p = solve_pressure(tr, st.vel, st.temperature, base.physical);
  const double ra = base.physical.ra;
  // p' = Ra (1 - x): compare differences, which are free of the mean gauge.
  double err = 0.0;
  const double p0 = p.p(0, 0).real();
  for (int j = 0; j < g.points(); ++j) {
    const double x = g.x2(j);
    err = std::max(err, std::abs(p.p(0, j).real() - p0 - ra * (x - 0.5 * x * x)));
  }
  const double tol = 1e-9 * ra;
  s.detail = {{"max_error", err}, {"tolerance", tol}, {"projection", p.projection}};
  s.pass = err <= tol && std::abs(p.projection) < 1e-9 * ra;
  return s;
}

Suite conduction_suite(RunConfig cfg) {
  Suite s{"conduction_fixed_point", false, {}};
  cfg.init.mode = InitMode::conduction;
  cfg.time.t_end = 50 * cfg.time.dt_max;
  cfg.time.t_transient = 0.0;
  RunOptions o;
  o.write_outputs = false;
  const RunResult r = run(cfg, o);
  double worst = 0.0;
  for (const auto& rec : r.records)
    worst = std::max({worst, std::abs(rec.nu_flux - 1), std::abs(rec.nu_grad - 1), std::abs(rec.nu_wall - 1),
                      rec.energy_residual, rec.enstrophy_residual});
  s.detail = {{"max_deviation", worst}, {"steps", r.steps}};
  s.pass = worst < 1e-10;
  return s;
}

RunConfig dynamic_config(RunConfig cfg, int n1, int n2, double dt) {
  cfg.grid.n1 = n1;
  cfg.grid.n2 = n2;
  cfg.init.mode = InitMode::perturbed;
  cfg.init.amplitude = 0.05;
  cfg.time.dt_max = dt;
  cfg.time.cfl = 1.0;
  cfg.time.t_transient = 0.0;
  cfg.output.diag_every = 1;
  return cfg;
}

/// Largest residual over the records of a short run at fixed dt.
std::pair<double, double> balance_residuals(const RunConfig& cfg, const CheckOptions& opts) {
  RunOptions o;
  o.write_outputs = false;
  o.stepper.wall_vorticity_sign = opts.inject_wall_sign_error ? -1.0 : 1.0;
  const RunResult r = run(cfg, o);
  // Skip the start-up transient and the one-sided last record.
  double e = 0.0, z = 0.0;
  for (std::size_t i = 0; i + 1 < r.records.size(); ++i) {
    if (r.records[i].time < 0.375 * cfg.time.t_end) continue;
    e = std::max(e, r.records[i].energy_residual);
    z = std::max(z, r.records[i].enstrophy_residual);
  }
  return {e, z};
}

std::vector<Suite> balance_suites(const RunConfig& base, const CheckOptions& opts) {
  RunConfig cfg = base;
  cfg.time.t_end = 0.04;
  const int n2 = std::max(16, base.grid.n2);
  const auto [e1, z1] = balance_residuals(dynamic_config(cfg, 16, n2, 1e-3), opts);
  const auto [e2, z2] = balance_residuals(dynamic_config(cfg, 16, 2 * n2, 5e-4), opts);
  Suite se{"energy_balance_refinement", false, {{"coarse", e1}, {"fine", e2}, {"order", order(e1, e2)}}};
  se.pass = e2 < 1e-2 && (order(e1, e2) > 1.5 || e2 < 1e-8);
  Suite sz{"enstrophy_balance_refinement", false, {{"coarse", z1}, {"fine", z2}, {"order", order(z1, z2)}}};
  sz.pass = z2 < 1e-2 && (order(z1, z2) > 1.5 || z2 < 1e-8);
  return {se, sz};
}

Suite appendix_suite(const RunConfig& base) {
  Suite s{"appendix_identities", false, {}};
  RunConfig cfg = dynamic_config(base, base.grid.n1, base.grid.n2, base.time.dt_max);
  cfg.time.t_end = 20 * cfg.time.dt_max;
  RunOptions o;
  o.write_outputs = false;
  o.appendix_every = 1;
  const RunResult r = run(cfg, o);
  const Monitors& m = r.monitors;
  s.detail = {{"checks", m.appendix_checks},
              {"max_deviation", m.appendix_max_deviation},
              {"tolerance", 5.0 / cfg.grid.n2},
              {"interpolation_violations", m.interpolation_violations}};
  s.pass = m.appendix_checks > 0 && m.appendix_failures == 0 && m.interpolation_violations == 0;
  return s;
}

bool same_state(const SimState& a, const SimState& b) {
  return a.omega.data() == b.omega.data() && a.temperature.data() == b.temperature.data() &&
         a.mean_flow == b.mean_flow && a.time == b.time && a.step == b.step;
}

Suite determinism_suite(const RunConfig& base) {
  Suite s{"determinism_restart", false, {}};
  RunConfig cfg = dynamic_config(base, base.grid.n1, base.grid.n2, base.time.dt_max);
  cfg.time.t_end = 30 * cfg.time.dt_max;
  RunOptions o;
  o.write_outputs = false;
  const RunResult a = run(cfg, o);
  const RunResult b = run(cfg, o);

  RunOptions half = o;
  half.max_steps = 12;
  const RunResult first = run(cfg, half);
  const Snapshot snap = decode_snapshot(encode_snapshot(to_snapshot(first.final_state)));
  RunOptions rest = o;
  rest.initial = from_snapshot(snap, cfg.physical, Grid(cfg.grid, cfg.physical.gamma));
  const RunResult resumed = run(cfg, rest);

  const bool repeat = same_state(a.final_state, b.final_state);
  const bool restart = same_state(a.final_state, resumed.final_state);
  s.detail = {{"repeat_identical", repeat}, {"restart_identical", restart}};
  s.pass = repeat && restart;
  return s;
}

}  // namespace

nlohmann::json run_checks(const std::optional<RunConfig>& cfg_in, const CheckOptions& opts) {
  RunConfig base;
  if (cfg_in) {
    base = *cfg_in;
  } else {
    base.physical.ra = 2e4;
    base.physical.pr = ExtendedReal::finite(1.0);
    base.physical.ls = ExtendedReal::finite(1.0);
    base.physical.gamma = 2.0;
    base.grid = {32, 32, true};
    base.time.dt_max = 5e-4;
  }
  if (base.physical.pr.is_infinite()) base.physical.pr = ExtendedReal::finite(1.0);

  std::vector<Suite> suites;
  const auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      suites.push_back({name, false, {{"error", e.what()}}});
    }
  };
  guarded("helmholtz_manufactured", [&] { suites.push_back(helmholtz_suite()); });
  guarded("pressure_conduction", [&] { suites.push_back(pressure_suite(base)); });
  guarded("conduction_fixed_point", [&] { suites.push_back(conduction_suite(base)); });
  guarded("appendix_identities", [&] { suites.push_back(appendix_suite(base)); });
  guarded("balance_refinement", [&] {
    for (auto& s : balance_suites(base, opts)) suites.push_back(std::move(s));
  });
  guarded("determinism_restart", [&] { suites.push_back(determinism_suite(base)); });

  nlohmann::json out;
  out["suites"] = nlohmann::json::array();
  bool all = true;
  for (const auto& s : suites) {
    out["suites"].push_back({{"name", s.name}, {"pass", s.pass}, {"detail", s.detail}});
    all = all && s.pass;
  }
  out["pass"] = all;
  return out;
}

}  // namespace slipconvect
