#include "slipconvect/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "slipconvect/errors.hpp"

namespace slipconvect {

namespace fs = std::filesystem;

double windowed_change(std::span<const DiagnosticsRecord> samples, double t_start, double t_end) {
  const double mid = 0.5 * (t_start + t_end);
  double s1 = 0.0, s2 = 0.0;
  int n1 = 0, n2 = 0;
  for (const auto& r : samples) {
    if (r.time < t_start) continue;
    if (r.time < mid) {
      s1 += r.nu_flux;
      ++n1;
    } else {
      s2 += r.nu_flux;
      ++n2;
    }
  }
  if (n1 == 0 || n2 == 0) return std::numeric_limits<double>::infinity();
  const double m1 = s1 / n1, m2 = s2 / n2;
  return std::abs(m2 - m1) / std::max(std::abs(m2), 1e-300);
}

namespace {

struct Pending {
  DiagnosticsRecord record;
  BalanceSample before;
  long emission = 0;
};

class Outputs {
 public:
  Outputs(const RunConfig& cfg, bool enabled) : enabled_(enabled) {
    if (!enabled_) return;
    dir_ = cfg.output.out_dir;
    fs::create_directories(dir_);
    save_config(cfg, dir_ / "config.txt");
    csv_.open(dir_ / "timeseries.csv");
    if (!csv_) throw std::runtime_error("cannot write " + (dir_ / "timeseries.csv").string());
    csv_ << csv_header() << '\n';
  }

  void row(const DiagnosticsRecord& r) {
    if (enabled_) csv_ << csv_row(r) << '\n';
  }

  void snapshot(const SimState& s, const std::string& name) {
    if (enabled_) write_snapshot(dir_ / name, to_snapshot(s));
  }

  void json(const nlohmann::json& j, const std::string& name) {
    if (!enabled_) return;
    std::ofstream f(dir_ / name);
    f << j.dump(2) << '\n';
  }

  void flush() {
    if (enabled_) csv_.flush();
  }

 private:
  bool enabled_;
  fs::path dir_;
  std::ofstream csv_;
};

std::string snapshot_name(long step) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "snap_%08ld.bin", step);
  return buf;
}

}  // namespace

RunResult run(const RunConfig& cfg, const RunOptions& opts) {
  validate(cfg);
  const auto wall_start = std::chrono::steady_clock::now();
  const PhysicalParams& params = cfg.physical;
  const Grid grid(cfg.grid, params.gamma);
  Integrator integ(params, grid, opts.stepper);
  Transform& tr = integ.transform();
  Outputs out(cfg, opts.write_outputs);

  RunResult res;
  SimState s = opts.initial ? *opts.initial : init_state(params, grid, init_request(cfg));
  res.monitors.init(s, params);

  const double t_end = cfg.time.t_end;
  const double t_tr = cfg.time.t_transient;
  const long diag_every = std::max<long>(cfg.output.diag_every, 1);
  double last_avg_time = t_tr;
  long emissions = 0;
  std::optional<Pending> pending;

  const auto finalize = [&](Pending& p, const BalanceSample& after) {
    DiagnosticsRecord& r = p.record;
    r.energy_residual = energy_balance_residual(r, p.before, after, params);
    r.enstrophy_residual = enstrophy_balance_residual(r, p.before, after, params);
    res.max_energy_residual = std::max(res.max_energy_residual, r.energy_residual);
    res.max_enstrophy_residual = std::max(res.max_enstrophy_residual, r.enstrophy_residual);
    res.monitors.update(r, params);
    if (opts.appendix_every > 0 && p.emission % opts.appendix_every == 0)
      res.monitors.check_appendix(r, grid.h2());
    if (r.time >= t_tr) {
      const double w = r.time - last_avg_time;
      if (w > 0.0) res.averages.add(r, w);
      last_avg_time = std::max(last_avg_time, r.time);
      res.samples.push_back(r);
    }
    out.row(r);
    res.records.push_back(std::move(r));
  };

  const auto emit = [&](const BalanceSample& before) {
    pending = Pending{evaluate(tr, s, params), before, emissions++};
  };

  BalanceSample cur = balance_sample(s);
  emit(cur);

  try {
    while (t_end - s.time > 1e-12 * t_end) {
      if (opts.max_steps >= 0 && res.steps >= opts.max_steps) break;
      double dt = std::min(cfg.time.dt_max, integ.advective_dt(s, cfg.time.cfl));
      if (s.prev.valid) dt = std::min(dt, opts.dt_growth * s.prev.dt);
      dt = std::min(dt, t_end - s.time);
      const BalanceSample before = cur;
      integ.step(s, dt);
      ++res.steps;
      cur = balance_sample(s);
      if (pending) {
        finalize(*pending, cur);
        pending.reset();
      }
      const bool last = !(t_end - s.time > 1e-12 * t_end);
      if (s.step % diag_every == 0 || last) emit(before);
      if (cfg.output.snapshot_every > 0 && s.step % cfg.output.snapshot_every == 0)
        out.snapshot(s, snapshot_name(s.step));
      if (opts.on_step) opts.on_step(s);
    }
  } catch (const SolverError&) {
    out.snapshot(s, "abort.bin");
    out.flush();
    throw;
  }
  // The last record has no successor: one-sided difference.
  if (pending) finalize(*pending, cur);

  if (params.pr.is_infinite()) res.quasi_static_residual = integ.quasi_static_residual(s);
  if (res.averages.window() > 0.0) res.balances = averaged_balances(res.averages, params);
  res.steady_change = windowed_change(res.samples, t_tr, s.time);
  res.steady = res.steady_change < 0.02;
  res.final_state = std::move(s);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();

  out.snapshot(res.final_state, "final.bin");
  out.json(summary_json(cfg, res), "summary.json");
  if (opts.write_outputs) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& r : res.samples) samples.push_back(to_json(r));
    out.json(samples, "samples.json");
  }
  return res;
}

nlohmann::json summary_json(const RunConfig& cfg, const RunResult& r) {
  nlohmann::json j;
  const SimState& s = r.final_state;
  j["config"] = format_config(cfg);
  j["metadata"] = {{"init", cfg.init.mode == InitMode::conduction  ? "conduction"
                            : cfg.init.mode == InitMode::perturbed ? "perturbed"
                                                                   : "snapshot"},
                   {"amplitude", cfg.init.amplitude},
                   {"seed", cfg.time.seed},
                   {"initial_temperature_exceeds_one", s.exceeds_unit_bound},
                   {"steps", r.steps},
                   {"final_time", s.time},
                   {"wall_seconds", r.wall_seconds},
                   {"snapshot_format_version", snapshot_version}};
  if (!r.records.empty()) {
    const auto& last = r.records.back();
    j["final"] = {{"nu_flux", last.nu_flux}, {"nu_grad", last.nu_grad}, {"nu_wall", last.nu_wall},
                  {"energy_residual", last.energy_residual},
                  {"enstrophy_residual", last.enstrophy_residual}};
  }
  if (r.averages.window() > 0.0) {
    nlohmann::json avg = to_json(r.averages.mean());
    for (const char* key : {"u2T_profile", "dT2_profile", "dT2_sq_profile"}) avg.erase(key);
    j["averages"] = avg;
    j["averages_window"] = r.averages.window();
    j["averages_samples"] = r.averages.samples();
  }
  if (r.balances) j["balances"] = to_json(*r.balances);
  j["monitors"] = to_json(r.monitors);
  j["steady"] = r.steady;
  j["steady_change"] = std::isfinite(r.steady_change) ? nlohmann::json(r.steady_change) : nlohmann::json(nullptr);
  j["max_energy_residual"] = r.max_energy_residual;
  j["max_enstrophy_residual"] = r.max_enstrophy_residual;
  if (cfg.physical.pr.is_infinite()) j["quasi_static_residual"] = r.quasi_static_residual;
  return j;
}

}  // namespace slipconvect
