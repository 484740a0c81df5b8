#include "dmnls/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include "dmnls/diagnostics.hpp"
#include "dmnls/io.hpp"
#include "dmnls/spectral.hpp"

#ifndef DMNLS_VERSION
#define DMNLS_VERSION "unknown"
#endif

namespace dmnls {

namespace fs = std::filesystem;
using nlohmann::json;

int RunResult::exit_code() const {
  if (status == "runtime_error") return exit_runtime_error;
  if (status == "check_failed") return exit_check_failed;
  return exit_pass;
}

Trajectory simulate(const RunConfig& config) {
  return evolve(config.initial_field(), config.model(), config.stepper, config.t_final, config.checkpoint_times());
}

namespace {

// Stops a pipeline whose trajectory ended early; its checks are already recorded.
struct HaltRun {};

// A failure at a named pipeline stage.
struct StageError : std::runtime_error {
  StageError(std::string stage, const std::string& what) : std::runtime_error(what), stage(std::move(stage)) {}
  std::string stage;
};

class Pipeline {
 public:
  explicit Pipeline(const RunConfig& cfg) : cfg_(cfg), dir_(cfg.output_dir) {}

  void check(const std::string& name, bool passed, const std::string& detail, bool hard = true) {
    const auto& list = cfg_.checks.hard_fail;
    if (hard && !list.empty()) hard = std::find(list.begin(), list.end(), name) != list.end();
    result.checks.push_back({name, passed, hard, detail});
  }

  void write(const std::string& name, const std::string& text) {
    write_text((dir_ / name).string(), text);
    result.files.push_back(name);
  }
  void write_json_file(const std::string& name, const json& value) { write(name, value.dump(2) + "\n"); }

  template <class F>
  auto stage(const std::string& name, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
  }

  // Evolves and records; a trajectory that stops early fails the "trajectory" check.
  std::pair<Trajectory, DiagnosticsTimeSeries> evolve_and_record(const std::string& csv_name = "diagnostics.csv") {
    Trajectory traj = stage("evolve", [&] { return simulate(cfg_); });
    DiagnosticsTimeSeries series =
        stage("record", [&] { return record(traj, traj.params, cfg_.stepper.boundary_mass_threshold); });
    write(csv_name, diagnostics_csv(series));
    check("trajectory", traj.status == RunStatus::completed,
          to_string(traj.status) + (traj.failure_reason.empty() ? "" : ": " + traj.failure_reason));
    result.summary["trajectory"] = {{"status", to_string(traj.status)},
                                    {"accepted_steps", traj.accepted_steps},
                                    {"rejected_steps", traj.rejected_steps},
                                    {"max_gradient_ratio", traj.max_gradient_ratio},
                                    {"checkpoints", traj.checkpoints.size()}};
    if (traj.failure_time) result.summary["trajectory"]["failure_time"] = *traj.failure_time;
    if (traj.status != RunStatus::completed) throw HaltRun{};
    return {std::move(traj), std::move(series)};
  }

  const RunConfig& cfg_;
  fs::path dir_;
  RunResult result;
};

double relative_drift(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double ref = v.front();
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, std::abs(x - ref));
  return std::abs(ref) > 0.0 ? worst / std::abs(ref) : worst;
}

std::string fmt(double v) { return format_double(v); }

void conservation_checks(Pipeline& pl, const DiagnosticsTimeSeries& series, double mass_tol, double energy_tol) {
  const double dm = relative_drift(series.column("mass"));
  const double de = relative_drift(series.column("hamiltonian"));
  pl.result.summary["conservation"] = {{"mass_drift", dm}, {"hamiltonian_drift", de}};
  pl.check("mass_conservation", dm < mass_tol, "relative drift " + fmt(dm) + " vs " + fmt(mass_tol));
  pl.check("energy_conservation", de < energy_tol, "relative drift " + fmt(de) + " vs " + fmt(energy_tol));
}

void run_free_sanity(Pipeline& pl) {
  auto [traj, series] = pl.evolve_and_record();
  conservation_checks(pl, series, pl.cfg_.checks.conservation_mass_tol, pl.cfg_.checks.conservation_energy_tol);
  if (pl.cfg_.nonlinearity_weight == 0.0) {
    const double dj = relative_drift(series.column("Ju_norm"));
    pl.result.summary["conservation"]["Ju_drift"] = dj;
    pl.check("galilean_norm_conservation", dj < 1e-10, "relative drift " + fmt(dj));
  }
}

void run_scatter(Pipeline& pl, const std::vector<std::string>& norms) {
  auto [traj, series] = pl.evolve_and_record();
  const auto& k = pl.cfg_.checks;
  const ScatteringReport rep = pl.stage("scattering", [&] { return scattering_profile(traj); });

  std::vector<std::string> header{"t"};
  std::vector<std::vector<double>> rows(rep.times.size() > 0 ? rep.times.size() - 1 : 0);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].push_back(rep.times[i + 1]);
  for (const auto& [name, diffs] : rep.differences) {
    header.push_back(name);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].push_back(diffs[i]);
  }
  pl.write("scattering.csv", csv_table(header, rows));

  json summary;
  summary["undefined_norms"] = rep.undefined;
  const std::vector<double> diff_times(rep.times.begin() + 1, rep.times.end());
  for (const auto& name : norms) {
    const auto it = rep.differences.find(name);
    if (it == rep.differences.end()) {
      pl.check(name + "_defined", false, "norm undefined for this regime");
      continue;
    }
    const auto& diffs = it->second;
    const double data = rep.data_norms.at(name);
    const double last = diffs.empty() ? 0.0 : diffs.back();
    const bool mono = decreasing_after(diff_times, diffs, k.transient);
    summary[name] = {{"data_norm", data}, {"final_difference", last}, {"monotone_after_transient", mono}};
    pl.check(name + "_monotone", mono, "consecutive differences non-increasing after t=" + fmt(k.transient));
    pl.check(name + "_final", last < k.relative_threshold * data,
             "final difference " + fmt(last) + " vs " + fmt(k.relative_threshold) + " x " + fmt(data));
  }
  pl.result.summary["scattering"] = summary;
  pl.write_json_file("scattering.json", summary);
}

// Keeps every second checkpoint, which doubles the spacing of the series.
DiagnosticsTimeSeries every_other(const DiagnosticsTimeSeries& s) {
  DiagnosticsTimeSeries out = s;
  out.rows.clear();
  for (std::size_t i = 0; i < s.rows.size(); i += 2) out.rows.push_back(s.rows[i]);
  return out;
}

double max_spacing_in(const DiagnosticsTimeSeries& s, double lo, double hi) {
  double worst = 0.0;
  for (std::size_t i = 1; i < s.rows.size(); ++i)
    if (s.rows[i].t >= lo && s.rows[i - 1].t <= hi) worst = std::max(worst, s.rows[i].t - s.rows[i - 1].t);
  return worst;
}

json pce_json(const PceReport& r) {
  return {{"variant", to_string(r.variant)}, {"aggregate", r.aggregate}, {"residual_norm", r.residual_norm},
          {"rhs_norm", r.rhs_norm}, {"points", r.times.size()}};
}

void run_pce(Pipeline& pl) {
  auto [traj, series] = pl.evolve_and_record();
  const auto& k = pl.cfg_.checks;
  const double spacing = max_spacing_in(series, k.window_lo, k.window_hi);
  const auto a = pl.stage("pce", [&] { return pce_identity_check(series, PceVariant::t_plus_1, k.window_lo, k.window_hi); });
  const auto b =
      pl.stage("pce", [&] { return pce_identity_check(series, PceVariant::two_t_plus_1, k.window_lo, k.window_hi); });
  const PceReport& best = a.aggregate <= b.aggregate ? a : b;
  const PceReport& worst = a.aggregate <= b.aggregate ? b : a;

  const auto coarse = pl.stage("pce", [&] {
    return pce_identity_check(every_other(series), best.variant, k.window_lo, k.window_hi, 2.0 * spacing + 1e-12);
  });
  const double refinement = best.aggregate > 0.0 ? coarse.aggregate / best.aggregate : 0.0;

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < best.times.size(); ++i)
    rows.push_back({a.times[i], a.lhs[i], a.rhs[i], a.residual[i], b.rhs[i], b.residual[i]});
  pl.write("pce_residuals.csv",
           csv_table({"t", "lhs", "rhs_t_plus_1", "residual_t_plus_1", "rhs_two_t_plus_1", "residual_two_t_plus_1"},
                     rows));

  json summary = {{"t_plus_1", pce_json(a)},
                  {"two_t_plus_1", pce_json(b)},
                  {"selected_variant", to_string(best.variant)},
                  {"coarse_aggregate", coarse.aggregate},
                  {"refinement_ratio", refinement},
                  {"checkpoint_spacing", spacing}};
  pl.result.summary["pce"] = summary;
  pl.write_json_file("pce.json", summary);
  pl.check("pce_selected_residual", best.aggregate < 1e-3,
           to_string(best.variant) + " aggregate " + fmt(best.aggregate));
  pl.check("pce_variant_separation", worst.aggregate >= 10.0 * best.aggregate,
           "ratio " + fmt(best.aggregate > 0 ? worst.aggregate / best.aggregate : 0.0));
  pl.check("pce_refinement_order", refinement >= 3.0 && refinement <= 5.0,
           "coarse/fine residual ratio " + fmt(refinement));
}

json fit_json(const FitResult& f) {
  return {{"exponent", f.exponent}, {"intercept", f.intercept}, {"r_squared", f.r_squared},
          {"t_lo", f.t_lo},         {"t_hi", f.t_hi},           {"points", f.points}};
}

void run_decay(Pipeline& pl) {
  auto [traj, series] = pl.evolve_and_record();
  const auto& k = pl.cfg_.checks;
  const auto ju = pl.stage("fit", [&] { return decay_fit(series, DecayQuantity::Ju_norm, k.window_lo, k.window_hi); });
  const auto w = pl.stage("fit", [&] { return decay_fit(series, DecayQuantity::w_norm_p2, k.window_lo, k.window_hi); });
  const auto rep = exponent_report(pl.cfg_.dimension, pl.cfg_.power);
  json summary = {{"Ju_norm", fit_json(ju)}, {"w_norm_p2", fit_json(w)}};
  if (rep.decay_c1) summary["bound_Ju"] = *rep.decay_c1;
  if (rep.decay_rate_w) summary["bound_w"] = *rep.decay_rate_w;
  pl.result.summary["decay"] = summary;
  pl.write_json_file("decay.json", summary);
  pl.check("Ju_growth_exponent", ju.exponent <= k.ju_slope_max,
           "slope " + fmt(ju.exponent) + " vs max " + fmt(k.ju_slope_max));
  pl.check("w_decay_exponent", w.exponent <= k.w_slope_max,
           "slope " + fmt(w.exponent) + " vs max " + fmt(k.w_slope_max));
}

void run_nonscattering(Pipeline& pl) {
  auto [traj, series] = pl.evolve_and_record();
  const auto& k = pl.cfg_.checks;
  const GridPtr grid = traj.grid;
  const double c = k.psi_center, wd = k.psi_width;
  const ComplexField psi = pl.cfg_.dimension == 1
                               ? sample(grid, [&](double x) { return cplx(std::exp(-(x - c) * (x - c) / (wd * wd))); })
                               : sample(grid, [&](double x, double y) {
                                   return cplx(std::exp(-((x - c) * (x - c) + y * y) / (wd * wd)));
                                 });
  const auto rep = pl.stage("probe", [&] { return nonscattering_probe(traj, psi, k.window_lo, k.window_hi); });

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < rep.times.size(); ++i) rows.push_back({rep.times[i], rep.overlap[i]});
  pl.write("overlap.csv", csv_table({"t", "overlap"}, rows));
  json summary = {{"fit", fit_json(rep.fit)},
                  {"fit_valid", rep.fit_valid},
                  {"ill_conditioned", rep.ill_conditioned},
                  {"strictly_increasing", rep.strictly_increasing},
                  {"theory_exponent", -0.5 * pl.cfg_.dimension * pl.cfg_.power},
                  {"c0_re", rep.c0.real()},
                  {"c0_im", rep.c0.imag()},
                  {"warnings", rep.warnings}};
  pl.result.summary["nonscattering"] = summary;
  pl.write_json_file("nonscattering.json", summary);
  pl.check("overlap_exponent", rep.fit_valid && rep.fit.exponent >= k.slope_lo && rep.fit.exponent <= k.slope_hi,
           "exponent " + fmt(rep.fit.exponent) + " vs [" + fmt(k.slope_lo) + ", " + fmt(k.slope_hi) + "]");
  pl.check("overlap_increasing", rep.strictly_increasing, "overlap strictly increasing on the window");
}

void run_time_reversal(Pipeline& pl) {
  const RunConfig& cfg = pl.cfg_;
  const ComplexField u0 = pl.stage("initial", [&] { return cfg.initial_field(); });
  const ModelParams params = cfg.model();
  const double T = std::abs(cfg.t_final);
  auto times = cfg.checkpoint_times();
  for (double& t : times) t = std::abs(t);
  std::vector<double> back_times(times);
  for (double& t : back_times) t = -t;

  const Trajectory backward = pl.stage("evolve", [&] { return evolve(u0, params, cfg.stepper, -T, back_times); });
  const Trajectory forward =
      pl.stage("evolve", [&] { return evolve(time_reversed_state(u0), params, cfg.stepper, T, times); });
  const bool ok = backward.status == RunStatus::completed && forward.status == RunStatus::completed;
  pl.check("trajectory", ok, "forward " + to_string(forward.status) + ", backward " + to_string(backward.status));
  if (!ok) throw HaltRun{};

  const auto fs_ = pl.stage("record", [&] { return record(forward, params, cfg.stepper.boundary_mass_threshold); });
  const auto bs = pl.stage("record", [&] { return record(backward, params, cfg.stepper.boundary_mass_threshold); });
  pl.write("diagnostics_forward.csv", diagnostics_csv(fs_));
  pl.write("diagnostics_backward.csv", diagnostics_csv(bs));
  const auto rep = pl.stage("compare", [&] { return time_reversal_check(forward, backward, params); });
  json summary = {{"max_field_deviation", rep.max_field_deviation},
                  {"max_energy_deviation", rep.max_energy_deviation},
                  {"matched", rep.matched}};
  pl.result.summary["time_reversal"] = summary;
  pl.write_json_file("time_reversal.json", summary);
  pl.check("field_deviation", rep.max_field_deviation < cfg.checks.field_tol,
           fmt(rep.max_field_deviation) + " vs " + fmt(cfg.checks.field_tol));
  pl.check("energy_identity", rep.max_energy_deviation < cfg.checks.energy_tol,
           fmt(rep.max_energy_deviation) + " vs " + fmt(cfg.checks.energy_tol));
}

json probe_json(const BlowupProbe& p) {
  return {{"lambda", p.lambda},
          {"forward", to_string(p.forward)},
          {"backward", to_string(p.backward)},
          {"forward_growth", p.forward_growth},
          {"backward_growth", p.backward_growth},
          {"forward_reason", p.forward_reason},
          {"backward_reason", p.backward_reason}};
}

void run_blowup(Pipeline& pl) {
  const RunConfig& cfg = pl.cfg_;
  const auto& k = cfg.checks;
  const BlowupProbe small = pl.stage("evolve", [&] { return probe_blowup(cfg, k.lambda_small); });
  const BlowupProbe large = pl.stage("evolve", [&] { return probe_blowup(cfg, k.lambda_large); });
  json probes = json::array({probe_json(small), probe_json(large)});

  const bool small_global = small.forward == RunStatus::completed && small.backward == RunStatus::completed &&
                            small.forward_growth < k.growth_factor && small.backward_growth < k.growth_factor;
  pl.check("small_data_global", small_global,
           "growth " + fmt(small.forward_growth) + " / " + fmt(small.backward_growth) + " vs " + fmt(k.growth_factor));
  pl.check("large_data_blowup_both_directions", large.blows_up_both(),
           "forward " + to_string(large.forward) + ", backward " + to_string(large.backward));

  // Geometric bisection on the forward-time behaviour.
  double lo = k.lambda_small, hi = k.lambda_large;
  for (int i = 0; i < k.bisection_steps && small_global && large.blows_up_forward(); ++i) {
    const double mid = std::sqrt(lo * hi);
    const BlowupProbe m = pl.stage("evolve", [&] { return probe_blowup(cfg, mid, false); });
    probes.push_back(probe_json(m));
    (m.blows_up_forward() ? hi : lo) = mid;
  }
  json summary = {{"probes", probes}, {"bracket", {lo, hi}}, {"bracket_ratio", hi / lo}};
  pl.result.summary["blowup"] = summary;
  pl.write_json_file("blowup.json", summary);
  pl.check("threshold_bracket", hi / lo <= 2.0, "lambda* in [" + fmt(lo) + ", " + fmt(hi) + "]");
}

void write_profile(Pipeline& pl, const std::string& name, const ComplexField& q) {
  std::vector<std::vector<double>> rows;
  const auto& x = q.grid->coordinates();
  for (std::size_t i = 0; i < q.size(); ++i) rows.push_back({x[i], q[i].real(), q[i].imag()});
  pl.write(name, csv_table({"x", "re", "im"}, rows));
}

void run_ground_state(Pipeline& pl) {
  const RunConfig& cfg = pl.cfg_;
  const auto& k = cfg.checks;
  GroundStateConfig gc;
  gc.S = k.S;
  gc.nodes_per_unit = k.nodes_per_unit;
  gc.max_iterations = k.max_iterations;
  gc.tol = k.optimizer_tol;
  const ComplexField init = pl.stage("initial", [&] { return cfg.initial_field(); });
  const auto res = pl.stage("optimize", [&] { return optimize(init, cfg.power, gc); });
  const auto alt = pl.stage("optimize", [&] { return optimize(alternate_initial(cfg), cfg.power, gc); });

  write_profile(pl, "Q.csv", res.Q);
  std::vector<std::vector<double>> hist;
  for (std::size_t i = 0; i < res.quotient_history.size(); ++i)
    hist.push_back({static_cast<double>(i), res.quotient_history[i]});
  pl.write("quotient_history.csv", csv_table({"iteration", "quotient"}, hist));

  bool monotone = true;
  for (std::size_t i = 1; i < res.quotient_history.size(); ++i)
    monotone = monotone && res.quotient_history[i] >= res.quotient_history[i - 1];
  const double agreement = std::abs(res.quotient_value - alt.quotient_value) / res.quotient_value;

  json summary = to_json(res, false);
  summary["alternate_init"] = to_json(alt, false);
  summary["init_agreement"] = agreement;
  pl.result.summary["ground_state"] = summary;
  pl.write_json_file("ground_state.json", summary);
  pl.check("quotient_monotone", monotone, "accepted steps never decrease the quotient");
  pl.check("converged", res.converged, res.stop_reason);
  pl.check("euler_lagrange_residual", res.el_residual < 1e-3, fmt(res.el_residual));
  pl.check("init_agreement", agreement < 1e-4, "relative quotient difference " + fmt(agreement), false);
}

void run_exponents_table(Pipeline& pl) {
  const auto& k = pl.cfg_.checks;
  std::vector<std::vector<double>> rows;
  json reports = json::array();
  bool all_admissible = true;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto opt = [&](const auto& o, auto get) { return o ? get(*o) : nan; };
  for (int d : k.dimensions)
    for (double p : k.powers) {
      const auto r = exponent_report(d, p);
      reports.push_back(to_json(r));
      if (r.intercritical) all_admissible = all_admissible && admissible(r.intercritical->q, r.intercritical->r, d);
      if (r.subcritical) all_admissible = all_admissible && admissible(r.subcritical->q, r.subcritical->r, d);
      if (r.companion) all_admissible = all_admissible && admissible(r.companion->q, r.companion->r, d);
      rows.push_back({static_cast<double>(d), p, r.s_c, r.gamma, static_cast<double>(r.regime),
                      opt(r.intercritical, [](auto& t) { return t.q; }), opt(r.intercritical, [](auto& t) { return t.r; }),
                      opt(r.intercritical, [](auto& t) { return t.r_c; }), opt(r.subcritical, [](auto& t) { return t.q; }),
                      opt(r.subcritical, [](auto& t) { return t.r; }), opt(r.subcritical, [](auto& t) { return t.r_c; }),
                      opt(r.q_threshold, [](auto& v) { return v; }), opt(r.decay_c1, [](auto& v) { return v; }),
                      opt(r.decay_rate_w, [](auto& v) { return v; }), opt(r.critical, [](auto& c) { return c.q_c; }),
                      opt(r.critical, [](auto& c) { return c.r_c; }), opt(r.companion, [](auto& c) { return c.q; }),
                      opt(r.companion, [](auto& c) { return c.r; })});
    }
  pl.write("exponents.csv",
           csv_table({"d", "p", "s_c", "gamma", "regime", "q_inter", "r_inter", "rc_inter", "q_sub", "r_sub", "rc_sub",
                      "Q", "c1", "w_rate", "q_c", "r_c", "q_comp", "r_comp"},
                     rows));
  pl.write_json_file("exponents.json", reports);
  pl.check("pairs_admissible", all_admissible, "every emitted pair satisfies 2/q + d/r = d/2");
}

}  // namespace

ComplexField alternate_initial(const RunConfig& config) {
  // Other profile family, rescaled to the same mass and the same ||u'|| / ||u||.
  auto ratio = [](const ComplexField& f) {
    double k = 0.0;
    for (const auto& d : gradient(f)) k += lebesgue_integral(d, 2.0);
    return k / lebesgue_integral(f, 2.0);
  };
  RunConfig alt = config;
  alt.initial.kind =
      config.initial.kind == InitialData::Kind::sech ? InitialData::Kind::gaussian : InitialData::Kind::sech;
  alt.initial.width = 1.0;
  const ComplexField base = config.initial_field();
  alt.initial.width = std::sqrt(ratio(alt.initial_field()) / ratio(base));
  ComplexField f = alt.initial_field();
  f *= l2_norm(base) / l2_norm(f);
  return f;
}

BlowupProbe probe_blowup(const RunConfig& config, double lambda, bool both_directions) {
  RunConfig c = config;
  c.initial.amplitude *= lambda;
  const ComplexField u0 = c.initial_field();
  const ModelParams params = c.model();
  BlowupProbe probe;
  probe.lambda = lambda;
  const double T = std::abs(c.t_final);
  const Trajectory f = evolve(u0, params, c.stepper, T, {T});
  probe.forward = f.status;
  probe.forward_growth = f.max_gradient_ratio;
  probe.forward_reason = f.failure_reason;
  if (both_directions) {
    const Trajectory b = evolve(u0, params, c.stepper, -T, {-T});
    probe.backward = b.status;
    probe.backward_growth = b.max_gradient_ratio;
    probe.backward_reason = b.failure_reason;
  }
  return probe;
}

json to_json(const ExponentReport& r) {
  json j = {{"d", r.d},
            {"p", r.p},
            {"s_c", r.s_c},
            {"gamma", r.gamma},
            {"regime", to_string(r.regime)},
            {"snapped_to_boundary", r.snapped_to_boundary},
            {"boundary_convention", r.boundary_convention},
            {"p0", r.p0},
            {"one_d_scattering_ok", r.one_d_scattering_ok}};
  auto triple = [](const ExponentTriple& t) { return json{{"q", t.q}, {"r", t.r}, {"r_c", t.r_c}}; };
  j["intercritical"] = r.intercritical ? triple(*r.intercritical) : json(nullptr);
  j["subcritical"] = r.subcritical ? triple(*r.subcritical) : json(nullptr);
  j["q_threshold"] = r.q_threshold ? json(*r.q_threshold) : json(nullptr);
  j["decay_c1"] = r.decay_c1 ? json(*r.decay_c1) : json(nullptr);
  j["decay_rate_w"] = r.decay_rate_w ? json(*r.decay_rate_w) : json(nullptr);
  j["critical"] = r.critical ? json{{"q_c", r.critical->q_c}, {"r_c", r.critical->r_c},
                                    {"sup_over_sigma", r.critical->sup_over_sigma}}
                             : json(nullptr);
  j["companion"] = r.companion ? json{{"q", r.companion->q}, {"r", r.companion->r}} : json(nullptr);
  return j;
}

json to_json(const GroundStateResult& r, bool include_history) {
  json j = {{"quotient_value", r.quotient_value},
            {"mass_Q", r.mass_Q},
            {"kinetic_Q", r.kinetic_Q},
            {"multiplier_a", r.multiplier_a},
            {"multiplier_b", r.multiplier_b},
            {"mass_normalized", r.mass_normalized},
            {"kinetic_normalized", r.kinetic_normalized},
            {"potential_normalized", r.potential_normalized},
            {"threshold_value", r.threshold_value},
            {"energy_convention", "E_I(u) = 1/2 ||u'||^2 - int_I int |e^{i sig Lap} u|^{p+2}"},
            {"energy_unit_window", r.energy_unit_window},
            {"el_residual", r.el_residual},
            {"gradient_norm", r.gradient_norm},
            {"sigma_truncation", r.sigma_truncation},
            {"tail_estimate", r.tail_estimate},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"stop_reason", r.stop_reason}};
  if (include_history) j["quotient_history"] = r.quotient_history;
  return j;
}

RunResult run(const RunConfig& config) {
  Pipeline pl(config);
  RunManifest manifest;
  manifest.start_time = utc_timestamp();
  manifest.config_echo = serialize(config);
  manifest.config_hash = hex64(fnv1a64(manifest.config_echo));
  manifest.code_version = DMNLS_VERSION;
  manifest.preset = to_string(config.preset);
  try {
    fs::create_directories(config.output_dir);
    pl.write("config.toml", manifest.config_echo);
    switch (config.preset) {
      case Preset::free_sanity: run_free_sanity(pl); break;
      case Preset::small_data_scatter_intercritical: run_scatter(pl, {"L2", "H_sc"}); break;
      case Preset::small_data_scatter_subcritical: run_scatter(pl, {"L2", "FH_gamma"}); break;
      case Preset::large_data_scatter: run_scatter(pl, {"L2", "Sigma"}); break;
      case Preset::pce_check: run_pce(pl); break;
      case Preset::decay_rates: run_decay(pl); break;
      case Preset::nonscattering: run_nonscattering(pl); break;
      case Preset::time_reversal: run_time_reversal(pl); break;
      case Preset::blowup_dichotomy: run_blowup(pl); break;
      case Preset::ground_state: run_ground_state(pl); break;
      case Preset::exponents_table: run_exponents_table(pl); break;
    }
  } catch (const HaltRun&) {
  } catch (const StageError& e) {
    pl.result.status = "runtime_error";
    pl.result.failed_stage = e.stage;
    pl.result.message = e.what();
  } catch (const std::exception& e) {
    pl.result.status = "runtime_error";
    pl.result.failed_stage = "output";
    pl.result.message = e.what();
  }
  if (pl.result.status != "runtime_error") {
    pl.result.status = "pass";
    for (const auto& c : pl.result.checks)
      if (c.hard && !c.passed) {
        pl.result.status = "check_failed";
        if (pl.result.failed_stage.empty()) pl.result.failed_stage = "check:" + c.name;
      }
  }

  json checks = json::array();
  for (const auto& c : pl.result.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"hard", c.hard}, {"detail", c.detail}});
  try {
    pl.write_json_file("checks.json", {{"preset", manifest.preset}, {"checks", checks}, {"summary", pl.result.summary}});
  } catch (const std::exception& e) {
    pl.result.status = "runtime_error";
    pl.result.failed_stage = "output";
    pl.result.message = e.what();
  }

  manifest.end_time = utc_timestamp();
  manifest.status = pl.result.status;
  manifest.failed_stage = pl.result.failed_stage;
  manifest.message = pl.result.message;
  manifest.files = pl.result.files;
  try {
    write_json((fs::path(config.output_dir) / "manifest.json").string(), manifest.to_json());
  } catch (const std::exception& e) {
    pl.result.status = "runtime_error";
    pl.result.failed_stage = "manifest";
    pl.result.message = e.what();
  }
  return pl.result;
}

int worker_cap_from_env() {
  if (const char* env = std::getenv("DMNLS_MAX_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<BatchItem> run_batch(const std::string& dir, int workers) {
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".toml") paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());

  std::vector<BatchItem> items(paths.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < paths.size(); i = next++) {
      BatchItem& item = items[i];
      item.config_path = paths[i];
      try {
        const RunConfig cfg = parse_config(paths[i]);
        const RunResult r = run(cfg);
        item.exit_code = r.exit_code();
        item.message = r.status + (r.failed_stage.empty() ? "" : " (" + r.failed_stage + ")");
      } catch (const ConfigError& e) {
        item.exit_code = exit_config_error;
        item.message = e.what();
      } catch (const std::exception& e) {
        item.exit_code = exit_runtime_error;
        item.message = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(paths.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return items;
}

}  // namespace dmnls
