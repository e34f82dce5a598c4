#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include "rwalk/cli_output.hpp"
#include "rwalk/flow.hpp"
#include "rwalk/interp.hpp"
#include "rwalk/oracles.hpp"
#include "rwalk/parallel.hpp"
#include "rwalk/spectra.hpp"
#include "rwalk/walk.hpp"

namespace rwalk::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Params make_params(const RunConfig& c) {
  return Params::make(c.d, c.alpha, c.delta,
                      c.n0 == 0 ? std::nullopt : std::optional<int>(c.n0));
}

FlowConfig flow_config(const RunConfig& c) {
  FlowConfig f;
  f.step = c.flow_step;
  f.max_time = c.time;
  return f;
}

struct Emitter {
  fs::path dir;
  json header;
  std::string timestamp;

  Emitter(const RunConfig& c)
      : dir(c.out), header(header_record(c.command, c.effective_json())),
        timestamp(utc_timestamp()) {}

  fs::path path(const std::string& name) const { return dir / name; }
};

std::string csv_columns(const char* prefix, int d) {
  std::string s;
  for (int i = 0; i < d; ++i) s += std::string(i ? "," : "") + prefix + std::to_string(i);
  return s;
}

json eigen_json(const std::vector<Eigenvalue>& ev) {
  json a = json::array();
  for (const auto& e : ev) a.push_back({{"value", e.value}, {"multiplicity", e.multiplicity}});
  return a;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

json spectrum_json(const SpectrumReport& r) {
  return {{"dimension", r.dimension},
          {"numeric", r.numeric},
          {"eigenvalues", eigen_json(r.numeric_pairs)},
          {"closed_form", eigen_json(r.closed_form)},
          {"discrepancy", r.discrepancy},
          {"multiplicities_match", r.multiplicities_match}};
}

json alpha_json(const AlphaReport& a) {
  return {{"condition2_bound", a.condition2_bound},
          {"condition2", a.condition2},
          {"condition1", to_string(a.condition1)},
          {"large_enough", a.large_enough}};
}

void write_scan_row(std::ostream& os, const char* kind, const ScanRow& r) {
  os << kind << ',' << join_reals(r.u) << ',' << join_reals(r.v) << ',' << format_real(r.h)
     << ',' << format_real(r.dhdt) << ',' << to_string(r.region) << '\n';
}

void write_margin_row(std::ostream& os, const char* kind, const InequalityRow& r) {
  os << kind << ',' << join_reals(r.u) << ',' << join_reals(r.v) << ','
     << format_real(r.margin) << '\n';
}

}  // namespace

int cmd_simulate(const RunConfig& cfg) {
  const Params p = make_params(cfg);
  RunOptions o;
  o.thinning = cfg.thinning;
  o.tail_fraction = cfg.tail_fraction;
  const RunResult res = run(p, cfg.steps, cfg.seed, o);
  const TimeGrid grid(p.n0, cfg.steps);
  const Emitter em(cfg);

  AtomicFile traj(em.path("simulate_trajectory.jsonl"));
  write_jsonl_header(traj.stream(), em.header, em.timestamp);
  const std::size_t d = static_cast<std::size_t>(p.d);
  for (std::size_t i = 0; i < res.trajectory.size(); ++i) {
    const auto z = res.trajectory.flat_at(i);
    const auto n = res.trajectory.step_at(i);
    json rec = {{"n", n},
                {"t", grid.tau(n)},
                {"x", std::vector<double>(z.begin(), z.begin() + static_cast<long>(d))},
                {"y", std::vector<double>(z.begin() + static_cast<long>(d), z.end())},
                {"h", res.trajectory.h_at(i)},
                {"in_s_delta", res.trajectory.in_s_delta_at(i)}};
    traj.stream() << rec.dump() << '\n';
  }
  traj.commit();

  const RunSummary& s = res.summary;
  AtomicFile sum(em.path("simulate_summary.csv"));
  write_csv_header(sum.stream(), em.header, em.timestamp);
  sum.stream() << "seed,n_steps,final_h,s_delta_bound,trapped,dist_to_uniform,martingale_sup_tail\n"
               << s.seed << ',' << s.n_steps << ',' << format_real(s.final_h) << ','
               << format_real(p.s_delta_bound()) << ',' << (s.trapped ? 1 : 0) << ','
               << format_real(s.dist_to_uniform) << ',' << format_real(s.martingale_sup_tail)
               << '\n';
  sum.commit();

  std::cout << "final H " << s.final_h << " (S^delta bound " << p.s_delta_bound() << "), "
            << (s.trapped ? "trapped" : "not trapped") << " over the last "
            << cfg.tail_fraction * 100 << "% of steps\n";
  return kOk;
}

int cmd_mc(const RunConfig& cfg) {
  const Params p = make_params(cfg);
  McConfig mc;
  mc.runs = cfg.runs;
  mc.n_steps = cfg.steps;
  mc.base_seed = cfg.seed;
  mc.workers = cfg.workers;
  mc.options.thinning = cfg.thinning;
  mc.options.tail_fraction = cfg.tail_fraction;
  mc.near_uniform_radius = cfg.near_radius;
  const McReport rep = monte_carlo(p, mc);
  const Emitter em(cfg);

  AtomicFile runs(em.path("mc_runs.csv"));
  write_csv_header(runs.stream(), em.header, em.timestamp);
  runs.stream() << "seed,final_h,trapped,dist_to_uniform,martingale_sup_tail\n";
  for (const auto& s : rep.summaries)
    runs.stream() << s.seed << ',' << format_real(s.final_h) << ',' << (s.trapped ? 1 : 0) << ','
                  << format_real(s.dist_to_uniform) << ',' << format_real(s.martingale_sup_tail)
                  << '\n';
  runs.commit();

  AtomicFile agg(em.path("mc_summary.csv"));
  write_csv_header(agg.stream(), em.header, em.timestamp);
  agg.stream() << "runs,n_steps,trapped_rate,near_uniform_rate,mean_final_h\n"
               << rep.runs << ',' << cfg.steps << ',' << format_real(rep.trapped_rate) << ','
               << format_real(rep.near_uniform_rate) << ',' << format_real(rep.mean_final_h)
               << '\n';
  agg.commit();

  std::cout << rep.runs << " runs: trapped-rate " << rep.trapped_rate << ", near-(U,U)-rate "
            << rep.near_uniform_rate << ", mean final H " << rep.mean_final_h << '\n';
  return kOk;
}

int cmd_flow(const RunConfig& cfg) {
  const Params p = make_params(cfg);
  const FlowConfig fc = flow_config(cfg);
  std::optional<ProductPoint> start;
  if (!cfg.x0.empty()) {
    start.emplace(SimplexPoint(cfg.x0), SimplexPoint(cfg.y0));
  } else {
    Rng rng(cfg.seed);
    auto x = sample_simplex(p.d, rng);
    auto y = sample_simplex(p.d, rng);
    start.emplace(SimplexPoint(std::move(x)), SimplexPoint(std::move(y)));
  }
  const ProductPoint& z0 = *start;
  const Emitter em(cfg);

  AtomicFile traj(em.path("flow_trajectory.jsonl"));
  write_jsonl_header(traj.stream(), em.header, em.timestamp);
  const std::size_t d = static_cast<std::size_t>(p.d);
  auto z = z0.flat();
  Rk4Integrator rk(p, fc);
  long k = 0;
  rk.integrate(z, cfg.time, [&](double t, std::span<const double> s) {
    const bool last = t == cfg.time;
    if (k++ % cfg.record_every != 0 && !last) return;
    const auto u = s.first(d), v = s.subspan(d, d);
    json rec = {{"t", t},
                {"x", std::vector<double>(u.begin(), u.end())},
                {"y", std::vector<double>(v.begin(), v.end())},
                {"h", joint_support(u, v)},
                {"dh_dt", dH_dt(u, v, p)},
                {"region", to_string(region_classify(u, v, p))}};
    traj.stream() << rec.dump() << '\n';
  });
  traj.commit();

  const InvarianceReport inv = check_invariance(z0, cfg.time, fc, p);
  const MonotoneReport mono = lyapunov_monotone_check(z0, fc, p);
  const OmegaEstimate om = omega_limit_estimate(z0, fc, p, cfg.tail_fraction);
  const AlphaReport ar = alpha_large_enough(p);
  const ProductPoint zt = ProductPoint::from_flat(z);

  json omega = json::array();
  for (std::size_t i = 0; i < om.points.size(); ++i)
    omega.push_back({{"x", std::vector<double>(om.points[i].x.coords().begin(), om.points[i].x.coords().end())},
                     {"y", std::vector<double>(om.points[i].y.coords().begin(), om.points[i].y.coords().end())},
                     {"density", om.densities[i]}});
  const bool monotone_checked = ar.condition2;
  json report = {
      {"start", z0.flat()},
      {"final", zt.flat()},
      {"final_h", joint_support(zt)},
      {"final_dist_to_uniform", distance_to_uniform(zt)},
      {"lyapunov_threshold", p.lyapunov_threshold()},
      {"s_delta_bound", p.s_delta_bound()},
      {"max_renormalization", rk.max_renormalization()},
      {"invariance",
       {{"min_coordinate", inv.min_coordinate},
        {"zero_coordinates", inv.zero_coordinates},
        {"min_initial_inflow", inv.min_initial_inflow},
        {"inflow_lower_bound", inv.inflow_lower_bound},
        {"zero_coordinates_increase", inv.zero_coordinates_increase},
        {"stays_in_domain", inv.stays_in_domain}}},
      {"monotone",
       {{"checked", monotone_checked},
        {"monotone", mono.monotone},
        {"worst_increase", mono.worst_increase},
        {"entered_s_delta", mono.entered_s_delta},
        {"stayed_in_s_delta", mono.stayed_in_s_delta}}},
      {"omega",
       {{"tail_start", om.tail_start},
        {"tail_end", om.tail_end},
        {"tail_samples", om.tail_samples},
        {"points", omega}}},
      {"alpha", alpha_json(ar)}};
  write_json_file(em.path("flow_report.json"), em.header, em.timestamp, report);

  const bool ok = inv.ok() && (!monotone_checked || mono.monotone);
  std::cout << "final H " << joint_support(zt) << ", distance to (U,U) "
            << distance_to_uniform(zt) << ", " << om.points.size() << " omega cluster(s)"
            << (ok ? "" : "; checks failed") << '\n';
  return ok ? kOk : kViolations;
}

int cmd_gap(const RunConfig& cfg) {
  const Params p = make_params(cfg);
  const FlowConfig fc = flow_config(cfg);
  const auto studies = parallel_map(static_cast<std::size_t>(cfg.runs), cfg.workers,
                                    [&](std::size_t k) {
                                      return gap_study(p, cfg.seed + k, cfg.at, cfg.horizon, fc);
                                    });
  const Emitter em(cfg);
  AtomicFile f(em.path("gap.csv"));
  write_csv_header(f.stream(), em.header, em.timestamp);
  f.stream() << "seed,n,t,T,gap,eps_sup,gronwall_bound,bound_holds\n";
  bool all_hold = true;
  for (const auto& st : studies) {
    for (const auto& s : st.samples) {
      all_hold = all_hold && s.bound_holds;
      f.stream() << st.seed << ',' << s.n << ',' << format_real(s.t) << ','
                 << format_real(cfg.horizon) << ',' << format_real(s.gap) << ','
                 << format_real(s.eps_sup) << ',' << format_real(s.bound) << ','
                 << (s.bound_holds ? 1 : 0) << '\n';
    }
  }
  f.commit();

  for (std::size_t i = 1; i < cfg.at.size(); ++i) {
    int smaller = 0;
    for (const auto& st : studies) smaller += st.samples[i].gap < st.samples[i - 1].gap ? 1 : 0;
    std::cout << "gap at n=" << cfg.at[i] << " below gap at n=" << cfg.at[i - 1] << " in "
              << smaller << "/" << studies.size() << " runs\n";
  }
  std::cout << "Gronwall bound " << (all_hold ? "holds" : "FAILS") << " on every window\n";
  return all_hold ? kOk : kViolations;
}

int cmd_spectrum(const RunConfig& cfg) {
  const Params p = make_params(cfg);
  const SpectrumReport df = jacobian_spectrum(p);
  const Stability st = classify_equilibrium(p);
  const AppendixSpectra ap = appendix_matrices(p.d, p.alpha);
  const Emitter em(cfg);

  json report = spectrum_json(df);
  report["stability"] = to_string(st);
  report["jacobian"] = matrix_json(jacobian_at_uniform(p));
  report["appendix"] = {
      {"M", matrix_json(ap.m)},
      {"N", matrix_json(ap.n)},
      {"M_stated", spectrum_json(ap.m_vs_stated)},
      {"N_stated", spectrum_json(ap.n_vs_stated)},
      {"M_derived", spectrum_json(ap.m_vs_derived)},
      {"N_derived", spectrum_json(ap.n_vs_derived)},
      {"row_sums_exact_zero", ap.row_sums_exact_zero},
      {"psd_single_zero", ap.psd_single_zero},
      {"alpha_above_d_minus_2", p.alpha > p.d - 2}};
  write_json_file(em.path("spectrum.json"), em.header, em.timestamp, report);

  const bool ok = df.discrepancy <= 1e-10 && df.multiplicities_match &&
                  ap.m_vs_derived.discrepancy <= 1e-10 && ap.n_vs_derived.discrepancy <= 1e-10 &&
                  ap.row_sums_exact_zero;
  std::cout << "DF at (U,U):";
  for (const auto& e : df.numeric_pairs) std::cout << ' ' << e.value << " (x" << e.multiplicity << ")";
  std::cout << "; " << to_string(st) << "; max discrepancy " << df.discrepancy << '\n';
  if (ap.m_vs_stated.discrepancy > 1e-10 || ap.n_vs_stated.discrepancy > 1e-10)
    std::cout << "note: the printed closed forms for M and N differ from their numeric spectra "
                 "by up to "
              << std::max(ap.m_vs_stated.discrepancy, ap.n_vs_stated.discrepancy) << '\n';
  return ok ? kOk : kViolations;
}

int cmd_lyapunov_scan(const RunConfig& cfg) {
  const Params p = make_params(cfg);
  ScanConfig sc;
  sc.resolution = cfg.resolution;
  sc.floor = cfg.effective_floor();
  sc.apply_threshold = !cfg.no_threshold;
  sc.workers = cfg.workers;
  const AlphaReport ar = alpha_large_enough(p);
  if (!ar.condition2)
    std::cerr << "warning: alpha <= log d / log(4/3) = " << ar.condition2_bound
              << "; the sign argument does not apply\n";
  const Emitter em(cfg);
  const std::string columns =
      "kind," + csv_columns("u", p.d) + "," + csv_columns("v", p.d) + ",h,dh_dt,region\n";

  std::optional<AtomicFile> rows;
  std::function<void(const ScanRow&)> sink;
  if (cfg.dump) {
    rows.emplace(em.path("lyapunov_scan_rows.csv"));
    write_csv_header(rows->stream(), em.header, em.timestamp);
    rows->stream() << columns;
    sink = [&](const ScanRow& r) { write_scan_row(rows->stream(), "row", r); };
  }
  const LyapunovScanReport rep = lyapunov_scan(p, sc, sink);
  if (rows) rows->commit();

  AtomicFile f(em.path("lyapunov_scan.csv"));
  write_csv_header(f.stream(), em.header, em.timestamp);
  f.stream() << columns;
  write_scan_row(f.stream(), "argmax", rep.argmax);
  for (const auto& v : rep.violations) write_scan_row(f.stream(), "violation", v);
  f.commit();

  json report = {{"lattice_points", rep.lattice_points},
                 {"pairs_checked", rep.pairs_checked},
                 {"pairs_in_region", rep.pairs_in_region},
                 {"threshold", sc.apply_threshold ? p.lyapunov_threshold() : 0.0},
                 {"violation_count", rep.violation_count},
                 {"max_dh_dt", rep.argmax.dhdt},
                 {"argmax_u", rep.argmax.u},
                 {"argmax_v", rep.argmax.v},
                 {"argmax_region", to_string(rep.argmax.region)},
                 {"argmax_nearest_uniform", rep.argmax_nearest_uniform},
                 {"nearest_uniform_distance", rep.nearest_uniform_distance},
                 {"alpha", alpha_json(ar)}};
  write_json_file(em.path("lyapunov_scan.json"), em.header, em.timestamp, report);

  std::cout << rep.pairs_in_region << " pairs scanned, " << rep.violation_count
            << " with dH/dt > 1e-12; max dH/dt " << rep.argmax.dhdt
            << (rep.argmax_nearest_uniform ? " at the lattice point nearest (U,U)" : "") << '\n';
  return rep.ok() ? kOk : kViolations;
}

int cmd_verify_appendix(const RunConfig& cfg) {
  const Params p = make_params(cfg);
  const GridSpec grid{cfg.resolution, cfg.effective_floor()};
  const auto samples = static_cast<std::size_t>(cfg.samples);
  const Emitter em(cfg);
  const std::string columns =
      "kind," + csv_columns("u", p.d) + "," + csv_columns("v", p.d) + ",margin\n";

  std::optional<AtomicFile> rows;
  std::function<void(const InequalityRow&)> sink;
  if (cfg.dump) {
    rows.emplace(em.path("verify_appendix_rows.csv"));
    write_csv_header(rows->stream(), em.header, em.timestamp);
    rows->stream() << columns;
    sink = [&](const InequalityRow& r) { write_margin_row(rows->stream(), "row", r); };
  }
  const InequalityReport a1 = verify_master_grid(p.d, p.alpha, grid, {cfg.workers, 1000}, sink);
  if (rows) rows->commit();

  const double alphas[] = {0.5 * p.alpha, p.alpha, 2.0 * p.alpha};
  const SweepReport mean = mean_bound_sweep(p.d, p.alpha, samples, cfg.seed, cfg.workers);
  const SweepReport rear = rearrangement_sweep(p.d, samples, cfg.seed + 1, cfg.workers);
  const SweepReport mono = ratio_monotone_sweep(p.d, alphas, samples, cfg.seed + 2, cfg.workers);
  const SweepReport inter = intermediate_bound_sweep(p.d, p.alpha, samples, cfg.seed + 3, cfg.workers);
  const LocalMinProbe probe = local_min_probe(p.d, p.alpha, cfg.radius, samples, cfg.seed + 4, cfg.workers);
  const FarCoverage far = far_from_uniform_grid(p.d, p.alpha, cfg.kappa, grid);
  const AppendixSpectra ap = appendix_matrices(p.d, p.alpha);
  const AlphaReport ar = alpha_large_enough(p, a1.ok());

  AtomicFile f(em.path("verify_appendix.csv"));
  write_csv_header(f.stream(), em.header, em.timestamp);
  f.stream() << columns;
  write_margin_row(f.stream(), "argmin", a1.argmin);
  for (const auto& v : a1.violations) write_margin_row(f.stream(), "violation", v);
  f.commit();

  auto sweep = [](const SweepReport& r) {
    return json{{"samples", r.samples}, {"violations", r.violations}, {"extreme", r.extreme}};
  };
  json report = {
      {"master_inequality",
       {{"lattice_points", a1.lattice_points},
        {"points_checked", a1.points_checked},
        {"min_margin", a1.min_margin},
        {"argmin_u", a1.argmin.u},
        {"argmin_v", a1.argmin.v},
        {"argmin_adjacent_uniform", a1.argmin_adjacent_uniform},
        {"violation_count", a1.violation_count},
        {"wall_seconds", a1.wall_seconds}}},
      {"mean_bound", sweep(mean)},
      {"rearrangement", sweep(rear)},
      {"ratio_monotone", sweep(mono)},
      {"intermediate_bound", sweep(inter)},
      {"local_min_probe",
       {{"samples", probe.samples},
        {"min_g", probe.min_g},
        {"argmin", probe.argmin},
        {"negative", probe.negative},
        {"hypothesis_alpha_above_d_minus_2", probe.hypothesis}}},
      {"far_from_uniform",
       {{"kappa", cfg.kappa},
        {"threshold", far.threshold},
        {"lattice_points", far.lattice_points},
        {"applicable", far.applicable},
        {"failures", far.failures}}},
      {"hessian",
       {{"row_sums_exact_zero", ap.row_sums_exact_zero},
        {"psd_single_zero", ap.psd_single_zero},
        {"derived_discrepancy", std::max(ap.m_vs_derived.discrepancy, ap.n_vs_derived.discrepancy)},
        {"stated_discrepancy", std::max(ap.m_vs_stated.discrepancy, ap.n_vs_stated.discrepancy)}}},
      {"alpha", alpha_json(ar)}};
  write_json_file(em.path("verify_appendix.json"), em.header, em.timestamp, report);

  const bool ok = a1.ok() && mean.ok() && rear.ok() && mono.ok() && inter.ok() &&
                  (!probe.hypothesis || probe.ok()) && far.failures == 0;
  std::cout << "master inequality: " << a1.points_checked << " pairs, min margin " << a1.min_margin
            << ", " << a1.violation_count << " violations\n"
            << "sampling sweeps: " << mean.violations + rear.violations + mono.violations +
                                          inter.violations
            << " violations; local-min probe min g " << probe.min_g << "; far-from-uniform "
            << far.failures << "/" << far.applicable << " applicable points fail\n";
  return ok ? kOk : kViolations;
}

}  // namespace rwalk::cli
