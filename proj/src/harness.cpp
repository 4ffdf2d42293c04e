#include "vnslab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "vnslab/binary_io.hpp"
#include "vnslab/errors.hpp"
#include "vnslab/fluid.hpp"
#include "vnslab/svg_plot.hpp"
#include "vnslab/vfp.hpp"

#ifndef VNSLAB_VERSION
#define VNSLAB_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace vnslab {

const char* code_version() { return VNSLAB_VERSION; }

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::string snap_name(const char* stem, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu.%s", stem, i, ext);
  return buf;
}

std::string cell_name(long N, std::uint64_t seed) {
  return "N" + std::to_string(N) + "_seed" + std::to_string(seed);
}

void say(const Logger& log, const std::string& s) {
  if (log) log(s);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

// columns of a CSV with a header row, by name
std::map<std::string, std::vector<double>> read_columns(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::map<std::string, std::vector<double>> cols;
  if (!std::getline(is, line)) return cols;
  const auto names = split(line, ',');
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    for (std::size_t i = 0; i < names.size() && i < f.size(); ++i) cols[names[i]].push_back(std::strtod(f[i].c_str(), nullptr));
  }
  return cols;
}

json manifest_base(const ExperimentConfig& c, const std::string& kind) {
  json m;
  m["kind"] = kind;
  m["config_hash"] = config_hash(c);
  m["code_version"] = code_version();
  return m;
}

}  // namespace

// ---- files ----------------------------------------------------------------

void write_file_atomic(const std::string& path, const std::function<void(std::ostream&)>& body) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp);
    body(os);
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + tmp);
  }
  fs::rename(tmp, target);
}

void write_text_atomic(const std::string& path, const std::string& text) {
  write_file_atomic(path, [&](std::ostream& os) { os << text; });
}

std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_fluid_series(std::ostream& os, const FluidSeries& s) {
  binio::put_magic(os, "KFLS");
  binio::put<std::uint64_t>(os, s.u.size());
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    binio::put<double>(os, s.t[i]);
    write_field_snapshot(os, s.u[i]);
  }
}

FluidSeries read_fluid_series(std::istream& is) {
  binio::expect_magic(is, "KFLS");
  const auto n = binio::get<std::uint64_t>(is);
  FluidSeries s;
  for (std::uint64_t i = 0; i < n; ++i) {
    s.t.push_back(binio::get<double>(is));
    s.u.push_back(read_field_snapshot(is));
  }
  return s;
}

namespace {

FluidSeries read_fluid_series_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_fluid_series(is);
}

}  // namespace

std::vector<std::string> run_pool(std::size_t n, int workers, const std::function<void(std::size_t)>& task) {
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        task(i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
        if (errors[i].empty()) errors[i] = "unknown failure";
      }
    }
  };
  const int k = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (k == 1) {
    work();
    return errors;
  }
  std::vector<std::thread> pool;
  for (int i = 0; i < k; ++i) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return errors;
}

// ---- set-up ---------------------------------------------------------------

Grid fluid_grid(const ExperimentConfig& c) { return Grid(c.d, c.fluid_resolution); }

PhaseGrid phase_grid(const ExperimentConfig& c) {
  return PhaseGrid(c.d, c.phase_x_resolution, c.phase_v_resolution, c.v_max);
}

SpectralField initial_fluid(const ExperimentConfig& c) {
  const Grid g = fluid_grid(c);
  const auto& f = c.initial_fluid;
  if (f.kind == "shear") return shear_flow(g, f.amplitude);
  if (f.kind == "zero") {
    SpectralField u(g, c.d);
    u.set_divergence_free(true);
    return u;
  }
  auto u = read_field_snapshot(f.path);
  if (!(u.grid() == g) || u.components() != c.d) throw ConfigError("initial fluid snapshot does not match the fluid grid");
  return leray_project(u);
}

PhaseSpaceDensity initial_density(const ExperimentConfig& c) {
  const PhaseGrid pg = phase_grid(c);
  if (c.initial_density.kind == "zero") return PhaseSpaceDensity(pg);
  return uniform_maxwellian(pg, c.initial_density.mean, c.initial_density.std);
}

InitialLaw initial_law(const ExperimentConfig& c) { return InitialLaw{c.initial_density.mean, c.initial_density.std}; }

// ---- runs -----------------------------------------------------------------

LimitRun run_limit(const ExperimentConfig& c, LimitMode mode, long N, const std::string& dir, bool keep_density,
                   const DensityHook& on_snapshot) {
  require_valid(c);
  const auto t0 = Clock::now();
  const bool aux = mode == LimitMode::Auxiliary;
  const double sigma = aux ? c.sigma_N(N) : c.sigma;
  const DragMode drag = aux ? DragMode::Cutoff : DragMode::Plain;
  const Cutoff chi(c.A);
  LimitState s{FluidState{initial_fluid(c)}, initial_density(c)};
  s.fluid.cutoff_in_advection = aux;
  s.fluid.forcing_mode = ForcingMode::Kinetic;

  LimitRun run;
  std::ostringstream diag;
  diag << "step,t,u_l2,u_bessel,fluid_energy,mass,boundary_fraction,min_value,div_residual\n";
  bool warned_boundary = false, warned_negative = false;
  const int steps = c.steps();
  for (int step = 0;; ++step) {
    run.fluid.t.push_back(s.fluid.t);
    run.fluid.u.push_back(s.fluid.u);
    const double bf = s.F.boundary_mass_fraction();
    const double mn = s.F.min_value();
    diag << step << ',' << format_double(s.fluid.t) << ',' << format_double(parseval_bessel_norm(s.fluid.u, 0)) << ','
         << format_double(bessel_norm(s.fluid.u, c.gamma, c.p)) << ',' << format_double(fluid_energy(s.fluid.u)) << ','
         << format_double(s.F.mass()) << ',' << format_double(bf) << ',' << format_double(mn) << ','
         << format_double(divergence_residual(s.fluid.u)) << '\n';
    if (bf >= 1e-6 && !warned_boundary) {
      run.warnings.push_back("step " + std::to_string(step) + ": boundary-cell mass fraction " + format_double(bf) +
                             " >= 1e-6, v_max too small");
      warned_boundary = true;
    }
    if (mn < -1e-12 && !warned_negative) {
      run.warnings.push_back("step " + std::to_string(step) + ": density minimum " + format_double(mn));
      warned_negative = true;
    }
    if (step % c.snapshot_every == 0) {
      const std::size_t i = static_cast<std::size_t>(step / c.snapshot_every);
      if (!dir.empty()) write_file_atomic(join(dir, snap_name("F", i, "kphd")), [&](std::ostream& os) { write_phase_snapshot(os, s.F); });
      if (on_snapshot) on_snapshot(i, s.F);
      if (keep_density) run.F.push_back(s.F);
    }
    if (step == steps) break;
    try {
      limit_coupled_step(s, sigma, c.dt, drag, chi);
    } catch (const SolverError& e) {
      throw SolverError("limit run, step " + std::to_string(step) + ": " + e.what());
    }
  }
  run.diagnostics_csv = diag.str();
  run.wall_seconds = seconds_since(t0);
  if (!dir.empty()) {
    write_file_atomic(join(dir, "fluid.kfls"), [&](std::ostream& os) { write_fluid_series(os, run.fluid); });
    write_text_atomic(join(dir, "diagnostics.csv"), run.diagnostics_csv);
    json m = manifest_base(c, aux ? "run-limit auxiliary" : "run-limit plain");
    if (aux) m["N"] = N;
    m["sigma_used"] = sigma;
    m["wall_seconds"] = run.wall_seconds;
    m["warnings"] = run.warnings;
    write_text_atomic(join(dir, "manifest.json"), m.dump(2) + "\n");
  }
  return run;
}

CoupledRun run_coupled(const ExperimentConfig& c, long N, std::uint64_t seed, const std::string& dir,
                       const FluidSeries* limit_fluid) {
  require_valid(c);
  const auto t0 = Clock::now();
  const int steps = c.steps();
  if (limit_fluid && limit_fluid->u.size() != static_cast<std::size_t>(steps) + 1)
    throw MetricError("limit fluid series must hold one field per step");
  const auto fam = MollifierFamily::build(c.alpha, c.beta, N, c.d, c.x_kernel);
  require_resolved(phase_grid(c), fam);
  const Cutoff chi(c.A);
  CoupledRun run;
  run.N = N;
  run.seed = seed;
  run.sigma_N = c.sigma_N(N);
  ParticleEnsemble ens = init_sample(c.d, N, seed, initial_law(c), run.sigma_N);
  ParticleEnsemble lim;
  if (limit_fluid) lim = init_sample(c.d, N, seed, initial_law(c), c.sigma);
  FluidState fluid{initial_fluid(c)};
  fluid.forcing_mode = ForcingMode::Particles;

  std::ostringstream diag;
  diag << "step,t,u_l2,u_bessel,fluid_energy,kinetic_energy,total_energy,div_residual\n";
  for (int step = 0;; ++step) {
    run.fluid.t.push_back(fluid.t);
    run.fluid.u.push_back(fluid.u);
    const double fe = fluid_energy(fluid.u), ke = kinetic_energy(ens);
    diag << step << ',' << format_double(fluid.t) << ',' << format_double(parseval_bessel_norm(fluid.u, 0)) << ','
         << format_double(bessel_norm(fluid.u, c.gamma, c.p)) << ',' << format_double(fe) << ',' << format_double(ke) << ','
         << format_double(fe + ke) << ',' << format_double(divergence_residual(fluid.u)) << '\n';
    if (step % c.snapshot_every == 0) {
      const std::size_t i = static_cast<std::size_t>(step / c.snapshot_every);
      run.particles.t.push_back(fluid.t);
      run.particles.snaps.push_back(ens);
      if (!dir.empty())
        write_file_atomic(join(dir, snap_name("particles", i, "kprt")), [&](std::ostream& os) { write_particle_snapshot(os, ens); });
      if (limit_fluid) {
        run.limit_particles.t.push_back(limit_fluid->t[step]);
        run.limit_particles.snaps.push_back(lim);
        if (!dir.empty())
          write_file_atomic(join(dir, snap_name("limit_particles", i, "kprt")),
                            [&](std::ostream& os) { write_particle_snapshot(os, lim); });
      }
    }
    if (step == steps) break;
    try {
      coupled_step(fluid, ens, fam, chi, c.dt, c.interpolation);
      if (limit_fluid) particle_step(lim, limit_fluid->u[step], c.dt, Cutoff::inactive(), c.interpolation);
    } catch (const SolverError& e) {
      throw SolverError("coupled run N=" + std::to_string(N) + " seed=" + std::to_string(seed) + ", step " +
                        std::to_string(step) + ": " + e.what());
    }
  }
  if (ens.N() != N) throw SolverError("particle count changed during the run");
  run.diagnostics_csv = diag.str();
  run.wall_seconds = seconds_since(t0);
  if (!dir.empty()) {
    write_file_atomic(join(dir, "fluid.kfls"), [&](std::ostream& os) { write_fluid_series(os, run.fluid); });
    write_text_atomic(join(dir, "diagnostics.csv"), run.diagnostics_csv);
    json m = manifest_base(c, "run-coupled");
    m["N"] = N;
    m["seed"] = seed;
    m["sigma_N"] = run.sigma_N;
    m["particles"] = ens.N();
    m["limit_particles"] = limit_fluid != nullptr;
    m["wall_seconds"] = run.wall_seconds;
    write_text_atomic(join(dir, "manifest.json"), m.dump(2) + "\n");
  }
  return run;
}

// ---- tables ---------------------------------------------------------------

namespace {

struct Metric {
  const char* name;
  double ErrorRecord::*field;
};

const Metric kMetrics[] = {
    {"bessel_err", &ErrorRecord::bessel_err},   {"weighted_err", &ErrorRecord::weighted_err},
    {"energy_err", &ErrorRecord::energy_err},   {"dissipation_err", &ErrorRecord::dissipation_err},
    {"chaos_err", &ErrorRecord::chaos_err},     {"rho_N", &ErrorRecord::rho_N},
    {"rho_tilde_N", &ErrorRecord::rho_tilde_N}, {"surrogate", &ErrorRecord::surrogate}};

struct Group {
  long N;
  std::vector<const ErrorRecord*> rows;
  double mean(double ErrorRecord::*f) const {
    double s = 0;
    for (const auto* r : rows) s += r->*f;
    return s / static_cast<double>(rows.size());
  }
};

std::vector<Group> by_N(const std::vector<ErrorRecord>& records) {
  std::vector<Group> g;
  for (const auto& r : records) {
    if (g.empty() || g.back().N != r.N) g.push_back({r.N, {}});
    g.back().rows.push_back(&r);
  }
  return g;
}

std::string errors_table(const std::vector<ErrorRecord>& records) {
  std::string s = error_record_header() + "\n";
  for (const auto& r : records) s += error_record_row(r) + "\n";
  return s;
}

}  // namespace

std::string summary_table(const std::vector<ErrorRecord>& records) {
  std::string s = "N,seeds,sigma_N";
  for (const auto& m : kMetrics) s += std::string(",") + m.name;
  s += "\n";
  for (const auto& g : by_N(records)) {
    s += std::to_string(g.N) + "," + std::to_string(g.rows.size()) + "," + format_double(g.rows.front()->sigma_N);
    for (const auto& m : kMetrics) s += "," + format_double(g.mean(m.field));
    s += "\n";
  }
  return s;
}

std::string rates_table(const std::vector<ErrorRecord>& records) {
  std::string s = "metric,slope,intercept,r2,spearman\n";
  const auto groups = by_N(records);
  for (const auto& m : kMetrics) {
    std::vector<std::pair<double, double>> pts;
    std::vector<double> xs, ys;
    bool positive = true;
    for (const auto& g : groups) {
      const double v = g.mean(m.field);
      pts.push_back({double(g.N), v});
      xs.push_back(double(g.N));
      ys.push_back(v);
      positive = positive && v > 0;
    }
    s += m.name;
    if (groups.size() >= 2 && positive) {
      const auto f = rate_fit(pts);
      s += "," + format_double(f.slope) + "," + format_double(f.intercept) + "," + format_double(f.r2) + "," +
           format_double(spearman(xs, ys));
    } else {
      s += ",nan,nan,nan,nan";
    }
    s += "\n";
  }
  return s;
}

std::string chaos_table(const std::vector<ErrorRecord>& records) {
  std::string s = "N,seed,chaos_err,sigma_N,bessel_err,surrogate,ratio\n";
  for (const auto& r : records)
    s += std::to_string(r.N) + "," + std::to_string(r.seed) + "," + format_double(r.chaos_err) + "," +
         format_double(r.sigma_N) + "," + format_double(r.bessel_err) + "," + format_double(r.surrogate) + "," +
         format_double(r.surrogate > 0 ? r.chaos_err / r.surrogate : 0.0) + "\n";
  return s;
}

std::string csv_column_help() {
  return
      "errors.csv (one row per (N, seed), sorted by N then seed):\n"
      "  N, seed          particle count and RNG seed of the cell\n"
      "  bessel_err       sup_t ||u^N - u||_{gamma,p}, every step\n"
      "  weighted_err     sup_t ||<v>^k (F^N - F)||_{L2}, F^N deposited on the phase grid, every snapshot\n"
      "  energy_err       sup_t ||u^N - u||_{L2}\n"
      "  dissipation_err  int_0^T ||grad(u^N - u)||^2 dt (trapezoid over steps)\n"
      "  chaos_err        max_i sup_t |(X^i,V^i) - (Xbar^i,Vbar^i)|, torus metric in x\n"
      "  rho_N            sqrt(sup_t ||u^(N) - u||_{gamma,p}^2 + sup_t ||<v>^k (F^(N)*theta - F)||^2)\n"
      "  rho_tilde_N      sup_t ||<v>^k (F^(N)*theta - F^(N))||_{L2}\n"
      "  sigma_N          noise level of the particle system\n"
      "  surrogate        |sigma - sigma_N| + bessel_err\n"
      "summary.csv: N, seeds, sigma_N, then the seed mean of each error column\n"
      "rates.csv: metric, slope, intercept, r2 of log(mean error) on log N, spearman(N, mean error)\n"
      "chaos.csv: N, seed, chaos_err, sigma_N, bessel_err, surrogate, ratio = chaos_err / surrogate\n"
      "failures.csv: what, message\n"
      "diagnostics.csv (coupled): step, t, u_l2, u_bessel, fluid_energy, kinetic_energy, total_energy, div_residual\n"
      "diagnostics.csv (limit): step, t, u_l2, u_bessel, fluid_energy, mass, boundary_fraction, min_value, div_residual\n";
}

// ---- studies --------------------------------------------------------------

namespace {

struct AuxMetrics {
  double rho = 0;
  double rho_tilde = 0;
};

ErrorRecord cell_errors(const ExperimentConfig& c, const CoupledRun& run, const LimitRun& lim, bool with_density) {
  ErrorRecord r;
  r.N = run.N;
  r.seed = run.seed;
  r.sigma_N = run.sigma_N;
  r.bessel_err = sup_bessel_error(run.fluid, lim.fluid, c.gamma, c.p);
  r.energy_err = sup_energy_error(run.fluid, lim.fluid);
  r.dissipation_err = dissipation_error(run.fluid, lim.fluid);
  r.chaos_err = chaos_error(run.particles, run.limit_particles);
  r.surrogate = std::abs(c.sigma - run.sigma_N) + r.bessel_err;
  if (with_density) {
    const auto fam = MollifierFamily::build(c.alpha, c.beta, run.N, c.d, c.x_kernel);
    const PhaseGrid pg = phase_grid(c);
    if (lim.F.size() != run.particles.snaps.size()) throw MetricError("misaligned snapshots: particle and density counts differ");
    for (std::size_t i = 0; i < lim.F.size(); ++i) {
      if (std::abs(lim.F[i].t - run.particles.t[i]) > 1e-9) throw MetricError("misaligned snapshots at index " + std::to_string(i));
      const auto FN = empirical_density(run.particles.snaps[i], fam, pg);
      r.weighted_err = std::max(r.weighted_err, weighted_l2_distance(FN, lim.F[i], c.k));
    }
  }
  return r;
}

void write_plots(const std::string& dir, const std::vector<ErrorRecord>& records, bool convergence) {
  const auto groups = by_N(records);
  auto series = [&](const char* name, double ErrorRecord::*f) {
    PlotSeries s{name, {}, {}};
    for (const auto& g : groups) {
      s.x.push_back(double(g.N));
      s.y.push_back(g.mean(f));
    }
    return s;
  };
  if (convergence) {
    PlotSpec spec{"seed-averaged errors", "N", "error", true, true};
    write_text_atomic(join(dir, "plots/errors_vs_N.svg"),
                      svg_line_chart(spec, {series("bessel", &ErrorRecord::bessel_err), series("weighted", &ErrorRecord::weighted_err),
                                            series("energy", &ErrorRecord::energy_err),
                                            series("dissipation", &ErrorRecord::dissipation_err),
                                            series("rho_N", &ErrorRecord::rho_N), series("rho_tilde_N", &ErrorRecord::rho_tilde_N)}));
  }
  PlotSpec cs{"chaos error", "N", "error", true, true};
  write_text_atomic(join(dir, "plots/chaos_vs_N.svg"),
                    svg_line_chart(cs, {series("chaos", &ErrorRecord::chaos_err), series("surrogate", &ErrorRecord::surrogate)}));
  const std::string diag = join(dir, "limit/diagnostics.csv");
  if (fs::exists(diag)) {
    auto cols = read_columns(read_text(diag));
    PlotSpec ts{"limit fluid norms", "t", "norm", false, false};
    write_text_atomic(join(dir, "plots/limit_norms.svg"),
                      svg_line_chart(ts, {{"||u||_L2", cols["t"], cols["u_l2"]}, {"||u||_gamma,p", cols["t"], cols["u_bessel"]}}));
  }
}

void write_outputs(const std::string& dir, StudyResult& res, bool convergence) {
  std::sort(res.records.begin(), res.records.end(),
            [](const ErrorRecord& a, const ErrorRecord& b) { return a.N != b.N ? a.N < b.N : a.seed < b.seed; });
  if (convergence) {
    res.errors_csv = errors_table(res.records);
    res.summary_csv = summary_table(res.records);
    res.rates_csv = rates_table(res.records);
    write_text_atomic(join(dir, "errors.csv"), res.errors_csv);
    write_text_atomic(join(dir, "summary.csv"), res.summary_csv);
    write_text_atomic(join(dir, "rates.csv"), res.rates_csv);
  }
  res.chaos_csv = chaos_table(res.records);
  write_text_atomic(join(dir, "chaos.csv"), res.chaos_csv);
  std::string f = "what,message\n";
  for (const auto& s : res.failures) f += s + "\n";
  write_text_atomic(join(dir, "failures.csv"), f);
  write_plots(dir, res.records, convergence);
}

std::string csv_escape(const std::string& s) {
  std::string o = "\"";
  for (char ch : s) o += ch == '"' ? std::string("\"\"") : std::string(1, ch == '\n' ? ' ' : ch);
  return o + "\"";
}

StudyResult run_study(const ExperimentConfig& c, const RunOptions& opt, bool convergence) {
  require_valid(c);
  const auto t0 = Clock::now();
  const std::string dir = opt.out_dir.empty() ? c.output_dir : opt.out_dir;
  fs::create_directories(dir);
  write_text_atomic(join(dir, "config.json"), config_to_json(c).dump(2) + "\n");
  std::vector<std::uint64_t> seeds;
  for (auto s : c.seeds) seeds.push_back(s + opt.seed_offset);

  say(opt.log, "limit run (" + std::to_string(c.steps()) + " steps)");
  const LimitRun lim = run_limit(c, LimitMode::Plain, 0, join(dir, "limit"), convergence);

  struct Cell {
    long N;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (long N : c.N_schedule)
    for (auto s : seeds) cells.push_back({N, s});
  const std::size_t n_aux = convergence ? c.N_schedule.size() : 0;
  std::vector<AuxMetrics> aux(n_aux);
  std::vector<ErrorRecord> recs(cells.size());
  std::vector<double> wall(n_aux + cells.size(), 0.0);
  std::mutex log_mu;
  auto log = [&](const std::string& s) {
    std::lock_guard<std::mutex> g(log_mu);
    say(opt.log, s);
  };

  const auto errors = run_pool(n_aux + cells.size(), opt.workers, [&](std::size_t i) {
    const auto ti = Clock::now();
    if (i < n_aux) {
      const long N = c.N_schedule[i];
      const auto fam = MollifierFamily::build(c.alpha, c.beta, N, c.d, c.x_kernel);
      double kin = 0, tilde = 0;
      auto hook = [&](std::size_t s, const PhaseSpaceDensity& F) {
        if (s >= lim.F.size() || std::abs(lim.F[s].t - F.t) > 1e-9) throw MetricError("misaligned snapshots in auxiliary run");
        const auto MF = mollify_density(F, fam);
        kin = std::max(kin, weighted_l2_distance(MF, lim.F[s], c.k));
        tilde = std::max(tilde, weighted_l2_distance(MF, F, c.k));
      };
      const auto run = run_limit(c, LimitMode::Auxiliary, N, join(dir, "aux/N" + std::to_string(N)), false, hook);
      const double fl = sup_bessel_error(run.fluid, lim.fluid, c.gamma, c.p);
      aux[i] = {std::sqrt(fl * fl + kin * kin), tilde};
      wall[i] = seconds_since(ti);
      log("auxiliary N=" + std::to_string(N) + " done");
      return;
    }
    const auto& cell = cells[i - n_aux];
    const auto run = run_coupled(c, cell.N, cell.seed, join(dir, "cells/" + cell_name(cell.N, cell.seed)), &lim.fluid);
    recs[i - n_aux] = cell_errors(c, run, lim, convergence);
    wall[i] = seconds_since(ti);
    log("cell " + cell_name(cell.N, cell.seed) + " done");
  });

  StudyResult res;
  for (std::size_t i = 0; i < n_aux; ++i)
    if (!errors[i].empty()) res.failures.push_back("aux N=" + std::to_string(c.N_schedule[i]) + "," + csv_escape(errors[i]));
  for (std::size_t j = 0; j < cells.size(); ++j) {
    const std::size_t i = n_aux + j;
    if (!errors[i].empty()) {
      res.failures.push_back("cell " + cell_name(cells[j].N, cells[j].seed) + "," + csv_escape(errors[i]));
      continue;
    }
    if (convergence) {
      const auto it = std::find(c.N_schedule.begin(), c.N_schedule.end(), cells[j].N);
      const std::size_t a = static_cast<std::size_t>(it - c.N_schedule.begin());
      if (!errors[a].empty()) continue;
      recs[j].rho_N = aux[a].rho;
      recs[j].rho_tilde_N = aux[a].rho_tilde;
    }
    res.records.push_back(recs[j]);
  }
  write_outputs(dir, res, convergence);

  json m = manifest_base(c, convergence ? "convergence-study" : "chaos-study");
  m["seeds"] = seeds;
  m["seed_offset"] = opt.seed_offset;
  m["N_schedule"] = c.N_schedule;
  json sn = json::object();
  for (long N : c.N_schedule) sn[std::to_string(N)] = c.sigma_N(N);
  m["sigma_N"] = sn;
  m["workers"] = opt.workers;
  json w = json::object();
  w["limit"] = lim.wall_seconds;
  for (std::size_t i = 0; i < n_aux; ++i) w["aux_N" + std::to_string(c.N_schedule[i])] = wall[i];
  for (std::size_t j = 0; j < cells.size(); ++j) w[cell_name(cells[j].N, cells[j].seed)] = wall[n_aux + j];
  w["total"] = seconds_since(t0);
  m["wall_seconds"] = w;
  m["warnings"] = lim.warnings;
  m["failures"] = res.failures;
  write_text_atomic(join(dir, "manifest.json"), m.dump(2) + "\n");
  return res;
}

}  // namespace

StudyResult convergence_study(const ExperimentConfig& c, const RunOptions& opt) { return run_study(c, opt, true); }

StudyResult chaos_study(const ExperimentConfig& c, const RunOptions& opt) { return run_study(c, opt, false); }

StudyResult replot(const std::string& dir, const bool recompute, const Logger& log) {
  const auto c = load_config(join(dir, "config.json"));
  const json manifest = json::parse(read_text(join(dir, "manifest.json")));
  const bool convergence = manifest.at("kind") == "convergence-study";
  StudyResult res;
  if (!recompute) {
    if (convergence) {
      res.errors_csv = read_text(join(dir, "errors.csv"));
      res.records = parse_error_records(res.errors_csv);
    } else {
      // chaos.csv carries the columns the chaos plot needs
      auto cols = read_columns(read_text(join(dir, "chaos.csv")));
      for (std::size_t i = 0; i < cols["N"].size(); ++i) {
        ErrorRecord r;
        r.N = static_cast<long>(cols["N"][i]);
        r.seed = static_cast<std::uint64_t>(cols["seed"][i]);
        r.chaos_err = cols["chaos_err"][i];
        r.sigma_N = cols["sigma_N"][i];
        r.bessel_err = cols["bessel_err"][i];
        r.surrogate = cols["surrogate"][i];
        res.records.push_back(r);
      }
    }
    write_plots(dir, res.records, convergence);
    return res;
  }

  say(log, "loading limit run");
  LimitRun lim;
  lim.fluid = read_fluid_series_file(join(dir, "limit/fluid.kfls"));
  const std::size_t n_snap = static_cast<std::size_t>(c.steps() / c.snapshot_every) + 1;
  if (convergence)
    for (std::size_t i = 0; i < n_snap; ++i) lim.F.push_back(read_phase_snapshot(join(dir, "limit/" + snap_name("F", i, "kphd"))));

  std::map<long, AuxMetrics> aux;
  if (convergence) {
    for (long N : c.N_schedule) {
      const std::string ad = join(dir, "aux/N" + std::to_string(N));
      if (!fs::exists(join(ad, "fluid.kfls"))) continue;
      const auto fam = MollifierFamily::build(c.alpha, c.beta, N, c.d, c.x_kernel);
      double kin = 0, tilde = 0;
      for (std::size_t i = 0; i < n_snap; ++i) {
        const auto F = read_phase_snapshot(join(ad, snap_name("F", i, "kphd")));
        const auto MF = mollify_density(F, fam);
        kin = std::max(kin, weighted_l2_distance(MF, lim.F[i], c.k));
        tilde = std::max(tilde, weighted_l2_distance(MF, F, c.k));
      }
      const double fl = sup_bessel_error(read_fluid_series_file(join(ad, "fluid.kfls")), lim.fluid, c.gamma, c.p);
      aux[N] = {std::sqrt(fl * fl + kin * kin), tilde};
      say(log, "auxiliary N=" + std::to_string(N) + " recomputed");
    }
  }
  std::vector<std::uint64_t> seeds = manifest.at("seeds").get<std::vector<std::uint64_t>>();
  for (long N : c.N_schedule) {
    if (convergence && !aux.count(N)) continue;
    for (auto seed : seeds) {
      const std::string cd = join(dir, "cells/" + cell_name(N, seed));
      if (!fs::exists(join(cd, "fluid.kfls"))) continue;
      CoupledRun run;
      run.N = N;
      run.seed = seed;
      run.sigma_N = c.sigma_N(N);
      run.fluid = read_fluid_series_file(join(cd, "fluid.kfls"));
      for (std::size_t i = 0; i < n_snap; ++i) {
        const double t = run.fluid.t.at(i * static_cast<std::size_t>(c.snapshot_every));
        run.particles.t.push_back(t);
        run.particles.snaps.push_back(read_particle_snapshot(join(cd, snap_name("particles", i, "kprt"))));
        run.limit_particles.t.push_back(lim.fluid.t.at(i * static_cast<std::size_t>(c.snapshot_every)));
        run.limit_particles.snaps.push_back(read_particle_snapshot(join(cd, snap_name("limit_particles", i, "kprt"))));
      }
      auto r = cell_errors(c, run, lim, convergence);
      if (convergence) {
        r.rho_N = aux[N].rho;
        r.rho_tilde_N = aux[N].rho_tilde;
      }
      res.records.push_back(r);
    }
  }
  for (const auto& f : manifest.at("failures")) res.failures.push_back(f.get<std::string>());
  write_outputs(dir, res, convergence);
  return res;
}

}  // namespace vnslab
