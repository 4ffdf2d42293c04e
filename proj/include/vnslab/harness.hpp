#pragma once

// Runs, studies and their on-disk layout.
//
// A study directory holds
//   config.json, manifest.json
//   limit/            plain limit run: fluid.kfls, F_<i>.kphd, diagnostics.csv
//   aux/N<N>/         auxiliary run per N (sigma_N, cut-off drag)
//   cells/N<N>_seed<s>/  coupled run: fluid.kfls, particles_<i>.kprt,
//                     limit_particles_<i>.kprt, diagnostics.csv, manifest.json
//   errors.csv, summary.csv, rates.csv, chaos.csv, failures.csv, plots/*.svg
// Every file is written once, through a temporary name and a rename.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "vnslab/config.hpp"
#include "vnslab/metrics.hpp"
#include "vnslab/particles.hpp"
#include "vnslab/phase_density.hpp"
#include "vnslab/spectral.hpp"

namespace vnslab {

const char* code_version();

using Logger = std::function<void(const std::string&)>;

struct RunOptions {
  int workers = 1;
  std::uint64_t seed_offset = 0;
  std::string out_dir;  // overrides config.output_dir when non-empty
  Logger log;
};

Grid fluid_grid(const ExperimentConfig& c);
PhaseGrid phase_grid(const ExperimentConfig& c);
SpectralField initial_fluid(const ExperimentConfig& c);
PhaseSpaceDensity initial_density(const ExperimentConfig& c);
InitialLaw initial_law(const ExperimentConfig& c);

// ---- runs ---------------------------------------------------------------

enum class LimitMode { Plain, Auxiliary };

struct LimitRun {
  FluidSeries fluid;                 // every step
  std::vector<PhaseSpaceDensity> F;  // every snapshot_every steps, if kept
  std::string diagnostics_csv;
  std::vector<std::string> warnings;
  double wall_seconds = 0;
};

using DensityHook = std::function<void(std::size_t snapshot, const PhaseSpaceDensity& F)>;

/// Plain: sigma and drag u - v. Auxiliary: sigma_N and drag chi(u) - v, cut-off
/// advection. Writes the run into `dir` when it is non-empty.
LimitRun run_limit(const ExperimentConfig& c, LimitMode mode, long N, const std::string& dir, bool keep_density,
                   const DensityHook& on_snapshot = {});

struct CoupledRun {
  long N = 0;
  std::uint64_t seed = 0;
  double sigma_N = 0;
  FluidSeries fluid;  // every step
  ParticleSeries particles;
  ParticleSeries limit_particles;  // filled when a limit fluid is supplied
  std::string diagnostics_csv;
  std::vector<std::string> warnings;
  double wall_seconds = 0;
};

/// N particles with the cut-off drag and sigma_N, coupled to the fluid. When
/// `limit_fluid` (one field per step) is given, limit particles with the same
/// initial draws and noise are driven by it with sigma and no cut-off.
CoupledRun run_coupled(const ExperimentConfig& c, long N, std::uint64_t seed, const std::string& dir,
                       const FluidSeries* limit_fluid = nullptr);

// ---- studies ------------------------------------------------------------

struct StudyResult {
  std::vector<ErrorRecord> records;  // sorted by (N, seed)
  std::vector<std::string> failures;
  std::string errors_csv;
  std::string summary_csv;
  std::string rates_csv;
  std::string chaos_csv;
};

/// Plain limit once, auxiliary limit per N, coupled run per (N, seed), then metrics.
StudyResult convergence_study(const ExperimentConfig& c, const RunOptions& opt);
/// Same cells without the auxiliary runs; fills the chaos columns only.
StudyResult chaos_study(const ExperimentConfig& c, const RunOptions& opt);

/// Rebuild plots from the CSVs; with `recompute`, first rebuild the CSVs from
/// the stored snapshots.
StudyResult replot(const std::string& dir, bool recompute, const Logger& log = {});

/// Seed-averaged table and fits derived from error records.
std::string summary_table(const std::vector<ErrorRecord>& records);
std::string rates_table(const std::vector<ErrorRecord>& records);
std::string chaos_table(const std::vector<ErrorRecord>& records);

/// Documentation of every CSV column, as printed by the CLI help.
std::string csv_column_help();

// ---- files --------------------------------------------------------------

void write_file_atomic(const std::string& path, const std::function<void(std::ostream&)>& body);
void write_text_atomic(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

void write_fluid_series(std::ostream& os, const FluidSeries& s);
FluidSeries read_fluid_series(std::istream& is);

/// Run `task(i)` for i in [0, n) on `workers` threads; exceptions are returned
/// per task (empty string on success).
std::vector<std::string> run_pool(std::size_t n, int workers, const std::function<void(std::size_t)>& task);

}  // namespace vnslab
