#pragma once

// Experiment configuration: one JSON file fully determines a study.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "vnslab/mollifier.hpp"
#include "vnslab/spectral.hpp"

namespace vnslab {

struct InitialFluidSpec {
  std::string kind = "shear";  // shear | zero | snapshot
  double amplitude = 0.5;      // shear: amplitude * (sin 2 pi x_2, 0[, 0])
  std::string path;            // snapshot: KFLD file
};

struct InitialDensitySpec {
  std::string kind = "uniform-maxwellian";  // uniform-maxwellian | zero
  Vec3 mean{0, 0, 0};
  double std = 0.3;
};

struct ExperimentConfig {
  int d = 2;
  double T = 0.5;
  double dt = 0.01;
  std::array<int, 3> fluid_resolution{64, 64, 1};
  std::array<int, 3> phase_x_resolution{64, 64, 1};
  std::array<int, 3> phase_v_resolution{48, 48, 1};
  double v_max = 3.0;
  std::vector<long> N_schedule{250, 500, 1000, 2000, 4000};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8};
  double sigma = 0.5;
  std::string sigma_rule = "log";  // log: max(sigma, (log N)^{-1/4}); equal: sigma_N = sigma
  double alpha = 0.1;
  double beta = 0.095;
  XKernel x_kernel = XKernel::Sech;
  double A = 4.0;
  double gamma = 0.75;
  double p = 4.0;
  int k = 3;
  InitialFluidSpec initial_fluid;
  InitialDensitySpec initial_density;
  int snapshot_every = 10;
  std::string output_dir = "out";
  InterpScheme interpolation = InterpScheme::Spline4;

  int steps() const;
  double sigma_N(long N) const;
};

/// Throws ConfigError on unknown keys or malformed values (not on modelling
/// constraints; see validate).
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& c);
/// Sorted-key compact dump; the hash input.
std::string canonical_config(const ExperimentConfig& c);
/// FNV-1a 64 of the canonical form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

struct ConstraintCheck {
  std::string name;  // which modelling requirement
  bool ok = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<ConstraintCheck> checks;
  bool ok() const;
  std::string text() const;
  /// First failure as a one-line message.
  std::string first_failure() const;
};

ValidationReport validate(const ExperimentConfig& c);
/// validate() and throw ConfigError on the first failure.
void require_valid(const ExperimentConfig& c);

}  // namespace vnslab
