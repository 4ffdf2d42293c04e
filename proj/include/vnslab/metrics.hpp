#pragma once

// Error functionals between particle, auxiliary and limit runs, and rate fits.
//
// Time series are compared snapshot by snapshot; sup_t is the max over the
// stored snapshots, so its value depends on the snapshot spacing.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vnslab/mollifier.hpp"
#include "vnslab/particles.hpp"
#include "vnslab/phase_density.hpp"
#include "vnslab/spectral.hpp"

namespace vnslab {

struct FluidSeries {
  std::vector<double> t;
  std::vector<SpectralField> u;
};

struct ParticleSeries {
  std::vector<double> t;
  std::vector<ParticleEnsemble> snaps;
};

/// ||u1 - u2||_{gamma,p}.
double bessel_error(const SpectralField& u1, const SpectralField& u2, double gamma, double p);

double sup_bessel_error(const FluidSeries& a, const FluidSeries& b, double gamma, double p);
/// sup_t ||a - b||_{L2}.
double sup_energy_error(const FluidSeries& a, const FluidSeries& b);
/// int ||grad(a - b)||^2 dt, trapezoid over the snapshot times.
double dissipation_error(const FluidSeries& a, const FluidSeries& b);
/// sup_t ||<v>^k (F_t - G_t)||_{L2}.
double sup_weighted_error(const std::vector<PhaseSpaceDensity>& F, const std::vector<PhaseSpaceDensity>& G, double k);

/// sqrt(sup_t ||u_aux - u||_{gamma,p}^2 + sup_t ||<v>^k (F_aux * theta - F)||^2).
double rho_N(const FluidSeries& u_aux, const std::vector<PhaseSpaceDensity>& F_aux, const FluidSeries& u_limit,
             const std::vector<PhaseSpaceDensity>& F_limit, const MollifierFamily& fam, double gamma, double p,
             double k);
/// sqrt(sup_t ||<v>^k (F_aux * theta - F_aux)||^2).
double rho_tilde_N(const std::vector<PhaseSpaceDensity>& F_aux, const MollifierFamily& fam, double k);

/// Torus distance in x, Euclidean in v.
double phase_distance(const Vec3& X1, const Vec3& V1, const Vec3& X2, const Vec3& V2, int d);
/// max_i sup_t |(X^i, V^i) - (Xbar^i, Vbar^i)|. Both series must come from the
/// same seed with the same steps; anything else breaks the noise coupling and
/// throws MetricError.
double chaos_error(const ParticleSeries& coupled, const ParticleSeries& limit);

struct RateFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

/// Least squares of log(error) on log(N).
RateFit rate_fit(const std::vector<std::pair<double, double>>& points);
/// Percentile bootstrap interval for the slope (resampling points).
std::pair<double, double> bootstrap_slope_interval(const std::vector<std::pair<double, double>>& points,
                                                   int resamples, std::uint64_t seed, double level = 0.95);
/// Rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct ErrorRecord {
  long N = 0;
  std::uint64_t seed = 0;
  double bessel_err = 0;
  double weighted_err = 0;
  double energy_err = 0;
  double dissipation_err = 0;
  double chaos_err = 0;
  double rho_N = 0;
  double rho_tilde_N = 0;
  double sigma_N = 0;
  double surrogate = 0;  // |sigma - sigma_N| + sup_t ||u^N - u||_{gamma,p}
};

std::string error_record_header();
std::string error_record_row(const ErrorRecord& r);
std::vector<ErrorRecord> parse_error_records(const std::string& csv);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

}  // namespace vnslab
