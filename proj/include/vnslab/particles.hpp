#pragma once

// N kinetic particles driven by the fluid through the cut-off drag, with
// Brownian forcing in velocity, and their mollified empirical measure.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vnslab/mollifier.hpp"
#include "vnslab/phase_density.hpp"
#include "vnslab/spectral.hpp"

namespace vnslab {

/// sigma_N = max(sigma, (log N)^{-1/4}).
double sigma_schedule(double sigma, long N);

struct ParticleEnsemble {
  int dim = 2;
  std::uint64_t seed = 0;
  double sigma_N = 0.0;
  std::uint64_t step = 0;  // number of completed steps; selects the noise block
  std::vector<Vec3> X;
  std::vector<Vec3> V;

  long N() const { return static_cast<long>(X.size()); }
};

/// Initial law: uniform on T^d times an isotropic Gaussian in v.
struct InitialLaw {
  Vec3 v_mean{0, 0, 0};
  double v_std = 0.3;
};

ParticleEnsemble init_sample(int d, long N, std::uint64_t seed, const InitialLaw& law, double sigma_N);

/// Fluid velocity at the particle positions, [particle][component].
std::vector<double> sample_velocity(const ParticleEnsemble& ens, const SpectralField& u, InterpScheme scheme);

/// Standard normal increment used for particle i at the ensemble's current step.
Vec3 noise_increment(const ParticleEnsemble& ens, std::size_t i);

/// One step of the exact-OU / trapezoidal-position integrator with the drift
/// frozen at chi_A(u(X)). `u_at_X` comes from sample_velocity.
void particle_step(ParticleEnsemble& ens, const std::vector<double>& u_at_X, double dt, const Cutoff& cutoff);
void particle_step(ParticleEnsemble& ens, const SpectralField& u, double dt, const Cutoff& cutoff,
                   InterpScheme scheme = InterpScheme::Spline4);

/// Per-axis x weights of one particle (normalized to unit discrete mass).
struct AxisWeights {
  std::array<std::vector<int>, 3> cells;
  std::array<std::vector<double>, 3> w;
};
AxisWeights x_weights(const Vec3& X, const MollifierFamily& fam, const Grid& g);

/// F^N = (1/N) sum_i theta^N(x - X_i, v - V_i) on the phase grid.
PhaseSpaceDensity empirical_density(const ParticleEnsemble& ens, const MollifierFamily& fam, const PhaseGrid& g);

/// (1/N) sum_i c_i delta^N_{X_i}(x) for per-particle vectors c_i (components = ncomp).
RealField deposit_x(const ParticleEnsemble& ens, const std::vector<double>& c, int ncomp,
                    const MollifierFamily& fam, const Grid& g);

struct EmpiricalMoments {
  RealField m0;    // (1/N) sum delta^N_{X_i}
  RealField flux;  // (1/N) sum V_i delta^N_{X_i}
};
EmpiricalMoments empirical_moments(const ParticleEnsemble& ens, const MollifierFamily& fam, const Grid& g);

/// (1/N) sum_i (chi_A(u(X_i)) - V_i) delta^N_{X_i}(x).
RealField drag_forcing(const ParticleEnsemble& ens, const std::vector<double>& u_at_X,
                       const MollifierFamily& fam, const Cutoff& cutoff, const Grid& g);

/// delta^N_X sampled on the grid.
RealField mollified_delta(const MollifierFamily& fam, const Vec3& X, const Grid& g);

/// Kinetic energy (1/2N) sum |V_i|^2.
double kinetic_energy(const ParticleEnsemble& ens);

// ---- snapshot I/O ("KPRT") -----------------------------------------------

void write_particle_snapshot(std::ostream& os, const ParticleEnsemble& ens);
ParticleEnsemble read_particle_snapshot(std::istream& is);
void write_particle_snapshot(const std::string& path, const ParticleEnsemble& ens);
ParticleEnsemble read_particle_snapshot(const std::string& path);

}  // namespace vnslab
