#pragma once

// Incompressible Navier-Stokes on T^d (viscosity 1) advanced with exponential
// Euler: u+ = e^{dt Lap} u - phi1(dt Lap) dt P[(u . grad) chi(u) + f],
// phi1(z) = (1 - e^{-z}) / z. The pressure never appears; P removes it.

#include "vnslab/mollifier.hpp"
#include "vnslab/particles.hpp"
#include "vnslab/phase_density.hpp"
#include "vnslab/spectral.hpp"

namespace vnslab {

enum class ForcingMode { None, Particles, Kinetic };

struct FluidState {
  SpectralField u;
  double t = 0.0;
  ForcingMode forcing_mode = ForcingMode::None;
  bool cutoff_in_advection = true;
};

/// dt * max|u| * max_i n_i, the quantity bounded by the CFL guard.
double cfl_number(const SpectralField& u, double dt);

/// Throws SolverError when the CFL number exceeds `cfl_limit`; the message
/// carries a suggested dt.
FluidState ns_step(const FluidState& state, const RealField* forcing, double dt, const Cutoff& cutoff,
                   double cfl_limit = 0.5);

/// Dealiased (u . grad) chi(u), not yet projected.
SpectralField advection_term(const SpectralField& u, const Cutoff& cutoff, bool use_cutoff);

/// Drag on the fluid from a kinetic density: U m0(F) - m1(F), U = u or chi(u).
enum class DragMode { Plain, Cutoff };
RealField limit_fluid_forcing(const SpectralField& u, const PhaseSpaceDensity& F, const Cutoff& cutoff,
                              DragMode mode);

/// Synchronous splitting: forcing from the start-of-step state, fluid step,
/// then particles against the start-of-step field.
void coupled_step(FluidState& fluid, ParticleEnsemble& ens, const MollifierFamily& fam, const Cutoff& cutoff,
                  double dt, InterpScheme scheme = InterpScheme::Spline4);

/// 1/2 ||u||^2_{L^2}.
double fluid_energy(const SpectralField& u);
/// ||grad u||^2_{L^2}.
double fluid_enstrophy(const SpectralField& u);

/// Shear flow amplitude * (sin 2 pi x_2, 0[, 0]) on the given grid.
SpectralField shear_flow(const Grid& g, double amplitude);

}  // namespace vnslab
