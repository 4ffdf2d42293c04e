#pragma once

// Kinetic solver for d_t F + v . grad_x F + div_v((U - v) F) = (sigma^2/2) Lap_v F,
// U = u or chi(u), on the truncated phase grid.
//
// Strang splitting: half x-transport (exact spectral shift per velocity
// slice), full velocity step, half x-transport. The velocity step is
//  - sigma = 0: exact characteristics v -> U + (v - U) e^{-dt} per axis with a
//    conservative monotone remap of the cumulative mass;
//  - sigma > 0: drift and diffusion together, Scharfetter-Gummel fluxes and
//    Crank-Nicolson per velocity axis, zero flux through the box walls. The
//    sampled Maxwellian centred at U is an exact discrete equilibrium.

#include <string>
#include <vector>

#include "vnslab/fluid.hpp"
#include "vnslab/mollifier.hpp"
#include "vnslab/phase_density.hpp"
#include "vnslab/spectral.hpp"

namespace vnslab {

struct VfpDiagnostics {
  double mass_before = 0;
  double mass_after = 0;
  double boundary_fraction = 0;
  double min_value = 0;
  double max_value = 0;
  bool boundary_flag = false;  // boundary-cell mass fraction >= 1e-6
};

/// F(x, v) <- F(x - v dt, v).
void x_transport(PhaseSpaceDensity& F, double dt);
/// Velocity substep with the drift field U given on the x grid (d components).
void v_step(PhaseSpaceDensity& F, const RealField& U, double sigma, double dt);

PhaseSpaceDensity vfp_step(const PhaseSpaceDensity& F, const SpectralField& u, double sigma, double dt,
                           DragMode mode, const Cutoff& cutoff, VfpDiagnostics* diag = nullptr);

struct LimitState {
  FluidState fluid;
  PhaseSpaceDensity F;
};

/// Lie coupling with start-of-step fields: fluid forced by U m0(F) - m1(F),
/// kinetic density transported by the start-of-step u.
void limit_coupled_step(LimitState& state, double sigma, double dt, DragMode mode, const Cutoff& cutoff,
                        VfpDiagnostics* diag = nullptr);

}  // namespace vnslab
