#include "vnslab/fluid.hpp"

#include <cmath>
#include <sstream>

#include "vnslab/errors.hpp"

namespace vnslab {

double cfl_number(const SpectralField& u, double dt) {
  const RealField phys = inverse_transform(u);
  double umax = 0.0;
  for (std::size_t i = 0; i < phys.grid.size(); ++i) {
    double m2 = 0.0;
    for (int c = 0; c < phys.components; ++c) m2 += phys.at(c, i) * phys.at(c, i);
    umax = std::max(umax, std::sqrt(m2));
  }
  int nmax = 1;
  for (int a = 0; a < u.grid().dim; ++a) nmax = std::max(nmax, u.grid().n[a]);
  return dt * umax * nmax;
}

SpectralField advection_term(const SpectralField& u, const Cutoff& cutoff, bool use_cutoff) {
  const Grid& g = u.grid();
  const int d = g.dim;
  const RealField ur = inverse_transform(dealias(u));
  RealField chi = ur;
  if (use_cutoff) {
    for (auto& v : chi.data) v = cutoff(v);
  }
  const RealField grad = inverse_transform(gradient(forward_transform(chi)));  // (component, axis)
  RealField prod(g, d);
  const std::size_t m = g.size();
  for (int c = 0; c < d; ++c)
    for (std::size_t i = 0; i < m; ++i) {
      double acc = 0.0;
      for (int a = 0; a < d; ++a) acc += ur.at(a, i) * grad.at(c * d + a, i);
      prod.at(c, i) = acc;
    }
  return dealias(forward_transform(prod));
}

FluidState ns_step(const FluidState& state, const RealField* forcing, double dt, const Cutoff& cutoff,
                   double cfl_limit) {
  if (!(dt > 0)) throw SolverError("fluid step needs dt > 0");
  const SpectralField& u = state.u;
  const Grid& g = u.grid();
  if (u.components() != g.dim) throw SolverError("fluid state must be a d-component field");
  for (const auto& z : u.raw()) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw SolverError("non-finite fluid coefficients");
  }
  const double cfl = cfl_number(u, dt);
  if (cfl > cfl_limit) {
    std::ostringstream os;
    os << "CFL guard: dt*max|u|*max(n) = " << cfl << " > " << cfl_limit << "; suggested dt <= "
       << dt * cfl_limit / cfl;
    throw SolverError(os.str());
  }

  SpectralField rhs = advection_term(u, cutoff, state.cutoff_in_advection);
  if (forcing != nullptr) {
    if (!(forcing->grid == g) || forcing->components != g.dim) throw SolverError("forcing grid mismatch");
    rhs += forward_transform(*forcing);
  }
  rhs = leray_project(rhs);

  FluidState next = state;
  next.t = state.t + dt;
  const auto wv = wavevectors(g);
  for (int c = 0; c < g.dim; ++c) {
    auto un = next.u.coeffs(c);
    auto r = rhs.coeffs(c);
    for (std::size_t s = 0; s < wv.size(); ++s) {
      const double z = 4.0 * kPi * kPi * wv[s].norm2 * dt;
      const double E = std::exp(-z);
      const double phi1 = z < 1e-8 ? 1.0 - 0.5 * z : -std::expm1(-z) / z;
      un[s] = wv[s].nyquist ? Complex(0.0) : E * un[s] - phi1 * dt * r[s];
    }
  }
  next.u.set_divergence_free(true);
  return next;
}

RealField limit_fluid_forcing(const SpectralField& u, const PhaseSpaceDensity& F, const Cutoff& cutoff,
                              DragMode mode) {
  const Grid g = F.grid.x_grid();
  if (!(u.grid() == g)) throw SolverError("kinetic density and fluid live on different x grids");
  const auto m = velocity_moments(F);
  const RealField ur = inverse_transform(u);
  RealField out(g, g.dim);
  const std::size_t n = g.size();
  for (int c = 0; c < g.dim; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      const double U = mode == DragMode::Cutoff ? cutoff(ur.at(c, i)) : ur.at(c, i);
      out.at(c, i) = U * m.m0.data[i] - m.flux.at(c, i);
    }
  return out;
}

void coupled_step(FluidState& fluid, ParticleEnsemble& ens, const MollifierFamily& fam, const Cutoff& cutoff,
                  double dt, InterpScheme scheme) {
  const auto u_at_X = sample_velocity(ens, fluid.u, scheme);
  FluidState next = fluid;
  if (ens.N() > 0) {
    const RealField f = drag_forcing(ens, u_at_X, fam, cutoff, fluid.u.grid());
    next = ns_step(fluid, &f, dt, cutoff);
    particle_step(ens, u_at_X, dt, cutoff);
  } else {
    next = ns_step(fluid, nullptr, dt, cutoff);
  }
  next.forcing_mode = ForcingMode::Particles;
  fluid = std::move(next);
}

double fluid_energy(const SpectralField& u) {
  const double n = parseval_bessel_norm(u, 0.0);
  return 0.5 * n * n;
}

double fluid_enstrophy(const SpectralField& u) {
  const auto wv = wavevectors(u.grid());
  double acc = 0.0;
  for (int c = 0; c < u.components(); ++c) {
    auto co = u.coeffs(c);
    for (std::size_t s = 0; s < wv.size(); ++s) {
      if (wv[s].nyquist) continue;
      acc += wv[s].weight * 4.0 * kPi * kPi * wv[s].norm2 * std::norm(co[s]);
    }
  }
  return acc;
}

SpectralField shear_flow(const Grid& g, double amplitude) {
  if (g.dim < 2) throw ConfigError("shear flow needs d >= 2");
  RealField r(g, g.dim);
  for (std::size_t i = 0; i < g.size(); ++i) r.at(0, i) = amplitude * std::sin(2.0 * kPi * r.position(i)[1]);
  auto u = leray_project(forward_transform(r));
  return u;
}

}  // namespace vnslab
