#include "vnslab/vfp.hpp"

#include <algorithm>
#include <cmath>

#include "fft_plans.hpp"
#include "vnslab/errors.hpp"

namespace vnslab {

void x_transport(PhaseSpaceDensity& F, double dt) {
  const auto& g = F.grid;
  const Grid xg = g.x_grid();
  const std::size_t ns = xg.spectral_size();
  const std::size_t nvs = g.v_size();
  const double inv = 1.0 / static_cast<double>(g.x_size());
  const auto wv = wavevectors(xg);

  // per-axis phase tables e^{2 i pi k v dt}
  std::array<std::vector<Complex>, 3> axis_phase;
  for (int a = 0; a < g.dim; ++a) {
    const int n = g.nx[a];
    axis_phase[a].resize(static_cast<std::size_t>(g.nv[a]) * n);
    for (int j = 0; j < g.nv[a]; ++j)
      for (int slot = 0; slot < n; ++slot) {
        const int k = slot <= n / 2 ? slot : slot - n;
        axis_phase[a][static_cast<std::size_t>(j) * n + slot] = std::polar(1.0, 2.0 * kPi * k * g.v_center(a, j) * dt);
      }
  }

  std::vector<Complex> spec(ns * nvs);
  detail::fft_r2c(xg, F.values.data(), spec.data(), static_cast<int>(nvs));
  for (std::size_t iv = 0; iv < nvs; ++iv) {
    const auto j = g.v_multi(iv);
    Complex* row = spec.data() + iv * ns;
    for (std::size_t s = 0; s < ns; ++s) {
      const auto& w = wv[s];
      // FFTW's forward sign is the opposite of the field convention: the
      // shift factor is e^{-2 i pi k v dt} on raw r2c output.
      Complex ph(1.0, 0.0);
      for (int a = 0; a < g.dim; ++a) {
        if (g.nx[a] == 1) continue;
        const int slot = ((w.k[a] % g.nx[a]) + g.nx[a]) % g.nx[a];
        ph *= std::conj(axis_phase[a][static_cast<std::size_t>(j[a]) * g.nx[a] + slot]);
      }
      if (w.nyquist) ph = Complex(ph.real(), 0.0);
      row[s] *= ph * inv;
    }
  }
  detail::fft_c2r(xg, spec.data(), F.values.data(), static_cast<int>(nvs));
}

namespace {

double bernoulli(double z) {
  if (std::abs(z) < 1e-12) return 1.0 - 0.5 * z;
  if (z > 700.0) return 0.0;
  return z / std::expm1(z);
}

// Monotone cubic Hermite interpolation of (t0 + i H, y_i), i = 0..m, clamped outside.
class Pchip {
 public:
  Pchip(double t0, double H, const std::vector<double>& y) : t0_(t0), H_(H), y_(y), d_(y.size(), 0.0) {
    const std::size_t m = y.size();
    std::vector<double> delta(m - 1);
    for (std::size_t i = 0; i + 1 < m; ++i) delta[i] = (y[i + 1] - y[i]) / H;
    for (std::size_t i = 1; i + 1 < m; ++i) {
      if (delta[i - 1] * delta[i] <= 0) {
        d_[i] = 0.0;
      } else {
        d_[i] = 2.0 / (1.0 / delta[i - 1] + 1.0 / delta[i]);
      }
    }
    if (m >= 2) {
      d_[0] = edge_slope(delta[0], m > 2 ? delta[1] : delta[0]);
      d_[m - 1] = edge_slope(delta[m - 2], m > 2 ? delta[m - 3] : delta[m - 2]);
    }
  }

  double operator()(double t) const {
    const std::size_t m = y_.size();
    const double s = (t - t0_) / H_;
    if (s <= 0) return y_.front();
    if (s >= static_cast<double>(m - 1)) return y_.back();
    const auto i = static_cast<std::size_t>(s);
    const double u = s - static_cast<double>(i);
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    return h00 * y_[i] + h10 * H_ * d_[i] + h01 * y_[i + 1] + h11 * H_ * d_[i + 1];
  }

 private:
  static double edge_slope(double d0, double d1) {
    double s = 1.5 * d0 - 0.5 * d1;
    if (s * d0 <= 0) return 0.0;
    if (d0 * d1 <= 0 && std::abs(s) > 3 * std::abs(d0)) s = 3 * d0;
    return s;
  }
  double t0_, H_;
  std::vector<double> y_;
  std::vector<double> d_;
};

// Stride bookkeeping for lines along velocity axis `a`.
struct AxisLines {
  std::size_t stride = 1;  // in units of v slices
  std::size_t count = 1;   // number of lines (other v indices)
  std::vector<std::size_t> starts;
};

AxisLines axis_lines(const PhaseGrid& g, int a) {
  AxisLines L;
  for (int b = g.dim - 1; b > a; --b) L.stride *= static_cast<std::size_t>(g.nv[b]);
  for (std::size_t iv = 0; iv < g.v_size(); ++iv) {
    if (g.v_multi(iv)[a] == 0) L.starts.push_back(iv);
  }
  L.count = L.starts.size();
  return L;
}

void remap_axis(PhaseSpaceDensity& F, const RealField& U, int a, double dt) {
  const auto& g = F.grid;
  const int n = g.nv[a];
  const double h = g.h(a);
  const double E = std::exp(-dt);
  const std::size_t nx = g.x_size();
  const AxisLines L = axis_lines(g, a);
  std::vector<double> cum(static_cast<std::size_t>(n) + 1);
  std::vector<double> line(static_cast<std::size_t>(n));
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const double Ua = U.at(a, ix);
    for (std::size_t start : L.starts) {
      cum[0] = 0.0;
      for (int j = 0; j < n; ++j) {
        line[j] = F.slice(start + j * L.stride)[ix];
        cum[j + 1] = cum[j] + line[j] * h;
      }
      if (cum[n] == 0.0) continue;
      // cell edges e_j = -vmax + j h are carried to U + (e_j - U) E
      const double t0 = Ua + (-g.vmax - Ua) * E;
      Pchip C(t0, h * E, cum);
      // mass carried past a wall stays in the wall cell
      double prev = 0.0;
      for (int j = 0; j < n; ++j) {
        const double next = j + 1 == n ? cum[n] : C(-g.vmax + (j + 1) * h);
        F.slice(start + j * L.stride)[ix] = (next - prev) / h;
        prev = next;
      }
    }
  }
}

void crank_nicolson_axis(PhaseSpaceDensity& F, const RealField& U, int a, double sigma, double dt) {
  const auto& g = F.grid;
  const int n = g.nv[a];
  const double h = g.h(a);
  const double D = 0.5 * sigma * sigma;
  const double kappa = D / (h * h);
  const std::size_t nx = g.x_size();
  const auto nn = static_cast<std::size_t>(n);

  // operator rows (lower, diag, upper) per (j, x)
  std::vector<double> lo(nn * nx), di(nn * nx), up(nn * nx);
  for (int j = 0; j < n; ++j) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double Ua = U.at(a, ix);
      double l = 0, dd = 0, u = 0;
      if (j + 1 < n) {
        const double P = (g.v_center(a, j) + 0.5 * h - Ua) * h / D;
        u = kappa * bernoulli(-P);
        dd -= kappa * bernoulli(P);
      }
      if (j > 0) {
        const double P = (g.v_center(a, j) - 0.5 * h - Ua) * h / D;
        l = kappa * bernoulli(P);
        dd -= kappa * bernoulli(-P);
      }
      lo[j * nx + ix] = l;
      di[j * nx + ix] = dd;
      up[j * nx + ix] = u;
    }
  }
  // Thomas factorization of (I - dt/2 L), shared by every line
  std::vector<double> cp(nn * nx), inv_den(nn * nx);
  for (int j = 0; j < n; ++j) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::size_t q = j * nx + ix;
      const double A = -0.5 * dt * lo[q];
      const double B = 1.0 - 0.5 * dt * di[q];
      const double Cc = -0.5 * dt * up[q];
      const double den = j == 0 ? B : B - A * cp[q - nx];
      inv_den[q] = 1.0 / den;
      cp[q] = Cc / den;
    }
  }
  const AxisLines L = axis_lines(g, a);
  std::vector<double> rhs(nn * nx);
  for (std::size_t start : L.starts) {
    // rhs = (I + dt/2 L) f
    for (int j = 0; j < n; ++j) {
      const double* f0 = F.slice(start + j * L.stride);
      const double* fm = j > 0 ? F.slice(start + (j - 1) * L.stride) : nullptr;
      const double* fp = j + 1 < n ? F.slice(start + (j + 1) * L.stride) : nullptr;
      double* r = rhs.data() + j * nx;
      for (std::size_t ix = 0; ix < nx; ++ix) {
        const std::size_t q = j * nx + ix;
        double v = f0[ix] + 0.5 * dt * di[q] * f0[ix];
        if (fm) v += 0.5 * dt * lo[q] * fm[ix];
        if (fp) v += 0.5 * dt * up[q] * fp[ix];
        r[ix] = v;
      }
    }
    // forward sweep
    for (int j = 0; j < n; ++j) {
      double* r = rhs.data() + j * nx;
      for (std::size_t ix = 0; ix < nx; ++ix) {
        const std::size_t q = j * nx + ix;
        const double A = -0.5 * dt * lo[q];
        const double prev = j == 0 ? 0.0 : rhs[q - nx];
        r[ix] = (r[ix] - A * prev) * inv_den[q];
      }
    }
    // back substitution, written straight into F
    for (int j = n - 1; j >= 0; --j) {
      double* r = rhs.data() + j * nx;
      if (j + 1 < n) {
        const double* rn = rhs.data() + (j + 1) * nx;
        for (std::size_t ix = 0; ix < nx; ++ix) r[ix] -= cp[j * nx + ix] * rn[ix];
      }
      std::copy(r, r + nx, F.slice(start + j * L.stride));
    }
  }
}

}  // namespace

void v_step(PhaseSpaceDensity& F, const RealField& U, double sigma, double dt) {
  const auto& g = F.grid;
  if (!(U.grid == g.x_grid()) || U.components != g.dim) throw SolverError("drift field does not match the x grid");
  if (!(sigma >= 0)) throw SolverError("sigma must be >= 0");
  for (int a = 0; a < g.dim; ++a) {
    if (sigma == 0.0) {
      remap_axis(F, U, a, dt);
    } else {
      crank_nicolson_axis(F, U, a, sigma, dt);
    }
  }
}

PhaseSpaceDensity vfp_step(const PhaseSpaceDensity& F, const SpectralField& u, double sigma, double dt,
                           DragMode mode, const Cutoff& cutoff, VfpDiagnostics* diag) {
  if (!(dt > 0)) throw SolverError("kinetic step needs dt > 0");
  const auto& g = F.grid;
  if (!(u.grid() == g.x_grid())) throw SolverError("fluid and phase grids differ in x");
  RealField U = inverse_transform(u);
  if (mode == DragMode::Cutoff) {
    for (auto& v : U.data) v = cutoff(v);
  }
  PhaseSpaceDensity out = F;
  const double m0 = diag ? F.mass() : 0.0;
  x_transport(out, 0.5 * dt);
  v_step(out, U, sigma, dt);
  x_transport(out, 0.5 * dt);
  out.t = F.t + dt;
  if (diag) {
    diag->mass_before = m0;
    diag->mass_after = out.mass();
    diag->boundary_fraction = out.boundary_mass_fraction();
    diag->min_value = out.min_value();
    diag->max_value = out.max_value();
    diag->boundary_flag = diag->boundary_fraction >= 1e-6;
  }
  return out;
}

void limit_coupled_step(LimitState& state, double sigma, double dt, DragMode mode, const Cutoff& cutoff,
                        VfpDiagnostics* diag) {
  const RealField forcing = limit_fluid_forcing(state.fluid.u, state.F, cutoff, mode);
  FluidState fluid = state.fluid;
  fluid.cutoff_in_advection = mode == DragMode::Cutoff;
  fluid = ns_step(fluid, &forcing, dt, cutoff);
  fluid.forcing_mode = ForcingMode::Kinetic;
  state.F = vfp_step(state.F, state.fluid.u, sigma, dt, mode, cutoff, diag);
  state.fluid = std::move(fluid);
}

}  // namespace vnslab
