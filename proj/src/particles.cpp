#include "vnslab/particles.hpp"

#include <cmath>
#include <fstream>

#include "vnslab/binary_io.hpp"
#include "vnslab/errors.hpp"
#include "vnslab/philox.hpp"

namespace vnslab {

double sigma_schedule(double sigma, long N) {
  if (N < 2) throw ConfigError("sigma_N schedule needs N >= 2");
  if (!(sigma >= 0)) throw ConfigError("sigma must be >= 0");
  return std::max(sigma, std::pow(std::log(static_cast<double>(N)), -0.25));
}

ParticleEnsemble init_sample(int d, long N, std::uint64_t seed, const InitialLaw& law, double sigma_N) {
  if (N < 1) throw ConfigError("particle count must be >= 1");
  if (!(law.v_std > 0) || !std::isfinite(law.v_std)) throw ConfigError("initial velocity law is not normalizable");
  ParticleEnsemble ens;
  ens.dim = d;
  ens.seed = seed;
  ens.sigma_N = sigma_N;
  ens.X.assign(static_cast<std::size_t>(N), Vec3{0, 0, 0});
  ens.V.assign(static_cast<std::size_t>(N), Vec3{0, 0, 0});
  for (long i = 0; i < N; ++i) {
    const auto ia = uniform_pair(seed, 0, static_cast<std::uint64_t>(i), StreamPurpose::Init, 0);
    const auto ib = uniform_pair(seed, 0, static_cast<std::uint64_t>(i), StreamPurpose::Init, 1);
    const auto na = normal_pair(seed, 0, static_cast<std::uint64_t>(i), StreamPurpose::Init, 2);
    const auto nb = normal_pair(seed, 0, static_cast<std::uint64_t>(i), StreamPurpose::Init, 3);
    const double u[3] = {ia[0], ia[1], ib[0]};
    const double z[3] = {na[0], na[1], nb[0]};
    auto& X = ens.X[static_cast<std::size_t>(i)];
    auto& V = ens.V[static_cast<std::size_t>(i)];
    for (int a = 0; a < d; ++a) {
      X[a] = u[a];
      V[a] = law.v_mean[a] + law.v_std * z[a];
    }
  }
  return ens;
}

std::vector<double> sample_velocity(const ParticleEnsemble& ens, const SpectralField& u, InterpScheme scheme) {
  if (u.components() != ens.dim || u.grid().dim != ens.dim) {
    throw SpectralError("fluid field does not match the particle dimension");
  }
  return evaluate_at_points(u, ens.X, scheme);
}

Vec3 noise_increment(const ParticleEnsemble& ens, std::size_t i) {
  const auto a = normal_pair(ens.seed, ens.step, i, StreamPurpose::Noise, 0);
  Vec3 xi{a[0], a[1], 0.0};
  if (ens.dim == 3) xi[2] = normal_pair(ens.seed, ens.step, i, StreamPurpose::Noise, 1)[0];
  if (ens.dim == 1) xi[1] = 0.0;
  return xi;
}

void particle_step(ParticleEnsemble& ens, const std::vector<double>& u_at_X, double dt, const Cutoff& cutoff) {
  if (!(dt > 0)) throw SolverError("particle step needs dt > 0");
  const int d = ens.dim;
  if (u_at_X.size() != ens.X.size() * static_cast<std::size_t>(d)) {
    throw SolverError("velocity samples do not match the particle count");
  }
  const double decay = std::exp(-dt);
  const double noise = ens.sigma_N * std::sqrt(0.5 * (1.0 - std::exp(-2.0 * dt)));
  for (std::size_t i = 0; i < ens.X.size(); ++i) {
    const Vec3 xi = noise_increment(ens, i);
    auto& X = ens.X[i];
    auto& V = ens.V[i];
    for (int a = 0; a < d; ++a) {
      const double ua = u_at_X[i * d + a];
      if (!std::isfinite(ua)) throw SolverError("non-finite fluid velocity at a particle");
      const double vn = decay * V[a] + (1.0 - decay) * cutoff(ua) + noise * xi[a];
      double xn = X[a] + 0.5 * dt * (V[a] + vn);
      xn -= std::floor(xn);
      if (xn >= 1.0) xn = 0.0;
      X[a] = xn;
      V[a] = vn;
    }
  }
  ++ens.step;
}

void particle_step(ParticleEnsemble& ens, const SpectralField& u, double dt, const Cutoff& cutoff,
                   InterpScheme scheme) {
  particle_step(ens, sample_velocity(ens, u, scheme), dt, cutoff);
}

AxisWeights x_weights(const Vec3& X, const MollifierFamily& fam, const Grid& g) {
  AxisWeights out;
  const double L = fam.x_halfwidth();
  for (int a = 0; a < g.dim; ++a) {
    const int n = g.n[a];
    auto& cells = out.cells[a];
    auto& w = out.w[a];
    if (n == 1) {
      cells.push_back(0);
      w.push_back(1.0);
      continue;
    }
    if (L >= 0.5 || fam.is_identity()) {
      for (int j = 0; j < n; ++j) cells.push_back(j);
    } else {
      const int lo = static_cast<int>(std::ceil((X[a] - L) * n));
      const int hi = static_cast<int>(std::floor((X[a] + L) * n));
      for (int j = lo; j <= std::min(hi, lo + n - 1); ++j) cells.push_back(((j % n) + n) % n);
    }
    double total = 0.0;
    if (fam.is_identity()) {
      // nearest-cell Dirac
      const int j0 = static_cast<int>(std::lround(X[a] * n)) % n;
      for (int j : cells) w.push_back(j == j0 ? 1.0 : 0.0);
      total = 1.0;
    } else {
      for (int j : cells) {
        const double v = fam.profile(static_cast<double>(j) / n - X[a]);
        w.push_back(v);
        total += v;
      }
    }
    const double scale = n / total;
    for (auto& v : w) v *= scale;
  }
  return out;
}

namespace {

// Dense product of the per-axis weights together with linear x indices.
void window(const AxisWeights& aw, const Grid& g, std::vector<std::size_t>& idx, std::vector<double>& w) {
  idx.clear();
  w.clear();
  const auto& c0 = aw.cells[0];
  const std::vector<int> one{0};
  const std::vector<double> unit{1.0};
  const auto& c1 = g.dim >= 2 ? aw.cells[1] : one;
  const auto& c2 = g.dim >= 3 ? aw.cells[2] : one;
  const auto& w1 = g.dim >= 2 ? aw.w[1] : unit;
  const auto& w2 = g.dim >= 3 ? aw.w[2] : unit;
  for (std::size_t a = 0; a < c0.size(); ++a)
    for (std::size_t b = 0; b < c1.size(); ++b)
      for (std::size_t c = 0; c < c2.size(); ++c) {
        std::size_t lin = static_cast<std::size_t>(c0[a]);
        if (g.dim >= 2) lin = lin * g.n[1] + static_cast<std::size_t>(c1[b]);
        if (g.dim >= 3) lin = lin * g.n[2] + static_cast<std::size_t>(c2[c]);
        idx.push_back(lin);
        w.push_back(aw.w[0][a] * w1[b] * w2[c]);
      }
}

}  // namespace

PhaseSpaceDensity empirical_density(const ParticleEnsemble& ens, const MollifierFamily& fam, const PhaseGrid& g) {
  if (g.dim != ens.dim || fam.dim() != ens.dim) throw ConfigError("particle, mollifier and grid dimensions differ");
  require_resolved(g, fam);
  PhaseSpaceDensity F(g);
  const Grid xg = g.x_grid();
  const double invN = 1.0 / static_cast<double>(ens.N());
  const double r = fam.v_radius();
  std::vector<std::size_t> xi;
  std::vector<double> xw;
  std::vector<std::size_t> vcells;
  std::vector<double> vw;
  for (std::size_t i = 0; i < ens.X.size(); ++i) {
    window(x_weights(ens.X[i], fam, xg), xg, xi, xw);
    const Vec3& V = ens.V[i];
    // v cells of the (unbounded) lattice inside the kernel ball
    std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) {
      const double hh = g.h(a);
      lo[a] = static_cast<int>(std::floor((V[a] - r + g.vmax) / hh - 0.5));
      hi[a] = static_cast<int>(std::ceil((V[a] + r + g.vmax) / hh - 0.5));
    }
    vcells.clear();
    vw.clear();
    double total = 0.0;
    for (int j0 = lo[0]; j0 <= hi[0]; ++j0)
      for (int j1 = lo[1]; j1 <= hi[1]; ++j1)
        for (int j2 = lo[2]; j2 <= hi[2]; ++j2) {
          const std::array<int, 3> j{j0, j1, j2};
          Vec3 dv{0, 0, 0};
          bool inside = true;
          std::size_t lin = 0;
          for (int a = 0; a < g.dim; ++a) {
            dv[a] = g.v_center(a, j[a]) - V[a];
            inside = inside && j[a] >= 0 && j[a] < g.nv[a];
            lin = lin * g.nv[a] + static_cast<std::size_t>(std::max(j[a], 0));
          }
          const double val = fam.is_identity() ? 0.0 : fam.theta2(dv);
          if (val <= 0.0) continue;
          total += val;
          if (inside) {
            vcells.push_back(lin);
            vw.push_back(val);
          }
        }
    if (fam.is_identity()) {
      // nearest velocity cell
      std::size_t lin = 0;
      bool inside = true;
      for (int a = 0; a < g.dim; ++a) {
        const int j = static_cast<int>(std::floor((V[a] + g.vmax) / g.h(a)));
        inside = inside && j >= 0 && j < g.nv[a];
        lin = lin * g.nv[a] + static_cast<std::size_t>(std::max(j, 0));
      }
      if (inside) {
        vcells.push_back(lin);
        vw.push_back(1.0);
      }
      total = 1.0;
    }
    if (!(total > 0)) continue;
    const double scale = invN / (total * g.dv_volume());
    for (std::size_t c = 0; c < vcells.size(); ++c) {
      double* dst = F.slice(vcells[c]);
      const double s = vw[c] * scale;
      for (std::size_t q = 0; q < xi.size(); ++q) dst[xi[q]] += s * xw[q];
    }
  }
  return F;
}

RealField deposit_x(const ParticleEnsemble& ens, const std::vector<double>& c, int ncomp,
                    const MollifierFamily& fam, const Grid& g) {
  if (c.size() != ens.X.size() * static_cast<std::size_t>(ncomp)) throw SolverError("deposit: size mismatch");
  for (int a = 0; a < g.dim; ++a) {
    if (!fam.is_identity() && g.n[a] > 1 && fam.x_scale() * g.n[a] < 4.0) {
      throw ConfigError("fluid grid too coarse for the x-kernel: axis " + std::to_string(a) + " needs >= " +
                        std::to_string(static_cast<int>(std::ceil(4.0 / fam.x_scale()))) + " cells");
    }
  }
  RealField out(g, ncomp);
  const double invN = 1.0 / static_cast<double>(ens.N());
  const std::size_t m = g.size();
  std::vector<std::size_t> xi;
  std::vector<double> xw;
  for (std::size_t i = 0; i < ens.X.size(); ++i) {
    window(x_weights(ens.X[i], fam, g), g, xi, xw);
    for (int k = 0; k < ncomp; ++k) {
      const double s = c[i * ncomp + k] * invN;
      if (s == 0.0) continue;
      double* dst = out.data.data() + static_cast<std::size_t>(k) * m;
      for (std::size_t q = 0; q < xi.size(); ++q) dst[xi[q]] += s * xw[q];
    }
  }
  return out;
}

EmpiricalMoments empirical_moments(const ParticleEnsemble& ens, const MollifierFamily& fam, const Grid& g) {
  std::vector<double> ones(ens.X.size(), 1.0);
  std::vector<double> vel(ens.X.size() * static_cast<std::size_t>(ens.dim));
  for (std::size_t i = 0; i < ens.X.size(); ++i)
    for (int a = 0; a < ens.dim; ++a) vel[i * ens.dim + a] = ens.V[i][a];
  return {deposit_x(ens, ones, 1, fam, g), deposit_x(ens, vel, ens.dim, fam, g)};
}

RealField drag_forcing(const ParticleEnsemble& ens, const std::vector<double>& u_at_X,
                       const MollifierFamily& fam, const Cutoff& cutoff, const Grid& g) {
  const int d = ens.dim;
  std::vector<double> c(ens.X.size() * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < ens.X.size(); ++i)
    for (int a = 0; a < d; ++a) c[i * d + a] = cutoff(u_at_X[i * d + a]) - ens.V[i][a];
  return deposit_x(ens, c, d, fam, g);
}

RealField mollified_delta(const MollifierFamily& fam, const Vec3& X, const Grid& g) {
  RealField out(g, 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = out.position(i);
    Vec3 y{0, 0, 0};
    for (int a = 0; a < g.dim; ++a) y[a] = x[a] - X[a];
    out.data[i] = fam.theta1(y);
  }
  return out;
}

double kinetic_energy(const ParticleEnsemble& ens) {
  double acc = 0.0;
  for (const auto& V : ens.V)
    for (int a = 0; a < ens.dim; ++a) acc += V[a] * V[a];
  return ens.X.empty() ? 0.0 : 0.5 * acc / static_cast<double>(ens.N());
}

void write_particle_snapshot(std::ostream& os, const ParticleEnsemble& ens) {
  binio::put_magic(os, "KPRT");
  binio::put<std::uint64_t>(os, static_cast<std::uint64_t>(ens.N()));
  binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(ens.dim));
  binio::put<std::uint64_t>(os, ens.seed);
  binio::put<std::uint64_t>(os, ens.step);
  binio::put<double>(os, ens.sigma_N);
  for (const auto& X : ens.X)
    for (int a = 0; a < ens.dim; ++a) binio::put<double>(os, X[a]);
  for (const auto& V : ens.V)
    for (int a = 0; a < ens.dim; ++a) binio::put<double>(os, V[a]);
}

ParticleEnsemble read_particle_snapshot(std::istream& is) {
  binio::expect_magic(is, "KPRT");
  ParticleEnsemble ens;
  const auto n = binio::get<std::uint64_t>(is);
  ens.dim = static_cast<int>(binio::get<std::uint32_t>(is));
  if (ens.dim < 1 || ens.dim > 3) throw std::runtime_error("KPRT: corrupt header");
  ens.seed = binio::get<std::uint64_t>(is);
  ens.step = binio::get<std::uint64_t>(is);
  ens.sigma_N = binio::get<double>(is);
  ens.X.assign(n, Vec3{0, 0, 0});
  ens.V.assign(n, Vec3{0, 0, 0});
  for (auto& X : ens.X)
    for (int a = 0; a < ens.dim; ++a) X[a] = binio::get<double>(is);
  for (auto& V : ens.V)
    for (int a = 0; a < ens.dim; ++a) V[a] = binio::get<double>(is);
  return ens;
}

void write_particle_snapshot(const std::string& path, const ParticleEnsemble& ens) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_particle_snapshot(os, ens);
}

ParticleEnsemble read_particle_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_particle_snapshot(is);
}

}  // namespace vnslab
