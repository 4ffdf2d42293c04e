#include "vnslab/phase_density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fft_plans.hpp"
#include "vnslab/binary_io.hpp"
#include "vnslab/errors.hpp"

namespace vnslab {

PhaseGrid::PhaseGrid(int d, std::array<int, 3> x_res, std::array<int, 3> v_res, double v_max)
    : dim(d), vmax(v_max) {
  if (d < 1 || d > 3) throw ConfigError("phase grid dimension must be 1, 2 or 3");
  if (!(v_max > 0)) throw ConfigError("v_max must be positive");
  for (int i = 0; i < d; ++i) {
    if (x_res[i] < 1 || v_res[i] < 1) throw ConfigError("phase grid resolutions must be positive");
    nx[i] = x_res[i];
    nv[i] = v_res[i];
  }
  Grid check(d, nx);  // even sizes
  (void)check;
}

std::size_t PhaseGrid::x_size() const {
  std::size_t s = 1;
  for (int i = 0; i < dim; ++i) s *= static_cast<std::size_t>(nx[i]);
  return s;
}

std::size_t PhaseGrid::v_size() const {
  std::size_t s = 1;
  for (int i = 0; i < dim; ++i) s *= static_cast<std::size_t>(nv[i]);
  return s;
}

double PhaseGrid::dv_volume() const {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= h(i);
  return v;
}

std::array<int, 3> PhaseGrid::v_multi(std::size_t v_index) const {
  std::array<int, 3> j{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    j[a] = static_cast<int>(v_index % static_cast<std::size_t>(nv[a]));
    v_index /= static_cast<std::size_t>(nv[a]);
  }
  return j;
}

Vec3 PhaseGrid::velocity(std::size_t v_index) const {
  const auto j = v_multi(v_index);
  Vec3 v{0, 0, 0};
  for (int a = 0; a < dim; ++a) v[a] = v_center(a, j[a]);
  return v;
}

double PhaseSpaceDensity::mass() const {
  double acc = 0.0;
  for (double f : values) acc += f;
  return acc * grid.dx_volume() * grid.dv_volume();
}

double PhaseSpaceDensity::min_value() const { return *std::min_element(values.begin(), values.end()); }
double PhaseSpaceDensity::max_value() const { return *std::max_element(values.begin(), values.end()); }

double PhaseSpaceDensity::boundary_mass_fraction() const {
  const std::size_t nx = grid.x_size();
  double edge = 0.0, total = 0.0;
  for (std::size_t iv = 0; iv < grid.v_size(); ++iv) {
    const auto j = grid.v_multi(iv);
    bool on_edge = false;
    for (int a = 0; a < grid.dim; ++a) on_edge = on_edge || j[a] == 0 || j[a] == grid.nv[a] - 1;
    double s = 0.0;
    const double* row = slice(iv);
    for (std::size_t ix = 0; ix < nx; ++ix) s += std::abs(row[ix]);
    total += s;
    if (on_edge) edge += s;
  }
  return total > 0 ? edge / total : 0.0;
}

VelocityMoments velocity_moments(const PhaseSpaceDensity& F) {
  const auto& g = F.grid;
  VelocityMoments m{RealField(g.x_grid(), 1), RealField(g.x_grid(), g.dim)};
  const std::size_t nx = g.x_size();
  const double dv = g.dv_volume();
  for (std::size_t iv = 0; iv < g.v_size(); ++iv) {
    const Vec3 v = g.velocity(iv);
    const double* row = F.slice(iv);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double w = row[ix] * dv;
      m.m0.data[ix] += w;
      for (int a = 0; a < g.dim; ++a) m.flux.data[a * nx + ix] += v[a] * w;
    }
  }
  return m;
}

namespace {

double bracket_pow(const Vec3& v, int d, double k) {
  double s = 1.0;
  for (int a = 0; a < d; ++a) s += v[a] * v[a];
  return std::pow(s, 0.5 * k);
}

}  // namespace

double full_moment(const PhaseSpaceDensity& F, double k) {
  const auto& g = F.grid;
  double acc = 0.0;
  for (std::size_t iv = 0; iv < g.v_size(); ++iv) {
    const Vec3 v = g.velocity(iv);
    double n2 = 0.0;
    for (int a = 0; a < g.dim; ++a) n2 += v[a] * v[a];
    const double w = std::pow(n2, 0.5 * k);
    double s = 0.0;
    const double* row = F.slice(iv);
    for (std::size_t ix = 0; ix < g.x_size(); ++ix) s += row[ix];
    acc += w * s;
  }
  return acc * g.dx_volume() * g.dv_volume();
}

double weighted_l2_distance(const PhaseSpaceDensity& F, const PhaseSpaceDensity& G, double k) {
  if (!(F.grid == G.grid)) throw SpectralError("phase densities live on different grids");
  const auto& g = F.grid;
  double acc = 0.0;
  for (std::size_t iv = 0; iv < g.v_size(); ++iv) {
    const double w = bracket_pow(g.velocity(iv), g.dim, 2.0 * k);
    const double* a = F.slice(iv);
    const double* b = G.slice(iv);
    double s = 0.0;
    for (std::size_t ix = 0; ix < g.x_size(); ++ix) s += (a[ix] - b[ix]) * (a[ix] - b[ix]);
    acc += w * s;
  }
  return std::sqrt(acc * g.dx_volume() * g.dv_volume());
}

double weighted_l2_norm(const PhaseSpaceDensity& F, double k) {
  const auto& g = F.grid;
  double acc = 0.0;
  for (std::size_t iv = 0; iv < g.v_size(); ++iv) {
    const double w = bracket_pow(g.velocity(iv), g.dim, 2.0 * k);
    const double* a = F.slice(iv);
    double s = 0.0;
    for (std::size_t ix = 0; ix < g.x_size(); ++ix) s += a[ix] * a[ix];
    acc += w * s;
  }
  return std::sqrt(acc * g.dx_volume() * g.dv_volume());
}

double l1_distance(const PhaseSpaceDensity& F, const PhaseSpaceDensity& G) {
  if (!(F.grid == G.grid)) throw SpectralError("phase densities live on different grids");
  double acc = 0.0;
  for (std::size_t i = 0; i < F.values.size(); ++i) acc += std::abs(F.values[i] - G.values[i]);
  return acc * F.grid.dx_volume() * F.grid.dv_volume();
}

PhaseSpaceDensity uniform_maxwellian(const PhaseGrid& g, const Vec3& mean, double stddev) {
  if (!(stddev > 0)) throw ConfigError("initial velocity spread must be positive");
  PhaseSpaceDensity F(g);
  std::vector<double> prof(g.v_size());
  double total = 0.0;
  for (std::size_t iv = 0; iv < g.v_size(); ++iv) {
    const Vec3 v = g.velocity(iv);
    double q = 0.0;
    for (int a = 0; a < g.dim; ++a) q += (v[a] - mean[a]) * (v[a] - mean[a]);
    prof[iv] = std::exp(-0.5 * q / (stddev * stddev));
    total += prof[iv];
  }
  if (!(total > 0)) throw ConfigError("initial density is not normalizable on the velocity box");
  const double scale = 1.0 / (total * g.dv_volume());
  for (std::size_t iv = 0; iv < g.v_size(); ++iv) {
    std::fill_n(F.slice(iv), g.x_size(), prof[iv] * scale);
  }
  return F;
}

void require_resolved(const PhaseGrid& g, const MollifierFamily& fam) {
  if (fam.is_identity()) return;
  std::ostringstream os;
  for (int a = 0; a < g.dim; ++a) {
    if (g.nx[a] > 1 && fam.x_scale() * g.nx[a] < 4.0) {
      os << "x axis " << a << " needs >= " << static_cast<int>(std::ceil(4.0 / fam.x_scale()))
         << " cells (has " << g.nx[a] << "); ";
    }
    if (g.nv[a] > 1 && 2.0 * fam.v_radius() < 4.0 * g.h(a)) {
      os << "v axis " << a << " needs >= " << static_cast<int>(std::ceil(4.0 * g.vmax / fam.v_radius()))
         << " cells (has " << g.nv[a] << "); ";
    }
  }
  if (!os.str().empty()) throw ConfigError("grid too coarse for the mollifier: " + os.str());
}

VStencil v_stencil(const PhaseGrid& g, const MollifierFamily& fam) {
  VStencil st;
  std::array<int, 3> m{0, 0, 0};
  for (int a = 0; a < g.dim; ++a) m[a] = static_cast<int>(std::floor(fam.v_radius() / g.h(a)));
  const int r0 = m[0], r1 = g.dim >= 2 ? m[1] : 0, r2 = g.dim >= 3 ? m[2] : 0;
  double total = 0.0;
  for (int i = -r0; i <= r0; ++i)
    for (int j = -r1; j <= r1; ++j)
      for (int k = -r2; k <= r2; ++k) {
        const Vec3 w{i * g.h(0), g.dim >= 2 ? j * g.h(1) : 0.0, g.dim >= 3 ? k * g.h(2) : 0.0};
        const double val = fam.theta2(w);
        if (val <= 0.0) continue;
        st.offsets.push_back({i, j, k});
        st.weights.push_back(val);
        total += val;
      }
  const double scale = 1.0 / (total * g.dv_volume());
  for (auto& w : st.weights) w *= scale;
  return st;
}

PhaseSpaceDensity mollify_density(const PhaseSpaceDensity& F, const MollifierFamily& fam) {
  if (fam.is_identity()) return F;
  const auto& g = F.grid;
  if (fam.dim() != g.dim) throw ConfigError("mollifier and phase grid dimensions differ");
  require_resolved(g, fam);

  // x: multiply every velocity slice's spectrum by the kernel coefficients
  const Grid xg = g.x_grid();
  const std::size_t nx = g.x_size();
  const std::size_t ns = xg.spectral_size();
  const std::size_t nvs = g.v_size();
  std::vector<double> mult(ns);
  {
    const auto wv = wavevectors(xg);
    for (std::size_t s = 0; s < ns; ++s) {
      double c = 1.0 / static_cast<double>(nx);
      for (int a = 0; a < g.dim; ++a) c *= fam.profile_coefficient(wv[s].k[a]);
      mult[s] = c;
    }
  }
  PhaseSpaceDensity X(g);
  X.t = F.t;
  {
    std::vector<Complex> spec(ns * nvs);
    detail::fft_r2c(xg, F.values.data(), spec.data(), static_cast<int>(nvs));
    for (std::size_t iv = 0; iv < nvs; ++iv)
      for (std::size_t s = 0; s < ns; ++s) spec[iv * ns + s] *= mult[s];
    detail::fft_c2r(xg, spec.data(), X.values.data(), static_cast<int>(nvs));
  }

  // v: discrete convolution, zero outside the box
  const VStencil st = v_stencil(g, fam);
  PhaseSpaceDensity out(g);
  out.t = F.t;
  const double dv = g.dv_volume();
  for (std::size_t iv = 0; iv < nvs; ++iv) {
    const auto j = g.v_multi(iv);
    double* dst = out.slice(iv);
    for (std::size_t o = 0; o < st.offsets.size(); ++o) {
      std::array<int, 3> src = j;
      bool inside = true;
      for (int a = 0; a < g.dim; ++a) {
        src[a] -= st.offsets[o][a];
        inside = inside && src[a] >= 0 && src[a] < g.nv[a];
      }
      if (!inside) continue;
      std::size_t lin = 0;
      for (int a = 0; a < g.dim; ++a) lin = lin * g.nv[a] + static_cast<std::size_t>(src[a]);
      const double w = st.weights[o] * dv;
      const double* s = X.slice(lin);
      for (std::size_t ix = 0; ix < nx; ++ix) dst[ix] += w * s[ix];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {
constexpr std::uint32_t kPhaseVersion = 1;
}

void write_phase_snapshot(std::ostream& os, const PhaseSpaceDensity& F) {
  const auto& g = F.grid;
  binio::put_magic(os, "KPHD");
  binio::put<std::uint32_t>(os, kPhaseVersion);
  binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim));
  for (int a = 0; a < g.dim; ++a) binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.nx[a]));
  for (int a = 0; a < g.dim; ++a) binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.nv[a]));
  binio::put<double>(os, g.vmax);
  binio::put<double>(os, F.t);
  for (double v : F.values) binio::put<double>(os, v);
}

PhaseSpaceDensity read_phase_snapshot(std::istream& is) {
  binio::expect_magic(is, "KPHD");
  if (binio::get<std::uint32_t>(is) != kPhaseVersion) throw std::runtime_error("KPHD: unsupported version");
  const int d = static_cast<int>(binio::get<std::uint32_t>(is));
  if (d < 1 || d > 3) throw std::runtime_error("KPHD: corrupt header");
  std::array<int, 3> nx{1, 1, 1}, nv{1, 1, 1};
  for (int a = 0; a < d; ++a) nx[a] = static_cast<int>(binio::get<std::uint32_t>(is));
  for (int a = 0; a < d; ++a) nv[a] = static_cast<int>(binio::get<std::uint32_t>(is));
  const double vmax = binio::get<double>(is);
  PhaseSpaceDensity F(PhaseGrid(d, nx, nv, vmax));
  F.t = binio::get<double>(is);
  for (auto& v : F.values) v = binio::get<double>(is);
  return F;
}

void write_phase_snapshot(const std::string& path, const PhaseSpaceDensity& F) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_phase_snapshot(os, F);
}

PhaseSpaceDensity read_phase_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_phase_snapshot(is);
}

}  // namespace vnslab
