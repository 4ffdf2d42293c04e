#include "vnslab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "fft_plans.hpp"
#include "vnslab/binary_io.hpp"

namespace vnslab {

// ---------------------------------------------------------------------------
// FFTW plan cache

namespace detail {
namespace {

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plans] : plans_) {
      fftw_destroy_plan(plans.r2c);
      fftw_destroy_plan(plans.c2r);
    }
  }

  const PlanPair& get(const Grid& grid, int howmany) {
    auto key = std::make_tuple(grid.dim, grid.n[0], grid.n[1], grid.n[2], howmany);
    std::lock_guard lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    int dims[3];
    for (int i = 0; i < grid.dim; ++i) dims[i] = grid.n[i];
    const int real_dist = static_cast<int>(grid.size());
    const int cplx_dist = static_cast<int>(grid.spectral_size());
    // Planning arrays only; execution uses the new-array API.
    double* rbuf = fftw_alloc_real(grid.size() * howmany);
    fftw_complex* cbuf = fftw_alloc_complex(grid.spectral_size() * howmany);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p;
    p.r2c = fftw_plan_many_dft_r2c(grid.dim, dims, howmany, rbuf, nullptr, 1, real_dist, cbuf, nullptr,
                                   1, cplx_dist, flags);
    p.c2r = fftw_plan_many_dft_c2r(grid.dim, dims, howmany, cbuf, nullptr, 1, cplx_dist, rbuf, nullptr,
                                   1, real_dist, flags);
    fftw_free(rbuf);
    fftw_free(cbuf);
    if (!p.r2c || !p.c2r) throw SpectralError("FFTW planning failed");
    return plans_.emplace(key, p).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int, int, int>, PlanPair> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft_r2c(const Grid& grid, const double* in, Complex* out, int howmany) {
  const auto& p = cache().get(grid, howmany);
  fftw_execute_dft_r2c(p.r2c, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void fft_c2r(const Grid& grid, Complex* in, double* out, int howmany) {
  const auto& p = cache().get(grid, howmany);
  fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(int d, int n_all) : Grid(d, std::array<int, 3>{n_all, n_all, n_all}) {}

Grid::Grid(int d, std::array<int, 3> sizes) : dim(d), n{1, 1, 1} {
  if (d < 1 || d > 3) throw SpectralError("grid dimension must be 1, 2 or 3");
  for (int i = 0; i < d; ++i) {
    if (sizes[i] < 1) throw SpectralError("grid sizes must be positive");
    if (sizes[i] > 1 && sizes[i] % 2 != 0) throw SpectralError("grid sizes must be even");
    n[i] = sizes[i];
  }
}

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int i = 0; i < dim; ++i) s *= static_cast<std::size_t>(n[i]);
  return s;
}

std::size_t Grid::spectral_size() const {
  std::size_t s = 1;
  for (int i = 0; i < dim; ++i) s *= static_cast<std::size_t>(spectral_extent(i));
  return s;
}

std::vector<Wavevector> wavevectors(const Grid& grid) {
  std::vector<Wavevector> out(grid.spectral_size());
  std::array<int, 3> ext{1, 1, 1};
  for (int i = 0; i < grid.dim; ++i) ext[i] = grid.spectral_extent(i);
  std::size_t s = 0;
  for (int j0 = 0; j0 < ext[0]; ++j0) {
    for (int j1 = 0; j1 < ext[1]; ++j1) {
      for (int j2 = 0; j2 < ext[2]; ++j2, ++s) {
        const std::array<int, 3> j{j0, j1, j2};
        Wavevector& w = out[s];
        for (int i = 0; i < grid.dim; ++i) {
          const int n = grid.n[i];
          const int k = (i == grid.dim - 1 || j[i] <= n / 2) ? j[i] : j[i] - n;
          w.k[i] = k;
          w.norm2 += static_cast<double>(k) * k;
          if (n > 1 && std::abs(k) == n / 2) w.nyquist = true;
        }
        const int last = grid.dim - 1;
        const int kl = w.k[last];
        const int nl = grid.n[last];
        w.weight = (kl == 0 || (nl > 1 && kl == nl / 2)) ? 1.0 : 2.0;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fields

RealField::RealField(Grid g, int comps)
    : grid(g), components(comps), data(g.size() * static_cast<std::size_t>(comps), 0.0) {}

std::array<double, 3> RealField::position(std::size_t idx) const {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int i = grid.dim - 1; i >= 0; --i) {
    const auto n = static_cast<std::size_t>(grid.n[i]);
    x[i] = static_cast<double>(idx % n) / static_cast<double>(n);
    idx /= n;
  }
  return x;
}

SpectralField::SpectralField(Grid grid, int components)
    : grid_(grid), components_(components), data_(grid.spectral_size() * static_cast<std::size_t>(components)) {
  if (components < 1) throw SpectralError("field needs at least one component");
}

Complex SpectralField::full_coeff(int c, std::array<int, 3> j) const {
  const int last = grid_.dim - 1;
  bool conj = false;
  const int nl = grid_.n[last];
  if (j[last] > nl / 2) {
    conj = true;
    for (int i = 0; i < grid_.dim; ++i) j[i] = (grid_.n[i] - j[i]) % grid_.n[i];
  }
  std::size_t s = 0;
  for (int i = 0; i < grid_.dim; ++i) s = s * grid_.spectral_extent(i) + static_cast<std::size_t>(j[i]);
  const Complex v = coeffs(c)[s];
  return conj ? std::conj(v) : v;
}

namespace {

void require_same_shape(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid()) || a.components() != b.components()) {
    throw SpectralError("spectral fields have mismatched grids or component counts");
  }
}

}  // namespace

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  divergence_free_ = divergence_free_ && o.divergence_free_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  divergence_free_ = divergence_free_ && o.divergence_free_;
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }

// ---------------------------------------------------------------------------
// Transforms

SpectralField forward_transform(const RealField& samples) {
  const Grid& g = samples.grid;
  if (samples.data.size() != g.size() * static_cast<std::size_t>(samples.components)) {
    throw SpectralError("sample array does not match the declared grid shape");
  }
  SpectralField out(g, samples.components);
  const double scale = 1.0 / static_cast<double>(g.size());
  for (int c = 0; c < samples.components; ++c) {
    auto dst = out.coeffs(c);
    detail::fft_r2c(g, samples.component(c).data(), dst.data());
    for (auto& v : dst) v = std::conj(v) * scale;
  }
  return out;
}

RealField inverse_transform(const SpectralField& field) {
  const Grid& g = field.grid();
  RealField out(g, field.components());
  std::vector<Complex> tmp(g.spectral_size());
  for (int c = 0; c < field.components(); ++c) {
    auto src = field.coeffs(c);
    for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = std::conj(src[i]);
    detail::fft_c2r(g, tmp.data(), out.component(c).data());
  }
  return out;
}

double max_imaginary_part(const SpectralField& field) {
  const Grid& g = field.grid();
  int dims[3];
  for (int i = 0; i < g.dim; ++i) dims[i] = g.n[i];
  std::vector<Complex> full(g.size());
  fftw_plan plan;
  {
    static std::mutex planner;
    std::lock_guard lock(planner);
    plan = fftw_plan_dft(g.dim, dims, reinterpret_cast<fftw_complex*>(full.data()),
                         reinterpret_cast<fftw_complex*>(full.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  double worst = 0.0;
  for (int c = 0; c < field.components(); ++c) {
    std::size_t s = 0;
    for (int j0 = 0; j0 < g.n[0]; ++j0)
      for (int j1 = 0; j1 < g.n[1]; ++j1)
        for (int j2 = 0; j2 < g.n[2]; ++j2, ++s) full[s] = std::conj(field.full_coeff(c, {j0, j1, j2}));
    fftw_execute(plan);
    for (const auto& v : full) worst = std::max(worst, std::abs(v.imag()));
  }
  {
    static std::mutex planner;
    std::lock_guard lock(planner);
    fftw_destroy_plan(plan);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Diagonal operators

namespace {

template <typename Multiplier>
SpectralField apply_scalar_multiplier(const SpectralField& f, Multiplier&& m) {
  SpectralField out = f;
  const auto wv = wavevectors(f.grid());
  for (int c = 0; c < f.components(); ++c) {
    auto co = out.coeffs(c);
    for (std::size_t s = 0; s < wv.size(); ++s) co[s] *= m(wv[s]);
  }
  return out;
}

}  // namespace

SpectralField leray_project(const SpectralField& f) {
  const Grid& g = f.grid();
  if (f.components() != g.dim) throw SpectralError("leray_project requires a d-component vector field");
  SpectralField out = f;
  const auto wv = wavevectors(g);
  for (std::size_t s = 0; s < wv.size(); ++s) {
    const auto& w = wv[s];
    if (w.norm2 == 0.0) continue;
    if (w.nyquist) {
      for (int c = 0; c < g.dim; ++c) out.coeffs(c)[s] = 0.0;
      continue;
    }
    Complex kdot = 0.0;
    for (int c = 0; c < g.dim; ++c) kdot += static_cast<double>(w.k[c]) * f.coeffs(c)[s];
    for (int c = 0; c < g.dim; ++c) out.coeffs(c)[s] -= kdot * (w.k[c] / w.norm2);
  }
  out.set_divergence_free(true);
  return out;
}

SpectralField bessel_filter(const SpectralField& f, double gamma) {
  auto out = apply_scalar_multiplier(f, [gamma](const Wavevector& w) {
    return std::pow(1.0 + w.norm2, 0.5 * gamma);
  });
  out.set_divergence_free(f.divergence_free());
  return out;
}

SpectralField heat_propagate(const SpectralField& f, double t) {
  if (!(t >= 0.0)) throw SpectralError("heat_propagate requires t >= 0");
  auto out = apply_scalar_multiplier(f, [t](const Wavevector& w) {
    return std::exp(-4.0 * kPi * kPi * w.norm2 * t);
  });
  out.set_divergence_free(f.divergence_free());
  return out;
}

SpectralField spatial_derivative(const SpectralField& f, int axis) {
  const Grid& g = f.grid();
  if (axis < 0 || axis >= g.dim) throw SpectralError("derivative axis out of range");
  SpectralField out = f;
  const auto wv = wavevectors(g);
  const int n = g.n[axis];
  for (int c = 0; c < f.components(); ++c) {
    auto co = out.coeffs(c);
    for (std::size_t s = 0; s < wv.size(); ++s) {
      const int k = wv[s].k[axis];
      if (n > 1 && std::abs(k) == n / 2) {
        co[s] = 0.0;
      } else {
        co[s] *= Complex(0.0, -2.0 * kPi * k);
      }
    }
  }
  out.set_divergence_free(false);
  return out;
}

SpectralField divergence(const SpectralField& f) {
  const Grid& g = f.grid();
  if (f.components() != g.dim) throw SpectralError("divergence requires a d-component vector field");
  SpectralField out(g, 1);
  for (int axis = 0; axis < g.dim; ++axis) {
    SpectralField comp(g, 1);
    std::copy(f.coeffs(axis).begin(), f.coeffs(axis).end(), comp.coeffs(0).begin());
    out += spatial_derivative(comp, axis);
  }
  return out;
}

SpectralField gradient(const SpectralField& f) {
  const Grid& g = f.grid();
  SpectralField out(g, f.components() * g.dim);
  for (int c = 0; c < f.components(); ++c) {
    SpectralField comp(g, 1);
    std::copy(f.coeffs(c).begin(), f.coeffs(c).end(), comp.coeffs(0).begin());
    for (int axis = 0; axis < g.dim; ++axis) {
      const auto d = spatial_derivative(comp, axis);
      std::copy(d.coeffs(0).begin(), d.coeffs(0).end(), out.coeffs(c * g.dim + axis).begin());
    }
  }
  return out;
}

SpectralField dealias(const SpectralField& f) {
  const Grid& g = f.grid();
  auto out = apply_scalar_multiplier(f, [&g](const Wavevector& w) {
    for (int i = 0; i < g.dim; ++i) {
      if (g.n[i] > 1 && 3 * std::abs(w.k[i]) > g.n[i]) return 0.0;
    }
    return 1.0;
  });
  out.set_divergence_free(f.divergence_free());
  return out;
}

// ---------------------------------------------------------------------------
// Norms

double lp_norm(const RealField& f, double p) {
  const std::size_t m = f.grid.size();
  if (!(p >= 1.0)) throw SpectralError("L^p norm requires p >= 1");
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double mag2 = 0.0;
    for (int c = 0; c < f.components; ++c) mag2 += f.at(c, i) * f.at(c, i);
    const double mag = std::sqrt(mag2);
    if (std::isinf(p)) {
      acc = std::max(acc, mag);
    } else if (p == 2.0) {
      acc += mag2;
    } else {
      acc += std::pow(mag, p);
    }
  }
  if (std::isinf(p)) return acc;
  return std::pow(acc / static_cast<double>(m), 1.0 / p);
}

double bessel_norm(const SpectralField& f, double gamma, double p) {
  return lp_norm(inverse_transform(bessel_filter(f, gamma)), p);
}

double parseval_bessel_norm(const SpectralField& f, double gamma) {
  const auto wv = wavevectors(f.grid());
  double acc = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    auto co = f.coeffs(c);
    for (std::size_t s = 0; s < wv.size(); ++s) {
      acc += wv[s].weight * std::pow(1.0 + wv[s].norm2, gamma) * std::norm(co[s]);
    }
  }
  return std::sqrt(acc);
}

double inner_product(const SpectralField& f, const SpectralField& g) {
  require_same_shape(f, g);
  const auto wv = wavevectors(f.grid());
  double acc = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    auto a = f.coeffs(c);
    auto b = g.coeffs(c);
    for (std::size_t s = 0; s < wv.size(); ++s) acc += wv[s].weight * (a[s] * std::conj(b[s])).real();
  }
  return acc;
}

double divergence_residual(const SpectralField& f) {
  const Grid& g = f.grid();
  if (f.components() != g.dim) throw SpectralError("divergence residual requires a vector field");
  const auto wv = wavevectors(g);
  double worst = 0.0;
  for (std::size_t s = 0; s < wv.size(); ++s) {
    Complex kdot = 0.0;
    for (int c = 0; c < g.dim; ++c) kdot += static_cast<double>(wv[s].k[c]) * f.coeffs(c)[s];
    worst = std::max(worst, std::abs(kdot));
  }
  return worst;
}

double heat_estimate_check(const RealField& f, double gamma, int n, double p, double r, double t) {
  if (r > p) throw SpectralError("heat_estimate_check requires r <= p");
  if (r < 1.0) throw SpectralError("heat_estimate_check requires r >= 1");
  if (!(t > 0.0)) throw SpectralError("heat_estimate_check requires t > 0");
  if (gamma < 0.0 || n < 0) throw SpectralError("heat_estimate_check requires gamma >= 0, n >= 0");
  if (f.components != 1) throw SpectralError("heat_estimate_check expects a scalar field");
  SpectralField work = heat_propagate(forward_transform(f), t);
  for (int i = 0; i < n; ++i) work = gradient(work);
  const double lhs = bessel_norm(work, gamma, p);
  const double d = f.grid.dim;
  const double expo = 0.5 * (gamma + n + d * (1.0 / r - 1.0 / p));
  const double denom = lp_norm(f, r);
  if (denom == 0.0) return 0.0;
  return lhs * std::pow(t, expo) / denom;
}

// ---------------------------------------------------------------------------
// Point evaluation

namespace {

double wrap_unit(double x) {
  double y = x - std::floor(x);
  if (y >= 1.0) y = 0.0;
  return y;
}

}  // namespace

std::vector<double> interpolate_spline4(const RealField& f, std::span<const std::array<double, 3>> pts) {
  const Grid& g = f.grid;
  const int d = g.dim;
  std::vector<double> out(pts.size() * static_cast<std::size_t>(f.components), 0.0);
  for (std::size_t p = 0; p < pts.size(); ++p) {
    std::array<std::array<double, 4>, 3> w{};
    std::array<std::array<std::size_t, 4>, 3> idx{};
    for (int a = 0; a < 3; ++a) {
      w[a] = {0.0, 1.0, 0.0, 0.0};
      idx[a] = {0, 0, 0, 0};
    }
    for (int a = 0; a < d; ++a) {
      const int n = g.n[a];
      const double gx = wrap_unit(pts[p][a]) * n;
      const double base = std::floor(gx);
      const double t = gx - base;
      const int i0 = static_cast<int>(base);
      w[a] = {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
              -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
      for (int o = 0; o < 4; ++o) idx[a][o] = static_cast<std::size_t>(((i0 + o - 1) % n + n) % n);
    }
    const int r0 = d >= 1 ? 4 : 1;
    const int r1 = d >= 2 ? 4 : 1;
    const int r2 = d >= 3 ? 4 : 1;
    for (int c = 0; c < f.components; ++c) {
      const auto comp = f.component(c);
      double acc = 0.0;
      for (int o0 = 0; o0 < r0; ++o0) {
        for (int o1 = 0; o1 < r1; ++o1) {
          for (int o2 = 0; o2 < r2; ++o2) {
            const int a0 = d >= 1 ? o0 : 1, a1 = d >= 2 ? o1 : 1, a2 = d >= 3 ? o2 : 1;
            std::size_t lin = idx[0][a0];
            if (d >= 2) lin = lin * g.n[1] + idx[1][a1];
            if (d >= 3) lin = lin * g.n[2] + idx[2][a2];
            acc += w[0][a0] * (d >= 2 ? w[1][a1] : 1.0) * (d >= 3 ? w[2][a2] : 1.0) * comp[lin];
          }
        }
      }
      out[p * f.components + c] = acc;
    }
  }
  return out;
}

std::vector<double> evaluate_at_points(const SpectralField& f, std::span<const std::array<double, 3>> pts,
                                       InterpScheme scheme) {
  if (scheme == InterpScheme::Spline4) return interpolate_spline4(inverse_transform(f), pts);

  const Grid& g = f.grid();
  const int d = g.dim;
  const int comps = f.components();
  std::vector<double> out(pts.size() * static_cast<std::size_t>(comps), 0.0);
  std::array<std::vector<Complex>, 3> phase;
  // Full-spectrum coefficient table, gathered once.
  std::vector<Complex> full(g.size() * static_cast<std::size_t>(comps));
  {
    std::size_t s = 0;
    for (int j0 = 0; j0 < g.n[0]; ++j0)
      for (int j1 = 0; j1 < g.n[1]; ++j1)
        for (int j2 = 0; j2 < g.n[2]; ++j2, ++s)
          for (int c = 0; c < comps; ++c) full[s * comps + c] = f.full_coeff(c, {j0, j1, j2});
  }
  for (std::size_t p = 0; p < pts.size(); ++p) {
    for (int a = 0; a < 3; ++a) {
      const int n = g.n[a];
      phase[a].assign(static_cast<std::size_t>(n), Complex(1.0, 0.0));
      if (a >= d) continue;
      const double x = wrap_unit(pts[p][a]);
      for (int j = 0; j < n; ++j) {
        const int k = j <= n / 2 ? j : j - n;
        if (n > 1 && j == n / 2) {
          phase[a][j] = std::cos(kPi * n * x);
        } else {
          phase[a][j] = std::polar(1.0, -2.0 * kPi * k * x);
        }
      }
    }
    std::size_t s = 0;
    std::vector<Complex> acc(static_cast<std::size_t>(comps), 0.0);
    for (int j0 = 0; j0 < g.n[0]; ++j0) {
      for (int j1 = 0; j1 < g.n[1]; ++j1) {
        const Complex p01 = phase[0][j0] * phase[1][j1];
        for (int j2 = 0; j2 < g.n[2]; ++j2, ++s) {
          const Complex ph = p01 * phase[2][j2];
          for (int c = 0; c < comps; ++c) acc[c] += full[s * comps + c] * ph;
        }
      }
    }
    for (int c = 0; c < comps; ++c) out[p * comps + c] = acc[c].real();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Snapshots

namespace {
constexpr std::uint32_t kFieldVersion = 1;
constexpr std::uint32_t kStorageHalfSpectrum = 1;
}  // namespace

void write_field_snapshot(std::ostream& os, const SpectralField& f) {
  const Grid& g = f.grid();
  binio::put_magic(os, "KFLD");
  binio::put<std::uint32_t>(os, kFieldVersion);
  binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim));
  binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(f.components()));
  for (int i = 0; i < g.dim; ++i) binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n[i]));
  binio::put<std::uint32_t>(os, kStorageHalfSpectrum);
  for (const auto& v : f.raw()) {
    binio::put<double>(os, v.real());
    binio::put<double>(os, v.imag());
  }
}

SpectralField read_field_snapshot(std::istream& is) {
  binio::expect_magic(is, "KFLD");
  if (binio::get<std::uint32_t>(is) != kFieldVersion) throw std::runtime_error("KFLD: unsupported version");
  const int dim = static_cast<int>(binio::get<std::uint32_t>(is));
  const int comps = static_cast<int>(binio::get<std::uint32_t>(is));
  if (dim < 1 || dim > 3 || comps < 1) throw std::runtime_error("KFLD: corrupt header");
  std::array<int, 3> n{1, 1, 1};
  for (int i = 0; i < dim; ++i) n[i] = static_cast<int>(binio::get<std::uint32_t>(is));
  if (binio::get<std::uint32_t>(is) != kStorageHalfSpectrum) throw std::runtime_error("KFLD: unknown storage");
  SpectralField f(Grid(dim, n), comps);
  for (auto& v : f.raw()) {
    const double re = binio::get<double>(is);
    const double im = binio::get<double>(is);
    v = Complex(re, im);
  }
  if (comps == dim) {
    const double scale = parseval_bessel_norm(f, 0.0);
    f.set_divergence_free(divergence_residual(f) <= 1e-12 * std::max(scale, 1e-300));
  }
  return f;
}

void write_field_snapshot(const std::string& path, const SpectralField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_field_snapshot(os, f);
}

SpectralField read_field_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_field_snapshot(is);
}

}  // namespace vnslab
