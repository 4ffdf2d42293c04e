#pragma once

// Fourier representation of periodic fields on the unit torus [0,1)^d.
//
// Convention: u(x) = sum_k u_hat(k) exp(-2 i pi <k,x>), so that
// u_hat(k) = \int u(x) exp(2 i pi <k,x>) dx with unit-measure torus. A constant
// field c therefore has u_hat(0) = c, and cos(2 pi x_1) has u_hat(+-e_1) = 1/2.
//
// Coefficients are stored on the real-to-complex half spectrum: every axis but
// the last one carries all n_i indices, the last axis carries n/2 + 1 indices
// (k_last >= 0). The negative half follows from Hermitian symmetry.

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vnslab {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

class SpectralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform periodic grid on [0,1)^d with x_j = j / n per axis.
struct Grid {
  int dim = 2;
  std::array<int, 3> n{1, 1, 1};

  Grid() = default;
  Grid(int d, int n_all);
  Grid(int d, std::array<int, 3> sizes);

  std::size_t size() const;           // number of physical samples
  std::size_t spectral_size() const;  // number of stored half-spectrum coefficients
  int spectral_extent(int axis) const { return axis == dim - 1 ? n[axis] / 2 + 1 : n[axis]; }
  double spacing(int axis) const { return 1.0 / n[axis]; }

  bool operator==(const Grid&) const = default;
};

/// Integer wavevector of a stored half-spectrum slot.
struct Wavevector {
  std::array<int, 3> k{0, 0, 0};
  double norm2 = 0.0;     // |k|^2
  bool nyquist = false;   // some |k_i| == n_i / 2 (with n_i > 1)
  double weight = 1.0;    // multiplicity in the full spectrum (1 or 2)
};

/// Enumerates the wavevectors of the half spectrum in storage order.
std::vector<Wavevector> wavevectors(const Grid& grid);

/// Real samples of a scalar or vector field, component-major.
struct RealField {
  Grid grid;
  int components = 1;
  std::vector<double> data;

  RealField() = default;
  RealField(Grid g, int comps);

  std::span<double> component(int c) {
    return {data.data() + static_cast<std::size_t>(c) * grid.size(), grid.size()};
  }
  std::span<const double> component(int c) const {
    return {data.data() + static_cast<std::size_t>(c) * grid.size(), grid.size()};
  }
  double& at(int c, std::size_t idx) { return data[static_cast<std::size_t>(c) * grid.size() + idx]; }
  double at(int c, std::size_t idx) const {
    return data[static_cast<std::size_t>(c) * grid.size() + idx];
  }
  /// Physical coordinate of a linear sample index.
  std::array<double, 3> position(std::size_t idx) const;
};

class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(Grid grid, int components);

  const Grid& grid() const { return grid_; }
  int components() const { return components_; }
  bool divergence_free() const { return divergence_free_; }
  void set_divergence_free(bool flag) { divergence_free_ = flag; }

  std::span<Complex> coeffs(int c) {
    return {data_.data() + static_cast<std::size_t>(c) * grid_.spectral_size(), grid_.spectral_size()};
  }
  std::span<const Complex> coeffs(int c) const {
    return {data_.data() + static_cast<std::size_t>(c) * grid_.spectral_size(), grid_.spectral_size()};
  }
  std::vector<Complex>& raw() { return data_; }
  const std::vector<Complex>& raw() const { return data_; }

  /// Coefficient at an arbitrary full-spectrum index (j_i in [0, n_i)).
  Complex full_coeff(int c, std::array<int, 3> j) const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);

 private:
  Grid grid_;
  int components_ = 0;
  bool divergence_free_ = false;
  std::vector<Complex> data_;
};

SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator+(SpectralField a, const SpectralField& b);

// ---- transforms ----------------------------------------------------------

SpectralField forward_transform(const RealField& samples);
RealField inverse_transform(const SpectralField& field);

/// Full complex inverse transform (no Hermitian assumption); used to check
/// realness of operator chains. Returns the imaginary parts' max magnitude.
double max_imaginary_part(const SpectralField& field);

// ---- operators -----------------------------------------------------------

SpectralField leray_project(const SpectralField& f);
SpectralField bessel_filter(const SpectralField& f, double gamma);
SpectralField heat_propagate(const SpectralField& f, double t);
SpectralField spatial_derivative(const SpectralField& f, int axis);
SpectralField divergence(const SpectralField& f);
/// Component-wise gradient: for a scalar returns d components, for a vector
/// with c components returns c*d components ordered (component, axis).
SpectralField gradient(const SpectralField& f);
/// 2/3-rule truncation: zero every mode with some |k_i| > n_i / 3.
SpectralField dealias(const SpectralField& f);

/// L^p quadrature norm of physical samples; vectors use the pointwise
/// Euclidean magnitude. p = infinity gives the max norm.
double lp_norm(const RealField& f, double p);
/// ||(I - Delta)^{gamma/2} f||_{L^p}.
double bessel_norm(const SpectralField& f, double gamma, double p);
/// sum_k (1+|k|^2)^gamma |f_hat(k)|^2 over the full spectrum, square-rooted.
double parseval_bessel_norm(const SpectralField& f, double gamma);
/// L^2 inner product <f, g> over the unit torus (real fields).
double inner_product(const SpectralField& f, const SpectralField& g);
/// max_k |<k, f_hat(k)>|.
double divergence_residual(const SpectralField& f);

/// Ratio ||(I-Delta)^{gamma/2} grad^n e^{t Delta} f||_{L^p} * t^{e} / ||f||_{L^r}
/// with e = (gamma + n + d (1/r - 1/p)) / 2.
double heat_estimate_check(const RealField& f, double gamma, int n, double p, double r, double t);

// ---- point evaluation ----------------------------------------------------

enum class InterpScheme { ExactFourier, Spline4 };

/// Values at points, laid out [point][component]. Points are reduced mod 1.
std::vector<double> evaluate_at_points(const SpectralField& f,
                                       std::span<const std::array<double, 3>> pts,
                                       InterpScheme scheme);
/// 4-point Lagrange interpolation straight from physical samples.
std::vector<double> interpolate_spline4(const RealField& f, std::span<const std::array<double, 3>> pts);

// ---- snapshot I/O ("KFLD") -------------------------------------------------

void write_field_snapshot(std::ostream& os, const SpectralField& f);
SpectralField read_field_snapshot(std::istream& is);
void write_field_snapshot(const std::string& path, const SpectralField& f);
SpectralField read_field_snapshot(const std::string& path);

}  // namespace vnslab
