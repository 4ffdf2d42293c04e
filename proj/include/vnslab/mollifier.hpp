#pragma once

// Scaled mollifiers on T^d x R^d and the smooth velocity cut-off.
//
// x-kernel: product of identical 1-D periodic profiles with standard deviation
// s = N^{-beta}. The default "sech" profile (1/(2s)) sech(pi y / (2s)) has
// |g'| <= pi/(2s) g everywhere, so the log-gradient scales exactly like N^beta.
// v-kernel: c_d (1 - |w|^2)^4_+ rescaled to the ball of radius r = N^{-alpha}.

#include <array>
#include <string>
#include <vector>

#include "vnslab/errors.hpp"

namespace vnslab {

using Vec3 = std::array<double, 3>;

enum class XKernel { Sech, VonMises, Bump };

XKernel parse_x_kernel(const std::string& name);
std::string to_string(XKernel k);

class MollifierFamily {
 public:
  /// Throws ConfigError naming the violated inequality.
  static MollifierFamily build(double alpha, double beta, long N, int d, XKernel kind = XKernel::Sech);
  /// Same kernels without the exponent inequalities, for standalone rate checks
  /// at exponents the coupled system does not admit.
  static MollifierFamily build_unchecked(double alpha, double beta, long N, int d, XKernel kind = XKernel::Sech);
  /// Dirac family: mollification is the identity. Only for degenerate checks.
  static MollifierFamily identity(int d);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  long N() const { return N_; }
  int dim() const { return d_; }
  XKernel x_kind() const { return kind_; }
  bool is_identity() const { return identity_; }

  /// Bandwidth parameter of the x-kernel: std for sech / von Mises, support width for bump.
  double x_scale() const { return s_; }
  double v_radius() const { return r_; }

  /// Periodized 1-D x-profile and its derivative (per axis factor of theta^{1,N}).
  double profile(double y) const;
  double profile_derivative(double y) const;
  /// Fourier coefficient of the periodized 1-D profile at integer k.
  double profile_coefficient(int k) const;
  /// Half-width beyond which the profile carries < 1e-10 mass; >= 0.5 means the whole circle.
  double x_halfwidth() const;

  double theta1(const Vec3& x) const;
  Vec3 grad_theta1(const Vec3& x) const;
  double theta2(const Vec3& v) const;
  /// Unit-scale v-profile value at |w|^2 (zero outside the unit ball).
  double theta2_unit(double w2) const;
  double theta(const Vec3& x, const Vec3& v) const { return theta1(x) * theta2(v); }

 private:
  double alpha_ = 0, beta_ = 0;
  long N_ = 1;
  int d_ = 2;
  XKernel kind_ = XKernel::Sech;
  bool identity_ = false;
  double s_ = 0, r_ = 0;
  double kappa_ = 0;       // von Mises concentration
  double bump_norm_ = 1;   // bump normalizer
  double c_d_ = 1;         // v-profile normalizer
};

/// Checks alpha > beta and d beta + (d+1) alpha < 1/2; returns "" when satisfied.
std::string check_mollifier_exponents(double alpha, double beta, int d);

/// Smooth cut-off chi_A, applied componentwise.
class Cutoff {
 public:
  explicit Cutoff(double A);
  /// No truncation at all (A = infinity).
  static Cutoff inactive();

  double A() const { return A_; }
  double operator()(double y) const;
  double derivative(double y) const;
  Vec3 apply(const Vec3& y, int d) const;

  /// Transition polynomial p(s) = s - 6 s^3 + 8 s^4 - 3 s^5 and its derivatives.
  static double p(double s) { return s * (1.0 + s * s * (-6.0 + s * (8.0 - 3.0 * s))); }
  static double dp(double s) { return 1.0 + s * s * (-18.0 + s * (32.0 - 15.0 * s)); }
  static double d2p(double s) { return s * (-36.0 + s * (96.0 - 60.0 * s)); }

 private:
  double A_;
};

}  // namespace vnslab
