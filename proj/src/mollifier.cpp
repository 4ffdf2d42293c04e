#include "vnslab/mollifier.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "vnslab/spectral.hpp"

namespace vnslab {

XKernel parse_x_kernel(const std::string& name) {
  if (name == "sech") return XKernel::Sech;
  if (name == "von-mises") return XKernel::VonMises;
  if (name == "bump") return XKernel::Bump;
  throw ConfigError("unknown x_kernel '" + name + "' (expected sech, von-mises or bump)");
}

std::string to_string(XKernel k) {
  switch (k) {
    case XKernel::Sech: return "sech";
    case XKernel::VonMises: return "von-mises";
    case XKernel::Bump: return "bump";
  }
  return "?";
}

std::string check_mollifier_exponents(double alpha, double beta, int d) {
  std::ostringstream os;
  if (!(alpha > 0 && alpha <= 1)) os << "alpha must lie in (0,1]; ";
  if (!(beta > 0 && beta <= 1)) os << "beta must lie in (0,1]; ";
  if (!(alpha > beta)) os << "alpha > beta violated (alpha=" << alpha << ", beta=" << beta << "); ";
  const double lhs = d * beta + (d + 1) * alpha;
  if (!(lhs < 0.5)) os << "d*beta + (d+1)*alpha < 1/2 violated (value " << lhs << "); ";
  std::string s = os.str();
  if (!s.empty()) s.resize(s.size() - 2);
  return s;
}

namespace {

double bump_raw(double y, double s) {
  const double z = 2.0 * y / s;
  if (std::abs(z) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - z * z));
}

double bump_raw_derivative(double y, double s) {
  const double z = 2.0 * y / s;
  if (std::abs(z) >= 1.0) return 0.0;
  const double q = 1.0 - z * z;
  return std::exp(-1.0 / q) * (-2.0 * z / (q * q)) * (2.0 / s);
}

double sech(double x) {
  const double a = std::abs(x);
  if (a > 700.0) return 0.0;
  const double e = std::exp(-a);
  return 2.0 * e / (1.0 + e * e);
}

double wrap_centered(double y) { return y - std::round(y); }

}  // namespace

MollifierFamily MollifierFamily::build(double alpha, double beta, long N, int d, XKernel kind) {
  if (d < 1 || d > 3) throw ConfigError("dimension must be 1, 2 or 3");
  if (N < 1) throw ConfigError("N must be >= 1");
  if (auto msg = check_mollifier_exponents(alpha, beta, d); !msg.empty()) {
    throw ConfigError("mollifier exponents rejected: " + msg);
  }
  return build_unchecked(alpha, beta, N, d, kind);
}

MollifierFamily MollifierFamily::build_unchecked(double alpha, double beta, long N, int d, XKernel kind) {
  if (d < 1 || d > 3) throw ConfigError("dimension must be 1, 2 or 3");
  if (N < 1) throw ConfigError("N must be >= 1");
  if (!(alpha > 0) || !(beta > 0)) throw ConfigError("mollifier exponents must be positive");
  MollifierFamily f;
  f.alpha_ = alpha;
  f.beta_ = beta;
  f.N_ = N;
  f.d_ = d;
  f.kind_ = kind;
  f.s_ = std::pow(static_cast<double>(N), -beta);
  f.r_ = std::pow(static_cast<double>(N), -alpha);
  if (kind == XKernel::VonMises) {
    // large-concentration rule std ~ 1 / (2 pi sqrt(kappa))
    f.kappa_ = 1.0 / std::pow(2.0 * kPi * f.s_, 2);
  } else if (kind == XKernel::Bump) {
    const int q = 20000;
    double acc = 0.0;
    for (int j = 0; j < q; ++j) acc += bump_raw((j + 0.5) / q * f.s_ - 0.5 * f.s_, f.s_) * f.s_ / q;
    f.bump_norm_ = 1.0 / acc;
  }
  // c_d = 1 / (|S^{d-1}| int_0^1 (1-r^2)^4 r^{d-1} dr)
  const double sphere = d == 1 ? 2.0 : (d == 2 ? 2.0 * kPi : 4.0 * kPi);
  const double radial = 0.5 * std::beta(0.5 * d, 5.0);
  f.c_d_ = 1.0 / (sphere * radial);
  return f;
}

MollifierFamily MollifierFamily::identity(int d) {
  MollifierFamily f;
  f.d_ = d;
  f.identity_ = true;
  const double sphere = d == 1 ? 2.0 : (d == 2 ? 2.0 * kPi : 4.0 * kPi);
  f.c_d_ = 1.0 / (sphere * 0.5 * std::beta(0.5 * d, 5.0));
  return f;
}

double MollifierFamily::profile(double y) const {
  y = wrap_centered(y);
  switch (kind_) {
    case XKernel::Sech: {
      if (s_ > 0.2) {
        double acc = 1.0;
        const int kmax = static_cast<int>(std::ceil(6.2 / s_)) + 1;
        for (int k = 1; k <= kmax; ++k) acc += 2.0 * sech(2.0 * kPi * k * s_) * std::cos(2.0 * kPi * k * y);
        return acc;
      }
      const int m = static_cast<int>(std::ceil(25.0 * s_)) + 1;
      double acc = 0.0;
      for (int i = -m; i <= m; ++i) acc += sech(kPi * (y + i) / (2.0 * s_));
      return acc / (2.0 * s_);
    }
    case XKernel::VonMises:
      return std::exp(kappa_ * (std::cos(2.0 * kPi * y) - 1.0)) /
             (std::cyl_bessel_i(0.0, kappa_) * std::exp(-kappa_));
    case XKernel::Bump: {
      double acc = 0.0;
      for (int i = -1; i <= 1; ++i) acc += bump_raw(y + i, s_);
      return acc * bump_norm_;
    }
  }
  return 0.0;
}

double MollifierFamily::profile_derivative(double y) const {
  y = wrap_centered(y);
  switch (kind_) {
    case XKernel::Sech: {
      if (s_ > 0.2) {
        double acc = 0.0;
        const int kmax = static_cast<int>(std::ceil(6.2 / s_)) + 1;
        for (int k = 1; k <= kmax; ++k) {
          acc -= 4.0 * kPi * k * sech(2.0 * kPi * k * s_) * std::sin(2.0 * kPi * k * y);
        }
        return acc;
      }
      const int m = static_cast<int>(std::ceil(25.0 * s_)) + 1;
      double acc = 0.0;
      for (int i = -m; i <= m; ++i) {
        const double z = kPi * (y + i) / (2.0 * s_);
        acc -= sech(z) * std::tanh(z);
      }
      return acc * kPi / (4.0 * s_ * s_);
    }
    case XKernel::VonMises:
      return -2.0 * kPi * kappa_ * std::sin(2.0 * kPi * y) * profile(y);
    case XKernel::Bump: {
      double acc = 0.0;
      for (int i = -1; i <= 1; ++i) acc += bump_raw_derivative(y + i, s_);
      return acc * bump_norm_;
    }
  }
  return 0.0;
}

double MollifierFamily::profile_coefficient(int k) const {
  if (identity_) return 1.0;
  switch (kind_) {
    case XKernel::Sech:
      return sech(2.0 * kPi * k * s_);
    case XKernel::VonMises:
      return std::cyl_bessel_i(static_cast<double>(std::abs(k)), kappa_) / std::cyl_bessel_i(0.0, kappa_);
    case XKernel::Bump: {
      const int q = 20000;
      double acc = 0.0;
      for (int j = 0; j < q; ++j) {
        const double y = (j + 0.5) / q * s_ - 0.5 * s_;
        acc += bump_raw(y, s_) * std::cos(2.0 * kPi * k * y) * s_ / q;
      }
      return acc * bump_norm_;
    }
  }
  return 0.0;
}

double MollifierFamily::x_halfwidth() const {
  switch (kind_) {
    case XKernel::Sech:
      // two-sided tail (4/pi) exp(-pi L / (2 s)) < 1e-10
      return std::min(0.5, 2.0 * s_ / kPi * std::log(4.0e10 / kPi));
    case XKernel::VonMises:
      return std::min(0.5, 7.0 * s_);
    case XKernel::Bump:
      return std::min(0.5, 0.5 * s_);
  }
  return 0.5;
}

double MollifierFamily::theta1(const Vec3& x) const {
  double v = 1.0;
  for (int i = 0; i < d_; ++i) v *= profile(x[i]);
  return v;
}

Vec3 MollifierFamily::grad_theta1(const Vec3& x) const {
  Vec3 g{0, 0, 0};
  std::array<double, 3> p{1, 1, 1}, dp{0, 0, 0};
  for (int i = 0; i < d_; ++i) {
    p[i] = profile(x[i]);
    dp[i] = profile_derivative(x[i]);
  }
  for (int i = 0; i < d_; ++i) {
    double acc = dp[i];
    for (int j = 0; j < d_; ++j)
      if (j != i) acc *= p[j];
    g[i] = acc;
  }
  return g;
}

double MollifierFamily::theta2_unit(double w2) const {
  if (w2 >= 1.0) return 0.0;
  const double q = 1.0 - w2;
  return c_d_ * q * q * q * q;
}

double MollifierFamily::theta2(const Vec3& v) const {
  double w2 = 0.0;
  for (int i = 0; i < d_; ++i) w2 += v[i] * v[i];
  w2 /= r_ * r_;
  return theta2_unit(w2) / std::pow(r_, d_);
}

// ---------------------------------------------------------------------------

Cutoff::Cutoff(double A) : A_(A) {
  if (!(A > 0)) throw ConfigError("cut-off level A must be positive");
}

Cutoff Cutoff::inactive() { return Cutoff(std::numeric_limits<double>::infinity()); }

double Cutoff::operator()(double y) const {
  const double a = std::abs(y);
  if (a <= A_) return y;
  const double sgn = y < 0 ? -1.0 : 1.0;
  if (a >= A_ + 1.0) return sgn * A_;
  return sgn * (A_ + p(a - A_));
}

double Cutoff::derivative(double y) const {
  const double a = std::abs(y);
  if (a <= A_) return 1.0;
  if (a >= A_ + 1.0) return 0.0;
  return dp(a - A_);
}

Vec3 Cutoff::apply(const Vec3& y, int d) const {
  Vec3 out{0, 0, 0};
  for (int i = 0; i < d; ++i) out[i] = (*this)(y[i]);
  return out;
}

}  // namespace vnslab
