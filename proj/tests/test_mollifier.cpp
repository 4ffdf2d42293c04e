#include <cmath>
#include <random>

#include "doctest.h"
#include "vnslab/mollifier.hpp"
#include "vnslab/particles.hpp"
#include "vnslab/spectral.hpp"

using namespace vnslab;

TEST_CASE("exponent inequalities") {
  CHECK_NOTHROW(MollifierFamily::build(0.10, 0.05, 256, 2));
  CHECK_THROWS_AS(MollifierFamily::build(0.2, 0.1, 256, 2), ConfigError);
  CHECK_THROWS_AS(MollifierFamily::build(0.05, 0.1, 256, 2), ConfigError);
  try {
    MollifierFamily::build(0.2, 0.1, 256, 2);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("d*beta + (d+1)*alpha < 1/2") != std::string::npos);
  }
  auto fam = MollifierFamily::build(0.1, 0.05, 256, 2);
  CHECK(std::abs(fam.v_radius() - std::pow(256.0, -0.1)) < 1e-15);
  CHECK(std::abs(fam.v_radius() - 0.574) < 1e-3);
}

TEST_CASE("x-kernels integrate to one") {
  for (auto kind : {XKernel::Sech, XKernel::VonMises, XKernel::Bump}) {
    for (long N : {64L, 1024L, 100000L}) {
      auto fam = MollifierFamily::build(0.1, 0.09, N, 2, kind);
      // midpoint rule with plenty of points per bandwidth
      const int n = std::max(64, static_cast<int>(std::ceil(64.0 / fam.x_scale())));
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += fam.profile((j + 0.5) / n) / n;
      const double tol = kind == XKernel::Bump ? 1e-6 : 1e-10;
      CHECK(std::abs(acc - 1.0) < tol);
      CHECK(std::abs(fam.profile_coefficient(0) - 1.0) < tol);
      CHECK(fam.profile(0.37) >= 0.0);
    }
  }
}

TEST_CASE("sech profile: series and image sum agree, coefficients match") {
  // s = 0.25 uses the Fourier series, s = 0.15 the image sum
  for (long N : {5000000L, 1500000000L}) {
    auto fam = MollifierFamily::build(0.1, 0.09, N, 1);
    const double s = fam.x_scale();
    for (double y : {0.0, 0.1, 0.33, 0.5}) {
      double img = 0.0;
      for (int m = -50; m <= 50; ++m) img += 1.0 / (2 * s * std::cosh(kPi * (y + m) / (2 * s)));
      CHECK(std::abs(fam.profile(y) - img) < 1e-12 * img + 1e-14);
    }
    for (int k : {1, 2, 5}) {
      const int q = 4096;
      double acc = 0.0;
      for (int j = 0; j < q; ++j) acc += fam.profile(double(j) / q) * std::cos(2 * kPi * k * j / double(q)) / q;
      CHECK(std::abs(acc - fam.profile_coefficient(k)) < 1e-12);
    }
  }
}

TEST_CASE("theta2 is a centred density on the ball") {
  for (int d : {2, 3}) {
    auto fam = d == 2 ? MollifierFamily::build(0.1, 0.05, 256, 2) : MollifierFamily::build(0.08, 0.04, 256, 3);
    const double r = fam.v_radius();
    // radial Gauss-Legendre is exact for the polynomial profile
    const double xs[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                          0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
    const double ws[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                          0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double rho = 0.5 * r * (xs[i] + 1.0);
      const double shell = d == 2 ? 2 * kPi * rho : 4 * kPi * rho * rho;
      acc += 0.5 * r * ws[i] * shell * fam.theta2({rho, 0, 0});
    }
    CHECK(std::abs(acc - 1.0) < 1e-12);
    CHECK(fam.theta2({r * 1.0000001, 0, 0}) == 0.0);
    CHECK(fam.theta2({0, r, 0}) == 0.0);
    // first moment vanishes on a symmetric grid
    const int n = 64;
    double m1 = 0.0;
    const double h = 2 * r / n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Vec3 v{-r + (i + 0.3) * h, -r + (j + 0.5) * h, 0};
        const Vec3 w{-v[0], -v[1], 0};
        m1 += (v[0] * fam.theta2(v) + w[0] * fam.theta2(w)) * h * h;
      }
    CHECK(std::abs(m1) < 1e-12);
  }
}

TEST_CASE("gradient ratio of the sech kernel") {
  for (long N : {64L, 256L, 1024L}) {
    auto fam = MollifierFamily::build(0.1, 0.09, N, 2);
    const double Nb = std::pow(double(N), 0.09);
    double worst = 0.0;
    const int n = 128;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Vec3 x{double(i) / n, double(j) / n, 0};
        const auto g = fam.grad_theta1(x);
        worst = std::max(worst, std::hypot(g[0], g[1]) / (Nb * fam.theta1(x)));
      }
    CHECK(worst <= 2 * kPi + 0.01);
    CHECK(worst <= kPi / 2 * std::sqrt(2.0) + 1e-9);
  }
}

TEST_CASE("derivative of the profile matches finite differences") {
  for (auto kind : {XKernel::Sech, XKernel::VonMises, XKernel::Bump}) {
    auto fam = MollifierFamily::build(0.1, 0.09, 512, 2, kind);
    for (double y : {0.01, 0.1, 0.2, 0.45}) {
      const double h = 1e-6;
      const double fd = (fam.profile(y + h) - fam.profile(y - h)) / (2 * h);
      CHECK(std::abs(fd - fam.profile_derivative(y)) < 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("scaled gradient bound of the product kernel") {
  // |grad_x theta^N . v| <= C N^{beta-alpha} theta^N with C independent of N
  std::vector<double> cs;
  for (long N : {1L << 6, 1L << 8, 1L << 10}) {
    auto fam = MollifierFamily::build(0.1, 0.09, N, 2);
    const double r = fam.v_radius();
    double worst = 0.0;
    for (int i = 0; i < 32; ++i)
      for (int j = 0; j < 8; ++j) {
        const Vec3 x{i / 32.0, j / 8.0, 0};
        const Vec3 v{0.7 * r * std::cos(j), 0.7 * r * std::sin(j), 0};
        const auto g = fam.grad_theta1(x);
        const double lhs = std::abs((g[0] * v[0] + g[1] * v[1]) * fam.theta2(v));
        worst = std::max(worst, lhs / (std::pow(double(N), 0.09 - 0.1) * fam.theta(x, v)));
      }
    cs.push_back(worst);
  }
  for (double c : cs) CHECK(c <= kPi / 2 * std::sqrt(2.0) + 1e-9);
}

TEST_CASE("mollified delta") {
  auto fam = MollifierFamily::build(0.1, 0.09, 1024, 2);
  Grid g(2, 64);
  const Vec3 X{0.25, 0.5, 0};
  auto d = mollified_delta(fam, X, g);
  double mass = 0.0;
  for (double v : d.data) mass += v / g.size();
  CHECK(std::abs(mass - 1.0) < 1e-10);
  CHECK(std::abs(d.data[16 * 64 + 32] - fam.theta1({0, 0, 0})) < 1e-14);
  auto e = mollified_delta(fam, {X[0] + 3.0 / 64, X[1] - 5.0 / 64, 0}, g);
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      const int i2 = (i + 3) % 64, j2 = (j - 5 + 64) % 64;
      CHECK(std::abs(e.data[i2 * 64 + j2] - d.data[i * 64 + j]) < 1e-13);
    }
}

TEST_CASE("cut-off") {
  Cutoff chi(2.0);
  CHECK(chi(1.5) == 1.5);
  CHECK(chi(-2.0) == -2.0);
  CHECK(chi(4.0) == 2.0);
  CHECK(chi(-4.0) == -2.0);
  const auto y = chi.apply({0.3, -1.9, 0}, 2);
  CHECK(y[0] == 0.3);
  CHECK(y[1] == -1.9);

  CHECK(Cutoff::p(0) == 0);
  CHECK(Cutoff::dp(0) == 1);
  CHECK(Cutoff::d2p(0) == 0);
  CHECK(std::abs(Cutoff::p(1)) < 1e-15);
  CHECK(std::abs(Cutoff::dp(1)) < 1e-15);
  CHECK(std::abs(Cutoff::d2p(1)) < 1e-15);

  double maxd = 0.0, maxv = 0.0;
  for (int i = -60000; i <= 60000; ++i) {
    const double x = i * 1e-4;
    maxd = std::max(maxd, std::abs(chi.derivative(x)));
    maxv = std::max(maxv, std::abs(chi(x)));
    const double h = 1e-6;
    const double fd = (chi(x + h) - chi(x - h)) / (2 * h);
    CHECK(std::abs(fd - chi.derivative(x)) < 1e-8);
  }
  CHECK(maxd <= 1.0 + 1e-15);
  CHECK(maxv <= 1.0 + chi.A());
  // C^2 at the joins: second difference quotients agree from both sides
  for (double a : {2.0, 3.0}) {
    const double h = 1e-4;
    const double left = (chi.derivative(a) - chi.derivative(a - h)) / h;
    const double right = (chi.derivative(a + h) - chi.derivative(a)) / h;
    CHECK(std::abs(left - right) < 1e-2);
  }
  CHECK_THROWS_AS(Cutoff(0.0), ConfigError);
}

TEST_CASE("velocity-moment transfer and commutator bound") {
  // |(v theta^N) * (mu - nu)| <= N^{-alpha} (theta^N * mu + theta^N * nu)
  auto fam = MollifierFamily::build(0.1, 0.09, 512, 2);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> U(0, 1);
  std::normal_distribution<double> G(0, 0.4);
  std::vector<Vec3> Xm, Vm, Xn, Vn;
  for (int i = 0; i < 20; ++i) {
    Xm.push_back({U(gen), U(gen), 0});
    Vm.push_back({G(gen), G(gen), 0});
    Xn.push_back({U(gen), U(gen), 0});
    Vn.push_back({G(gen), G(gen), 0});
  }
  const double r = fam.v_radius();
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b)
      for (int c = -6; c <= 6; ++c) {
        const Vec3 x{a / 8.0, b / 8.0, 0}, v{c * 0.1, -c * 0.05, 0};
        double lhs0 = 0, lhs1 = 0, rhs = 0;
        auto add = [&](const std::vector<Vec3>& X, const std::vector<Vec3>& V, double sign) {
          for (std::size_t i = 0; i < X.size(); ++i) {
            const Vec3 dx{x[0] - X[i][0], x[1] - X[i][1], 0}, dv{v[0] - V[i][0], v[1] - V[i][1], 0};
            const double th = fam.theta(dx, dv) / X.size();
            lhs0 += sign * dv[0] * th;
            lhs1 += sign * dv[1] * th;
            rhs += th;
          }
        };
        add(Xm, Vm, 1.0);
        add(Xn, Vn, -1.0);
        CHECK(std::hypot(lhs0, lhs1) <= r * rhs + 1e-14);
      }
}

TEST_CASE("holder commutator constant is stable under N-doubling") {
  // max_x |theta^N * [(chi(f(x)) - chi(f)) mu]| / (theta^N * mu) against N^{-beta(gamma - d/p)} ||f||_{gamma,p}
  const double gamma = 0.75, p = 4.0;
  Grid g(2, 64);
  RealField f(g, 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = f.position(i);
    f.data[i] = 0.8 * std::sin(2 * kPi * x[0]) + 0.5 * std::cos(2 * kPi * (x[0] + 2 * x[1]));
  }
  auto fh = forward_transform(f);
  const double fnorm = bessel_norm(fh, gamma, p);
  Cutoff chi(1.0);
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<Vec3> mu;
  for (int i = 0; i < 200; ++i) mu.push_back({U(gen), U(gen), 0});
  auto fvals = evaluate_at_points(fh, mu, InterpScheme::ExactFourier);
  std::vector<double> cs;
  for (long N : {1L << 8, 1L << 9, 1L << 10, 1L << 11}) {
    auto fam = MollifierFamily::build(0.1, 0.09, N, 2);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); i += 7) {
      const auto x = f.position(i);
      double num = 0, den = 0;
      for (std::size_t j = 0; j < mu.size(); ++j) {
        const double th = fam.theta1({x[0] - mu[j][0], x[1] - mu[j][1], 0});
        num += (chi(f.data[i]) - chi(fvals[j])) * th;
        den += th;
      }
      worst = std::max(worst, std::abs(num) / den);
    }
    cs.push_back(worst / (std::pow(double(N), -0.09 * (gamma - 2 / p)) * fnorm));
  }
  for (std::size_t i = 1; i < cs.size(); ++i) CHECK(std::abs(cs[i] / cs[i - 1] - 1.0) <= 0.25);
}
