#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "vnslab/errors.hpp"
#include "vnslab/fluid.hpp"
#include "vnslab/metrics.hpp"
#include "vnslab/vfp.hpp"

using namespace vnslab;

namespace {

RealField random_field(const Grid& g, int comps, unsigned seed) {
  RealField f(g, comps);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> G(0, 1);
  for (auto& x : f.data) x = G(gen);
  return f;
}

// ||(1 + |k|^2)^{gamma/2} (a - b)||_{L^p} by explicit DFT sums on a 2d grid.
double oracle_bessel(const RealField& a, const RealField& b, double gamma, double p) {
  const Grid& g = a.grid;
  const int n0 = g.n[0], n1 = g.n[1];
  const double M = double(n0) * n1;
  std::vector<double> mag2(g.size(), 0.0);
  for (int c = 0; c < a.components; ++c) {
    std::vector<std::complex<double>> hat(g.size());
    for (int k0 = 0; k0 < n0; ++k0)
      for (int k1 = 0; k1 < n1; ++k1) {
        std::complex<double> s = 0;
        for (int j0 = 0; j0 < n0; ++j0)
          for (int j1 = 0; j1 < n1; ++j1) {
            const std::size_t i = std::size_t(j0) * n1 + j1;
            s += (a.at(c, i) - b.at(c, i)) * std::polar(1.0, 2 * kPi * (double(k0 * j0) / n0 + double(k1 * j1) / n1));
          }
        hat[std::size_t(k0) * n1 + k1] = s / M;
      }
    for (int j0 = 0; j0 < n0; ++j0)
      for (int j1 = 0; j1 < n1; ++j1) {
        std::complex<double> s = 0;
        for (int k0 = 0; k0 < n0; ++k0)
          for (int k1 = 0; k1 < n1; ++k1) {
            const int q0 = k0 <= n0 / 2 ? k0 : k0 - n0;
            const int q1 = k1 <= n1 / 2 ? k1 : k1 - n1;
            const double w = std::pow(1.0 + q0 * q0 + q1 * q1, 0.5 * gamma);
            s += w * hat[std::size_t(k0) * n1 + k1] * std::polar(1.0, -2 * kPi * (double(k0 * j0) / n0 + double(k1 * j1) / n1));
          }
        mag2[std::size_t(j0) * n1 + j1] += s.real() * s.real();
      }
  }
  double acc = 0;
  for (double m : mag2) acc += std::pow(m, 0.5 * p) / M;
  return std::pow(acc, 1.0 / p);
}

FluidSeries series(std::vector<SpectralField> u, double dt) {
  FluidSeries s;
  for (std::size_t i = 0; i < u.size(); ++i) s.t.push_back(dt * double(i));
  s.u = std::move(u);
  return s;
}

}  // namespace

TEST_CASE("bessel error") {
  Grid g(2, 8);
  const auto a = random_field(g, 2, 1), b = random_field(g, 2, 2), c = random_field(g, 2, 3);
  const auto A = forward_transform(a), B = forward_transform(b), C = forward_transform(c);
  CHECK(bessel_error(A, A, 0.75, 4) == 0.0);
  for (double p : {2.0, 4.0})
    for (double gamma : {0.0, 0.75}) {
      const double o = oracle_bessel(a, b, gamma, p);
      CHECK(std::abs(bessel_error(A, B, gamma, p) - o) <= 1e-12 * o);
    }
  CHECK(bessel_error(A, B, 0.75, 4) == doctest::Approx(bessel_error(B, A, 0.75, 4)).epsilon(1e-14));
  CHECK(bessel_error(A, C, 0.75, 4) <= bessel_error(A, B, 0.75, 4) + bessel_error(B, C, 0.75, 4));

  RealField c1(g, 2), c2(g, 2);
  for (std::size_t i = 0; i < g.size(); ++i) {
    c1.at(0, i) = 0.3;
    c1.at(1, i) = -1.1;
    c2.at(0, i) = -0.2;
    c2.at(1, i) = 0.1;
  }
  CHECK(bessel_error(forward_transform(c1), forward_transform(c2), 0.75, 4) == doctest::Approx(std::hypot(0.5, 1.2)).epsilon(1e-13));
  CHECK_THROWS_AS(bessel_error(A, SpectralField(Grid(2, 16), 2), 0.75, 4), MetricError);
}

TEST_CASE("time-series errors") {
  Grid g(2, 16);
  const auto s1 = shear_flow(g, 0.5), s2 = shear_flow(g, 0.3);
  const auto A = series({s1, s1, s1}, 0.1);
  const auto B = series({s1, s2, s1}, 0.1);
  CHECK(sup_bessel_error(A, A, 0.75, 4) == 0.0);
  CHECK(sup_energy_error(A, B) == doctest::Approx(parseval_bessel_norm(s1 - s2, 0)));
  // ||grad (0.2 sin(2 pi y), 0)||^2 = 0.04 * 4 pi^2 / 2; trapezoid hat of height e over [0, 0.2]
  const double e = 0.04 * 2 * kPi * kPi;
  CHECK(dissipation_error(A, B) == doctest::Approx(e * 0.1).epsilon(1e-12));
  auto C = B;
  C.t[1] = 0.15;
  CHECK_THROWS_AS(sup_bessel_error(A, C, 0.75, 4), MetricError);
}

TEST_CASE("rho_N vanishes on identical streams with the identity kernel") {
  PhaseGrid pg(2, {8, 8, 1}, {12, 12, 1}, 2.0);
  const auto fam = MollifierFamily::identity(2);
  LimitState s{FluidState{shear_flow(pg.x_grid(), 0.5)}, uniform_maxwellian(pg, {0, 0, 0}, 0.4)};
  FluidSeries us;
  std::vector<PhaseSpaceDensity> Fs;
  for (int i = 0; i < 3; ++i) {
    us.t.push_back(s.fluid.t);
    us.u.push_back(s.fluid.u);
    Fs.push_back(s.F);
    limit_coupled_step(s, 0.5, 0.01, DragMode::Plain, Cutoff(4.0));
  }
  CHECK(rho_N(us, Fs, us, Fs, fam, 0.75, 4, 3) == 0.0);
  CHECK(rho_tilde_N(Fs, fam, 3) == 0.0);
}

TEST_CASE("rho_N shrinks as sigma_N approaches sigma") {
  PhaseGrid pg(2, {8, 8, 1}, {24, 24, 1}, 2.5);
  const auto fam = MollifierFamily::identity(2);
  const double sigma = 0.4;
  auto run = [&](double s_run, DragMode mode) {
    LimitState s{FluidState{shear_flow(pg.x_grid(), 0.5)}, uniform_maxwellian(pg, {0.1, 0, 0}, 0.3)};
    FluidSeries us;
    std::vector<PhaseSpaceDensity> Fs;
    for (int i = 0; i <= 20; ++i) {
      if (i % 5 == 0) {
        us.t.push_back(s.fluid.t);
        us.u.push_back(s.fluid.u);
        Fs.push_back(s.F);
      }
      if (i < 20) limit_coupled_step(s, s_run, 0.01, mode, Cutoff(4.0));
    }
    return std::make_pair(us, Fs);
  };
  const auto [ul, Fl] = run(sigma, DragMode::Plain);
  double prev = INFINITY;
  for (double gap : {0.4, 0.2, 0.1, 0.05}) {
    const auto [ua, Fa] = run(sigma + gap, DragMode::Cutoff);
    const double r = rho_N(ua, Fa, ul, Fl, fam, 0.75, 4, 3);
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("rho_tilde slope on a profile of limited smoothness") {
  // x profile with coefficients k^{-(gamma + 1/2)}: ||F - F*theta|| ~ s^gamma = N^{-beta gamma}.
  // The v profile is wide next to the kernel radius so the v part stays small.
  const double gamma = 0.75, beta = 0.15, alpha = 0.17;  // d = 1: beta + 2 alpha < 1/2
  PhaseGrid pg(1, {128, 1, 1}, {1024, 1, 1}, 5.5);
  PhaseSpaceDensity F(pg);
  RealField probe(pg.x_grid(), 1);
  std::vector<double> px(pg.x_size(), 1.0);
  for (std::size_t ix = 0; ix < pg.x_size(); ++ix)
    for (int k = 1; k <= 64; ++k) px[ix] += std::pow(k, -(gamma + 0.5)) * std::cos(2 * kPi * k * probe.position(ix)[0]);
  for (std::size_t iv = 0; iv < pg.v_size(); ++iv) {
    const double v = pg.velocity(iv)[0];
    for (std::size_t ix = 0; ix < pg.x_size(); ++ix) F.slice(iv)[ix] = px[ix] * std::exp(-v * v / 2);
  }
  std::vector<std::pair<double, double>> pts;
  for (int e = 16; e <= 32; e += 4) {
    const long N = 1L << e;
    pts.push_back({double(N), rho_tilde_N({F}, MollifierFamily::build(alpha, beta, N, 1), 3)});
  }
  const auto fit = rate_fit(pts);
  MESSAGE("rho_tilde slope " << fit.slope);
  CHECK(fit.slope == doctest::Approx(-beta * gamma).epsilon(0.25));
}

TEST_CASE("chaos error") {
  const double dt = 0.01;
  auto base = init_sample(2, 50, 7, InitialLaw{}, 0.5);
  SpectralField zero(Grid(2, 16), 2);
  ParticleSeries A, B;
  auto a = base, b = base;
  for (int i = 0; i <= 30; ++i) {
    if (i % 10 == 0) {
      A.t.push_back(i * dt);
      A.snaps.push_back(a);
      B.t.push_back(i * dt);
      B.snaps.push_back(b);
    }
    particle_step(a, zero, dt, Cutoff::inactive());
    particle_step(b, zero, dt, Cutoff::inactive());
  }
  CHECK(chaos_error(A, B) == 0.0);

  auto C = B;
  for (auto& s : C.snaps) s.seed = 8;
  CHECK_THROWS_AS(chaos_error(A, C), MetricError);
  auto D = B;
  D.snaps[1].step += 1;
  CHECK_THROWS_AS(chaos_error(A, D), MetricError);
}

TEST_CASE("chaos error of a single particle with mismatched noise levels") {
  // u = 0: the velocity gap obeys D' = e^{-dt} D + (sigma_N - sigma) c xi with the shared xi
  const double dt = 0.01, sigma = 0.5, sigma_N = 0.6;
  auto p = init_sample(2, 1, 3, InitialLaw{}, sigma_N);
  auto q = p;
  q.sigma_N = sigma;
  SpectralField zero(Grid(2, 8), 2);
  ParticleSeries P, Q;
  const double c = std::sqrt((1 - std::exp(-2 * dt)) / 2);
  Vec3 D{0, 0, 0}, Y{0, 0, 0};
  double oracle = 0;
  for (int i = 0; i <= 100; ++i) {
    if (i % 5 == 0) {
      P.t.push_back(i * dt);
      P.snaps.push_back(p);
      Q.t.push_back(i * dt);
      Q.snaps.push_back(q);
      oracle = std::max(oracle, std::sqrt(Y[0] * Y[0] + Y[1] * Y[1] + D[0] * D[0] + D[1] * D[1]));
    }
    const Vec3 xi = noise_increment(p, 0);
    for (int a = 0; a < 2; ++a) {
      const double Dn = std::exp(-dt) * D[a] + (sigma_N - sigma) * c * xi[a];
      Y[a] += 0.5 * dt * (D[a] + Dn);
      D[a] = Dn;
    }
    particle_step(p, zero, dt, Cutoff::inactive());
    particle_step(q, zero, dt, Cutoff::inactive());
  }
  CHECK(oracle > 0);
  CHECK(chaos_error(P, Q) == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("rate fit") {
  std::vector<std::pair<double, double>> pts;
  for (double N : {100.0, 200.0, 400.0}) pts.push_back({N, 5 * std::pow(N, -0.5)});
  auto f = rate_fit(pts);
  CHECK(std::abs(f.slope + 0.5) < 1e-12);
  CHECK(std::abs(f.intercept - std::log(5.0)) < 1e-12);
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-14));

  auto two = rate_fit({{10, 3}, {1000, 0.03}});
  CHECK(two.slope == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(std::exp(two.intercept + two.slope * std::log(10.0)) == doctest::Approx(3.0).epsilon(1e-13));

  CHECK_THROWS_AS(rate_fit({{10, 1}, {20, 0}, {40, 1}}), MetricError);
  CHECK_THROWS_AS(rate_fit({{10, 1}, {10, 2}}), MetricError);
}

TEST_CASE("rate fit under multiplicative noise") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> G(0, 0.1);
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 20; ++i) {
    const double N = 100 * std::pow(10.0, i / 19.0);
    pts.push_back({N, std::pow(N, -0.3) * std::exp(G(gen))});
  }
  const auto [lo, hi] = bootstrap_slope_interval(pts, 2000, 5);
  CHECK(lo >= -0.38);
  CHECK(hi <= -0.22);
  CHECK(lo <= rate_fit(pts).slope);
  CHECK(rate_fit(pts).slope <= hi);
}

TEST_CASE("spearman") {
  CHECK(spearman({1, 2, 3, 4}, {10, 5, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 2, 3, 4}, {1, 4, 9, 16}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3}, {1, 1, 2}) == doctest::Approx(std::sqrt(0.75)));
}

TEST_CASE("error table round trip") {
  ErrorRecord r;
  r.N = 250;
  r.seed = 3;
  r.bessel_err = 0.1 / 3;
  r.weighted_err = 1e-300;
  r.chaos_err = 2.5;
  r.sigma_N = 0.7;
  const std::string csv = error_record_header() + "\n" + error_record_row(r) + "\n";
  const auto back = parse_error_records(csv);
  REQUIRE(back.size() == 1);
  CHECK(back[0].N == 250);
  CHECK(back[0].bessel_err == r.bessel_err);
  CHECK(back[0].weighted_err == r.weighted_err);
  CHECK(error_record_row(back[0]) == error_record_row(r));
}
