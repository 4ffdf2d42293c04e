// Prints one PASS/FAIL line per acceptance criterion; exit status 0 only when
// every selected criterion passes. Usage: vnslab_acceptance [--out DIR] [--only 1,3,...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vnslab/config.hpp"
#include "vnslab/fluid.hpp"
#include "vnslab/harness.hpp"
#include "vnslab/metrics.hpp"
#include "vnslab/particles.hpp"
#include "vnslab/phase_density.hpp"
#include "vnslab/spectral.hpp"
#include "vnslab/vfp.hpp"

using namespace vnslab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RealField random_field(const Grid& g, int comps, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  RealField f(g, comps);
  for (auto& v : f.data) v = nd(gen);
  return f;
}

// ---- 1: spectral operators against direct DFT sums ------------------------

// Full-spectrum coefficients by direct summation on an n x n grid.
struct DirectDft {
  int n, comps;
  std::vector<Complex> c;

  static int signed_k(int j, int n) { return j <= n / 2 ? j : j - n; }

  explicit DirectDft(const RealField& f) : n(f.grid.n[0]), comps(f.components), c(std::size_t(comps * n * n)) {
    for (int q = 0; q < comps; ++q)
      for (int j0 = 0; j0 < n; ++j0)
        for (int j1 = 0; j1 < n; ++j1) {
          Complex acc = 0.0;
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              acc += f.at(q, std::size_t(a * n + b)) * std::polar(1.0, 2.0 * kPi * (double(j0) * a + double(j1) * b) / n);
          at(q, j0, j1) = acc / double(n * n);
        }
  }
  Complex& at(int q, int j0, int j1) { return c[std::size_t((q * n + j0) * n + j1)]; }

  RealField synth() {
    RealField out(Grid(2, n), comps);
    for (int q = 0; q < comps; ++q)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          Complex acc = 0.0;
          for (int j0 = 0; j0 < n; ++j0)
            for (int j1 = 0; j1 < n; ++j1)
              acc += at(q, j0, j1) * std::polar(1.0, -2.0 * kPi * (double(j0) * a + double(j1) * b) / n);
          out.at(q, std::size_t(a * n + b)) = acc.real();
        }
    return out;
  }

  template <class Fn>
  void each(Fn fn) {
    for (int j0 = 0; j0 < n; ++j0)
      for (int j1 = 0; j1 < n; ++j1) fn(j0, j1, double(signed_k(j0, n)), double(signed_k(j1, n)), j0 == n / 2 || j1 == n / 2);
  }
};

double rel_diff(const RealField& a, const RealField& b) {
  double d = 0, m = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    d = std::max(d, std::abs(a.data[i] - b.data[i]));
    m = std::max(m, std::abs(b.data[i]));
  }
  return d / m;
}

double direct_lp(const RealField& f, double p) {
  double acc = 0;
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    double m2 = 0;
    for (int q = 0; q < f.components; ++q) m2 += f.at(q, i) * f.at(q, i);
    acc += std::pow(std::sqrt(m2), p);
  }
  return std::pow(acc / double(f.grid.size()), 1.0 / p);
}

Outcome spectral_oracles() {
  const Grid g(2, 8);
  double worst = 0;

  const auto v = random_field(g, 2, 101);
  DirectDft lo(v);
  lo.each([&](int j0, int j1, double k0, double k1, bool nyq) {
    if (nyq) {
      lo.at(0, j0, j1) = lo.at(1, j0, j1) = 0.0;
      return;
    }
    const double k2 = k0 * k0 + k1 * k1;
    if (k2 == 0) return;
    const Complex dot = k0 * lo.at(0, j0, j1) + k1 * lo.at(1, j0, j1);
    lo.at(0, j0, j1) -= dot * k0 / k2;
    lo.at(1, j0, j1) -= dot * k1 / k2;
  });
  worst = std::max(worst, rel_diff(inverse_transform(leray_project(forward_transform(v))), lo.synth()));

  const auto f = random_field(g, 1, 102);
  const auto fh = forward_transform(f);
  for (double gamma : {0.0, 0.75, 1.5}) {
    DirectDft bo(f);
    bo.each([&](int j0, int j1, double k0, double k1, bool) { bo.at(0, j0, j1) *= std::pow(1 + k0 * k0 + k1 * k1, gamma / 2); });
    const auto ref = bo.synth();
    worst = std::max(worst, rel_diff(inverse_transform(bessel_filter(fh, gamma)), ref));
    for (double p : {2.0, 4.0}) {
      const double want = direct_lp(ref, p);
      worst = std::max(worst, std::abs(bessel_norm(fh, gamma, p) - want) / want);
    }
  }
  for (double t : {1e-4, 1e-2, 0.1}) {
    DirectDft ho(f);
    ho.each([&](int j0, int j1, double k0, double k1, bool) { ho.at(0, j0, j1) *= std::exp(-4 * kPi * kPi * (k0 * k0 + k1 * k1) * t); });
    worst = std::max(worst, rel_diff(inverse_transform(heat_propagate(fh, t)), ho.synth()));
  }
  return {worst <= 1e-12, "max relative deviation " + num(worst) + " (limit 1e-12)"};
}

// ---- 2: heat estimate ratios ------------------------------------------------

// Sup over grid wavenumbers of the ratio for a single cosine mode.
double single_mode_bound(const Grid& g, double gamma, int n, double p, double r, const std::vector<double>& ts) {
  const double e = (gamma + n + g.dim * (1 / r - 1 / p)) / 2;
  auto cos_norm = [](double q) { return std::pow(std::tgamma((q + 1) / 2) / (std::sqrt(kPi) * std::tgamma(q / 2 + 1)), 1 / q); };
  const double shape = cos_norm(p) / cos_norm(r);
  double best = 0;
  for (const auto& w : wavevectors(g)) {
    const double kappa = std::sqrt(w.norm2);
    if (w.nyquist || (n > 0 && kappa == 0)) continue;
    const double c = kappa == 0 ? 1.0 : shape;
    for (double t : ts)
      best = std::max(best, c * std::pow(1 + w.norm2, gamma / 2) * std::pow(2 * kPi * kappa, n) *
                                std::exp(-4 * kPi * kPi * w.norm2 * t) * std::pow(t, e));
  }
  return best;
}

Outcome heat_estimate() {
  const Grid g(2, 32);
  std::vector<double> ts;
  for (int j = 0; j <= 40; ++j) ts.push_back(std::pow(10.0, -4.0 + 0.1 * j));
  double worst = 0, lowest = INFINITY;
  bool finite = true;
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto f = random_field(g, 1, 200 + seed);
    for (double gamma : {0.0, 0.75})
      for (int n : {0, 1})
        for (auto [p, r] : {std::pair{2.0, 2.0}, std::pair{4.0, 2.0}}) {
          const double bound = single_mode_bound(g, gamma, n, p, r, ts);
          for (double t : ts) {
            const double ratio = heat_estimate_check(f, gamma, n, p, r, t);
            finite = finite && std::isfinite(ratio) && ratio > 0;
            worst = std::max(worst, ratio / bound);
            lowest = std::min(lowest, ratio);
          }
        }
  }
  return {finite && worst <= 10, "max ratio / single-mode bound " + num(worst) + " (limit 10), min ratio " + num(lowest)};
}

// ---- 3: mollification rate ---------------------------------------------------

Outcome mollification_rate() {
  // rough in x (coefficients k^-3/2, just below H^1), Gaussian in v
  const PhaseGrid g(1, {512, 1, 1}, {2048, 1, 1}, 5.5);
  PhaseSpaceDensity F(g);
  std::vector<double> a(512, 1.0);
  for (int i = 0; i < 512; ++i)
    for (int k = 1; k < 256; ++k) a[i] += 0.5 * std::pow(k, -1.5) * std::cos(2 * kPi * k * i / 512.0);
  for (std::size_t iv = 0; iv < g.v_size(); ++iv) {
    const double v = g.velocity(iv)[0];
    for (int i = 0; i < 512; ++i) F.slice(iv)[i] = a[i] * std::exp(-0.5 * v * v);
  }
  std::vector<std::pair<double, double>> pts;
  for (int e = 6; e <= 12; ++e) {
    const long N = 1L << e;
    const auto fam = MollifierFamily::build_unchecked(0.5, 0.5, N, 1);
    pts.emplace_back(double(N), weighted_l2_distance(F, mollify_density(F, fam), 0));
  }
  const auto fit = rate_fit(pts);
  std::ostringstream os;
  os << "slope " << num(fit.slope) << " (target -0.5 +- 0.1), errors";
  for (auto& p : pts) os << " " << num(p.second);
  return {std::abs(fit.slope + 0.5) <= 0.1, os.str()};
}

// ---- 4: kinetic solver physics ---------------------------------------------

Outcome vfp_physics() {
  std::ostringstream os;
  bool ok = true;

  // (a) sampled Maxwellian at rest
  {
    const double sigma = 0.5;
    const PhaseGrid g(2, {8, 8, 1}, {64, 64, 1}, 3.0);
    PhaseSpaceDensity F0(g);
    for (std::size_t iv = 0; iv < g.v_size(); ++iv) {
      const auto v = g.velocity(iv);
      std::fill_n(F0.slice(iv), g.x_size(), std::exp(-(v[0] * v[0] + v[1] * v[1]) / (sigma * sigma)));
    }
    const double m = F0.mass();
    for (auto& x : F0.values) x /= m;
    SpectralField u(g.x_grid(), 2);
    auto F = F0;
    for (int i = 0; i < 100; ++i) F = vfp_step(F, u, sigma, 0.01, DragMode::Plain, Cutoff(4.0));
    const double drift = l1_distance(F, F0), dm = std::abs(F.mass() - 1);
    ok = ok && drift <= 1e-4 && dm <= 1e-10;
    os << "(a) L1 drift " << num(drift) << ", mass " << num(dm) << "; ";
  }

  // (b, c) coupled limit runs in the shear scenario
  ExperimentConfig c;
  c.fluid_resolution = c.phase_x_resolution = {32, 32, 1};
  const double k = 3, T = c.T;
  for (double sigma : {0.0, 0.3, 0.7}) {
    c.sigma = sigma;
    LimitState s{FluidState{initial_fluid(c)}, initial_density(c)};
    const double m0 = s.F.mass(), w0 = std::pow(weighted_l2_norm(s.F, k), 2);
    double w_sup = w0, u_sup = 0, dm = 0;
    for (int i = 0; i < c.steps(); ++i) {
      const auto U = inverse_transform(s.fluid.u);
      for (std::size_t q = 0; q < U.grid.size(); ++q) u_sup = std::max(u_sup, std::hypot(U.at(0, q), U.at(1, q)));
      limit_coupled_step(s, sigma, c.dt, DragMode::Plain, Cutoff(c.A));
      w_sup = std::max(w_sup, std::pow(weighted_l2_norm(s.F, k), 2));
      dm = std::max(dm, std::abs(s.F.mass() - m0));
    }
    const double bound = std::exp(T * (1 + 2 * k * u_sup + 2 * k * k * sigma * sigma)) * w0;
    ok = ok && dm <= 1e-10 && w_sup <= bound;
    os << "sigma=" << sigma << ": mass " << num(dm) << ", sup|<v>^3F|^2 / bound " << num(w_sup / bound) << "; ";
  }
  return {ok, os.str()};
}

// ---- 5: energy of the particle system without noise ---------------------------

Outcome energy_decay() {
  const Grid g(2, 64);
  const long N = 1000;
  const double dt = 0.01;
  auto ens = init_sample(2, N, 7, InitialLaw{}, 0.0);
  FluidState fluid{shear_flow(g, 0.5)};
  fluid.forcing_mode = ForcingMode::Particles;
  const auto fam = MollifierFamily::build(0.1, 0.095, N, 2);
  const Cutoff chi(4.0);  // sup|u| = 0.5 initially and the energy only decays
  auto energy = [&] { return fluid_energy(fluid.u) + kinetic_energy(ens); };
  const double E0 = energy();
  double E = E0, worst = -INFINITY;
  for (int i = 0; i < 50; ++i) {
    coupled_step(fluid, ens, fam, chi, dt);
    const double En = energy();
    worst = std::max(worst, (En - E) / (dt * dt * E0));
    E = En;
  }
  return {worst <= 5, "max step increase / (dt^2 E0) " + num(worst) + " (limit 5), E(T)/E(0) " + num(E / E0)};
}

// ---- 6-9: convergence study ------------------------------------------------

struct Means {
  std::vector<double> N;
  std::map<std::string, std::vector<double>> m;
};

Means seed_means(const std::vector<ErrorRecord>& recs) {
  std::map<long, std::vector<const ErrorRecord*>> by_n;
  for (const auto& r : recs) by_n[r.N].push_back(&r);
  Means out;
  for (auto& [n, rs] : by_n) {
    out.N.push_back(double(n));
    auto mean = [&](double ErrorRecord::*f) {
      double s = 0;
      for (auto* r : rs) s += r->*f;
      return s / double(rs.size());
    };
    out.m["bessel"].push_back(mean(&ErrorRecord::bessel_err));
    out.m["weighted"].push_back(mean(&ErrorRecord::weighted_err));
    out.m["energy"].push_back(mean(&ErrorRecord::energy_err));
    out.m["dissipation"].push_back(mean(&ErrorRecord::dissipation_err));
    out.m["chaos"].push_back(mean(&ErrorRecord::chaos_err));
    out.m["surrogate"].push_back(mean(&ErrorRecord::surrogate));
  }
  return out;
}

std::string series(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + num(x);
  return s;
}

Outcome study_direction(const Means& M) {
  bool ok = true;
  std::ostringstream os;
  for (const char* key : {"weighted", "bessel"}) {
    const auto& y = M.m.at(key);
    bool strict = true;
    for (std::size_t i = 1; i < y.size(); ++i) strict = strict && y[i] < y[i - 1];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < y.size(); ++i) pts.emplace_back(M.N[i], y[i]);
    const double rho = spearman(M.N, y), slope = rate_fit(pts).slope;
    ok = ok && strict && rho == -1 && slope <= -0.1;
    os << key << ": spearman " << num(rho) << " slope " << num(slope) << " [" << series(y) << "]; ";
  }
  return {ok, os.str()};
}

Outcome study_energy(const Means& M) {
  bool ok = true;
  std::ostringstream os;
  for (const char* key : {"energy", "dissipation"}) {
    const double rho = spearman(M.N, M.m.at(key));
    ok = ok && rho <= -0.8;
    os << key << ": spearman " << num(rho) << " [" << series(M.m.at(key)) << "]; ";
  }
  return {ok, os.str()};
}

Outcome study_chaos(const Means& M) {
  const auto& ch = M.m.at("chaos");
  const auto& sur = M.m.at("surrogate");
  const double rho = spearman(M.N, ch);
  const double kappa = ch[0] / sur[0];
  double worst = 0;
  for (std::size_t i = 0; i < ch.size(); ++i) worst = std::max(worst, ch[i] / (kappa * sur[i]));
  return {rho <= -0.8 && worst <= 3, "spearman " + num(rho) + ", max chaos / (kappa surrogate) " + num(worst) + " (limit 3) [" +
                                         series(ch) + "]"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string out_dir = (fs::temp_directory_path() / "vnslab_acceptance").string();
  std::vector<int> only;
  int workers = 1;
  app.add_option("--out", out_dir, "scratch directory for the study runs");
  app.add_option("--only", only, "criteria to run (default: all)")->delimiter(',');
  app.add_option("--workers", workers, "worker threads for the first study run");
  CLI11_PARSE(app, argc, argv);
  const std::set<int> selected = only.empty() ? std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9} : std::set<int>(only.begin(), only.end());

  bool all = true;
  auto report = [&](int id, const char* name, double limit_s, const std::function<Outcome()>& fn) {
    if (!selected.count(id)) return;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    if (limit_s > 0 && secs > limit_s) {
      o.pass = false;
      o.detail += " (runtime over " + num(limit_s) + " s)";
    }
    while (!o.detail.empty() && (o.detail.back() == ' ' || o.detail.back() == ';')) o.detail.pop_back();
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " " << name << ": " << o.detail << " [" << num(secs) << " s]"
              << std::endl;
  };

  report(1, "spectral oracles", 5, spectral_oracles);
  report(2, "heat estimate", 30, heat_estimate);
  report(3, "mollification rate", 120, mollification_rate);
  report(4, "kinetic solver physics", 300, vfp_physics);
  report(5, "coupled energy decay", 120, energy_decay);

  if (selected.count(6) || selected.count(7) || selected.count(8) || selected.count(9)) {
    ExperimentConfig c;  // defaults are the acceptance scenario
    const auto t0 = std::chrono::steady_clock::now();
    StudyResult first;
    std::string study_error;
    try {
      first = convergence_study(c, RunOptions{workers, 0, out_dir + "/study_a", {}});
    } catch (const std::exception& e) {
      study_error = e.what();
    }
    const double study_s = seconds_since(t0);
    std::cout << "study: " << first.records.size() << " cells, " << first.failures.size() << " failures, " << num(study_s) << " s"
              << std::endl;
    auto with_study = [&](const std::function<Outcome(const Means&)>& fn) {
      return [&, fn] {
        if (!study_error.empty()) return Outcome{false, "study failed: " + study_error};
        if (!first.failures.empty()) return Outcome{false, "failed cells: " + first.failures.front()};
        return fn(seed_means(first.records));
      };
    };
    report(6, "convergence direction", 0, with_study(study_direction));
    report(7, "energy-norm direction", 0, with_study(study_energy));
    report(8, "propagation of chaos", 0, with_study(study_chaos));
    report(9, "determinism across worker counts", 0, [&] {
      if (!study_error.empty()) return Outcome{false, "study failed: " + study_error};
      const int other = workers == 1 ? 2 : 1;
      const auto second = convergence_study(c, RunOptions{other, 0, out_dir + "/study_b", {}});
      bool same = true;
      std::string differ;
      for (const char* f : {"errors.csv", "summary.csv", "rates.csv", "chaos.csv"}) {
        const bool eq = read_text(out_dir + "/study_a/" + f) == read_text(out_dir + "/study_b/" + f);
        same = same && eq;
        if (!eq) differ += std::string(" ") + f;
      }
      return Outcome{same, "workers " + std::to_string(workers) + " vs " + std::to_string(other) +
                               (same ? ": study CSVs identical" : ": differ in" + differ)};
    });
  }
  return all ? 0 : 1;
}
