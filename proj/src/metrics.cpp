#include "vnslab/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "vnslab/errors.hpp"
#include "vnslab/fluid.hpp"

namespace vnslab {

namespace {

void require_aligned(const std::vector<double>& a, const std::vector<double>& b, std::size_t na, std::size_t nb) {
  if (a.size() != na || b.size() != nb) throw MetricError("series: time and value counts differ");
  if (a.size() != b.size()) throw MetricError("misaligned snapshots: different counts");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-9 * std::max(1.0, std::abs(a[i])))
      throw MetricError("misaligned snapshots at index " + std::to_string(i));
}

void require_same_times(const std::vector<PhaseSpaceDensity>& F, const std::vector<PhaseSpaceDensity>& G) {
  if (F.size() != G.size()) throw MetricError("misaligned snapshots: different counts");
  for (std::size_t i = 0; i < F.size(); ++i) {
    if (std::abs(F[i].t - G[i].t) > 1e-9 * std::max(1.0, std::abs(F[i].t)))
      throw MetricError("misaligned snapshots at index " + std::to_string(i));
    if (!(F[i].grid == G[i].grid)) throw MetricError("densities live on different phase grids");
  }
}

}  // namespace

double bessel_error(const SpectralField& u1, const SpectralField& u2, double gamma, double p) {
  if (!(u1.grid() == u2.grid()) || u1.components() != u2.components()) throw MetricError("fields on different grids");
  return bessel_norm(u1 - u2, gamma, p);
}

double sup_bessel_error(const FluidSeries& a, const FluidSeries& b, double gamma, double p) {
  require_aligned(a.t, b.t, a.u.size(), b.u.size());
  double m = 0;
  for (std::size_t i = 0; i < a.u.size(); ++i) m = std::max(m, bessel_error(a.u[i], b.u[i], gamma, p));
  return m;
}

double sup_energy_error(const FluidSeries& a, const FluidSeries& b) {
  require_aligned(a.t, b.t, a.u.size(), b.u.size());
  double m = 0;
  for (std::size_t i = 0; i < a.u.size(); ++i) m = std::max(m, parseval_bessel_norm(a.u[i] - b.u[i], 0.0));
  return m;
}

double dissipation_error(const FluidSeries& a, const FluidSeries& b) {
  require_aligned(a.t, b.t, a.u.size(), b.u.size());
  double acc = 0;
  double prev = 0;
  for (std::size_t i = 0; i < a.u.size(); ++i) {
    const double e = fluid_enstrophy(a.u[i] - b.u[i]);
    if (i > 0) acc += 0.5 * (a.t[i] - a.t[i - 1]) * (e + prev);
    prev = e;
  }
  return acc;
}

double sup_weighted_error(const std::vector<PhaseSpaceDensity>& F, const std::vector<PhaseSpaceDensity>& G, double k) {
  require_same_times(F, G);
  double m = 0;
  for (std::size_t i = 0; i < F.size(); ++i) m = std::max(m, weighted_l2_distance(F[i], G[i], k));
  return m;
}

double rho_N(const FluidSeries& u_aux, const std::vector<PhaseSpaceDensity>& F_aux, const FluidSeries& u_limit,
             const std::vector<PhaseSpaceDensity>& F_limit, const MollifierFamily& fam, double gamma, double p,
             double k) {
  const double fluid = sup_bessel_error(u_aux, u_limit, gamma, p);
  require_same_times(F_aux, F_limit);
  double kin = 0;
  for (std::size_t i = 0; i < F_aux.size(); ++i)
    kin = std::max(kin, weighted_l2_distance(mollify_density(F_aux[i], fam), F_limit[i], k));
  return std::sqrt(fluid * fluid + kin * kin);
}

double rho_tilde_N(const std::vector<PhaseSpaceDensity>& F_aux, const MollifierFamily& fam, double k) {
  double m = 0;
  for (const auto& F : F_aux) m = std::max(m, weighted_l2_distance(mollify_density(F, fam), F, k));
  return m;
}

double phase_distance(const Vec3& X1, const Vec3& V1, const Vec3& X2, const Vec3& V2, int d) {
  double s = 0;
  for (int a = 0; a < d; ++a) {
    double dx = X1[a] - X2[a];
    dx -= std::nearbyint(dx);
    const double dv = V1[a] - V2[a];
    s += dx * dx + dv * dv;
  }
  return std::sqrt(s);
}

double chaos_error(const ParticleSeries& coupled, const ParticleSeries& limit) {
  require_aligned(coupled.t, limit.t, coupled.snaps.size(), limit.snaps.size());
  double m = 0;
  for (std::size_t s = 0; s < coupled.snaps.size(); ++s) {
    const auto& a = coupled.snaps[s];
    const auto& b = limit.snaps[s];
    if (a.seed != b.seed) throw MetricError("noise streams differ: seeds " + std::to_string(a.seed) + " vs " + std::to_string(b.seed));
    if (a.step != b.step) throw MetricError("noise streams differ: step counters out of sync");
    if (a.N() != b.N() || a.dim != b.dim) throw MetricError("particle counts differ");
    for (std::size_t i = 0; i < a.X.size(); ++i) m = std::max(m, phase_distance(a.X[i], a.V[i], b.X[i], b.V[i], a.dim));
  }
  return m;
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw MetricError("rate fit needs at least 2 points");
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [N, e] : points) {
    if (!(N > 0) || !(e > 0) || !std::isfinite(e)) throw MetricError("rate fit needs positive finite errors");
    sx += std::log(N);
    sy += std::log(e);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [N, e] : points) {
    const double x = std::log(N) - mx, y = std::log(e) - my;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  if (sxx == 0) throw MetricError("rate fit needs at least 2 distinct N");
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

std::pair<double, double> bootstrap_slope_interval(const std::vector<std::pair<double, double>>& points,
                                                   int resamples, std::uint64_t seed, double level) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  std::vector<double> slopes;
  std::vector<std::pair<double, double>> sample(points.size());
  for (int r = 0; r < resamples; ++r) {
    for (auto& s : sample) s = points[pick(gen)];
    const bool distinct = std::any_of(sample.begin(), sample.end(), [&](const auto& q) { return q.first != sample[0].first; });
    if (!distinct) continue;
    slopes.push_back(rate_fit(sample).slope);
  }
  if (slopes.empty()) throw MetricError("bootstrap produced no usable resample");
  std::sort(slopes.begin(), slopes.end());
  const double tail = 0.5 * (1 - level);
  auto at = [&](double q) {
    const auto i = static_cast<std::size_t>(std::clamp(q * (slopes.size() - 1), 0.0, double(slopes.size() - 1)));
    return slopes[i];
  };
  return {at(tail), at(1 - tail)};
}

namespace {

std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * (double(i) + double(j)) + 1;
    for (std::size_t q = i; q <= j; ++q) r[idx[q]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw MetricError("spearman needs two equal-length samples");
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string error_record_header() {
  return "N,seed,bessel_err,weighted_err,energy_err,dissipation_err,chaos_err,rho_N,rho_tilde_N,sigma_N,surrogate";
}

std::string error_record_row(const ErrorRecord& r) {
  std::string s = std::to_string(r.N) + "," + std::to_string(r.seed);
  for (double v : {r.bessel_err, r.weighted_err, r.energy_err, r.dissipation_err, r.chaos_err, r.rho_N, r.rho_tilde_N,
                   r.sigma_N, r.surrogate})
    s += "," + format_double(v);
  return s;
}

std::vector<ErrorRecord> parse_error_records(const std::string& csv) {
  std::istringstream is(csv);
  std::string line;
  std::vector<ErrorRecord> out;
  if (!std::getline(is, line) || line != error_record_header()) throw MetricError("error table: unexpected header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 11) throw MetricError("error table: bad row '" + line + "'");
    ErrorRecord r;
    r.N = std::stol(f[0]);
    r.seed = std::stoull(f[1]);
    double* dst[] = {&r.bessel_err, &r.weighted_err, &r.energy_err, &r.dissipation_err, &r.chaos_err,
                     &r.rho_N, &r.rho_tilde_N, &r.sigma_N, &r.surrogate};
    for (int i = 0; i < 9; ++i) *dst[i] = std::strtod(f[i + 2].c_str(), nullptr);
    out.push_back(r);
  }
  return out;
}

}  // namespace vnslab
