#include "vnslab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "vnslab/errors.hpp"
#include "vnslab/particles.hpp"
#include "vnslab/phase_density.hpp"

namespace vnslab {

using nlohmann::json;

int ExperimentConfig::steps() const { return static_cast<int>(std::lround(T / dt)); }

double ExperimentConfig::sigma_N(long N) const { return sigma_rule == "equal" ? sigma : sigma_schedule(sigma, N); }

namespace {

const std::set<std::string> kKeys = {
    "d", "T", "dt", "fluid_resolution", "phase_x_resolution", "phase_v_resolution", "v_max", "N_schedule", "seeds",
    "sigma", "sigma_rule", "alpha", "beta", "x_kernel", "A", "gamma", "p", "k", "initial_fluid",
    "initial_density", "snapshot_every", "output_dir", "interpolation"};

template <class T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

std::array<int, 3> resolution(const json& j, const char* key, int d, std::array<int, 3> fallback) {
  std::array<int, 3> r{1, 1, 1};
  if (!j.contains(key)) {
    for (int a = 0; a < d; ++a) r[a] = fallback[a];
    return r;
  }
  const auto& v = j.at(key);
  if (v.is_number_integer()) {
    for (int a = 0; a < d; ++a) r[a] = v.get<int>();
    return r;
  }
  if (!v.is_array() || static_cast<int>(v.size()) != d)
    throw ConfigError(std::string("config key '") + key + "': expected an integer or a list of d integers");
  for (int a = 0; a < d; ++a) r[a] = v[a].get<int>();
  return r;
}

json res_json(const std::array<int, 3>& r, int d) {
  json a = json::array();
  for (int i = 0; i < d; ++i) a.push_back(r[i]);
  return a;
}

InterpScheme parse_interp(const std::string& s) {
  if (s == "spline4") return InterpScheme::Spline4;
  if (s == "exact-fourier") return InterpScheme::ExactFourier;
  throw ConfigError("interpolation must be 'spline4' or 'exact-fourier', got '" + s + "'");
}

std::string interp_name(InterpScheme s) { return s == InterpScheme::Spline4 ? "spline4" : "exact-fourier"; }

std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!kKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
  ExperimentConfig c;
  c.d = get(j, "d", c.d);
  if (c.d < 1 || c.d > 3) throw ConfigError("d must be 1, 2 or 3");
  c.T = get(j, "T", c.T);
  c.dt = get(j, "dt", c.dt);
  c.fluid_resolution = resolution(j, "fluid_resolution", c.d, c.fluid_resolution);
  c.phase_x_resolution = resolution(j, "phase_x_resolution", c.d, j.contains("fluid_resolution") ? c.fluid_resolution : c.phase_x_resolution);
  c.phase_v_resolution = resolution(j, "phase_v_resolution", c.d, c.phase_v_resolution);
  c.v_max = get(j, "v_max", c.v_max);
  c.N_schedule = get(j, "N_schedule", c.N_schedule);
  c.seeds = get(j, "seeds", c.seeds);
  c.sigma = get(j, "sigma", c.sigma);
  c.sigma_rule = get(j, "sigma_rule", c.sigma_rule);
  if (c.sigma_rule != "log" && c.sigma_rule != "equal") throw ConfigError("sigma_rule must be 'log' or 'equal'");
  c.alpha = get(j, "alpha", c.alpha);
  c.beta = get(j, "beta", c.beta);
  try {
    c.x_kernel = parse_x_kernel(get<std::string>(j, "x_kernel", to_string(c.x_kernel)));
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  c.A = get(j, "A", c.A);
  c.gamma = get(j, "gamma", c.gamma);
  c.p = get(j, "p", c.p);
  c.k = get(j, "k", c.k);
  if (j.contains("initial_fluid")) {
    const auto& f = j.at("initial_fluid");
    for (const auto& [key, _] : f.items())
      if (key != "kind" && key != "amplitude" && key != "path") throw ConfigError("unknown initial_fluid key '" + key + "'");
    c.initial_fluid.kind = get(f, "kind", c.initial_fluid.kind);
    c.initial_fluid.amplitude = get(f, "amplitude", c.initial_fluid.amplitude);
    c.initial_fluid.path = get(f, "path", c.initial_fluid.path);
    const auto& k = c.initial_fluid.kind;
    if (k != "shear" && k != "zero" && k != "snapshot") throw ConfigError("initial_fluid.kind must be shear, zero or snapshot");
    if (k == "snapshot" && c.initial_fluid.path.empty()) throw ConfigError("initial_fluid.kind = snapshot needs a path");
  }
  if (j.contains("initial_density")) {
    const auto& f = j.at("initial_density");
    for (const auto& [key, _] : f.items())
      if (key != "kind" && key != "mean" && key != "std") throw ConfigError("unknown initial_density key '" + key + "'");
    c.initial_density.kind = get(f, "kind", c.initial_density.kind);
    if (f.contains("mean")) {
      const auto m = f.at("mean").get<std::vector<double>>();
      if (static_cast<int>(m.size()) != c.d) throw ConfigError("initial_density.mean needs d entries");
      for (int a = 0; a < c.d; ++a) c.initial_density.mean[a] = m[a];
    }
    c.initial_density.std = get(f, "std", c.initial_density.std);
    const auto& k = c.initial_density.kind;
    if (k != "uniform-maxwellian" && k != "zero") throw ConfigError("initial_density.kind must be uniform-maxwellian or zero");
  }
  c.snapshot_every = get(j, "snapshot_every", c.snapshot_every);
  c.output_dir = get(j, "output_dir", c.output_dir);
  c.interpolation = parse_interp(get<std::string>(j, "interpolation", interp_name(c.interpolation)));
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["d"] = c.d;
  j["T"] = c.T;
  j["dt"] = c.dt;
  j["fluid_resolution"] = res_json(c.fluid_resolution, c.d);
  j["phase_x_resolution"] = res_json(c.phase_x_resolution, c.d);
  j["phase_v_resolution"] = res_json(c.phase_v_resolution, c.d);
  j["v_max"] = c.v_max;
  j["N_schedule"] = c.N_schedule;
  j["seeds"] = c.seeds;
  j["sigma"] = c.sigma;
  j["sigma_rule"] = c.sigma_rule;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["x_kernel"] = to_string(c.x_kernel);
  j["A"] = c.A;
  j["gamma"] = c.gamma;
  j["p"] = c.p;
  j["k"] = c.k;
  j["initial_fluid"] = {{"kind", c.initial_fluid.kind}, {"amplitude", c.initial_fluid.amplitude}};
  if (!c.initial_fluid.path.empty()) j["initial_fluid"]["path"] = c.initial_fluid.path;
  std::vector<double> mean(c.initial_density.mean.begin(), c.initial_density.mean.begin() + c.d);
  j["initial_density"] = {{"kind", c.initial_density.kind}, {"mean", mean}, {"std", c.initial_density.std}};
  j["snapshot_every"] = c.snapshot_every;
  j["output_dir"] = c.output_dir;
  j["interpolation"] = interp_name(c.interpolation);
  return j;
}

std::string canonical_config(const ExperimentConfig& c) {
  auto j = config_to_json(c);
  // where results go does not change them
  j.erase("output_dir");
  return j.dump();
}

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical_config(c)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ConstraintCheck& c) { return c.ok; });
}

std::string ValidationReport::text() const {
  std::string s;
  for (const auto& c : checks) s += std::string(c.ok ? "pass  " : "FAIL  ") + c.name + ": " + c.detail + "\n";
  return s;
}

std::string ValidationReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.ok) return c.name + ": " + c.detail;
  return "";
}

ValidationReport validate(const ExperimentConfig& c) {
  ValidationReport r;
  auto add = [&](std::string name, bool ok, std::string detail) { r.checks.push_back({std::move(name), ok, std::move(detail)}); };
  const int d = c.d;

  add("dimension", d == 2 || d == 3, "d = " + std::to_string(d) + " (2 or 3)");
  add("integrability (p > d)", c.p > d, "p = " + num(c.p) + ", d = " + std::to_string(d));
  add("Bessel smoothness (d/p < gamma < 1)", c.gamma > d / c.p && c.gamma < 1,
      "gamma = " + num(c.gamma) + ", d/p = " + num(d / c.p));
  add("moment order (k >= 3)", c.k >= 3, "k = " + std::to_string(c.k));
  if (d == 3) {
    const double side = c.gamma / 2 + 1.5 * (0.5 - 1 / c.p);
    add("three-dimensional side condition (gamma/2 + (3/2)(1/2 - 1/p) < 1)", side < 1, "value " + num(side));
  }
  const std::string mol = check_mollifier_exponents(c.alpha, c.beta, d);
  add("mollifier exponents (d beta + (d+1) alpha < 1/2, alpha > beta)", mol.empty(),
      mol.empty() ? "alpha = " + num(c.alpha) + ", beta = " + num(c.beta) : mol);
  add("cut-off level (A > 0)", c.A > 0, "A = " + num(c.A));

  {
    bool ok = c.N_schedule.size() >= 3;
    for (std::size_t i = 0; i < c.N_schedule.size(); ++i) {
      if (c.N_schedule[i] < 1) ok = false;
      if (i > 0 && c.N_schedule[i] <= c.N_schedule[i - 1]) ok = false;
    }
    add("N schedule (>= 3 distinct values, ascending)", ok, std::to_string(c.N_schedule.size()) + " values");
  }
  {
    std::set<std::uint64_t> s(c.seeds.begin(), c.seeds.end());
    add("seeds (non-empty, distinct)", !c.seeds.empty() && s.size() == c.seeds.size(), std::to_string(c.seeds.size()) + " seeds");
  }
  {
    const bool pos = c.T > 0 && c.dt > 0;
    const bool whole = pos && std::abs(c.T / c.dt - std::lround(c.T / c.dt)) < 1e-9 * (c.T / c.dt);
    const bool snaps = c.snapshot_every >= 1 && whole && c.steps() % c.snapshot_every == 0;
    add("time grid (T/dt whole, snapshots hit T)", pos && whole && snaps,
        "T = " + num(c.T) + ", dt = " + num(c.dt) + ", snapshot_every = " + std::to_string(c.snapshot_every));
  }
  add("noise level (sigma >= 0)", c.sigma >= 0, "sigma = " + num(c.sigma));

  bool grids = true;
  for (int a = 0; a < 3; ++a) {
    const bool active = a < d;
    for (const auto& res : {c.fluid_resolution, c.phase_x_resolution, c.phase_v_resolution})
      if (active ? res[a] < 2 : res[a] != 1) grids = false;
  }
  grids = grids && c.fluid_resolution == c.phase_x_resolution && c.v_max > 0;
  add("grids (phase x grid equals fluid grid)", grids, "fluid and phase x resolutions must agree, v_max > 0");

  if (grids && mol.empty() && !c.N_schedule.empty()) {
    std::string why;
    try {
      const PhaseGrid pg(d, c.phase_x_resolution, c.phase_v_resolution, c.v_max);
      for (long N : c.N_schedule) {
        if (N < 1) continue;
        require_resolved(pg, MollifierFamily::build(c.alpha, c.beta, N, d, c.x_kernel));
      }
    } catch (const ConfigError& e) {
      why = e.what();
    }
    add("kernel resolution", why.empty(), why.empty() ? "every N in the schedule is resolved" : why);
  }
  {
    double reach = 0;
    for (int a = 0; a < d; ++a) reach = std::max(reach, std::abs(c.initial_density.mean[a]));
    double noise = c.sigma;
    for (long N : c.N_schedule)
      if (N > 1) noise = std::max(noise, c.sigma_N(N));
    // stationary spread of the velocity equation is sigma / sqrt(2)
    reach += 6 * std::max(c.initial_density.std, noise / std::sqrt(2.0));
    add("velocity box (v_max covers 6 standard deviations)", c.v_max >= reach,
        "v_max = " + num(c.v_max) + ", needed " + num(reach));
  }
  return r;
}

void require_valid(const ExperimentConfig& c) {
  const auto r = validate(c);
  if (!r.ok()) throw ConfigError("config rejected: " + r.first_failure());
}

}  // namespace vnslab
