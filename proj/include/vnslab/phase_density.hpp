#pragma once

// Gridded densities on T^d x [-V_max, V_max]^d.
//
// x cells sit at x_j = j / n (same nodes as the fluid grid); v cells are
// cell-centred, v_j = -V_max + (j + 1/2) h with h = 2 V_max / n_v.
// Storage is v-major: values[v_index * x_size + x_index], so every velocity
// slice is one contiguous x field (handy for batched transforms).

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "vnslab/mollifier.hpp"
#include "vnslab/spectral.hpp"

namespace vnslab {

struct PhaseGrid {
  int dim = 2;
  std::array<int, 3> nx{1, 1, 1};
  std::array<int, 3> nv{1, 1, 1};
  double vmax = 1.0;

  PhaseGrid() = default;
  PhaseGrid(int d, std::array<int, 3> x_res, std::array<int, 3> v_res, double v_max);

  Grid x_grid() const { return Grid(dim, nx); }
  std::size_t x_size() const;
  std::size_t v_size() const;
  std::size_t size() const { return x_size() * v_size(); }
  double h(int axis) const { return 2.0 * vmax / nv[axis]; }
  double dx_volume() const { return 1.0 / static_cast<double>(x_size()); }
  double dv_volume() const;
  double v_center(int axis, int j) const { return -vmax + (j + 0.5) * h(axis); }
  /// Velocity of linear v index.
  Vec3 velocity(std::size_t v_index) const;
  std::array<int, 3> v_multi(std::size_t v_index) const;

  bool operator==(const PhaseGrid&) const = default;
};

struct PhaseSpaceDensity {
  PhaseGrid grid;
  double t = 0.0;
  std::vector<double> values;

  PhaseSpaceDensity() = default;
  explicit PhaseSpaceDensity(const PhaseGrid& g) : grid(g), values(g.size(), 0.0) {}

  double* slice(std::size_t v_index) { return values.data() + v_index * grid.x_size(); }
  const double* slice(std::size_t v_index) const { return values.data() + v_index * grid.x_size(); }

  double mass() const;
  double min_value() const;
  double max_value() const;
  /// Mass carried by cells touching the v-box boundary, as a fraction of total mass.
  double boundary_mass_fraction() const;
};

/// Velocity moments on the x grid.
struct VelocityMoments {
  RealField m0;    // int F dv
  RealField flux;  // int v F dv (d components)
};

VelocityMoments velocity_moments(const PhaseSpaceDensity& F);
/// M_k = int int |v|^k F dx dv.
double full_moment(const PhaseSpaceDensity& F, double k);
/// ||<v>^k F||_{L^2_{x,v}}.
double weighted_l2_norm(const PhaseSpaceDensity& F, double k);
/// ||<v>^k (F - G)||_{L^2_{x,v}} on a common grid.
double weighted_l2_distance(const PhaseSpaceDensity& F, const PhaseSpaceDensity& G, double k);
double l1_distance(const PhaseSpaceDensity& F, const PhaseSpaceDensity& G);

/// Uniform-in-x times an isotropic Gaussian in v, sampled at cell centres and
/// normalized to unit discrete mass.
PhaseSpaceDensity uniform_maxwellian(const PhaseGrid& g, const Vec3& mean, double stddev);

/// Phase-space convolution with theta^N: spectral multiplier in x, discrete
/// (normalized) stencil in v. Throws ConfigError if the kernel is under-resolved.
PhaseSpaceDensity mollify_density(const PhaseSpaceDensity& F, const MollifierFamily& fam);

/// Discretely normalized v-stencil of theta^{2,N} on the grid spacing: offsets
/// and weights with sum(weights) * dv_volume == 1.
struct VStencil {
  std::vector<std::array<int, 3>> offsets;
  std::vector<double> weights;
};
VStencil v_stencil(const PhaseGrid& g, const MollifierFamily& fam);

/// Resolution requirements shared by deposition and mollification.
void require_resolved(const PhaseGrid& g, const MollifierFamily& fam);

// ---- snapshot I/O ("KPHD") -----------------------------------------------

void write_phase_snapshot(std::ostream& os, const PhaseSpaceDensity& F);
PhaseSpaceDensity read_phase_snapshot(std::istream& is);
void write_phase_snapshot(const std::string& path, const PhaseSpaceDensity& F);
PhaseSpaceDensity read_phase_snapshot(const std::string& path);

}  // namespace vnslab
