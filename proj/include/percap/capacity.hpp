#pragma once

// Deterministic Bessel-Riesz capacity of finite lattice sets via the
// variational formula: minimize the (1+|x-y|)^{4-d} energy over probability
// measures on the set and invert.

#include <cstdint>
#include <vector>

#include "percap/geometry.hpp"

namespace percap {

// Finitely supported probability measure.
struct Measure {
  std::vector<Point> support;
  std::vector<double> weights;

  void validate() const;  // weights >= 0, sum within 1e-12 of 1, distinct support
};

struct CapacityResult {
  double capacity = 0.0;
  double energy = 0.0;
  Measure minimizer;
  // Multiplicity of each support atom. Empty means all ones; the orbit-
  // reduced ball solver stores one representative per symmetry orbit here,
  // with the weight field carrying the whole orbit's mass (spread uniformly
  // over the orbit's points).
  std::vector<uint64_t> minimizer_multiplicity;
  uint64_t iterations = 0;
  bool converged = false;
};

// Kernel (1 + |x-y|_2)^{4-d}; requires d >= 5 so the kernel decays.
double riesz_kernel(const Point& x, const Point& y, int d);

// Energy double sum of a measure under the kernel.
double energy(const Measure& mu, int d);

struct CapacityOptions {
  double tol = 1e-9;          // relative Frank-Wolfe duality gap
  uint64_t max_iterations = 500000;
  uint64_t dense_limit = 10000;   // materialize the kernel matrix up to this n
  uint64_t point_guard = 100000;  // reject larger sets outright
};

// Energy minimization over the simplex by Frank-Wolfe with away steps and
// exact line search, started at the uniform measure. Deterministic: ties in
// vertex selection break toward the lowest point index.
CapacityResult cap_d4(const std::vector<Point>& A, int d, const CapacityOptions& opts = {});

struct BallCapacityOptions {
  double tol = 1e-9;
  uint64_t max_iterations = 500000;
  uint64_t max_box_points = 10000000;  // enumeration guard
  uint64_t expand_limit = 100000;      // expand the minimizer for boxes up to this size
};

// Capacity of the lattice box B(0,r). The box is collapsed onto its
// signed-permutation symmetry orbits (the kernel is invariant and the energy
// is convex, so a symmetric minimizer is optimal), which keeps the solve
// exact while handling boxes far beyond the dense-set guard.
CapacityResult ball_capacity(int64_t r, int d, const BallCapacityOptions& opts = {});

// Kernel potential sum_y G(x,y) mu(y) of a measure at x. The minimizer's
// potential is constant on its support and no smaller off-support (KKT).
double kernel_potential(const Measure& mu, const Point& x, int d);

}  // namespace percap
