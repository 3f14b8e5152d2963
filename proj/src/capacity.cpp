#include "percap/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace percap {

void Measure::validate() const {
  if (support.size() != weights.size()) throw std::invalid_argument("measure: size mismatch");
  if (support.empty()) throw std::invalid_argument("measure: empty support");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("measure: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("measure: weights do not sum to 1");
  std::vector<Point> sorted = support;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1]) throw std::invalid_argument("measure: duplicate support point");
  }
}

double riesz_kernel(const Point& x, const Point& y, int d) {
  if (d <= 4) throw std::invalid_argument("riesz_kernel: requires d >= 5");
  const double q = 1.0 + std::sqrt(dist2(x, y));
  // (1+|x-y|)^(4-d) with an integer exponent
  double inv = 1.0;
  for (int k = 0; k < d - 4; ++k) inv *= q;
  return 1.0 / inv;
}

double energy(const Measure& mu, int d) {
  mu.validate();
  const size_t n = mu.support.size();
  double e = 0.0;
  for (size_t i = 0; i < n; ++i) {
    e += mu.weights[i] * mu.weights[i];  // diagonal kernel value is 1
    for (size_t j = i + 1; j < n; ++j)
      e += 2.0 * mu.weights[i] * mu.weights[j] * riesz_kernel(mu.support[i], mu.support[j], d);
  }
  return e;
}

double kernel_potential(const Measure& mu, const Point& x, int d) {
  double s = 0.0;
  for (size_t i = 0; i < mu.support.size(); ++i)
    s += mu.weights[i] * riesz_kernel(mu.support[i], x, d);
  return s;
}

namespace {

// Kernel matrix access: dense below the materialization limit, recomputed
// columns above it.
class KernelOp {
 public:
  KernelOp(const std::vector<Point>* pts, int d, uint64_t dense_limit) : pts_(pts), d_(d) {
    n_ = pts->size();
    if (n_ <= dense_limit) {
      dense_.resize(n_ * n_);
      for (size_t i = 0; i < n_; ++i) {
        dense_[i * n_ + i] = 1.0;
        for (size_t j = i + 1; j < n_; ++j) {
          const double g = riesz_kernel((*pts_)[i], (*pts_)[j], d_);
          dense_[i * n_ + j] = g;
          dense_[j * n_ + i] = g;
        }
      }
    }
  }

  // Explicit small matrix (used by the orbit solver).
  KernelOp(std::vector<double> matrix, size_t n) : n_(n), dense_(std::move(matrix)) {}

  size_t size() const { return n_; }

  double entry(size_t i, size_t j) const {
    if (!dense_.empty()) return dense_[i * n_ + j];
    return riesz_kernel((*pts_)[i], (*pts_)[j], d_);
  }

  void column(size_t j, std::vector<double>& out) const {
    out.resize(n_);
    if (!dense_.empty()) {
      for (size_t i = 0; i < n_; ++i) out[i] = dense_[j * n_ + i];
      return;
    }
    for (size_t i = 0; i < n_; ++i) out[i] = riesz_kernel((*pts_)[i], (*pts_)[j], d_);
  }

  void apply(const std::vector<double>& x, std::vector<double>& out) const {
    out.assign(n_, 0.0);
    if (!dense_.empty()) {
      for (size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        const double* row = &dense_[i * n_];
        for (size_t j = 0; j < n_; ++j) s += row[j] * x[j];
        out[i] = s;
      }
      return;
    }
    for (size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (size_t j = 0; j < n_; ++j) s += entry(i, j) * x[j];
      out[i] = s;
    }
  }

 private:
  const std::vector<Point>* pts_ = nullptr;
  int d_ = 0;
  size_t n_ = 0;
  std::vector<double> dense_;
};

struct SimplexSolution {
  std::vector<double> w;
  double energy = 0.0;
  uint64_t iterations = 0;
  bool converged = false;
};

// Frank-Wolfe with away steps on the probability simplex, exact line search
// on the quadratic, uniform start. The away steps restore linear convergence
// when the optimum sits in the simplex interior (plain Frank-Wolfe zigzags
// there and cannot reach a 1e-9 gap in reasonable time). Stops when the
// duality gap drops below tol * energy.
SimplexSolution minimize_energy(const KernelOp& G, double tol, uint64_t max_iter) {
  const size_t n = G.size();
  SimplexSolution sol;
  sol.w.assign(n, 1.0 / double(n));
  if (n == 1) {
    sol.energy = G.entry(0, 0);
    sol.converged = true;
    return sol;
  }

  std::vector<double> g;  // g = G w
  G.apply(sol.w, g);
  std::vector<double> col;
  auto energy_of = [&]() {
    double e = 0.0;
    for (size_t i = 0; i < n; ++i) e += sol.w[i] * g[i];
    return e;
  };

  double E = energy_of();
  for (uint64_t it = 0; it < max_iter; ++it) {
    // Toward vertex: smallest gradient entry; away vertex: largest gradient
    // entry on the support. Ties break to the lowest index.
    size_t s = 0, a = SIZE_MAX;
    double gmin = g[0], gmax = -1.0;
    for (size_t i = 0; i < n; ++i) {
      if (g[i] < gmin) {
        gmin = g[i];
        s = i;
      }
      if (sol.w[i] > 0.0 && g[i] > gmax) {
        gmax = g[i];
        a = i;
      }
    }
    // Stop when both the Frank-Wolfe gap and the away (support) gap are
    // small: the first certifies global optimality, the second makes the
    // kernel potential constant across the support (KKT).
    const double fw_gap = 2.0 * (E - gmin);
    const double away_gap = a == SIZE_MAX ? 0.0 : 2.0 * (gmax - E);
    if (fw_gap <= tol * E && away_gap <= tol * E) {
      sol.iterations = it;
      sol.converged = true;
      sol.energy = E;
      return sol;
    }

    const double fw_score = E - gmin;        // <-grad, e_s - w> / 2
    const double away_score = gmax - E;      // <-grad, w - e_a> / 2
    if (fw_score >= away_score || a == SIZE_MAX) {
      // Frank-Wolfe step toward e_s.
      G.column(s, col);
      const double curv = E - 2.0 * g[s] + col[s];
      double gamma = curv > 0.0 ? (E - g[s]) / curv : 1.0;
      gamma = std::clamp(gamma, 0.0, 1.0);
      if (gamma <= 0.0) {
        sol.iterations = it;
        sol.energy = E;
        return sol;  // no descent available: numerically stationary
      }
      for (size_t i = 0; i < n; ++i) {
        sol.w[i] *= (1.0 - gamma);
        g[i] = (1.0 - gamma) * g[i] + gamma * col[i];
      }
      sol.w[s] += gamma;
    } else {
      // Away step from e_a.
      G.column(a, col);
      const double curv = E - 2.0 * g[a] + col[a];
      const double gamma_max = sol.w[a] / (1.0 - sol.w[a]);
      double gamma = curv > 0.0 ? (g[a] - E) / curv : gamma_max;
      gamma = std::clamp(gamma, 0.0, gamma_max);
      if (gamma <= 0.0) {
        sol.iterations = it;
        sol.energy = E;
        return sol;
      }
      for (size_t i = 0; i < n; ++i) {
        sol.w[i] *= (1.0 + gamma);
        g[i] = (1.0 + gamma) * g[i] - gamma * col[i];
      }
      sol.w[a] = std::max(sol.w[a] - gamma, 0.0);  // gamma == gamma_max drops the atom
    }
    E = energy_of();
    // Periodic renormalization guards against slow drift of the weight sum.
    if ((it & 1023) == 1023) {
      double sum = 0.0;
      for (double v : sol.w) sum += v;
      const double inv = 1.0 / sum;
      if (std::abs(sum - 1.0) > 1e-13) {
        for (double& v : sol.w) v *= inv;
        G.apply(sol.w, g);
        E = energy_of();
      }
    }
  }
  sol.iterations = max_iter;
  sol.energy = E;
  sol.converged = false;
  return sol;
}

// Exact final renormalization (sum drifts by a few ulps over many steps).
void renormalize(SimplexSolution& sol) {
  double sum = 0.0;
  for (double v : sol.w) sum += v;
  if (sum > 0.0 && sum != 1.0) {
    for (double& v : sol.w) v /= sum;
  }
}

}  // namespace

CapacityResult cap_d4(const std::vector<Point>& A, int d, const CapacityOptions& opts) {
  if (d <= 4) throw std::invalid_argument("cap_d4: requires d >= 5");
  if (A.empty()) throw std::invalid_argument("cap_d4: empty set");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("cap_d4: tol must be positive");
  if (A.size() > opts.point_guard) throw std::invalid_argument("cap_d4: set exceeds point guard");
  std::vector<Point> pts = A;
  for (const Point& p : pts) check_point(p, d);
  std::sort(pts.begin(), pts.end());
  for (size_t i = 1; i < pts.size(); ++i) {
    if (pts[i] == pts[i - 1]) throw std::invalid_argument("cap_d4: duplicate points in set");
  }

  KernelOp G(&pts, d, opts.dense_limit);
  SimplexSolution sol = minimize_energy(G, opts.tol, opts.max_iterations);
  renormalize(sol);

  CapacityResult res;
  res.minimizer.support = std::move(pts);
  res.minimizer.weights = std::move(sol.w);
  res.iterations = sol.iterations;
  res.converged = sol.converged;
  // Recompute the energy from scratch so the reported value is the exact
  // quadratic form of the returned measure (the iteration keeps g = Gw
  // incrementally). Above the dense limit a full recompute is quadratic in
  // a large n; fall back to the incrementally tracked value there.
  res.energy = res.minimizer.support.size() <= opts.dense_limit
                   ? energy(res.minimizer, d)
                   : sol.energy;
  res.capacity = 1.0 / res.energy;
  return res;
}

namespace {

// Orbit of a box point under coordinate permutations and sign flips:
// identified by the sorted vector of absolute coordinates.
std::vector<int64_t> orbit_key(const Point& p) {
  std::vector<int64_t> k(p.dim);
  for (int i = 0; i < p.dim; ++i) k[size_t(i)] = p.c[i] < 0 ? -p.c[i] : p.c[i];
  std::sort(k.begin(), k.end());
  return k;
}

}  // namespace

CapacityResult ball_capacity(int64_t r, int d, const BallCapacityOptions& opts) {
  if (d <= 4) throw std::invalid_argument("ball_capacity: requires d >= 5");
  if (r < 0) throw std::invalid_argument("ball_capacity: radius must be >= 0");
  const uint64_t n_box = box_size(d, r);
  if (n_box > opts.max_box_points)
    throw std::invalid_argument("ball_capacity: box exceeds the enumeration guard");

  // Enumerate orbit representatives: nonincreasing vectors in [0,r]^d.
  std::map<std::vector<int64_t>, uint32_t> orbit_index;
  std::vector<Point> reps;
  {
    std::vector<int64_t> cur(size_t(d), 0);
    while (true) {
      std::vector<int64_t> key = cur;
      std::sort(key.begin(), key.end());
      if (!orbit_index.count(key)) {
        const uint32_t idx = uint32_t(reps.size());
        orbit_index.emplace(key, idx);
        std::vector<int64_t> desc = key;
        std::reverse(desc.begin(), desc.end());
        reps.push_back(Point::of(desc));
      }
      // Odometer over nondecreasing vectors only (cur[i] <= cur[i+1]) to
      // enumerate each multiset once.
      int i = d - 1;
      while (i >= 0 && cur[size_t(i)] == r) --i;
      if (i < 0) break;
      ++cur[size_t(i)];
      for (int j = i + 1; j < d; ++j) cur[size_t(j)] = cur[size_t(i)];
    }
  }
  const size_t m = reps.size();

  // One pass over the box accumulates T[i][o] = sum over orbit o of
  // G(rep_i, y); orbit sizes come along for free.
  std::vector<double> T(m * m, 0.0);
  std::vector<uint64_t> orbit_size(m, 0);
  {
    Point cur = Point::zero(d);
    for (int i = 0; i < d; ++i) cur.c[i] = -r;
    while (true) {
      std::vector<int64_t> key = orbit_key(cur);
      const uint32_t o = orbit_index.at(key);
      ++orbit_size[o];
      for (size_t i = 0; i < m; ++i) T[i * m + o] += riesz_kernel(reps[i], cur, d);
      int i = d - 1;
      while (i >= 0 && cur.c[i] == r) {
        cur.c[i] = -r;
        --i;
      }
      if (i < 0) break;
      ++cur.c[i];
    }
  }

  // Energy of an orbit-uniform measure with orbit masses w:
  //   E(w) = sum_{o1,o2} w_{o1} w_{o2} T[o1][o2] / |o2|.
  // Mathematically symmetric; averaged to clean up floating-point noise.
  std::vector<double> M(m * m);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < m; ++j) M[i * m + j] = T[i * m + j] / double(orbit_size[j]);
  }
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = i + 1; j < m; ++j) {
      const double avg = 0.5 * (M[i * m + j] + M[j * m + i]);
      M[i * m + j] = avg;
      M[j * m + i] = avg;
    }
  }

  KernelOp G(std::move(M), m);
  SimplexSolution sol = minimize_energy(G, opts.tol, opts.max_iterations);
  renormalize(sol);

  CapacityResult res;
  res.energy = sol.energy;
  res.capacity = 1.0 / sol.energy;
  res.iterations = sol.iterations;
  res.converged = sol.converged;

  if (n_box <= opts.expand_limit) {
    // Expand the orbit measure onto the full box.
    res.minimizer.support.reserve(n_box);
    res.minimizer.weights.reserve(n_box);
    for (const Point& y : box_points(Point::zero(d), r, opts.expand_limit)) {
      const uint32_t o = orbit_index.at(orbit_key(y));
      res.minimizer.support.push_back(y);
      res.minimizer.weights.push_back(sol.w[o] / double(orbit_size[o]));
    }
    res.energy = energy(res.minimizer, d);
    res.capacity = 1.0 / res.energy;
  } else {
    res.minimizer.support = reps;
    res.minimizer.weights = sol.w;
    res.minimizer_multiplicity = orbit_size;
  }
  return res;
}

}  // namespace percap
