#include "vortexlab/planar.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "vortexlab/parallel.hpp"

namespace vortexlab {

namespace {

double dot(const FieldPair& a, const FieldPair& b) {
  return stable_dot(a.w1, b.w1) + stable_dot(a.w2, b.w2);
}

// y += a x over both components.
void axpy(double a, const FieldPair& x, FieldPair& y) {
  const auto n = static_cast<std::ptrdiff_t>(x.w1.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    y.w1[static_cast<std::size_t>(i)] += a * x.w1[static_cast<std::size_t>(i)];
    y.w2[static_cast<std::size_t>(i)] += a * x.w2[static_cast<std::size_t>(i)];
  }
}

// p = z + b p.
void xpby(const FieldPair& z, double b, FieldPair& p) {
  const auto n = static_cast<std::ptrdiff_t>(z.w1.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    p.w1[k] = z.w1[k] + b * p.w1[k];
    p.w2[k] = z.w2[k] + b * p.w2[k];
  }
}

void scale_into(const FieldPair& inv_diag, const FieldPair& r, FieldPair& z) {
  const auto n = static_cast<std::ptrdiff_t>(r.w1.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    z.w1[k] = inv_diag.w1[k] * r.w1[k];
    z.w2[k] = inv_diag.w2[k] * r.w2[k];
  }
}

struct CgResult {
  FieldPair d;
  int iterations = 0;
};

// Jacobi-preconditioned CG for H d = -g, stopped at ||r||_2 <= rtol ||g||_2.
CgResult newton_direction(const DiscreteFunctional& f, const LocalHessian& lh,
                          const FieldPair& g, double rtol, int max_iter) {
  const PlanarGrid& grid = f.grid();
  FieldPair inv_diag = f.hessian_diagonal(lh);
  for (auto* v : {&inv_diag.w1, &inv_diag.w2})
    for (double& x : *v) x = x > 0.0 ? 1.0 / x : 0.0;

  CgResult out;
  out.d = FieldPair::zeros(grid);
  FieldPair r = g;
  for (auto* v : {&r.w1, &r.w2})
    for (double& x : *v) x = -x;
  FieldPair z = FieldPair::zeros(grid);
  scale_into(inv_diag, r, z);
  FieldPair p = z;
  FieldPair hp = FieldPair::zeros(grid);
  double rz = dot(r, z);
  const double stop = rtol * std::sqrt(dot(g, g));
  for (int it = 0; it < max_iter; ++it) {
    if (std::sqrt(dot(r, r)) <= stop) break;
    f.hessian_apply(lh, p, hp);
    const double php = dot(p, hp);
    if (!(php > 0.0)) break;
    const double a = rz / php;
    axpy(a, p, out.d);
    axpy(-a, hp, r);
    scale_into(inv_diag, r, z);
    const double rz_next = dot(r, z);
    xpby(z, rz_next / rz, p);
    rz = rz_next;
    out.iterations = it + 1;
  }
  return out;
}

}  // namespace

PlanarSolution make_planar_solution(const ModelParams& params, const PlanarGrid& grid, FieldPair w) {
  if (w.w1.size() != grid.size() || w.w2.size() != grid.size())
    throw InvalidParameter("field size does not match the grid");
  const CouplingData cd = coupling_matrix(params);
  const SampledBackground b = SampledBackground::sample(grid, BackgroundField(params));
  PlanarSolution sol;
  sol.params = params;
  sol.grid = grid;
  const std::size_t size = grid.size();
  for (auto* v : {&sol.P1, &sol.P2, &sol.u1, &sol.u2, &sol.E1, &sol.E2}) v->resize(size);
  for (std::size_t k = 0; k < size; ++k) {
    const double p1 = w.w1[k];
    const double p2 = cd.gamma * w.w1[k] + w.w2[k];
    sol.P1[k] = p1;
    sol.P2[k] = p2;
    sol.u1[k] = b.u0_1[k] + p1;
    sol.u2[k] = b.u0_2[k] + p2;
    sol.E1[k] = b.e2u0_1[k] * std::expm1(2.0 * p1) + b.e2u0m1_1[k];
    sol.E2[k] = b.e2u0_2[k] * std::expm1(2.0 * p2) + b.e2u0m1_2[k];
  }
  sol.w = std::move(w);
  return sol;
}

PlanarSolution solve_planar(const ModelParams& params, const PlanarGrid& grid,
                            const PlanarOptions& options) {
  params.validate();
  if (grid.points_per_side < 16 || !(grid.h > 0.0))
    throw InvalidParameter("planar grid is not initialized");
  if (!(options.tol > 0.0)) throw InvalidParameter("tolerance must be positive");
  if (options.max_iter < 1) throw InvalidParameter("max_iter must be >= 1");
  if (options.max_cg_iter < 1) throw InvalidParameter("max_cg_iter must be >= 1");

  const CouplingData cd = coupling_matrix(params);
  const DiscreteFunctional f(grid, BackgroundField(params), cd, options.functional);

  FieldPair w = f.initial_field();
  if (options.init == InitialGuess::Random) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> dist(-options.random_amplitude, options.random_amplitude);
    const int n = grid.points_per_side;
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i) {
        const std::size_t k = grid.index(i, j);
        w.w1[k] = dist(rng);
        w.w2[k] = dist(rng);
      }
  }

  double energy = 0.0;
  FieldPair g;
  try {
    energy = f.energy(w);
    g = f.gradient(w);
  } catch (const ExponentOverflow& e) {
    throw ExponentOverflow(std::string(e.what()) +
                               " at the initial field; use a smaller initial amplitude or a larger grid",
                           e.argument());
  }

  std::vector<double> history{energy};
  int cg_total = 0;
  int it = 0;
  double gnorm = f.residual_sup(g);
  constexpr double kArmijo = 1e-4;
  while (gnorm >= options.tol) {
    if (it >= options.max_iter) {
      auto last = std::make_shared<PlanarSolution>(make_planar_solution(params, grid, w));
      last->iterations = it;
      last->cg_iterations = cg_total;
      last->final_gradient_norm = gnorm;
      last->final_energy = energy;
      last->energy_history = history;
      throw PlanarNonConvergence("planar Newton-CG did not reach tolerance after " +
                                     std::to_string(options.max_iter) + " iterations",
                                 std::move(last));
    }
    const LocalHessian lh = f.local_hessian(w);
    const double forcing = std::min(0.5, std::sqrt(gnorm));
    CgResult cg = newton_direction(f, lh, g, forcing, options.max_cg_iter);
    cg_total += cg.iterations;
    FieldPair& d = cg.d;
    double gd = dot(g, d);
    if (!(gd < 0.0)) {
      d = g;
      for (auto* v : {&d.w1, &d.w2})
        for (double& x : *v) x = -x;
      gd = -dot(g, g);
    }

    // Backtracking on the exact split  dE = t g.d + Q(t),  Q >= 0.
    double t = 1.0;
    double change = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      double q = 0.0;
      try {
        q = f.energy_change_remainder(w, d, t);
      } catch (const ExponentOverflow&) {
        t *= 0.5;
        continue;
      }
      if (q <= (1.0 - kArmijo) * t * -gd) {
        change = t * gd + q;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++it;
    if (!accepted)
      throw NonConvergence("planar line search failed to decrease the energy", it, gnorm);
    axpy(t, d, w);
    energy += change;
    history.push_back(energy);
    g = f.gradient(w);
    gnorm = f.residual_sup(g);
  }

  PlanarSolution sol = make_planar_solution(params, grid, std::move(w));
  sol.converged = true;
  sol.iterations = it;
  sol.cg_iterations = cg_total;
  sol.final_gradient_norm = gnorm;
  sol.final_energy = f.energy(sol.w);
  sol.energy_history = std::move(history);
  return sol;
}

std::vector<RadialSample> extract_radial_slice(const PlanarSolution& sol) {
  const PlanarGrid& grid = sol.grid;
  const int n = grid.points_per_side;
  const BackgroundField bg(sol.params);
  std::vector<RadialSample> out;
  const int first = n / 2;  // first node with x > 0 (even n) or x = 0 (odd n)
  for (int i = first; i < n; ++i) {
    const double x = grid.coord(i);
    if (!(x > 0.0)) continue;
    double p1, p2;
    if (grid.origin_offset) {
      const std::size_t lo = grid.index(i, n / 2 - 1);
      const std::size_t hi = grid.index(i, n / 2);
      p1 = 0.5 * (sol.P1[lo] + sol.P1[hi]);
      p2 = 0.5 * (sol.P2[lo] + sol.P2[hi]);
    } else {
      const std::size_t k = grid.index(i, n / 2);
      p1 = sol.P1[k];
      p2 = sol.P2[k];
    }
    RadialSample s;
    s.r = x;
    s.u1 = bg.u0(0, x * x) + p1;
    s.u2 = bg.u0(1, x * x) + p2;
    out.push_back(s);
  }
  return out;
}

}  // namespace vortexlab
