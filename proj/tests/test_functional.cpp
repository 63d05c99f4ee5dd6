#include <doctest.h>

#include <cmath>
#include <random>

#include "vortexlab/errors.hpp"
#include "vortexlab/functional.hpp"
#include "vortexlab/parallel.hpp"

using namespace vortexlab;

namespace {

const ModelParams kParams{2, 1.0, 1.0, 1.0, true};

FieldPair random_interior(const DiscreteFunctional& f, unsigned seed, double amp) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amp, amp);
  FieldPair fp = FieldPair::zeros(f.grid());
  for (auto& v : fp.w1) v = dist(rng);
  for (auto& v : fp.w2) v = dist(rng);
  f.apply_boundary(fp);
  return fp;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a[k] - b[k]));
  return s;
}

}  // namespace

TEST_CASE("grid geometry") {
  const PlanarGrid even = PlanarGrid::make(15.0, 512);
  CHECK(even.h == doctest::Approx(30.0 / 511.0).epsilon(1e-15));
  CHECK(even.origin_offset);
  CHECK(even.coord(0) == -15.0);
  CHECK(even.coord(511) == doctest::Approx(15.0).epsilon(1e-14));
  CHECK(even.coord(255) == doctest::Approx(-0.5 * even.h).epsilon(1e-12));
  const PlanarGrid odd = PlanarGrid::make(15.0, 33);
  CHECK_FALSE(odd.origin_offset);
  CHECK(std::abs(odd.coord(16)) < 1e-14);
  CHECK(odd.interior_count() == 31u * 31u);
  CHECK_THROWS_AS(PlanarGrid::make(15.0, 15), InvalidParameter);
  CHECK_THROWS_AS(PlanarGrid::make(0.0, 64), InvalidParameter);
}

TEST_CASE("boundary data is u = 0 by default and w = 0 on request") {
  const PlanarGrid grid = PlanarGrid::make(6.0, 20);
  const BackgroundField bg(kParams);
  const CouplingData cd = coupling_matrix(kParams);
  const DiscreteFunctional topo(grid, bg, cd);
  const FieldPair w = topo.initial_field();
  const std::size_t corner = grid.index(0, 0), edge = grid.index(0, 10);
  for (std::size_t k : {corner, edge}) {
    const int i = static_cast<int>(k % 20), j = static_cast<int>(k / 20);
    const double r2 = grid.coord(i) * grid.coord(i) + grid.coord(j) * grid.coord(j);
    const double P1 = w.w1[k];
    const double P2 = cd.gamma * w.w1[k] + w.w2[k];
    CHECK(P1 + bg.u0(0, r2) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::abs(P2 + bg.u0(1, r2)) < 1e-15);
  }
  CHECK(w.w1[grid.index(5, 5)] == 0.0);
  const DiscreteFunctional zero(grid, bg, cd, {300.0, BoundaryCondition::Zero});
  const FieldPair z = zero.initial_field();
  CHECK(sup_diff(z.w1, std::vector<double>(grid.size(), 0.0)) == 0.0);
}

TEST_CASE("parallel kernels agree with the serial reference") {
  for (int n : {33, 64}) {
    const PlanarGrid grid = PlanarGrid::make(10.0, n);
    const DiscreteFunctional f(grid, BackgroundField(kParams), coupling_matrix(kParams));
    const FieldPair w = random_interior(f, 7, 0.8);
    const FieldPair d = random_interior(f, 8, 1.0);
    const double e = f.energy(w);
    CHECK(std::abs(e - reference::energy(f, w)) < 1e-12 * std::abs(e));
    const FieldPair g = f.gradient(w), gr = reference::gradient(f, w);
    CHECK(sup_diff(g.w1, gr.w1) < 1e-12);
    CHECK(sup_diff(g.w2, gr.w2) < 1e-12);
    const FieldPair hv = f.hessian_apply(w, d), hr = reference::hessian_apply(f, w, d);
    CHECK(sup_diff(hv.w1, hr.w1) < 1e-12);
    CHECK(sup_diff(hv.w2, hr.w2) < 1e-12);
  }
}

TEST_CASE("kernel results do not depend on the thread count") {
  const PlanarGrid grid = PlanarGrid::make(10.0, 48);
  const DiscreteFunctional f(grid, BackgroundField(kParams), coupling_matrix(kParams));
  const FieldPair w = random_interior(f, 3, 0.5);
  const int saved = thread_count();
  set_thread_count(1);
  const double e1 = f.energy(w);
  const FieldPair g1 = f.gradient(w);
  set_thread_count(4);
  const double e4 = f.energy(w);
  const FieldPair g4 = f.gradient(w);
  set_thread_count(saved);
  CHECK(e1 == e4);
  CHECK(g1.w1 == g4.w1);
  CHECK(g1.w2 == g4.w2);
  CHECK_THROWS_AS(set_thread_count(0), InvalidParameter);
}

TEST_CASE("Hessian action matches differences of the gradient") {
  const PlanarGrid grid = PlanarGrid::make(8.0, 24);
  const DiscreteFunctional f(grid, BackgroundField(kParams), coupling_matrix(kParams));
  const FieldPair w = random_interior(f, 11, 0.5);
  FieldPair d = random_interior(f, 12, 1.0);
  const FieldPair hd = f.hessian_apply(w, d);
  constexpr double t = 1e-5;
  FieldPair wp = w, wm = w;
  for (int j = 0; j < grid.points_per_side; ++j)
    for (int i = 0; i < grid.points_per_side; ++i) {
      const std::size_t k = grid.index(i, j);
      if (!grid.is_interior(i, j)) continue;
      wp.w1[k] += t * d.w1[k];
      wp.w2[k] += t * d.w2[k];
      wm.w1[k] -= t * d.w1[k];
      wm.w2[k] -= t * d.w2[k];
    }
  const FieldPair gp = f.gradient(wp), gm = f.gradient(wm);
  double err = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    err = std::max(err, std::abs((gp.w1[k] - gm.w1[k]) / (2 * t) - hd.w1[k]));
    err = std::max(err, std::abs((gp.w2[k] - gm.w2[k]) / (2 * t) - hd.w2[k]));
    scale = std::max({scale, std::abs(hd.w1[k]), std::abs(hd.w2[k])});
  }
  CHECK(err < 1e-7 * scale);
}

TEST_CASE("Hessian diagonal matches unit-vector probes") {
  const PlanarGrid grid = PlanarGrid::make(8.0, 17);
  const DiscreteFunctional f(grid, BackgroundField(kParams), coupling_matrix(kParams));
  const FieldPair w = random_interior(f, 5, 0.5);
  const FieldPair diag = f.hessian_diagonal(f.local_hessian(w));
  for (auto [i, j] : {std::pair{1, 1}, {8, 8}, {3, 12}, {15, 15}}) {
    const std::size_t k = grid.index(i, j);
    FieldPair e = FieldPair::zeros(grid);
    e.w1[k] = 1.0;
    CHECK(f.hessian_apply(w, e).w1[k] == doctest::Approx(diag.w1[k]).epsilon(1e-13));
    e.w1[k] = 0.0;
    e.w2[k] = 1.0;
    CHECK(f.hessian_apply(w, e).w2[k] == doctest::Approx(diag.w2[k]).epsilon(1e-13));
  }
}

TEST_CASE("energy change splits into a linear part and a nonnegative remainder") {
  const PlanarGrid grid = PlanarGrid::make(8.0, 24);
  const DiscreteFunctional f(grid, BackgroundField(kParams), coupling_matrix(kParams));
  const FieldPair w = random_interior(f, 21, 0.5);
  FieldPair d = random_interior(f, 22, 1.0);
  const FieldPair g = f.gradient(w);
  double gd = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) gd += g.w1[k] * d.w1[k] + g.w2[k] * d.w2[k];
  for (double t : {1e-6, 1e-3, 0.1, 0.7}) {
    FieldPair moved = w;
    for (int j = 1; j < grid.points_per_side - 1; ++j)
      for (int i = 1; i < grid.points_per_side - 1; ++i) {
        const std::size_t k = grid.index(i, j);
        moved.w1[k] += t * d.w1[k];
        moved.w2[k] += t * d.w2[k];
      }
    const double direct = f.energy(moved) - f.energy(w);
    const double change = f.energy_change(w, d, t);
    CHECK(std::abs(change - direct) < 1e-10 * (std::abs(f.energy(w)) + 1.0));
    const double rem = f.energy_change_remainder(w, d, t);
    CHECK(rem >= 0.0);
    CHECK(change == doctest::Approx(t * gd + rem).epsilon(1e-9));
  }
}

TEST_CASE("potential density vanishes with zero slope at the vacuum") {
  const FunctionalCoefficients fc = functional_coefficients(coupling_matrix(3));
  // Far from the vortex (e^{2u0} = 1, no sources) w = 0 is the minimizer.
  const double at0 = potential_density(0.0, 0.0, 1.0, 1.0, 0.0, 0.0, fc);
  CHECK(std::abs(at0) < 1e-15);
  const double s = 1e-6;
  const double d1 = (potential_density(s, 0, 1, 1, 0, 0, fc) - potential_density(-s, 0, 1, 1, 0, 0, fc)) / (2 * s);
  const double d2 = (potential_density(0, s, 1, 1, 0, 0, fc) - potential_density(0, -s, 1, 1, 0, 0, fc)) / (2 * s);
  CHECK(std::abs(d1) < 1e-8);
  CHECK(std::abs(d2) < 1e-8);
  CHECK(fc.a_mix == doctest::Approx(coupling_matrix(3).gamma).epsilon(1e-15));
}

TEST_CASE("exponent cap is enforced") {
  const PlanarGrid grid = PlanarGrid::make(8.0, 17);
  const DiscreteFunctional f(grid, BackgroundField(kParams), coupling_matrix(kParams), {5.0});
  FieldPair w = f.initial_field();
  w.w1[grid.index(8, 8)] = 10.0;
  CHECK_THROWS_AS(f.energy(w), ExponentOverflow);
}

TEST_CASE("stable dot and max_abs") {
  std::vector<double> a(10000), b(10000);
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] = 1.0 / (k + 1.0);
    b[k] = (k % 2 ? -1.0 : 1.0);
  }
  double naive = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) naive += a[k] * b[k];
  CHECK(stable_dot(a, b) == doctest::Approx(naive).epsilon(1e-13));
  CHECK(max_abs(std::span<const double>(b)) == 1.0);
}
