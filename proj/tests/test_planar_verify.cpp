#include <doctest.h>

#include <cmath>

#include "vortexlab/errors.hpp"
#include "vortexlab/planar.hpp"
#include "vortexlab/radial.hpp"
#include "vortexlab/verify.hpp"

using namespace vortexlab;

namespace {

const ModelParams kSym{2, 1.0, 1.0, 1.0, true};

PlanarSolution small_solve(InitialGuess init, int n = 64) {
  PlanarOptions o;
  o.init = init;
  return solve_planar(kSym, PlanarGrid::make(10.0, n), o);
}

}  // namespace

TEST_CASE("planar vacuum converges immediately") {
  const ModelParams vac{2, 0.0, 0.0, 1.0, false};
  const PlanarSolution s = solve_planar(vac, PlanarGrid::make(10.0, 32));
  CHECK(s.converged);
  CHECK(s.iterations <= 2);
  CHECK(s.final_energy == 0.0);
  for (const auto& v : extract_radial_slice(s)) {
    CHECK(v.u1 == 0.0);
    CHECK(v.u2 == 0.0);
  }
}

TEST_CASE("planar solve lowers the energy monotonically and meets the tolerance") {
  const PlanarSolution s = small_solve(InitialGuess::Zero);
  CHECK(s.converged);
  CHECK(s.final_gradient_norm < 1e-8);
  for (std::size_t k = 1; k < s.energy_history.size(); ++k)
    CHECK(s.energy_history[k] <= s.energy_history[k - 1]);
  double umax = -INFINITY;
  for (double v : s.u1) umax = std::max(umax, v);
  CHECK(umax <= 0.05);
  for (double e : s.E2) REQUIRE(e > -1.0);
}

TEST_CASE("planar solution does not depend on the starting field") {
  const PlanarSolution a = small_solve(InitialGuess::Zero, 48);
  const PlanarSolution b = small_solve(InitialGuess::Random, 48);
  CHECK(uniqueness_difference(a, b) < 1e-8);
}

TEST_CASE("iteration limit raises non-convergence with the last iterate") {
  PlanarOptions o;
  o.max_iter = 1;
  try {
    solve_planar(kSym, PlanarGrid::make(10.0, 48), o);
    FAIL("expected PlanarNonConvergence");
  } catch (const PlanarNonConvergence& e) {
    CHECK(e.last_iterate().iterations == 1);
    CHECK_FALSE(e.last_iterate().converged);
    CHECK(e.last_residual() > 1e-8);
  }
}

TEST_CASE("radial slice: boundary value and agreement with the radial solver") {
  // An odd node count puts a grid row on the axis, so the last sample is a boundary node.
  const PlanarSolution s = small_solve(InitialGuess::Zero, 97);
  const auto slice = extract_radial_slice(s);
  REQUIRE_FALSE(slice.empty());
  CHECK(slice.back().r == doctest::Approx(10.0));
  CHECK(std::abs(slice.back().u1) < 1e-15);
  CHECK(std::abs(slice.back().u2) < 1e-15);
  for (std::size_t k = 1; k < slice.size(); ++k) REQUIRE(slice[k].r > slice[k - 1].r);

  const RadialSolution r = solve_radial_P(kSym, coupling_matrix(kSym), BackgroundField(kSym),
                                          make_radial_mesh(1e-4, 30.0, 4000), 1e-10);
  const CrossValidationRecord cv = cross_validate(r, s);
  REQUIRE(cv.sup_difference);
  CHECK(*cv.sup_difference < 2e-2);
  CHECK(cv.window.r_b == doctest::Approx(5.0));

  RadialSolution other = r;
  other.params.N = 3;
  CHECK_THROWS_AS(cross_validate(other, s), InvalidParameter);
}

TEST_CASE("quadratures integrate a Gaussian") {
  // E1 = -exp(-r^2) integrates to -pi over the plane; E2 = -2 exp(-r^2) to -2 pi.
  RadialSolution rs;
  rs.mesh = make_radial_mesh(1e-4, 30.0, 4000);
  for (double r : rs.mesh.nodes) {
    rs.E1.push_back(-std::exp(-r * r));
    rs.E2.push_back(-2.0 * std::exp(-r * r));
  }
  const Vec2 ri = radial_component_integrals(rs);
  CHECK(ri.x1 == doctest::Approx(-kPi).epsilon(1e-5));
  CHECK(ri.x2 == doctest::Approx(-2.0 * kPi).epsilon(1e-5));

  PlanarSolution ps;
  ps.grid = PlanarGrid::make(8.0, 201);
  ps.E1.resize(ps.grid.size());
  ps.E2.resize(ps.grid.size());
  for (int j = 0; j < 201; ++j)
    for (int i = 0; i < 201; ++i) {
      const double r2 = ps.grid.coord(i) * ps.grid.coord(i) + ps.grid.coord(j) * ps.grid.coord(j);
      ps.E1[ps.grid.index(i, j)] = -std::exp(-r2);
      ps.E2[ps.grid.index(i, j)] = 0.0;
    }
  const Vec2 pi = planar_component_integrals(ps);
  CHECK(pi.x1 == doctest::Approx(-kPi).epsilon(1e-10));
  CHECK(pi.x2 == 0.0);
}

TEST_CASE("flux records and the zero-target scale") {
  const CouplingData cd = coupling_matrix(2);
  const SpectralConstants sc = spectral_constants(cd);
  const Vec2 exact = component_flux_targets(kSym, cd);
  const FluxReport fr = flux_report_from_components(kSym, cd, sc, exact);
  CHECK(fr.first.abs_error < 1e-12);
  CHECK(fr.second.abs_error < 1e-12);

  const Vec2 off{exact.x1 * 1.01, exact.x2};
  const FluxReport g = flux_report_from_components(kSym, cd, sc, off);
  CHECK(g.second.target == 0.0);
  CHECK(g.second.rel_error == doctest::Approx(g.second.abs_error / (16.0 * kPi)));
  CHECK(g.first.rel_error == doctest::Approx(g.first.abs_error / (16.0 * kPi)));
  const ComponentFluxReport cf = component_flux(kSym, cd, off);
  CHECK(cf.e1.rel_error == doctest::Approx(0.01).epsilon(1e-10));
  CHECK(cf.e2.abs_error == 0.0);
}

TEST_CASE("verification of a radial solution") {
  const RadialSolution r = solve_radial_P(kSym, coupling_matrix(kSym), BackgroundField(kSym),
                                          make_radial_mesh(1e-4, 30.0, 4000), 1e-10);
  const VerificationReport rep = verify_radial(r);
  CHECK(rep.params == kSym);
  CHECK(rep.constants.lambda3 == doctest::Approx(2.0));
  CHECK(rep.flux.first.rel_error < 1e-4);
  REQUIRE(rep.residuals.pde_sup);
  CHECK(*rep.residuals.pde_sup < 1e-8);
  CHECK_FALSE(rep.residuals.ode_sup);
  REQUIRE(rep.decay.size() == 4u);
  for (const auto& d : rep.decay) {
    CHECK(d.linearized_rate == doctest::Approx(1.0));
    CHECK(d.linearized_rate_fast == doctest::Approx(2.0));
    if (d.fitted_rate) CHECK(*d.fitted_rate > 0.0);
  }
}

TEST_CASE("source quadrature over the box") {
  // Integral of phi_i over the plane is 4 pi n_i; the box misses a tail of order tau / L^2.
  const ModelParams p{2, 2.0, 1.0, 1.0, true};
  const BackgroundField bg(p);
  const PlanarGrid grid = PlanarGrid::make(15.0, 256);
  const SampledBackground sb = SampledBackground::sample(grid, bg);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    s1 += grid.cell_area() * sb.phi1[k];
    s2 += grid.cell_area() * sb.phi2[k];
  }
  CHECK(s1 == doctest::Approx(4.0 * kPi * 2.0).epsilon(5e-3));
  CHECK(s2 == doctest::Approx(4.0 * kPi * 1.0).epsilon(5e-3));
  CHECK(bg.phi_disc_integral(0, 15.0) == doctest::Approx(8.0 * kPi).epsilon(5e-3));
}

TEST_CASE("flux targets of an asymmetric pair") {
  const ModelParams p{2, 2.0, 1.0, 1.0, true};
  const FluxPair t = flux_targets(p, spectral_constants(coupling_matrix(2)));
  CHECK(t.first == doctest::Approx(-24.0 * kPi).epsilon(1e-14));
  CHECK(t.second == doctest::Approx(-8.0 * kPi).epsilon(1e-14));
}

TEST_CASE("planar residual is small at convergence and sees a single-node kick") {
  const CouplingData cd = coupling_matrix(kSym);
  const BackgroundField bg(kSym);
  PlanarSolution s = small_solve(InitialGuess::Zero, 64);
  const double base = pde_residual(s, cd, bg);
  CHECK(base < 1e-7);
  const std::size_t k = s.grid.index(20, 31);
  FieldPair w = s.w;
  w.w1[k] += 1e-3;  // P1 and P2 both move by the L-map of (1e-3, 0)
  const PlanarSolution kicked = make_planar_solution(kSym, s.grid, w);
  const double jump = pde_residual(kicked, cd, bg);
  const double h2 = s.grid.cell_area();
  CHECK(jump == doctest::Approx(1e-3 * 4.0 / h2).epsilon(0.05));
}
